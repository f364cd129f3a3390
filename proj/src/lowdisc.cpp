#include "wqmc/lowdisc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <sstream>
#include <string>

#include "wqmc/errors.hpp"

namespace wqmc {

namespace {

// new-joe-kuo-6.21201, dimensions 2-16.
constexpr std::string_view kDirectionTable = R"(# Sobol' direction numbers (Joe & Kuo, new-joe-kuo-6.21201), dimensions 2-16.
# d  s  a   m_1 ... m_s
2   1   0   1
3   2   1   1 3
4   3   1   1 3 1
5   3   2   1 1 1
6   4   1   1 1 3 3
7   4   4   1 3 5 13
8   5   2   1 1 5 5 17
9   5   4   1 1 5 5 5
10  5   7   1 1 7 11 19
11  5   11  1 1 5 1 1
12  5   13  1 1 1 3 11
13  5   14  1 3 5 5 31
14  6   1   1 3 3 9 7 49
15  6   13  1 1 1 15 21 21
16  6   16  1 3 1 13 27 49
)";

void check_precision(int precision) {
  if (precision < 1 || precision > 63) {
    throw ParameterError("precision must lie in [1, 63], got " + std::to_string(precision));
  }
}

struct TableRow {
  int dim;
  int degree;
  std::uint64_t coeff;
  std::vector<std::uint64_t> initial;
};

std::vector<std::uint64_t> expand_direction_numbers(const TableRow& row, int precision) {
  const int s = row.degree;
  std::vector<std::uint64_t> m(static_cast<std::size_t>(precision));
  for (int k = 0; k < precision; ++k) {
    if (k < s) {
      m[k] = row.initial[k];
      continue;
    }
    std::uint64_t v = m[k - s] ^ (m[k - s] << s);
    for (int i = 1; i < s; ++i) {
      if ((row.coeff >> (s - 1 - i)) & 1U) v ^= m[k - i] << i;
    }
    m[k] = v;
  }
  std::vector<std::uint64_t> columns(m.size());
  for (int k = 0; k < precision; ++k) columns[k] = m[k] << (precision - 1 - k);
  return columns;
}

std::vector<TableRow> parse_table(std::istream& source) {
  std::vector<TableRow> rows;
  std::string line;
  int line_no = 0;
  int expected = 2;
  while (std::getline(source, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream in(line);
    std::vector<long long> tokens;
    std::string tok;
    while (in >> tok) {
      try {
        std::size_t used = 0;
        long long v = std::stoll(tok, &used);
        if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
        tokens.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": malformed token '" + tok + "'");
      }
    }
    if (tokens.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (tokens.size() < 3) throw ParseError(where + "expected 'd s a m_1 ... m_s'");
    const auto dim = static_cast<int>(tokens[0]);
    const auto degree = static_cast<int>(tokens[1]);
    if (dim == 1 && rows.empty() && expected == 2) {
      if (degree != 0 || tokens.size() != 3) throw ParseError(where + "dimension 1 is the identity and takes no direction numbers");
      continue;
    }
    if (dim != expected) {
      throw ParseError(where + "dimension gap: expected dimension " + std::to_string(expected) + ", found " +
                       std::to_string(dim));
    }
    if (degree < 1 || degree > 62) throw ParseError(where + "polynomial degree out of range");
    if (tokens.size() != static_cast<std::size_t>(degree) + 3) {
      throw ParseError(where + "polynomial degree " + std::to_string(degree) + " needs " + std::to_string(degree) +
                       " initial direction numbers, found " + std::to_string(tokens.size() - 3));
    }
    TableRow row{dim, degree, static_cast<std::uint64_t>(tokens[2]), {}};
    if (degree > 1 && row.coeff >= (std::uint64_t{1} << (degree - 1))) {
      throw ParseError(where + "polynomial coefficient does not fit the degree");
    }
    if (degree == 1 && row.coeff != 0) throw ParseError(where + "degree-1 polynomial must have coefficient 0");
    for (int i = 0; i < degree; ++i) {
      const auto mi = static_cast<std::uint64_t>(tokens[3 + i]);
      if ((mi & 1U) == 0 || mi >= (std::uint64_t{1} << (i + 1))) {
        throw ParseError(where + "direction number m_" + std::to_string(i + 1) + " must be odd and below 2^" +
                         std::to_string(i + 1));
      }
      row.initial.push_back(mi);
    }
    rows.push_back(std::move(row));
    ++expected;
  }
  if (source.bad()) throw ParseError("read error in direction-number table");
  return rows;
}

}  // namespace

GeneratingMatrix::GeneratingMatrix(std::vector<std::uint64_t> columns, int precision)
    : columns_(std::move(columns)), precision_(precision) {
  check_precision(precision);
  if (columns_.size() != static_cast<std::size_t>(precision)) {
    throw ParameterError("generating matrix needs exactly one column per bit of precision");
  }
  for (int k = 0; k < precision; ++k) {
    const int diag = precision - 1 - k;  // bit position of row k+1
    const std::uint64_t col = columns_[k];
    const bool on_diag = (col >> diag) & 1U;
    const bool below = (col & ((std::uint64_t{1} << diag) - 1)) != 0;
    const bool overflow = (col >> precision) != 0;
    if (!on_diag || below || overflow) {
      throw ParameterError("generating matrix column " + std::to_string(k + 1) +
                           " is not upper triangular with unit diagonal");
    }
  }
}

GeneratingMatrix GeneratingMatrix::identity(int precision) {
  check_precision(precision);
  std::vector<std::uint64_t> cols(static_cast<std::size_t>(precision));
  for (int k = 0; k < precision; ++k) cols[k] = std::uint64_t{1} << (precision - 1 - k);
  return GeneratingMatrix(std::move(cols), precision);
}

std::uint64_t GeneratingMatrix::apply(std::uint64_t n) const {
  std::uint64_t y = 0;
  for (std::size_t k = 0; n != 0; ++k, n >>= 1) {
    if (n & 1U) y ^= columns_[k];
  }
  return y;
}

DigitalSequence::DigitalSequence(std::vector<GeneratingMatrix> matrices) : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw ParameterError("digital sequence needs at least one dimension");
  precision_ = matrices_.front().precision();
  for (const auto& m : matrices_) {
    if (m.precision() != precision_) throw ParameterError("all generating matrices must share one precision");
  }
  scale_ = std::ldexp(1.0, -precision_);
  prefix_.reserve(matrices_.size());
  for (const auto& m : matrices_) {
    std::vector<std::uint64_t> p(static_cast<std::size_t>(precision_));
    std::uint64_t acc = 0;
    for (int b = 0; b < precision_; ++b) {
      acc ^= m.column(b);
      p[b] = acc;
    }
    prefix_.push_back(std::move(p));
  }
}

DigitalSequence DigitalSequence::leading(std::size_t s) const {
  if (s == 0 || s > dim()) throw ParameterError("requested dimension exceeds the sequence dimension");
  return DigitalSequence(std::vector<GeneratingMatrix>(matrices_.begin(), matrices_.begin() + s));
}

void DigitalSequence::check_range(std::uint64_t start, std::uint64_t count) const {
  const std::uint64_t limit = std::uint64_t{1} << precision_;
  if (start >= limit || count > limit - start) {
    throw IndexOverflowError("sequence index beyond 2^" + std::to_string(precision_));
  }
}

UnitPoint DigitalSequence::point_at(std::uint64_t n) const {
  UnitPoint p(dim());
  point_at(n, p);
  return p;
}

void DigitalSequence::point_at(std::uint64_t n, std::span<double> out) const {
  check_range(n, 1);
  for (std::size_t j = 0; j < dim(); ++j) out[j] = static_cast<double>(matrices_[j].apply(n)) * scale_;
}

std::vector<UnitPoint> DigitalSequence::block(std::uint64_t start, std::uint64_t count) const {
  std::vector<double> flat(count * dim());
  block(start, count, flat);
  std::vector<UnitPoint> pts(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    pts[i].assign(flat.begin() + static_cast<std::ptrdiff_t>(i * dim()),
                  flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim()));
  }
  return pts;
}

void DigitalSequence::block(std::uint64_t start, std::uint64_t count, std::span<double> out) const {
  check_range(start, count);
  if (out.size() < count * dim()) throw ParameterError("output buffer too small for block");
  if (count == 0) return;
  Cursor c(*this, start);
  for (std::uint64_t i = 0; i < count; ++i) {
    c.coords(out.subspan(i * dim(), dim()));
    if (i + 1 < count) c.advance();
  }
}

DigitalSequence::Cursor::Cursor(const DigitalSequence& seq, std::uint64_t start)
    : seq_(&seq), index_(start), state_(seq.dim()) {
  seq.check_range(start, 1);
  for (std::size_t j = 0; j < seq.dim(); ++j) state_[j] = seq.matrices_[j].apply(start);
}

void DigitalSequence::Cursor::coords(std::span<double> out) const {
  for (std::size_t j = 0; j < state_.size(); ++j) out[j] = static_cast<double>(state_[j]) * seq_->scale_;
}

void DigitalSequence::Cursor::advance() {
  const std::uint64_t next = index_ + 1;
  seq_->check_range(next, 1);
  const auto flipped = static_cast<std::size_t>(std::countr_zero(next));
  for (std::size_t j = 0; j < state_.size(); ++j) state_[j] ^= seq_->prefix_[j][flipped];
  index_ = next;
}

namespace {

// Counts points per elementary box for every shape with sum(d) == total.
bool check_shapes(std::span<const UnitPoint> points, std::size_t s, std::vector<int>& shape, std::size_t j,
                  int remaining, std::uint64_t expected) {
  if (j + 1 == s) {
    shape[j] = remaining;
    std::vector<std::uint64_t> counts(std::size_t{1} << std::accumulate(shape.begin(), shape.end(), 0), 0);
    for (const auto& p : points) {
      std::uint64_t idx = 0;
      for (std::size_t d = 0; d < s; ++d) {
        const auto cell = static_cast<std::uint64_t>(std::floor(std::ldexp(p[d], shape[d])));
        idx = (idx << shape[d]) | std::min(cell, (std::uint64_t{1} << shape[d]) - 1);
      }
      ++counts[idx];
    }
    return std::all_of(counts.begin(), counts.end(), [&](std::uint64_t c) { return c == expected; });
  }
  for (int d = 0; d <= remaining; ++d) {
    shape[j] = d;
    if (!check_shapes(points, s, shape, j + 1, remaining - d, expected)) return false;
  }
  return true;
}

}  // namespace

bool is_net(std::span<const UnitPoint> points, int m, int t) {
  if (m < 0 || m > 40 || t < 0 || t > m) throw ParameterError("is_net requires 0 <= t <= m <= 40");
  if (points.size() != (std::size_t{1} << m)) {
    throw ParameterError("is_net requires exactly 2^m points");
  }
  const std::size_t s = points.front().size();
  if (s == 0) throw ParameterError("points must have at least one coordinate");
  for (const auto& p : points) {
    if (p.size() != s) throw ParameterError("points have inconsistent dimensions");
    for (double x : p) {
      if (!(x >= 0.0 && x < 1.0)) return false;
    }
  }
  std::vector<int> shape(s, 0);
  return check_shapes(points, s, shape, 0, m - t, std::uint64_t{1} << t);
}

DigitalSequence load_direction_numbers(std::istream& source, int precision) {
  check_precision(precision);
  const auto rows = parse_table(source);
  std::vector<GeneratingMatrix> mats;
  mats.reserve(rows.size() + 1);
  mats.push_back(GeneratingMatrix::identity(precision));
  for (const auto& row : rows) {
    if (row.degree > precision) throw ParseError("polynomial degree exceeds precision in dimension " + std::to_string(row.dim));
    mats.emplace_back(expand_direction_numbers(row, precision), precision);
  }
  return DigitalSequence(std::move(mats));
}

std::string_view embedded_direction_numbers() { return kDirectionTable; }

DigitalSequence sobol(std::size_t s, int precision) {
  std::istringstream in{std::string(kDirectionTable)};
  auto full = load_direction_numbers(in, precision);
  if (s == 0 || s > full.dim()) {
    throw ParameterError("embedded table supports 1.." + std::to_string(full.dim()) + " dimensions");
  }
  return full.leading(s);
}

int sobol_t_value(std::size_t s) {
  std::istringstream in{std::string(kDirectionTable)};
  const auto rows = parse_table(in);
  if (s == 0 || s > rows.size() + 1) throw ParameterError("dimension outside the embedded table");
  int t = 0;
  for (std::size_t j = 0; j + 1 < s; ++j) t += rows[j].degree - 1;
  return t;
}

}  // namespace wqmc
