#include "wqmc/hatbasis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wqmc/errors.hpp"
#include "wqmc/summation.hpp"

namespace wqmc {

namespace {

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t j = 0; j < x.size(); ++j) os << (j ? ", " : "") << x[j];
  os << ')';
  return os.str();
}

}  // namespace

Knots1D::Knots1D(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw ParameterError("a knot vector needs at least two knots");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) throw ParameterError("knots must be finite");
    if (k > 0 && !(values_[k] > values_[k - 1])) throw ParameterError("knots must be strictly increasing");
  }
}

Knots1D Knots1D::uniform(double lower, double upper, std::size_t intervals) {
  if (intervals < 1) throw ParameterError("resolution must be at least 1");
  if (!(lower < upper)) throw ParameterError("interval must satisfy lower < upper");
  std::vector<double> v(intervals + 1);
  const double width = upper - lower;
  for (std::size_t l = 0; l < intervals; ++l) {
    v[l] = lower + static_cast<double>(l) * width / static_cast<double>(intervals);
  }
  v[intervals] = upper;
  return Knots1D(std::move(v));
}

double Knots1D::hat_mass(std::size_t k) const {
  const std::size_t last = intervals();
  if (k == 0) return 0.5 * (values_[1] - values_[0]);
  if (k == last) return 0.5 * (values_[last] - values_[last - 1]);
  return 0.5 * (values_[k + 1] - values_[k - 1]);
}

std::size_t Knots1D::cell(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  const auto pos = static_cast<std::size_t>(it - values_.begin());
  if (pos == 0) return 0;
  return std::min(pos - 1, intervals() - 1);
}

double hat_eval(const Knots1D& knots, std::size_t k, double x) {
  const std::size_t last = knots.intervals();
  if (k > last) throw ParameterError("hat index beyond the knot vector");
  const double yk = knots[k];
  if (x == yk) return 1.0;
  if (x < yk) {
    if (k == 0 || x < knots[k - 1]) return 0.0;
    return (x - knots[k - 1]) / (yk - knots[k - 1]);
  }
  if (k == last || x > knots[k + 1]) return 0.0;
  return (knots[k + 1] - x) / (knots[k + 1] - yk);
}

HatDensity1D::HatDensity1D(const Knots1D& knots, std::size_t k) {
  const std::size_t last = knots.intervals();
  if (k > last) throw ParameterError("hat index beyond the knot vector");
  peak_ = knots[k];
  if (k == 0) {
    kind_ = Kind::kLeftBoundary;
    left_ = knots[0];
    right_ = knots[1];
  } else if (k == last) {
    kind_ = Kind::kRightBoundary;
    left_ = knots[last - 1];
    right_ = knots[last];
  } else {
    kind_ = Kind::kInterior;
    left_ = knots[k - 1];
    right_ = knots[k + 1];
  }
}

double HatDensity1D::normalization() const { return 2.0 / (right_ - left_); }

double HatDensity1D::pdf(double x) const {
  if (x < left_ || x > right_) return 0.0;
  const double c = normalization();
  switch (kind_) {
    case Kind::kLeftBoundary:
      return c * (right_ - x) / (right_ - left_);
    case Kind::kRightBoundary:
      return c * (x - left_) / (right_ - left_);
    case Kind::kInterior:
      return x <= peak_ ? c * (x - left_) / (peak_ - left_) : c * (right_ - x) / (right_ - peak_);
  }
  return 0.0;
}

double HatDensity1D::cdf(double x) const {
  if (x <= left_) return 0.0;
  if (x >= right_) return 1.0;
  const double width = right_ - left_;
  switch (kind_) {
    case Kind::kLeftBoundary: {
      const double r = (right_ - x) / width;
      return 1.0 - r * r;
    }
    case Kind::kRightBoundary: {
      const double r = (x - left_) / width;
      return r * r;
    }
    case Kind::kInterior:
      if (x <= peak_) return (x - left_) * (x - left_) / ((peak_ - left_) * width);
      return 1.0 - (right_ - x) * (right_ - x) / ((right_ - peak_) * width);
  }
  return 0.0;
}

double HatDensity1D::inv_cdf(double z) const {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("inverse CDF argument outside [0,1]");
  const double width = right_ - left_;
  double x = 0.0;
  switch (kind_) {
    case Kind::kLeftBoundary:
      x = right_ - std::sqrt(1.0 - z) * width;
      break;
    case Kind::kRightBoundary:
      x = left_ + std::sqrt(z) * width;
      break;
    case Kind::kInterior: {
      const double rise = peak_ - left_;
      if (z <= rise / width) {
        x = left_ + std::sqrt(z * rise * width);
      } else {
        x = right_ - std::sqrt((1.0 - z) * (right_ - peak_) * width);
      }
      break;
    }
  }
  return std::clamp(x, left_, right_);
}

double hat_cdf(const HatDensity1D& hat, double x) { return hat.cdf(x); }
double hat_inv_cdf(const HatDensity1D& hat, double z) { return hat.inv_cdf(z); }

TensorHatSurrogate::TensorHatSurrogate(std::vector<Knots1D> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.empty()) throw ParameterError("surrogate needs at least one dimension");
  std::size_t total = 1;
  strides_.assign(knots_.size(), 1);
  for (std::size_t j = knots_.size(); j-- > 0;) {
    strides_[j] = total;
    total *= knots_[j].size();
  }
  if (values_.size() != total) throw ParameterError("coefficient array does not match the grid shape");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidDensityError("surrogate coefficients must be finite and >= 0");
    max_value_ = std::max(max_value_, v);
  }
  CompensatedSum sum;
  for (std::size_t f = 0; f < values_.size(); ++f) sum.add(weight(f));
  mass_ = sum.value();
}

std::vector<Interval> TensorHatSurrogate::box() const {
  std::vector<Interval> b;
  b.reserve(knots_.size());
  for (const auto& k : knots_) b.push_back({k.lower(), k.upper()});
  return b;
}

std::size_t TensorHatSurrogate::flat_index(std::span<const std::size_t> index) const {
  std::size_t f = 0;
  for (std::size_t j = 0; j < knots_.size(); ++j) f += index[j] * strides_[j];
  return f;
}

void TensorHatSurrogate::multi_index(std::size_t flat, std::span<std::size_t> index) const {
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    index[j] = flat / strides_[j];
    flat %= strides_[j];
  }
}

double TensorHatSurrogate::weight(std::size_t flat) const {
  double w = values_[flat];
  if (w == 0.0) return 0.0;
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    const std::size_t kj = flat / strides_[j];
    flat %= strides_[j];
    w *= knots_[j].hat_mass(kj);
  }
  return w;
}

std::vector<double> TensorHatSurrogate::weights() const {
  std::vector<double> w(values_.size());
  for (std::size_t f = 0; f < w.size(); ++f) w[f] = weight(f);
  return w;
}

double TensorHatSurrogate::eval(std::span<const double> x) const {
  const std::size_t s = knots_.size();
  if (x.size() != s) throw ParameterError("point dimension does not match the surrogate");
  std::vector<std::size_t> cell(s);
  std::vector<double> t(s);
  for (std::size_t j = 0; j < s; ++j) {
    const auto& kn = knots_[j];
    if (!(x[j] >= kn.lower() && x[j] <= kn.upper())) {
      throw DomainError("point " + format_point(x) + " lies outside the surrogate box");
    }
    cell[j] = kn.cell(x[j]);
    t[j] = (x[j] - kn[cell[j]]) / (kn[cell[j] + 1] - kn[cell[j]]);
  }
  double acc = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << s); ++corner) {
    double w = 1.0;
    std::size_t f = 0;
    for (std::size_t j = 0; j < s; ++j) {
      const bool up = (corner >> j) & 1U;
      w *= up ? t[j] : 1.0 - t[j];
      f += (cell[j] + (up ? 1 : 0)) * strides_[j];
    }
    if (w != 0.0) acc += w * values_[f];
  }
  return acc;
}

TensorHatSurrogate build_uniform_surrogate(const DensityFunction& pi, std::span<const Interval> box,
                                           std::span<const std::size_t> resolution) {
  if (box.empty() || box.size() != resolution.size()) {
    throw ParameterError("box and resolution must share a positive dimension");
  }
  std::vector<Knots1D> knots;
  knots.reserve(box.size());
  for (std::size_t j = 0; j < box.size(); ++j) knots.push_back(Knots1D::uniform(box[j].lower, box[j].upper, resolution[j]));

  std::size_t total = 1;
  for (const auto& k : knots) total *= k.size();
  std::vector<double> values(total);
  std::vector<std::size_t> idx(box.size(), 0);
  std::vector<double> point(box.size());
  for (std::size_t f = 0; f < total; ++f) {
    for (std::size_t j = 0; j < box.size(); ++j) point[j] = knots[j][idx[j]];
    const double v = pi(point);
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidDensityError("density returned " + std::to_string(v) + " at grid point " + format_point(point));
    }
    values[f] = v;
    for (std::size_t j = box.size(); j-- > 0;) {
      if (++idx[j] < knots[j].size()) break;
      idx[j] = 0;
    }
  }
  return TensorHatSurrogate(std::move(knots), std::move(values));
}

double surrogate_eval(const TensorHatSurrogate& surrogate, std::span<const double> x) { return surrogate.eval(x); }

std::vector<ProductComponent> to_mixture(const TensorHatSurrogate& surrogate) {
  if (!(surrogate.mass() > 0.0)) throw DegenerateMixtureError("surrogate has no positive coefficients");
  std::vector<ProductComponent> out;
  std::vector<std::size_t> idx(surrogate.dim());
  for (std::size_t f = 0; f < surrogate.grid_size(); ++f) {
    const double w = surrogate.weight(f);
    if (w == 0.0) continue;
    surrogate.multi_index(f, idx);
    ProductComponent comp;
    comp.weight = w;
    comp.factors.reserve(surrogate.dim());
    for (std::size_t j = 0; j < surrogate.dim(); ++j) {
      comp.factors.push_back(std::make_shared<HatDensity1D>(surrogate.knots(j), idx[j]));
    }
    out.push_back(std::move(comp));
  }
  return out;
}

HatMixture::HatMixture(const TensorHatSurrogate& surrogate) : surrogate_(&surrogate) {
  if (!(surrogate.mass() > 0.0)) throw DegenerateMixtureError("surrogate has no positive coefficients");
  for (std::size_t f = 0; f < surrogate.grid_size(); ++f) {
    const double w = surrogate.weight(f);
    if (w == 0.0) continue;
    flat_.push_back(f);
    weights_.push_back(w);
  }
  hats_.resize(surrogate.dim());
  for (std::size_t j = 0; j < surrogate.dim(); ++j) {
    const auto& kn = surrogate.knots(j);
    hats_[j].reserve(kn.size());
    for (std::size_t k = 0; k < kn.size(); ++k) hats_[j].emplace_back(kn, k);
  }
}

void HatMixture::inverse_cdf(std::size_t k, std::span<const double> u, std::span<double> x) const {
  std::size_t f = flat_[k];
  const std::size_t s = hats_.size();
  // Decode the row-major index from the last dimension backwards.
  for (std::size_t j = s; j-- > 0;) {
    const std::size_t n = hats_[j].size();
    x[j] = hats_[j][f % n].inv_cdf(u[j]);
    f /= n;
  }
}

}  // namespace wqmc
