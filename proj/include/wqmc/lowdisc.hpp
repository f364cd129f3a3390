#pragma once

// Digital (t,s)-sequences over F2 built from upper-triangular generating
// matrices, plus the elementary-interval net check.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace wqmc {

inline constexpr int kDefaultPrecision = 52;

using UnitPoint = std::vector<double>;

/// One F2 generating matrix stored column-wise. Column k (0-based) is a
/// w-bit word whose most significant bit is matrix row 1.
class GeneratingMatrix {
 public:
  /// Throws ParameterError unless the columns form an upper-triangular
  /// matrix with unit diagonal and `columns.size() == precision`.
  GeneratingMatrix(std::vector<std::uint64_t> columns, int precision = kDefaultPrecision);

  static GeneratingMatrix identity(int precision = kDefaultPrecision);

  int precision() const { return precision_; }
  std::uint64_t column(std::size_t k) const { return columns_[k]; }
  const std::vector<std::uint64_t>& columns() const { return columns_; }

  /// C · digits(n) over F2, as a w-bit word.
  std::uint64_t apply(std::uint64_t n) const;

 private:
  std::vector<std::uint64_t> columns_;
  int precision_;
};

/// An s-dimensional digital sequence. Immutable and safe to share.
class DigitalSequence {
 public:
  explicit DigitalSequence(std::vector<GeneratingMatrix> matrices);

  std::size_t dim() const { return matrices_.size(); }
  int precision() const { return precision_; }
  const GeneratingMatrix& matrix(std::size_t j) const { return matrices_[j]; }

  /// First `s` coordinates of this sequence.
  DigitalSequence leading(std::size_t s) const;

  UnitPoint point_at(std::uint64_t n) const;
  void point_at(std::uint64_t n, std::span<double> out) const;

  std::vector<UnitPoint> block(std::uint64_t start, std::uint64_t count) const;
  /// Row-major `count x dim()` output.
  void block(std::uint64_t start, std::uint64_t count, std::span<double> out) const;

  /// Walks consecutive indices with one XOR per coordinate per step.
  class Cursor {
   public:
    Cursor(const DigitalSequence& seq, std::uint64_t start);
    std::uint64_t index() const { return index_; }
    void coords(std::span<double> out) const;
    void advance();

   private:
    const DigitalSequence* seq_;
    std::uint64_t index_;
    std::vector<std::uint64_t> state_;
  };

  Cursor cursor(std::uint64_t start = 0) const { return Cursor(*this, start); }

 private:
  void check_range(std::uint64_t start, std::uint64_t count) const;

  std::vector<GeneratingMatrix> matrices_;
  int precision_;
  double scale_;
  // prefix_[j][b] = XOR of columns 0..b of matrix j; stepping n -> n+1
  // flips bits 0..ctz(n+1) of n.
  std::vector<std::vector<std::uint64_t>> prefix_;
};

/// True iff every elementary dyadic box of volume 2^(t-m) holds exactly 2^t
/// of the points. Requires `points.size() == 2^m` and `0 <= t <= m`.
bool is_net(std::span<const UnitPoint> points, int m, int t);

/// Parses a direction-number table (`d s a m_1 ... m_s` per line, `#`
/// comments). Dimension 1 is always the identity matrix.
DigitalSequence load_direction_numbers(std::istream& source, int precision = kDefaultPrecision);

/// The embedded table (dimensions 1-16).
std::string_view embedded_direction_numbers();

/// Sobol' sequence in `s <= 16` dimensions from the embedded table.
DigitalSequence sobol(std::size_t s, int precision = kDefaultPrecision);

/// Upper bound on the quality parameter t of the first `s` embedded
/// dimensions: sum over dimensions of (polynomial degree - 1).
int sobol_t_value(std::size_t s);

}  // namespace wqmc
