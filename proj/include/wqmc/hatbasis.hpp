#pragma once

// Piecewise-linear hat functions on arbitrary partitions, their normalized
// densities with closed-form CDF / inverse CDF, and tensor-product hat
// surrogates of a non-negative function on a box.

#include <cstddef>
#include <span>
#include <vector>

#include "wqmc/mixture.hpp"

namespace wqmc {

using DensityFunction = std::function<double(std::span<const double>)>;

/// Strictly increasing knots y_0 < ... < y_K with K >= 1.
class Knots1D {
 public:
  explicit Knots1D(std::vector<double> values);
  static Knots1D uniform(double lower, double upper, std::size_t intervals);

  std::size_t intervals() const { return values_.size() - 1; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double lower() const { return values_.front(); }
  double upper() const { return values_.back(); }
  const std::vector<double>& values() const { return values_; }

  /// Integral of hat k, i.e. the inverse of its normalization constant.
  double hat_mass(std::size_t k) const;
  /// Index of the cell [y_k, y_{k+1}] containing x; the last cell is closed.
  std::size_t cell(double x) const;

 private:
  std::vector<double> values_;
};

/// Value of hat k at x: 1 at y_k, linear down to 0 at the neighbouring knots,
/// 0 outside its support.
double hat_eval(const Knots1D& knots, std::size_t k, double x);

/// Hat k of a knot vector normalized to a probability density.
class HatDensity1D final : public Density1D {
 public:
  enum class Kind { kLeftBoundary, kInterior, kRightBoundary };

  HatDensity1D(const Knots1D& knots, std::size_t k);

  Kind kind() const { return kind_; }
  double lower() const override { return left_; }
  double upper() const override { return right_; }
  double peak() const { return peak_; }
  /// The normalization constant c_k (reciprocal of the hat's integral).
  double normalization() const;

  double pdf(double x) const override;
  double cdf(double x) const override;
  double inv_cdf(double z) const override;

 private:
  Kind kind_;
  double left_, peak_, right_;
};

double hat_cdf(const HatDensity1D& hat, double x);
double hat_inv_cdf(const HatDensity1D& hat, double z);

/// phi(x) = sum_k pi(y_k) prod_j h_{k_j}(x_j) on a tensor grid. Grid values
/// are stored densely in row-major order (last dimension fastest).
class TensorHatSurrogate {
 public:
  TensorHatSurrogate(std::vector<Knots1D> knots, std::vector<double> values);

  std::size_t dim() const { return knots_.size(); }
  const Knots1D& knots(std::size_t j) const { return knots_[j]; }
  const std::vector<Knots1D>& all_knots() const { return knots_; }
  std::vector<Interval> box() const;

  std::size_t grid_size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double value(std::span<const std::size_t> index) const { return values_[flat_index(index)]; }
  double max_value() const { return max_value_; }

  std::size_t flat_index(std::span<const std::size_t> index) const;
  void multi_index(std::size_t flat, std::span<std::size_t> index) const;

  /// c_k = pi(y_k) / prod_j c^{(j)}_{k_j}.
  double weight(std::size_t flat) const;
  std::vector<double> weights() const;
  /// c = sum_k c_k, the integral of the surrogate.
  double mass() const { return mass_; }

  /// Throws DomainError outside the box.
  double eval(std::span<const double> x) const;

 private:
  std::vector<Knots1D> knots_;
  std::vector<double> values_;
  std::vector<std::size_t> strides_;
  double mass_ = 0.0;
  double max_value_ = 0.0;
};

/// Interpolates `pi` on the uniform grid with m_j cells per dimension.
TensorHatSurrogate build_uniform_surrogate(const DensityFunction& pi, std::span<const Interval> box,
                                           std::span<const std::size_t> resolution);

double surrogate_eval(const TensorHatSurrogate& surrogate, std::span<const double> x);

/// One ProductComponent per grid point with positive value.
std::vector<ProductComponent> to_mixture(const TensorHatSurrogate& surrogate);

/// MixtureModel view over the positive-weight grid points of a surrogate,
/// without materializing per-component factor objects. Keeps a reference to
/// the surrogate.
class HatMixture final : public MixtureModel {
 public:
  explicit HatMixture(const TensorHatSurrogate& surrogate);

  std::size_t dim() const override { return surrogate_->dim(); }
  std::size_t size() const override { return flat_.size(); }
  double weight(std::size_t k) const override { return weights_[k]; }
  void inverse_cdf(std::size_t k, std::span<const double> u, std::span<double> x) const override;

  std::span<const double> weights() const { return weights_; }
  std::size_t grid_index(std::size_t k) const { return flat_[k]; }

 private:
  const TensorHatSurrogate* surrogate_;
  std::vector<std::size_t> flat_;
  std::vector<double> weights_;
  std::vector<std::vector<HatDensity1D>> hats_;
};

}  // namespace wqmc
