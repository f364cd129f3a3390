#pragma once

// QMC integration against mixtures of product densities: component
// ordering, the L_delta selection with Diophantine sample allocation, and the
// weighted estimator that pushes one digital sequence through each
// component's coordinate-wise inverse CDF.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wqmc/lowdisc.hpp"

namespace wqmc {

/// One-dimensional density on a bounded interval with closed-form CDF and
/// inverse CDF.
class Density1D {
 public:
  virtual ~Density1D() = default;
  virtual double lower() const = 0;
  virtual double upper() const = 0;
  virtual double pdf(double x) const = 0;
  virtual double cdf(double x) const = 0;
  /// Throws DomainError for z outside [0,1].
  virtual double inv_cdf(double z) const = 0;
};

class UniformDensity1D final : public Density1D {
 public:
  UniformDensity1D(double lower, double upper);
  double lower() const override { return lo_; }
  double upper() const override { return hi_; }
  double pdf(double x) const override;
  double cdf(double x) const override;
  double inv_cdf(double z) const override;

 private:
  double lo_, hi_;
};

struct ProductComponent {
  std::vector<std::shared_ptr<const Density1D>> factors;
  double weight = 0.0;
};

/// Index-addressable mixture of product densities. Implementations only need
/// to produce weights and the coordinate-wise inverse CDF of each term.
class MixtureModel {
 public:
  virtual ~MixtureModel() = default;
  virtual std::size_t dim() const = 0;
  virtual std::size_t size() const = 0;
  virtual double weight(std::size_t k) const = 0;
  /// x = Phi_k^{-1}(u) applied coordinate-wise.
  virtual void inverse_cdf(std::size_t k, std::span<const double> u, std::span<double> x) const = 0;
};

/// Adapts a list of ProductComponent to MixtureModel. Holds a view; the
/// components must outlive it.
class ComponentMixture final : public MixtureModel {
 public:
  explicit ComponentMixture(std::span<const ProductComponent> components);
  std::size_t dim() const override { return dim_; }
  std::size_t size() const override { return components_.size(); }
  double weight(std::size_t k) const override { return components_[k].weight; }
  void inverse_cdf(std::size_t k, std::span<const double> u, std::span<double> x) const override;

 private:
  std::span<const ProductComponent> components_;
  std::size_t dim_;
};

/// Result of the L_delta selection. `selected` holds original component
/// indices ordered by non-increasing weight (ties by lower index).
struct Allocation {
  std::vector<std::size_t> selected;
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  double delta = 0.0;
  std::size_t r = 0;
  /// Sum of all weights (the constant c).
  double mass = 0.0;
  /// Weight of the components left out of L_delta, relative to c.
  double dropped_mass = 0.0;
};

/// Orders components by descending weight, picks the shortest prefix whose
/// relative mass reaches 1 - delta/N, and allocates floor(N c_k / c) samples
/// to all but the last selected component, which receives the remainder.
Allocation select_and_allocate(std::span<const double> weights, std::size_t total, double delta);

/// delta = 3N / (3 + A N) with A the smallest positive relative weight.
double auto_delta(std::span<const double> weights, std::size_t total);

using Integrand = std::function<double(std::span<const double>)>;
/// Vector-valued integrand writing `out.size()` outputs for one point.
using VectorIntegrand = std::function<void(std::span<const double>, std::span<double>)>;

struct EstimateReport {
  std::vector<double> values;
  std::size_t samples = 0;
  /// Sum of c_k / c over the terms that received samples.
  double sampled_mass = 0.0;
  /// Selected terms with N_k = 0 (dropped from the sum).
  std::size_t skipped = 0;
  double skipped_mass = 0.0;
  std::vector<std::string> warnings;
};

/// (1/c) sum_{k in L_delta} (c_k/N_k) sum_{n<N_k} f(Phi_k^{-1}(y_n)), every
/// term reusing the initial segment y_0, y_1, ... of `seq`.
EstimateReport estimate(const MixtureModel& model, const Allocation& alloc, const VectorIntegrand& f,
                        std::size_t outputs, const DigitalSequence& seq);

double estimate(const MixtureModel& model, const Allocation& alloc, const Integrand& f, const DigitalSequence& seq);

double estimate(std::span<const ProductComponent> components, const Allocation& alloc, const Integrand& f,
                const DigitalSequence& seq);

struct Interval {
  double lower;
  double upper;
};

/// Product-weight form of G_{gamma,q,a,b}(N):
/// (-1 + prod_j (1 + (gamma_j 3 (b_j - a_j) log N)^q))^{1/q}.
double g_diagnostic(std::span<const double> gamma, double q, std::span<const Interval> box, double n);

}  // namespace wqmc
