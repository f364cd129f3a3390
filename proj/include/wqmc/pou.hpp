#pragma once

// Gaussian-mixture partition of unity. Each component i localizes the target
// to pi * psi_i / Psi, which is approximated by an adaptive hat surrogate in
// the component's rotated coordinates z = U_i^T (x - mu_i), truncated to the
// box [-a^(i), a^(i)]. The combined estimator stitches the per-component
// QMC sums back together.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wqmc/adaptgrid.hpp"
#include "wqmc/hatbasis.hpp"
#include "wqmc/mixture.hpp"

namespace wqmc {

inline constexpr double kDefaultTailMultiplier = 5.0;

class GaussianComponent {
 public:
  /// Eigendecomposes `sigma` (eigenvalues clamped at 1e-12 * lambda_max).
  /// With `identity_rotation` the local frame is only shifted, not rotated.
  GaussianComponent(double alpha, Eigen::VectorXd mu, Eigen::MatrixXd sigma,
                    double tail_multiplier = kDefaultTailMultiplier, bool identity_rotation = false);

  std::size_t dim() const { return static_cast<std::size_t>(mu_.size()); }
  double alpha() const { return alpha_; }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  /// Eigenvectors (columns) and clamped eigenvalues of sigma, ascending.
  const Eigen::MatrixXd& eigenvectors() const { return eigvecs_; }
  const Eigen::VectorXd& eigenvalues() const { return eigvals_; }
  /// The local frame U: the eigenvectors, or the identity.
  const Eigen::MatrixXd& rotation() const { return rotation_; }
  bool identity_rotation() const { return identity_rotation_; }
  double tail_multiplier() const { return tail_; }
  /// a * sqrt(diag(U^T Sigma U)); equals a * sqrt(lambda) for the eigenframe.
  const Eigen::VectorXd& half_widths() const { return half_widths_; }
  std::vector<Interval> local_box() const;

  /// log N(x; mu, Sigma).
  double log_pdf(std::span<const double> x) const;
  double peak() const { return std::exp(log_peak_); }
  /// sup of the Gaussian pdf outside the rotated box B_i.
  double truncation_bound() const;

  GaussianComponent with_alpha(double alpha) const;
  GaussianComponent with_tail(double tail_multiplier, bool identity_rotation) const;

 private:
  double alpha_;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd eigvecs_;
  Eigen::VectorXd eigvals_;
  Eigen::MatrixXd rotation_;
  Eigen::VectorXd half_widths_;
  // Sigma^{-1} = W W^T with W = V diag(lambda^{-1/2}).
  Eigen::MatrixXd whitening_;
  double log_peak_;
  double tail_;
  bool identity_rotation_;
};

/// z = U^T (x - mu).
void transform_to_local(const GaussianComponent& comp, std::span<const double> x, std::span<double> z);
/// x = mu + U z.
void inverse_transform(const GaussianComponent& comp, std::span<const double> z, std::span<double> x);

/// Weighted Gaussian mixture Psi = sum_i alpha_i psi_i.
class GaussianMixture {
 public:
  explicit GaussianMixture(std::vector<GaussianComponent> components);

  std::size_t size() const { return components_.size(); }
  std::size_t dim() const { return components_.front().dim(); }
  const GaussianComponent& operator[](std::size_t i) const { return components_[i]; }
  const std::vector<GaussianComponent>& components() const { return components_; }

  /// log Psi(x) via log-sum-exp.
  double log_psi(std::span<const double> x) const;
  /// psi_i(x) / Psi(x), computed in log space so it stays finite when both
  /// underflow.
  double ratio(std::size_t i, std::span<const double> x) const;
  /// All ratios at once; out.size() == size().
  void ratios(std::span<const double> x, std::span<double> out) const;

 private:
  std::vector<GaussianComponent> components_;
};

/// z -> pi(x) psi_i(x) / Psi(x) with x = T_i^{-1}(z). When `domain` is given
/// the target is zero outside it.
DensityFunction localized_target(DensityFunction pi, std::shared_ptr<const GaussianMixture> mixture, std::size_t i,
                                 std::optional<std::vector<Interval>> domain = std::nullopt);

struct EmOptions {
  std::size_t components = 1;
  std::size_t max_iterations = 200;
  /// Stop when the log-likelihood gain falls below tol * |loglik|.
  double tolerance = 1e-10;
  std::uint64_t seed = 1;
};

struct EmResult {
  std::vector<GaussianComponent> components;
  /// Mean log-likelihood per sample after each iteration.
  std::vector<double> log_likelihood;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t reseeds = 0;
};

/// EM for a Gaussian mixture on the rows of `samples`, seeded by k-means++.
/// Covariances get jitter 1e-8 * trace(Sigma) / s on the diagonal.
EmResult em_fit(const Eigen::MatrixXd& samples, const EmOptions& options);

/// Training data for em_fit: pi on a uniform lattice of cell centres, cells
/// resampled in proportion to pi, each draw jittered uniformly inside its
/// cell. Each extra pass re-lays the lattice over the bounding box of the
/// cells carrying non-negligible mass, which resolves narrow densities.
/// Deterministic given the seed.
Eigen::MatrixXd importance_resample(const DensityFunction& pi, std::span<const Interval> box,
                                    std::span<const std::size_t> cells, std::size_t count, std::uint64_t seed,
                                    std::size_t passes = 2);

struct PartitionOptions {
  double tail_multiplier = kDefaultTailMultiplier;
  bool identity_rotation = false;
  AdaptiveOptions adaptive;
  /// Zero the target outside this box (the integration domain D).
  std::optional<std::vector<Interval>> domain;
};

struct PartitionModel {
  std::shared_ptr<const GaussianMixture> mixture;
  std::vector<TensorHatSurrogate> surrogates;
  std::vector<AdaptiveReport> reports;
  /// c^(i), the surrogate mass of each localized target.
  std::vector<double> masses;
  /// c = sum_i alpha_i c^(i).
  double mass = 0.0;
  /// max_i of the Gaussian tail bound outside B_i.
  double epsilon = 0.0;
  std::vector<std::string> warnings;

  std::size_t size() const { return surrogates.size(); }
  std::size_t evaluations() const;
  /// Combined surrogate sum_i alpha_i phi_i(T_i x), zero outside every B_i.
  double eval(std::span<const double> x) const;
};

PartitionModel build_partition_model(const DensityFunction& pi, std::vector<GaussianComponent> components,
                                     const PartitionOptions& options);

struct CombinedReport {
  std::vector<double> values;
  /// Per-component sample budgets N^(i).
  std::vector<std::size_t> budgets;
  std::size_t samples = 0;
  /// Relative mass (share of c) of hat terms that got no samples, and of
  /// terms left outside L_delta.
  double skipped_mass = 0.0;
  double dropped_mass = 0.0;
  std::vector<std::string> warnings;
};

/// (1/c) sum_i alpha_i sum_k (c_k^(i)/N_k^(i)) sum_n f(T_i^{-1}(Phi_{k,i}^{-1}(y_n))).
/// Budgets N^(i) follow N alpha_i c^(i) / c by largest-remainder rounding.
CombinedReport combined_estimate(const PartitionModel& model, const VectorIntegrand& f, std::size_t outputs,
                                 std::size_t total, double delta, const DigitalSequence& seq);

/// Per-component delta chosen from the component's hat weights and budget.
using DeltaRule = std::function<double(std::span<const double> weights, std::size_t samples)>;
CombinedReport combined_estimate(const PartitionModel& model, const VectorIntegrand& f, std::size_t outputs,
                                 std::size_t total, const DeltaRule& delta, const DigitalSequence& seq);

double combined_estimate(const PartitionModel& model, const Integrand& f, std::size_t total, double delta,
                         const DigitalSequence& seq);

/// Largest-remainder rounding of total * w_i / sum(w); ties go to the lower index.
std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t total);

}  // namespace wqmc
