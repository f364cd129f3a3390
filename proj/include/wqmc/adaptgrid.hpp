#pragma once

// Coordinate-wise adaptive refinement of tensor hat surrogates. Each
// coordinate interval carries a refine flag; one step bisects every flagged
// interval, evaluates the density at the new grid points only, and keeps a
// bisection when the trial surrogate moved by more than a relative
// threshold somewhere in that interval's slab.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "wqmc/hatbasis.hpp"

namespace wqmc {

inline constexpr std::size_t kMaxAdaptiveDim = 8;
inline constexpr std::size_t kDefaultBudget = 1'000'000;

struct AdaptiveOptions {
  /// Keep a bisection when its indicator exceeds epsilon * (max grid value).
  double epsilon = 5e-3;
  std::size_t budget = kDefaultBudget;
  /// Initial uniform cells per dimension; empty means 2 everywhere.
  std::vector<std::size_t> initial_resolution;
};

struct AdaptiveReport {
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::vector<std::size_t> intervals;
  /// Number of intervals still flagged after each iteration.
  std::vector<std::size_t> flags_history;
  bool converged = false;
  bool budget_exceeded = false;
};

class AdaptiveState {
 public:
  /// Evaluates `pi` on the initial uniform grid with every interval flagged.
  AdaptiveState(const DensityFunction& pi, std::span<const Interval> box, const AdaptiveOptions& options);

  std::size_t dim() const { return box_.size(); }
  const std::vector<Interval>& box() const { return box_; }
  const TensorHatSurrogate& surrogate() const { return surrogate_; }
  const std::vector<std::vector<bool>>& flags() const { return flags_; }
  double epsilon() const { return epsilon_; }
  std::size_t budget() const { return budget_; }
  std::size_t evaluations() const { return evaluations_; }
  /// Distinct grid points held in the evaluation cache.
  std::size_t cached_points() const { return cache_.size(); }
  std::size_t iterations() const { return iterations_; }
  bool budget_exceeded() const { return budget_exceeded_; }
  bool any_flagged() const;
  const std::vector<std::size_t>& flags_history() const { return flags_history_; }
  AdaptiveReport report() const;

 private:
  friend AdaptiveState refine_once(AdaptiveState state, const DensityFunction& pi);

  using Key = std::array<std::uint64_t, kMaxAdaptiveDim>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  double coordinate(std::size_t j, std::uint64_t tick) const;
  double evaluate(const DensityFunction& pi, const Key& key, std::span<double> point);
  void rebuild_surrogate();

  std::vector<Interval> box_;
  std::vector<std::uint64_t> span_ticks_;
  std::vector<std::vector<std::uint64_t>> ticks_;
  std::vector<std::vector<bool>> flags_;
  std::unordered_map<Key, double, KeyHash> cache_;
  TensorHatSurrogate surrogate_;
  double epsilon_;
  std::size_t budget_;
  std::size_t evaluations_ = 0;
  std::size_t iterations_ = 0;
  bool budget_exceeded_ = false;
  std::vector<std::size_t> flags_history_;
};

/// One refinement sweep. A state with no flags, or one that already hit its
/// budget, is returned unchanged; a sweep that would exceed the budget sets
/// the budget marker and leaves the grid untouched.
AdaptiveState refine_once(AdaptiveState state, const DensityFunction& pi);

struct AdaptiveResult {
  TensorHatSurrogate surrogate;
  AdaptiveReport report;
};

/// Refines until no interval is flagged or the evaluation budget is hit.
AdaptiveResult run_to_convergence(const DensityFunction& pi, std::span<const Interval> box,
                                  const AdaptiveOptions& options);

}  // namespace wqmc
