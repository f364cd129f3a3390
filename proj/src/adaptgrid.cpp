#include "wqmc/adaptgrid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wqmc/errors.hpp"

namespace wqmc {

namespace {

// Knots live on a dyadic lattice of 2^kDepth ticks per initial cell, so
// bisection is exact integer arithmetic and grid points hash reliably.
constexpr int kDepth = 40;
constexpr std::size_t kMaxInitialCells = 4096;

struct TrialKnot {
  std::uint64_t tick;
  std::size_t old_index;  // old knot index, or the bisected interval for a midpoint
  bool midpoint;
};

}  // namespace

std::size_t AdaptiveState::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::uint64_t v : k) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 31));
}

AdaptiveState::AdaptiveState(const DensityFunction& pi, std::span<const Interval> box, const AdaptiveOptions& options)
    : box_(box.begin(), box.end()),
      surrogate_({Knots1D({0.0, 1.0})}, {0.0, 0.0}),
      epsilon_(options.epsilon),
      budget_(options.budget) {
  const std::size_t s = box_.size();
  if (s == 0 || s > kMaxAdaptiveDim) {
    throw ParameterError("adaptive refinement supports 1.." + std::to_string(kMaxAdaptiveDim) + " dimensions");
  }
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) throw ParameterError("refinement threshold must be positive");
  std::vector<std::size_t> res = options.initial_resolution;
  if (res.empty()) res.assign(s, 2);
  if (res.size() != s) throw ParameterError("initial resolution must match the box dimension");
  std::size_t initial_points = 1;
  for (std::size_t j = 0; j < s; ++j) {
    if (!(box_[j].lower < box_[j].upper) || !std::isfinite(box_[j].lower) || !std::isfinite(box_[j].upper)) {
      throw ParameterError("box must be finite and non-degenerate");
    }
    if (res[j] < 1 || res[j] > kMaxInitialCells) throw ParameterError("initial resolution out of range");
    initial_points *= res[j] + 1;
  }
  if (budget_ < initial_points) throw ParameterError("evaluation budget is smaller than the initial grid");

  span_ticks_.resize(s);
  ticks_.resize(s);
  flags_.resize(s);
  for (std::size_t j = 0; j < s; ++j) {
    span_ticks_[j] = static_cast<std::uint64_t>(res[j]) << kDepth;
    for (std::size_t l = 0; l <= res[j]; ++l) ticks_[j].push_back(static_cast<std::uint64_t>(l) << kDepth);
    flags_[j].assign(res[j], true);
  }

  Key key{};
  std::vector<double> point(s);
  std::vector<std::size_t> idx(s, 0);
  for (std::size_t f = 0; f < initial_points; ++f) {
    for (std::size_t j = 0; j < s; ++j) key[j] = ticks_[j][idx[j]];
    evaluate(pi, key, point);
    for (std::size_t j = s; j-- > 0;) {
      if (++idx[j] < ticks_[j].size()) break;
      idx[j] = 0;
    }
  }
  rebuild_surrogate();
}

double AdaptiveState::coordinate(std::size_t j, std::uint64_t tick) const {
  if (tick == span_ticks_[j]) return box_[j].upper;
  const double frac = static_cast<double>(tick) / static_cast<double>(span_ticks_[j]);
  return box_[j].lower + (box_[j].upper - box_[j].lower) * frac;
}

double AdaptiveState::evaluate(const DensityFunction& pi, const Key& key, std::span<double> point) {
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  for (std::size_t j = 0; j < point.size(); ++j) point[j] = coordinate(j, key[j]);
  const double v = pi(point);
  if (!(v >= 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "density returned " << v << " at (";
    for (std::size_t j = 0; j < point.size(); ++j) os << (j ? ", " : "") << point[j];
    os << ')';
    throw InvalidDensityError(os.str());
  }
  cache_.emplace(key, v);
  ++evaluations_;
  return v;
}

void AdaptiveState::rebuild_surrogate() {
  const std::size_t s = dim();
  std::vector<Knots1D> knots;
  knots.reserve(s);
  std::size_t total = 1;
  for (std::size_t j = 0; j < s; ++j) {
    std::vector<double> v;
    v.reserve(ticks_[j].size());
    for (auto t : ticks_[j]) v.push_back(coordinate(j, t));
    knots.emplace_back(std::move(v));
    total *= ticks_[j].size();
  }
  std::vector<double> values(total);
  Key key{};
  std::vector<std::size_t> idx(s, 0);
  for (std::size_t f = 0; f < total; ++f) {
    for (std::size_t j = 0; j < s; ++j) key[j] = ticks_[j][idx[j]];
    values[f] = cache_.at(key);
    for (std::size_t j = s; j-- > 0;) {
      if (++idx[j] < ticks_[j].size()) break;
      idx[j] = 0;
    }
  }
  surrogate_ = TensorHatSurrogate(std::move(knots), std::move(values));
}

bool AdaptiveState::any_flagged() const {
  for (const auto& fl : flags_) {
    if (std::find(fl.begin(), fl.end(), true) != fl.end()) return true;
  }
  return false;
}

AdaptiveReport AdaptiveState::report() const {
  AdaptiveReport r;
  r.iterations = iterations_;
  r.evaluations = evaluations_;
  for (const auto& t : ticks_) r.intervals.push_back(t.size() - 1);
  r.flags_history = flags_history_;
  r.budget_exceeded = budget_exceeded_;
  r.converged = !any_flagged() && !budget_exceeded_;
  return r;
}

AdaptiveState refine_once(AdaptiveState state, const DensityFunction& pi) {
  if (state.budget_exceeded_ || !state.any_flagged()) return state;
  const std::size_t s = state.dim();

  // (1) trial knots: bisect every flagged interval that still has room.
  std::vector<std::vector<TrialKnot>> trial(s);
  std::vector<std::vector<bool>> bisected(s);
  for (std::size_t j = 0; j < s; ++j) {
    const auto& t = state.ticks_[j];
    bisected[j].assign(t.size() - 1, false);
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      trial[j].push_back({t[k], k, false});
      if (state.flags_[j][k] && t[k + 1] - t[k] >= 2) {
        trial[j].push_back({(t[k] + t[k + 1]) / 2, k, true});
        bisected[j][k] = true;
      }
    }
    trial[j].push_back({t.back(), t.size() - 1, false});
  }

  std::size_t trial_total = 1;
  std::vector<std::size_t> trial_strides(s, 1);
  for (std::size_t j = s; j-- > 0;) {
    trial_strides[j] = trial_total;
    trial_total *= trial[j].size();
  }

  // (2) count and evaluate the points that carry at least one new coordinate.
  using Key = AdaptiveState::Key;
  auto for_each_trial_point = [&](auto&& fn) {
    std::vector<std::size_t> idx(s, 0);
    for (std::size_t f = 0; f < trial_total; ++f) {
      fn(f, idx);
      for (std::size_t j = s; j-- > 0;) {
        if (++idx[j] < trial[j].size()) break;
        idx[j] = 0;
      }
    }
  };
  std::size_t fresh = 0;
  for_each_trial_point([&](std::size_t, const std::vector<std::size_t>& idx) {
    bool is_new = false;
    Key key{};
    for (std::size_t j = 0; j < s; ++j) {
      is_new |= trial[j][idx[j]].midpoint;
      key[j] = trial[j][idx[j]].tick;
    }
    if (is_new && !state.cache_.contains(key)) ++fresh;
  });
  if (state.evaluations_ + fresh > state.budget_) {
    state.budget_exceeded_ = true;
    return state;
  }

  std::vector<double> trial_values(trial_total);
  std::vector<char> trial_new(trial_total, 0);
  std::vector<double> point(s);
  std::vector<std::size_t> old_idx(s);
  const auto& old = state.surrogate_;
  for_each_trial_point([&](std::size_t f, const std::vector<std::size_t>& idx) {
    bool is_new = false;
    Key key{};
    for (std::size_t j = 0; j < s; ++j) {
      const auto& tk = trial[j][idx[j]];
      is_new |= tk.midpoint;
      key[j] = tk.tick;
      old_idx[j] = tk.old_index;
    }
    if (is_new) {
      trial_values[f] = state.evaluate(pi, key, point);
      trial_new[f] = 1;
    } else {
      trial_values[f] = old.value(old_idx);
    }
  });

  double max_value = 0.0;
  for (double v : trial_values) max_value = std::max(max_value, v);
  const double threshold = state.epsilon_ * max_value;

  // (3)-(4) per original interval, the max of |phi_trial - phi_old| over the
  // trial points of its slab. Only new points can differ.
  std::vector<std::vector<double>> indicator(s);
  for (std::size_t j = 0; j < s; ++j) indicator[j].assign(state.ticks_[j].size() - 1, 0.0);
  std::vector<std::size_t> mids;
  mids.reserve(s);
  for_each_trial_point([&](std::size_t f, const std::vector<std::size_t>& idx) {
    if (!trial_new[f]) return;
    mids.clear();
    for (std::size_t j = 0; j < s; ++j) {
      const auto& tk = trial[j][idx[j]];
      old_idx[j] = tk.old_index;
      if (tk.midpoint) mids.push_back(j);
    }
    // Midpoints interpolate with weight 1/2 to both neighbouring old knots.
    double interp = 0.0;
    const std::size_t corners = std::size_t{1} << mids.size();
    std::vector<std::size_t> corner_idx(old_idx);
    for (std::size_t c = 0; c < corners; ++c) {
      for (std::size_t b = 0; b < mids.size(); ++b) {
        corner_idx[mids[b]] = old_idx[mids[b]] + ((c >> b) & 1U);
      }
      interp += old.value(corner_idx);
    }
    interp /= static_cast<double>(corners);
    const double diff = std::abs(trial_values[f] - interp);
    if (diff == 0.0) return;
    for (std::size_t j = 0; j < s; ++j) {
      const auto& tk = trial[j][idx[j]];
      auto& ind = indicator[j];
      if (tk.midpoint) {
        ind[tk.old_index] = std::max(ind[tk.old_index], diff);
      } else {
        if (tk.old_index > 0) ind[tk.old_index - 1] = std::max(ind[tk.old_index - 1], diff);
        if (tk.old_index < ind.size()) ind[tk.old_index] = std::max(ind[tk.old_index], diff);
      }
    }
  });

  // (5) keep or revert each bisection.
  std::size_t still_flagged = 0;
  for (std::size_t j = 0; j < s; ++j) {
    const auto& t = state.ticks_[j];
    std::vector<std::uint64_t> ticks;
    std::vector<bool> flags;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      ticks.push_back(t[k]);
      if (bisected[j][k] && indicator[j][k] > threshold) {
        ticks.push_back((t[k] + t[k + 1]) / 2);
        flags.push_back(true);
        flags.push_back(true);
        still_flagged += 2;
      } else {
        flags.push_back(false);
      }
    }
    ticks.push_back(t.back());
    state.ticks_[j] = std::move(ticks);
    state.flags_[j] = std::move(flags);
  }

  // (6) the kept grid is a subset of the trial grid: no new evaluations.
  state.rebuild_surrogate();
  ++state.iterations_;
  state.flags_history_.push_back(still_flagged);
  return state;
}

AdaptiveResult run_to_convergence(const DensityFunction& pi, std::span<const Interval> box,
                                  const AdaptiveOptions& options) {
  AdaptiveState state(pi, box, options);
  while (state.any_flagged() && !state.budget_exceeded()) state = refine_once(std::move(state), pi);
  return {state.surrogate(), state.report()};
}

}  // namespace wqmc
