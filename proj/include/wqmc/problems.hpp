#pragma once

// Test problems: a concentrated 2-D density on [-5,5]^2 with rescaled Genz
// integrands, and a predator-prey posterior with risk and moment quantities
// of interest.

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wqmc/mixture.hpp"

namespace wqmc {

// ---- 2-D concentrated density -------------------------------------------

class Banana2D {
 public:
  /// `sigma` scales the bracketed banana terms in the exponent.
  explicit Banana2D(double sigma = 1.0);
  double sigma() const { return sigma_; }
  double log_density(std::span<const double> x) const;
  double operator()(std::span<const double> x) const { return std::exp(log_density(x)); }
  static std::vector<Interval> box() { return {{-5.0, 5.0}, {-5.0, 5.0}}; }

 private:
  double sigma_;
};

enum class GenzKind { kProductPeak = 1, kCornerPeak = 2, kContinuous = 3 };

/// Genz integrands rescaled from [0,1]^s to `box` via u_j = (x_j - a_j)/(b_j - a_j).
struct Genz {
  GenzKind kind;
  std::vector<double> c;
  std::vector<double> w;
  std::vector<Interval> box;
  double operator()(std::span<const double> x) const;
};

/// The 2-D instances: c = (0.3, 0.6), w = (0.25, 0.7) on [-5,5]^2.
Genz genz_2d(GenzKind kind);
GenzKind parse_genz(const std::string& name);
std::string genz_name(GenzKind kind);

// ---- predator-prey ------------------------------------------------------

struct PredPreyConstants {
  double p0 = 50.0;
  double q0 = 5.0;
  double u = 1.2;
  double v = 0.5;
};

/// (rho_P, K, alpha, rho_Q).
using PredPreyParams = std::array<double, 4>;

struct PopulationState {
  double p;
  double q;
};

inline constexpr double kPredPreyDt = 25.0 / 600.0;
inline constexpr double kPredPreyHorizon = 120.0;
inline constexpr std::size_t kObservationCount = 13;
inline constexpr std::uint64_t kDatasetSeed = 20210607;
inline constexpr PredPreyParams kTrueParams{0.6, 100.0, 25.0, 0.3};

std::vector<Interval> predprey_box();

/// Fixed-step classical RK4. `times` must be non-decreasing multiples of dt.
/// Throws NumericalError if the state stops being finite.
std::vector<PopulationState> solve_ode(const PredPreyParams& x, std::span<const double> times, double dt = kPredPreyDt,
                                       const PredPreyConstants& k = {});
PopulationState solve_ode(const PredPreyParams& x, double t_end, double dt = kPredPreyDt,
                          const PredPreyConstants& k = {});

/// t_i = (i-1) * 25/6 for i = 1..13.
std::vector<double> observation_times();

struct Dataset {
  std::vector<double> times;
  /// Interleaved [P(t_1), Q(t_1), P(t_2), ...].
  std::vector<double> y;
  std::vector<double> y_true;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  PredPreyParams x_true{};
};

/// Forward model G(x) at `times`, interleaved as in Dataset::y.
std::vector<double> forward_model(const PredPreyParams& x, std::span<const double> times, double dt = kPredPreyDt,
                                  const PredPreyConstants& k = {});

/// Standard normal draws by Box-Muller over mt19937_64, portable across
/// standard libraries.
std::vector<double> normal_draws(std::size_t count, std::uint64_t seed);

Dataset synth_data(const PredPreyParams& x_true = kTrueParams, double sigma = std::sqrt(2.0),
                   std::uint64_t seed = kDatasetSeed);

/// exp(-||G(x) - y||^2 / (2 sigma^2)) on the prior box, zero outside. An ODE
/// blow-up yields zero density and bumps `blowups()`.
class PredPreyPosterior {
 public:
  explicit PredPreyPosterior(Dataset data, double dt = kPredPreyDt, PredPreyConstants k = {});
  const Dataset& data() const { return data_; }
  double misfit(const PredPreyParams& x) const;
  double operator()(std::span<const double> x) const;
  std::size_t blowups() const { return *blowups_; }

 private:
  Dataset data_;
  double dt_;
  PredPreyConstants k_;
  std::shared_ptr<std::size_t> blowups_ = std::make_shared<std::size_t>(0);
};

enum class QoiKind { kRiskP, kRiskQ, kMomentP, kMomentQ };

struct Qoi {
  QoiKind kind;
  int order = 1;  // moment order r, unused for risks
  double threshold = 0.0;
};

inline constexpr double kRiskThresholdP = 25.0;
inline constexpr double kRiskThresholdQ = 15.0;

/// Names: risk_P, risk_Q, moment_P1..3, moment_Q1..3.
Qoi parse_qoi(const std::string& name);
std::string qoi_name(const Qoi& q);
/// Every QoI the predator-prey study reports, in report order.
std::vector<Qoi> all_qois();

double qoi_eval(const Qoi& q, const PopulationState& at_horizon);
/// Solves to T = 120 once and writes qoi_eval for each of `qois`. Blow-ups
/// throw NumericalError.
void qoi_eval(std::span<const Qoi> qois, const PredPreyParams& x, std::span<double> out, double dt = kPredPreyDt,
              const PredPreyConstants& k = {});

}  // namespace wqmc
