#include "wqmc/problems.hpp"

#include <algorithm>
#include <numbers>
#include <random>
#include <sstream>

#include "wqmc/errors.hpp"

namespace wqmc {

Banana2D::Banana2D(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("banana scale sigma must be positive");
}

double Banana2D::log_density(std::span<const double> x) const {
  if (x.size() != 2) throw ParameterError("banana density is two-dimensional");
  const double x1 = x[0], x2 = x[1];
  const double a = 1.5 - 2.0 / 3.0 * x1;
  const double b = -(2.0 / 3.0 * x1 - 0.5) * (2.0 / 3.0 * x1 - 0.5) + x2 - 0.5;
  const double c = 1.5 + 2.0 / 3.0 * x1;
  const double d = -(2.0 / 3.0 * x1 + 0.5) * (2.0 / 3.0 * x1 + 0.5) - x2 - 0.5;
  const double bracket = a * a + 50.0 * b * b + c * c + 50.0 * d * d;
  return -(x1 * x1 + x2 * x2) - 2.0 / sigma_ * bracket;
}

double Genz::operator()(std::span<const double> x) const {
  const std::size_t s = box.size();
  if (x.size() != s || c.size() != s || w.size() != s) throw ParameterError("Genz dimension mismatch");
  switch (kind) {
    case GenzKind::kProductPeak: {
      double p = 1.0;
      for (std::size_t j = 0; j < s; ++j) {
        const double u = (x[j] - box[j].lower) / (box[j].upper - box[j].lower);
        p *= 1.0 / (1.0 / (c[j] * c[j]) + (u + w[j]) * (u + w[j]));
      }
      return p;
    }
    case GenzKind::kCornerPeak: {
      double sum = 1.0;
      for (std::size_t j = 0; j < s; ++j) sum += c[j] * (x[j] - box[j].lower) / (box[j].upper - box[j].lower);
      return std::pow(sum, -static_cast<double>(s) - 1.0);
    }
    case GenzKind::kContinuous: {
      double e = 0.0;
      for (std::size_t j = 0; j < s; ++j) {
        e += c[j] * std::abs((x[j] - box[j].lower) / (box[j].upper - box[j].lower) - w[j]);
      }
      return std::exp(-e);
    }
  }
  throw ParameterError("unknown Genz kind");
}

Genz genz_2d(GenzKind kind) { return Genz{kind, {0.3, 0.6}, {0.25, 0.7}, Banana2D::box()}; }

GenzKind parse_genz(const std::string& name) {
  if (name == "f1") return GenzKind::kProductPeak;
  if (name == "f2") return GenzKind::kCornerPeak;
  if (name == "f3") return GenzKind::kContinuous;
  throw ParameterError("unknown Genz integrand '" + name + "' (expected f1, f2 or f3)");
}

std::string genz_name(GenzKind kind) { return "f" + std::to_string(static_cast<int>(kind)); }

std::vector<Interval> predprey_box() { return {{0.36, 0.96}, {60.0, 160.0}, {15.0, 40.0}, {0.18, 0.48}}; }

namespace {

struct Rhs {
  double rho_p, k, alpha, rho_q, u, v;
  void operator()(double p, double q, double& dp, double& dq) const {
    const double inter = p * q / (alpha + p);
    dp = rho_p * p * (1.0 - p / k) - u * inter;
    dq = v * inter - rho_q * q;
  }
};

std::size_t steps_for(double t, double dt) {
  const double n = t / dt;
  const double r = std::round(n);
  if (!(t >= 0.0) || std::abs(n - r) > 1e-9 * std::max(1.0, r)) {
    std::ostringstream os;
    os << "time " << t << " is not a multiple of the step " << dt;
    throw ParameterError(os.str());
  }
  return static_cast<std::size_t>(r);
}

}  // namespace

std::vector<PopulationState> solve_ode(const PredPreyParams& x, std::span<const double> times, double dt,
                                       const PredPreyConstants& k) {
  if (!(dt > 0.0)) throw ParameterError("ODE step must be positive");
  const Rhs f{x[0], x[1], x[2], x[3], k.u, k.v};
  std::vector<PopulationState> out;
  out.reserve(times.size());
  double p = k.p0, q = k.q0;
  std::size_t done = 0;
  for (double t : times) {
    const std::size_t target = steps_for(t, dt);
    if (target < done) throw ParameterError("output times must be non-decreasing");
    for (; done < target; ++done) {
      double k1p, k1q, k2p, k2q, k3p, k3q, k4p, k4q;
      f(p, q, k1p, k1q);
      f(p + 0.5 * dt * k1p, q + 0.5 * dt * k1q, k2p, k2q);
      f(p + 0.5 * dt * k2p, q + 0.5 * dt * k2q, k3p, k3q);
      f(p + dt * k3p, q + dt * k3q, k4p, k4q);
      p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
      q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
      if (!std::isfinite(p) || !std::isfinite(q)) {
        std::ostringstream os;
        os << "ODE integration blew up at t = " << static_cast<double>(done + 1) * dt;
        throw NumericalError(os.str());
      }
    }
    out.push_back({p, q});
  }
  return out;
}

PopulationState solve_ode(const PredPreyParams& x, double t_end, double dt, const PredPreyConstants& k) {
  const double t[1] = {t_end};
  return solve_ode(x, t, dt, k).front();
}

std::vector<double> observation_times() {
  std::vector<double> t;
  for (std::size_t i = 0; i < kObservationCount; ++i) t.push_back(static_cast<double>(i) * 25.0 / 6.0);
  return t;
}

std::vector<double> forward_model(const PredPreyParams& x, std::span<const double> times, double dt,
                                  const PredPreyConstants& k) {
  std::vector<double> g;
  g.reserve(2 * times.size());
  for (const auto& st : solve_ode(x, times, dt, k)) {
    g.push_back(st.p);
    g.push_back(st.q);
  }
  return g;
}

std::vector<double> normal_draws(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  std::vector<double> out;
  out.reserve(count + 1);
  while (out.size() < count) {
    const double u1 = 1.0 - unit();  // (0, 1]
    const double u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    out.push_back(r * std::cos(2.0 * std::numbers::pi * u2));
    out.push_back(r * std::sin(2.0 * std::numbers::pi * u2));
  }
  out.resize(count);
  return out;
}

Dataset synth_data(const PredPreyParams& x_true, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("noise level must be finite and >= 0");
  Dataset d;
  d.times = observation_times();
  d.y_true = forward_model(x_true, d.times);
  const auto eta = normal_draws(d.y_true.size(), seed);
  d.y.resize(d.y_true.size());
  for (std::size_t i = 0; i < d.y.size(); ++i) d.y[i] = d.y_true[i] + sigma * eta[i];
  d.sigma = sigma;
  d.seed = seed;
  d.x_true = x_true;
  return d;
}

PredPreyPosterior::PredPreyPosterior(Dataset data, double dt, PredPreyConstants k)
    : data_(std::move(data)), dt_(dt), k_(k) {
  if (data_.y.size() != 2 * data_.times.size()) throw ParameterError("dataset needs two observations per time");
  if (!(data_.sigma > 0.0)) throw ParameterError("posterior needs a positive noise level");
}

double PredPreyPosterior::misfit(const PredPreyParams& x) const {
  const auto g = forward_model(x, data_.times, dt_, k_);
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) r += (g[i] - data_.y[i]) * (g[i] - data_.y[i]);
  return r;
}

double PredPreyPosterior::operator()(std::span<const double> x) const {
  if (x.size() != 4) throw ParameterError("predator-prey posterior is four-dimensional");
  const auto box = predprey_box();
  for (std::size_t j = 0; j < 4; ++j) {
    if (x[j] < box[j].lower || x[j] > box[j].upper) return 0.0;
  }
  try {
    return std::exp(-misfit({x[0], x[1], x[2], x[3]}) / (2.0 * data_.sigma * data_.sigma));
  } catch (const NumericalError&) {
    ++*blowups_;
    return 0.0;
  }
}

Qoi parse_qoi(const std::string& name) {
  if (name == "risk_P") return {QoiKind::kRiskP, 0, kRiskThresholdP};
  if (name == "risk_Q") return {QoiKind::kRiskQ, 0, kRiskThresholdQ};
  for (int r = 1; r <= 3; ++r) {
    if (name == "moment_P" + std::to_string(r)) return {QoiKind::kMomentP, r, 0.0};
    if (name == "moment_Q" + std::to_string(r)) return {QoiKind::kMomentQ, r, 0.0};
  }
  throw ParameterError("unknown quantity of interest '" + name + "'");
}

std::string qoi_name(const Qoi& q) {
  switch (q.kind) {
    case QoiKind::kRiskP: return "risk_P";
    case QoiKind::kRiskQ: return "risk_Q";
    case QoiKind::kMomentP: return "moment_P" + std::to_string(q.order);
    case QoiKind::kMomentQ: return "moment_Q" + std::to_string(q.order);
  }
  return "?";
}

std::vector<Qoi> all_qois() {
  std::vector<Qoi> out{parse_qoi("risk_P"), parse_qoi("risk_Q")};
  for (int r = 1; r <= 3; ++r) out.push_back(parse_qoi("moment_P" + std::to_string(r)));
  for (int r = 1; r <= 3; ++r) out.push_back(parse_qoi("moment_Q" + std::to_string(r)));
  return out;
}

double qoi_eval(const Qoi& q, const PopulationState& st) {
  switch (q.kind) {
    case QoiKind::kRiskP: return st.p <= q.threshold ? 1.0 : 0.0;
    case QoiKind::kRiskQ: return st.q <= q.threshold ? 1.0 : 0.0;
    case QoiKind::kMomentP: return std::pow(st.p, q.order);
    case QoiKind::kMomentQ: return std::pow(st.q, q.order);
  }
  return 0.0;
}

void qoi_eval(std::span<const Qoi> qois, const PredPreyParams& x, std::span<double> out, double dt,
              const PredPreyConstants& k) {
  const auto st = solve_ode(x, kPredPreyHorizon, dt, k);
  for (std::size_t i = 0; i < qois.size(); ++i) out[i] = qoi_eval(qois[i], st);
}

}  // namespace wqmc
