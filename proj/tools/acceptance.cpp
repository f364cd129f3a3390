// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Run with --only 1,2,... to select a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wqmc/experiment.hpp"
#include "wqmc/hatbasis.hpp"
#include "wqmc/lowdisc.hpp"
#include "wqmc/mixture.hpp"
#include "wqmc/pou.hpp"

using namespace wqmc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

std::string golden_file = WQMC_GOLDEN_FILE;
std::filesystem::path scratch_root;

// ---------------------------------------------------------------- 1

Outcome net_property() {
  Outcome o;
  const auto seq = sobol(2);
  for (int m = 1; m <= 8; ++m) {
    const auto pts = seq.block(0, std::uint64_t{1} << m);
    if (!is_net(pts, m, 0)) {
      o.pass = false;
      o.detail += "m=" + std::to_string(m) + " is not a (0," + std::to_string(m) + ",2)-net; ";
    }
  }
  if (o.pass) o.detail = "2^m prefixes are (0,m,2)-nets for m=1..8";
  return o;
}

// ---------------------------------------------------------------- 2

Outcome allocation_invariants() {
  Outcome o;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t bad = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t k = 1 + rng() % 60;
    std::vector<double> w(k);
    for (auto& x : w) x = std::pow(unif(rng), 1.0 + 4.0 * unif(rng));
    w[rng() % k] += 1e-3;
    const std::size_t n = 2 + rng() % 100000;
    const double delta = (1e-6 + unif(rng) * 0.999) * static_cast<double>(n);
    const auto a = select_and_allocate(w, n, delta);
    const double c = std::accumulate(w.begin(), w.end(), 0.0);
    bool ok = std::accumulate(a.counts.begin(), a.counts.end(), std::size_t{0}) == n;
    double agg = 0.0;
    for (std::size_t v = 0; v < a.r; ++v) {
      const double dev = std::abs(w[a.selected[v]] / c - static_cast<double>(a.counts[v]) / static_cast<double>(n));
      if (v + 1 < a.r && dev > 1.0 / static_cast<double>(n) + 1e-15) ok = false;
      agg += dev;
    }
    const double bound = (delta + 2.0 * static_cast<double>(a.r - 1)) / static_cast<double>(n);
    if (agg > bound + 1e-12) ok = false;
    if (bound > 0.0) worst_ratio = std::max(worst_ratio, agg / bound);
    if (!ok) ++bad;
  }
  o.pass = bad == 0;
  o.detail = std::to_string(bad) + " of 10000 instances violate an invariant; max aggregate/bound " + fmt(worst_ratio);
  return o;
}

// ---------------------------------------------------------------- 3

Outcome hat_round_trip() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100000; ++t) {
    const std::size_t cells = 1 + rng() % 12;
    std::vector<double> v{-5.0 + 10.0 * u(rng)};
    for (std::size_t k = 0; k < cells; ++k) v.push_back(v.back() + std::pow(10.0, -3.0 + 3.0 * u(rng)));
    const Knots1D knots(v);
    const HatDensity1D h(knots, rng() % knots.size());
    const double z = u(rng);
    worst = std::max(worst, std::abs(hat_cdf(h, hat_inv_cdf(h, z)) - z));
  }
  return {worst <= 1e-12, "max |cdf(inv_cdf(z)) - z| = " + fmt(worst) + " over 1e5 triples"};
}

// ---------------------------------------------------------------- 4

Outcome lipschitz_bound() {
  Outcome o;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_ratio = 0.0;
  for (std::size_t s = 1; s <= 3; ++s) {
    // q_j(x) = a x^2 + b x + c, kept positive on [0,1].
    std::vector<std::array<double, 3>> q(s);
    for (auto& c : q) c = {4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0, 4.5 + u(rng)};
    auto qv = [](const std::array<double, 3>& c, double x) { return (c[0] * x + c[1]) * x + c[2]; };
    auto qmax = [&](const std::array<double, 3>& c) {
      double m = std::max(std::abs(qv(c, 0.0)), std::abs(qv(c, 1.0)));
      const double v = -c[1] / (2.0 * c[0]);
      if (v > 0.0 && v < 1.0) m = std::max(m, std::abs(qv(c, v)));
      return m;
    };
    auto dmax = [](const std::array<double, 3>& c) { return std::max(std::abs(c[1]), std::abs(2.0 * c[0] + c[1])); };
    const DensityFunction pi = [&](std::span<const double> x) {
      double p = 1.0;
      for (std::size_t j = 0; j < s; ++j) p *= qv(q[j], x[j]);
      return p;
    };
    // Lipschitz constant for the sup norm: sum_j sup |d_j pi|.
    double lip = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      double d = dmax(q[j]);
      for (std::size_t i = 0; i < s; ++i) {
        if (i != j) d *= qmax(q[i]);
      }
      lip += d;
    }
    const std::vector<Interval> box(s, Interval{0.0, 1.0});
    for (std::size_t m : {2, 4, 8, 16}) {
      const std::vector<std::size_t> res(s, m);
      const auto sur = build_uniform_surrogate(pi, box, res);
      std::vector<double> x(s);
      double err = 0.0;
      for (int p = 0; p < 100000; ++p) {
        for (auto& xj : x) xj = u(rng);
        err = std::max(err, std::abs(sur.eval(x) - pi(x)));
      }
      const double bound = lip / static_cast<double>(m);
      worst_ratio = std::max(worst_ratio, err / bound);
      if (err > bound) {
        o.pass = false;
        o.detail += "s=" + std::to_string(s) + " m=" + std::to_string(m) + " error " + fmt(err) + " > " + fmt(bound) +
                    "; ";
      }
    }
  }
  if (o.pass) o.detail = "max sup-error / (L h) = " + fmt(worst_ratio) + " for s=1..3, m=2..16";
  return o;
}

// ---------------------------------------------------------------- 5

Outcome product_rate() {
  Outcome o;
  const auto seq = sobol(2);
  std::vector<ProductComponent> one(1);
  one[0].weight = 1.0;
  for (int j = 0; j < 2; ++j) one[0].factors.push_back(std::make_shared<UniformDensity1D>(0.0, 1.0));
  double worst = 0.0;
  for (int m = 8; m <= 14; ++m) {
    const std::size_t n = std::size_t{1} << m;
    const auto a = select_and_allocate(std::vector<double>{1.0}, n, 0.5);
    const double e = std::abs(estimate(one, a, [](std::span<const double> x) { return x[0] * x[1]; }, seq) - 0.25);
    const double bound = 2.0 * std::pow(std::log(static_cast<double>(n)), 2) / static_cast<double>(n);
    worst = std::max(worst, e / bound);
    if (e > bound) o.pass = false;
  }
  o.detail = "max error / (2 log(N)^2 / N) = " + fmt(worst) + " for N=2^8..2^14";
  return o;
}

// ---------------------------------------------------------------- 8

Outcome partition_identities() {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.1, 1.0);
  double worst_sum = 0.0, worst_ratio = 0.0;
  for (int s : {2, 4}) {
    std::vector<double> w(4);
    double total = 0.0;
    for (auto& x : w) total += (x = u(rng));
    std::vector<GaussianComponent> comps;
    for (int i = 0; i < 4; ++i) {
      Eigen::MatrixXd a(s, s);
      for (int r = 0; r < s; ++r)
        for (int c = 0; c < s; ++c) a(r, c) = g(rng);
      Eigen::VectorXd mu(s);
      for (int j = 0; j < s; ++j) mu[j] = 2.0 * g(rng);
      comps.emplace_back(w[i] / total, mu, a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(s, s));
    }
    const GaussianMixture mix(std::move(comps));
    std::vector<double> x(static_cast<std::size_t>(s)), r(4);
    for (int p = 0; p < 100000; ++p) {
      const double scale = p % 10 == 0 ? 50.0 : 4.0;
      for (auto& xj : x) xj = scale * g(rng);
      mix.ratios(x, r);
      double sum = 0.0;
      for (int i = 0; i < 4; ++i) {
        sum += mix[i].alpha() * r[i];
        worst_ratio = std::max(worst_ratio, r[i] * mix[i].alpha());
      }
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
  }
  const bool pass = worst_sum <= 1e-12 && worst_ratio <= 1.0 + 1e-12;
  return {pass, "max |sum - 1| = " + fmt(worst_sum) + ", max alpha_i psi_i/Psi = " + fmt(worst_ratio, 17)};
}

// ---------------------------------------------------------------- 9

Outcome em_sanity() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(500, 3);
  for (int r = 0; r < 500; ++r) x.row(r) << g(rng), 2.0 + 0.5 * g(rng), g(rng) + 0.3 * x(r, 0);
  const auto one = em_fit(x, {1, 50, 1e-12, 7});
  const Eigen::VectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centred = x.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = centred.transpose() * centred / 500.0;
  cov.diagonal().array() += 1e-8 * cov.trace() / 3.0;
  const double e_mu = (one.components[0].mu() - mean).cwiseAbs().maxCoeff();
  const double e_cov = (one.components[0].sigma() - cov).cwiseAbs().maxCoeff();
  if (one.components[0].alpha() != 1.0 || e_mu > 1e-12 || e_cov > 1e-12) o.pass = false;

  std::mt19937_64 rng2(20210607);
  const int n = 3000;
  Eigen::MatrixXd y(n, 2);
  Eigen::Vector2d s0 = Eigen::Vector2d::Zero(), s1 = Eigen::Vector2d::Zero();
  int n0 = 0;
  for (int r = 0; r < n; ++r) {
    if (r % 3 == 0) {
      y.row(r) << 3.0 + 0.7 * g(rng2), -2.0 + 0.4 * g(rng2);
      s1 += y.row(r).transpose();
    } else {
      y.row(r) << -4.0 + 0.5 * g(rng2), 1.0 + 0.9 * g(rng2);
      s0 += y.row(r).transpose();
      ++n0;
    }
  }
  s0 /= n0;
  s1 /= n - n0;
  const auto two = em_fit(y, {2, 300, 1e-10, 3});
  const bool first_left = two.components[0].mu()[0] < 0.0;
  const auto& a = first_left ? two.components[0] : two.components[1];
  const auto& b = first_left ? two.components[1] : two.components[0];
  const double e_mean = std::max((a.mu() - s0).norm(), (b.mu() - s1).norm());
  const double e_alpha = std::abs(a.alpha() - 2.0 / 3.0);
  bool ll_ok = true;
  for (std::size_t it = 1; it < two.log_likelihood.size(); ++it) {
    ll_ok &= two.log_likelihood[it] >= two.log_likelihood[it - 1] - 1e-10;
  }
  const GaussianMixture mix(two.components);
  std::vector<double> r(2);
  double fuzz = 0.0;
  for (int row = 0; row < n; ++row) {
    const Eigen::VectorXd p = y.row(row).transpose();
    mix.ratios(std::span<const double>(p.data(), 2), r);
    const double resp = mix[0].alpha() * r[0];
    fuzz = std::max(fuzz, std::min(resp, 1.0 - resp));
  }
  if (e_mean > 1e-3 || e_alpha > 1e-3 || !ll_ok || fuzz > 1e-6) o.pass = false;
  o.detail = "I=1 mean/cov error " + fmt(e_mu) + "/" + fmt(e_cov) + "; I=2 mean error " + fmt(e_mean) +
             ", weight error " + fmt(e_alpha) + ", max min(resp, 1-resp) " + fmt(fuzz) +
             (ll_ok ? ", log-likelihood monotone" : ", log-likelihood decreased");
  return o;
}

// ---------------------------------------------------------------- 6, 7, 10

ExperimentConfig desk_config(const std::string& problem, const std::string& method, const std::string& dir) {
  ExperimentConfig c;
  c.problem = problem;
  c.method = method;
  c.levels = 4;
  c.golden = golden_file;
  c.out_dir = (scratch_root / dir).string();
  return c;
}

std::string slope_text(const ConvergenceRecord& r) {
  return r.slope ? fmt(*r.slope) : std::string("n/a");
}

double banana_seconds = 0.0;

Outcome banana_reproduction() {
  Outcome o;
  const auto t0 = Clock::now();
  for (const auto& [method, limit] : {std::pair<std::string, double>{"adaptive", -0.6}, {"combined", -0.55}}) {
    const auto res = run_experiment(desk_config("banana", method, "c6_" + method));
    o.detail += method + ":";
    for (const auto& r : res.records) {
      o.detail += " " + r.qoi + " " + slope_text(r);
      if (!r.slope || *r.slope > limit) o.pass = false;
    }
    o.detail += " (need <= " + fmt(limit) + "); ";
  }
  banana_seconds = seconds_since(t0);
  if (banana_seconds > 300.0) {
    o.pass = false;
    o.detail += "runtime over 5 min; ";
  }
  return o;
}

Outcome predprey_reproduction() {
  Outcome o;
  auto c = desk_config("predprey", "combined", "c7");
  c.qois = {"moment_P1", "moment_Q1", "risk_P", "risk_Q"};
  const auto t0 = Clock::now();
  const auto res = run_experiment(c);
  for (const auto& r : res.records) {
    if (r.qoi.rfind("moment", 0) == 0) {
      o.detail += r.qoi + " slope " + slope_text(r) + "; ";
      if (!r.slope || *r.slope > -0.7) o.pass = false;
    } else {
      o.detail += r.qoi + " errors";
      for (std::size_t k = 0; k < r.points.size(); ++k) {
        o.detail += " " + fmt(r.points[k].error, 2);
        if (k >= 2 && r.points[k].error > r.points[k - 1].error) o.pass = false;
      }
      o.detail += "; ";
    }
  }
  if (seconds_since(t0) > 900.0) {
    o.pass = false;
    o.detail += "runtime over 15 min; ";
  }
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const auto c = desk_config("banana", "adaptive", "c10");
  const std::filesystem::path stem = std::filesystem::path(c.out_dir) / "converge_banana_adaptive";
  const auto t0 = Clock::now();
  run_experiment(c);
  const auto csv = slurp(stem.string() + ".csv");
  const auto json = slurp(stem.string() + ".json");
  run_experiment(c);
  const double secs = seconds_since(t0);
  const bool same = csv == slurp(stem.string() + ".csv") && json == slurp(stem.string() + ".json");
  // Without a criterion-6 timing in this process, fall back to its 5 min cap.
  const double limit = 2.0 * (banana_seconds > 0.0 ? banana_seconds : 300.0);
  return {same && !csv.empty() && secs < limit,
          std::string(same ? "byte-identical" : "reports differ") + " CSV/JSON across two runs (" + fmt(secs) +
              " s, limit " + fmt(limit) + " s)"};
}

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "criterion numbers to run")->delimiter(',');
  app.add_option("--golden", golden_file, "golden values file");
  CLI11_PARSE(app, argc, argv);

  scratch_root = std::filesystem::temp_directory_path() / "wqmc_acceptance";
  std::filesystem::create_directories(scratch_root);

  // Criterion 10 needs criterion 6's runtime, so 6 runs first.
  const std::vector<Criterion> criteria = {
      {1, "net property of the 2-D Sobol prefixes", 1.0, net_property},
      {2, "allocation invariants", 5.0, allocation_invariants},
      {3, "hat cdf / inverse cdf round trip", 5.0, hat_round_trip},
      {4, "uniform surrogate Lipschitz bound", 30.0, lipschitz_bound},
      {5, "product-form QMC rate", 10.0, product_rate},
      {6, "2-D desk-scale convergence slopes", 300.0, banana_reproduction},
      {7, "predator-prey desk-scale convergence", 900.0, predprey_reproduction},
      {8, "partition-of-unity identities", 5.0, partition_identities},
      {9, "EM sanity", 10.0, em_sanity},
      {10, "determinism of converge reports", 1e9, determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    if (secs > c.limit_seconds) {
      o.pass = false;
      o.detail += " [over the " + fmt(c.limit_seconds) + " s limit]";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d %s  %-42s %8.2fs  %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criterion(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
