#include <doctest.h>

#include <cmath>
#include <random>

#include "wqmc/errors.hpp"
#include "wqmc/problems.hpp"

using namespace wqmc;

TEST_CASE("banana density: origin value and point symmetry") {
  const Banana2D pi;
  const std::vector<double> origin{0.0, 0.0};
  CHECK(pi.log_density(origin) == doctest::Approx(-121.5).epsilon(1e-15));
  CHECK(Banana2D(2.0).log_density(origin) == doctest::Approx(-60.75).epsilon(1e-15));
  CHECK_THROWS_AS(Banana2D(0.0), ParameterError);

  // The printed formula is invariant under x -> -x; flipping x1 alone swaps
  // the banana terms only together with x2.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int t = 0; t < 1000; ++t) {
    const std::vector<double> x{u(rng), u(rng)};
    const std::vector<double> m{-x[0], -x[1]};
    CHECK(pi.log_density(m) == doctest::Approx(pi.log_density(x)).epsilon(1e-12));
    CHECK(pi(x) >= 0.0);
  }
  const std::vector<double> y{0.0, 0.3};
  CHECK(pi(y) > 0.0);
  const auto box = Banana2D::box();
  CHECK(box.size() == 2);
  CHECK(box[0].lower == -5.0);
  CHECK(box[1].upper == 5.0);
}

TEST_CASE("Genz examples and bounds") {
  const auto f1 = genz_2d(GenzKind::kProductPeak);
  const auto f2 = genz_2d(GenzKind::kCornerPeak);
  const auto f3 = genz_2d(GenzKind::kContinuous);
  CHECK(f2(std::vector<double>{-5.0, -5.0}) == 1.0);
  // (x_j + 5) / 10 = w_j.
  CHECK(f3(std::vector<double>{-2.5, 2.0}) == doctest::Approx(1.0).epsilon(1e-15));
  const double expect = 1.0 / ((1.0 / 0.09 + 0.5 * 0.5) * (1.0 / 0.36 + 1.4 * 1.4));
  CHECK(f1(std::vector<double>{-2.5, 2.0}) == doctest::Approx(expect).epsilon(1e-14));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int t = 0; t < 1000; ++t) {
    const std::vector<double> x{u(rng), u(rng)};
    std::vector<double> xr = x;
    xr[t % 2] = std::min(5.0, xr[t % 2] + 0.1);
    CHECK(f2(xr) <= f2(x));
    CHECK(f1(x) > 0.0);
    CHECK(f1(x) <= 0.09 * 0.36);
    CHECK(f3(x) > 0.0);
    CHECK(f3(x) <= 1.0);
  }
  CHECK(parse_genz("f2") == GenzKind::kCornerPeak);
  CHECK(genz_name(GenzKind::kContinuous) == "f3");
  CHECK_THROWS_AS(parse_genz("f4"), ParameterError);
}

TEST_CASE("ODE: logistic prey without predators") {
  PredPreyConstants k;
  k.q0 = 0.0;
  const PredPreyParams x{0.6, 100.0, 25.0, 0.3};
  for (double t : {1.0, 5.0, 10.0}) {
    const auto st = solve_ode(x, t, 1e-3, k);
    const double e = std::exp(x[0] * t);
    const double logistic = x[1] * k.p0 * e / (x[1] + k.p0 * (e - 1.0));
    CHECK(std::abs(st.p - logistic) <= 1e-6);
    CHECK(st.q == 0.0);
  }
}

TEST_CASE("ODE: exponential predator decay without prey") {
  PredPreyConstants k;
  k.p0 = 0.0;
  const PredPreyParams x{0.6, 100.0, 25.0, 0.3};
  const std::vector<double> times{25.0 / 6.0, 50.0, 120.0};
  const auto traj = solve_ode(x, times, kPredPreyDt, k);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(traj[i].p == 0.0);
    CHECK(std::abs(traj[i].q - k.q0 * std::exp(-x[3] * times[i])) <= 1e-8);
  }
}

TEST_CASE("ODE: step-halving self-convergence") {
  const auto& x = kTrueParams;
  const auto a = solve_ode(x, 25.0 / 6.0, kPredPreyDt);
  const auto b = solve_ode(x, 25.0 / 6.0, kPredPreyDt / 2.0);
  CHECK(std::abs(a.p - b.p) <= 1e-6 * std::abs(b.p));
  CHECK(std::abs(a.q - b.q) <= 1e-6 * std::abs(b.q));

  const auto y1 = solve_ode(x, kPredPreyHorizon, kPredPreyDt);
  const auto y2 = solve_ode(x, kPredPreyHorizon, kPredPreyDt / 2.0);
  const auto y4 = solve_ode(x, kPredPreyHorizon, kPredPreyDt / 4.0);
  const double e1 = std::hypot(y1.p - y2.p, y1.q - y2.q);
  const double e2 = std::hypot(y2.p - y4.p, y2.q - y4.q);
  CHECK(std::log2(e1 / e2) >= 3.5);
}

TEST_CASE("ODE: errors") {
  CHECK_THROWS_AS(solve_ode(kTrueParams, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(solve_ode(kTrueParams, 0.01, kPredPreyDt), ParameterError);
  const std::vector<double> backwards{10.0, 5.0};
  CHECK_THROWS_AS(solve_ode(kTrueParams, backwards), ParameterError);
  // Negative carrying capacity makes the prey explode in finite time.
  const PredPreyParams wild{1.0, -1.0, 25.0, 0.3};
  try {
    solve_ode(wild, 120.0);
    FAIL("expected a blow-up");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("t = ") != std::string::npos);
  }
}

TEST_CASE("synthetic data") {
  const auto t = observation_times();
  REQUIRE(t.size() == kObservationCount);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == doctest::Approx(50.0));
  const auto a = synth_data(kTrueParams, std::sqrt(2.0), 99);
  const auto b = synth_data(kTrueParams, std::sqrt(2.0), 99);
  CHECK(a.y == b.y);
  CHECK(a.y.size() == 2 * kObservationCount);
  CHECK(a.y[0] != synth_data(kTrueParams, std::sqrt(2.0), 100).y[0]);
  const auto exact = synth_data(kTrueParams, 0.0, 99);
  CHECK(exact.y == exact.y_true);
  CHECK(exact.y_true[0] == 50.0);
  CHECK(exact.y_true[1] == 5.0);

  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (std::uint64_t seed = 1; seed <= 385; ++seed) {
    const auto d = synth_data(kTrueParams, std::sqrt(2.0), seed);
    for (std::size_t i = 0; i < d.y.size(); ++i) {
      const double e = d.y[i] - d.y_true[i];
      sum += e;
      sq += e * e;
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double var = (sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
  CHECK(n >= 10000);
  CHECK(var == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("posterior values") {
  auto exact = synth_data(kTrueParams, 0.0, 1);
  exact.sigma = std::sqrt(2.0);
  const PredPreyPosterior clean(exact);
  const std::vector<double> xt(kTrueParams.begin(), kTrueParams.end());
  CHECK(clean(xt) == 1.0);

  const auto noisy = synth_data(kTrueParams, std::sqrt(2.0), kDatasetSeed);
  const PredPreyPosterior post(noisy);
  const auto eta = normal_draws(noisy.y.size(), kDatasetSeed);
  double q = 0.0;
  for (double v : eta) q += 2.0 * v * v;  // sigma^2 eta^2
  CHECK(post(xt) == doctest::Approx(std::exp(-q / 4.0)).epsilon(1e-10));

  const std::vector<double> outside{0.2, 100.0, 25.0, 0.3};
  CHECK(post(outside) == 0.0);

  std::mt19937_64 rng(6);
  const auto box = predprey_box();
  std::vector<double> x(4);
  for (int t = 0; t < 200; ++t) {
    for (int j = 0; j < 4; ++j) {
      x[j] = std::uniform_real_distribution<double>(box[j].lower, box[j].upper)(rng);
    }
    const double v = post(x);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    auto xh = x;
    xh[t % 4] += 1e-6 * (box[t % 4].upper - box[t % 4].lower);
    if (xh[t % 4] <= box[t % 4].upper) CHECK(std::isfinite((post(xh) - v) / 1e-6));
  }
  CHECK(post.blowups() == 0);
  CHECK(post.misfit(kTrueParams) == doctest::Approx(q).epsilon(1e-10));
  auto bad = exact;
  bad.sigma = 0.0;
  CHECK_THROWS_AS((PredPreyPosterior{bad}), ParameterError);
}

TEST_CASE("quantities of interest") {
  const Qoi risk_p = parse_qoi("risk_P");
  const Qoi risk_q = parse_qoi("risk_Q");
  CHECK(qoi_eval(risk_p, {30.0, 1.0}) == 0.0);
  CHECK(qoi_eval(risk_p, {25.0, 1.0}) == 1.0);
  CHECK(qoi_eval(risk_q, {30.0, 15.0}) == 1.0);
  CHECK(qoi_eval(risk_q, {30.0, 15.5}) == 0.0);
  CHECK(qoi_eval(parse_qoi("moment_P2"), {7.0, 3.0}) == 49.0);
  CHECK(qoi_eval(parse_qoi("moment_Q3"), {7.0, 3.0}) == 27.0);
  CHECK(qoi_name(parse_qoi("moment_Q1")) == "moment_Q1");
  CHECK(all_qois().size() == 8);
  CHECK_THROWS_AS(parse_qoi("moment_P4"), ParameterError);

  const auto qs = all_qois();
  std::vector<double> out(qs.size());
  qoi_eval(qs, kTrueParams, out);
  const auto st = solve_ode(kTrueParams, kPredPreyHorizon);
  CHECK(out[2] == st.p);
  CHECK(out[5] == st.q);
  CHECK(out[4] == std::pow(st.p, 3));
}
