#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wqmc/errors.hpp"
#include "wqmc/mixture.hpp"

using namespace wqmc;

namespace {

ProductComponent uniform_component(std::vector<Interval> box, double w) {
  ProductComponent c;
  for (auto iv : box) c.factors.push_back(std::make_shared<UniformDensity1D>(iv.lower, iv.upper));
  c.weight = w;
  return c;
}

}  // namespace

TEST_CASE("allocation examples") {
  const std::vector<double> w{0.5, 0.3, 0.2};
  auto a = select_and_allocate(w, 10, 1.0);
  CHECK(a.r == 3);
  CHECK(a.selected == std::vector<std::size_t>{0, 1, 2});
  CHECK(a.counts == std::vector<std::size_t>{5, 3, 2});

  auto b = select_and_allocate(w, 10, 3.0);
  CHECK(b.r == 2);
  CHECK(b.selected == std::vector<std::size_t>{0, 1});
  CHECK(b.counts == std::vector<std::size_t>{5, 5});
  CHECK(b.dropped_mass == doctest::Approx(0.2));

  auto c = select_and_allocate(std::vector<double>{1.0}, 7, 0.5);
  CHECK(c.r == 1);
  CHECK(c.counts == std::vector<std::size_t>{7});
}

TEST_CASE("allocation ordering and ties") {
  auto a = select_and_allocate(std::vector<double>{0.1, 0.4, 0.1, 0.4}, 100, 0.5);
  CHECK(a.selected == std::vector<std::size_t>{1, 3, 0, 2});
  auto z = select_and_allocate(std::vector<double>{0.0, 2.0, 0.0}, 5, 0.5);
  CHECK(z.selected == std::vector<std::size_t>{1});
}

TEST_CASE("allocation errors") {
  CHECK_THROWS_AS(select_and_allocate(std::vector<double>{0.0, 0.0}, 10, 1.0), DegenerateMixtureError);
  CHECK_THROWS_AS(select_and_allocate(std::vector<double>{1.0}, 10, 0.0), ParameterError);
  CHECK_THROWS_AS(select_and_allocate(std::vector<double>{1.0}, 10, 10.0), ParameterError);
  CHECK_THROWS_AS(select_and_allocate(std::vector<double>{1.0, -1.0}, 10, 1.0), ParameterError);
}

TEST_CASE("allocation invariants on random instances") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 1 + rng() % 40;
    std::vector<double> w(k);
    for (auto& x : w) x = std::pow(unif(rng), 3.0);
    w[rng() % k] += 0.01;
    const std::size_t n = 2 + rng() % 9999;
    const double delta = unif(rng) * 0.999 * static_cast<double>(n) + 1e-6;
    auto a = select_and_allocate(w, n, delta);
    const double c = std::accumulate(w.begin(), w.end(), 0.0);
    CHECK(std::accumulate(a.counts.begin(), a.counts.end(), std::size_t{0}) == n);
    double agg = 0.0;
    for (std::size_t v = 0; v < a.r; ++v) {
      const double dev = std::abs(w[a.selected[v]] / c - static_cast<double>(a.counts[v]) / n);
      if (v + 1 < a.r) CHECK(dev <= 1.0 / n + 1e-15);
      if (v > 0) CHECK(w[a.selected[v - 1]] >= w[a.selected[v]]);
      agg += dev;
    }
    CHECK(agg <= (delta + 2.0 * (a.r - 1)) / n + 1e-12);
  }
}

TEST_CASE("automatic delta preset") {
  const std::vector<double> w{0.5, 0.25, 0.25};
  CHECK(auto_delta(w, 100) == doctest::Approx(300.0 / 28.0));
}

TEST_CASE("estimator examples") {
  auto seq = sobol(2);
  std::vector<ProductComponent> one{uniform_component({{0, 1}}, 1.0)};
  for (std::size_t n : {1, 5, 64}) {
    auto a = select_and_allocate(std::vector<double>{1.0}, n, 0.5);
    CHECK(estimate(one, a, [](std::span<const double>) { return 1.0; }, seq) == 1.0);
  }
  auto a = select_and_allocate(std::vector<double>{1.0}, 4096, 0.5);
  CHECK(estimate(one, a, [](std::span<const double> x) { return x[0]; }, seq) == doctest::Approx(0.5).epsilon(1e-3));

  std::vector<ProductComponent> two{uniform_component({{0, 1}}, 0.5), uniform_component({{1, 2}}, 0.5)};
  auto b = select_and_allocate(std::vector<double>{0.5, 0.5}, 4096, 0.5);
  CHECK(std::abs(estimate(two, b, [](std::span<const double> x) { return x[0]; }, seq) - 1.0) < 1e-3);
}

TEST_CASE("estimator linearity and f=1 mass identity") {
  auto seq = sobol(2);
  std::vector<ProductComponent> comps;
  std::vector<double> w;
  for (int i = 0; i < 6; ++i) {
    comps.push_back(uniform_component({{0.1 * i, 0.1 * i + 1}, {-1, 0.5 * i}}, 0.3 + 0.17 * i));
    w.push_back(comps.back().weight);
  }
  auto a = select_and_allocate(w, 500, 40.0);
  REQUIRE(a.r < 6);
  auto f = [](std::span<const double> x) { return std::sin(x[0]) * x[1]; };
  auto g = [](std::span<const double> x) { return x[0] * x[0] + x[1]; };
  const double ef = estimate(comps, a, f, seq);
  const double eg = estimate(comps, a, g, seq);
  const double efg = estimate(comps, a, [&](std::span<const double> x) { return 2.0 * f(x) - 3.0 * g(x); }, seq);
  CHECK(efg == doctest::Approx(2.0 * ef - 3.0 * eg).epsilon(1e-13));

  double selected_mass = 0.0;
  for (auto k : a.selected) selected_mass += w[k];
  const double one = estimate(comps, a, [](std::span<const double>) { return 1.0; }, seq);
  CHECK(one == doctest::Approx(selected_mass / a.mass).epsilon(1e-14));
  CHECK(one >= 1.0 - 40.0 / 500 - 1e-14);
}

TEST_CASE("estimator is invariant to component order with distinct weights") {
  auto seq = sobol(1);
  std::vector<ProductComponent> comps;
  for (int i = 0; i < 5; ++i) comps.push_back(uniform_component({{double(i), i + 1.5}}, 1.0 + i * 0.3711));
  auto f = [](std::span<const double> x) { return std::exp(-x[0]); };
  auto weights = [](const std::vector<ProductComponent>& cs) {
    std::vector<double> w;
    for (auto& c : cs) w.push_back(c.weight);
    return w;
  };
  // weights chosen so no N c_k / c lands on an integer, where summation order could flip a floor
  const double e1 = estimate(comps, select_and_allocate(weights(comps), 300, 0.5), f, seq);
  std::reverse(comps.begin(), comps.end());
  const double e2 = estimate(comps, select_and_allocate(weights(comps), 300, 0.5), f, seq);
  CHECK(e1 == e2);
}

TEST_CASE("zero-count components are skipped and reported") {
  auto seq = sobol(1);
  std::vector<ProductComponent> comps;
  std::vector<double> w{0.6, 0.2, 0.2};
  for (double x : w) comps.push_back(uniform_component({{0, 1}}, x));
  auto a = select_and_allocate(w, 2, 0.01);
  ComponentMixture model(comps);
  auto rep = estimate(model, a, [](std::span<const double>, std::span<double> out) { out[0] = 1.0; }, 1, seq);
  CHECK(rep.skipped >= 1);
  CHECK_FALSE(rep.warnings.empty());
  CHECK(rep.values[0] == doctest::Approx(rep.sampled_mass));
}

TEST_CASE("product-form QMC rate for a single uniform component") {
  auto seq = sobol(2);
  std::vector<ProductComponent> one{uniform_component({{0, 1}, {0, 1}}, 1.0)};
  for (int m = 8; m <= 14; ++m) {
    const std::size_t n = std::size_t{1} << m;
    auto a = select_and_allocate(std::vector<double>{1.0}, n, 0.5);
    const double e = estimate(one, a, [](std::span<const double> x) { return x[0] * x[1]; }, seq);
    const double bound = 2.0 * std::pow(std::log(double(n)), 2) / double(n);
    CHECK(std::abs(e - 0.25) <= bound);
  }
}

TEST_CASE("g diagnostic") {
  const std::vector<Interval> b1{{0, 1}}, b2{{0, 1}, {0, 1}};
  CHECK(g_diagnostic(std::vector<double>{1.0}, 1.0, b1, std::exp(1.0)) == doctest::Approx(3.0));
  CHECK(g_diagnostic(std::vector<double>{1.0, 1.0}, 1.0, b2, std::exp(1.0)) == doctest::Approx(15.0));
  CHECK(g_diagnostic(std::vector<double>{1e-9}, 2.0, b1, 100.0) < 1e-7);
  CHECK_THROWS_AS(g_diagnostic(std::vector<double>{0.0}, 1.0, b1, 10.0), ParameterError);
}

TEST_CASE("uniform density") {
  UniformDensity1D u(2.0, 4.0);
  CHECK(u.cdf(3.0) == 0.5);
  CHECK(u.inv_cdf(0.25) == 2.5);
  CHECK(u.pdf(3.0) == 0.5);
  CHECK_THROWS_AS(u.inv_cdf(1.5), DomainError);
  CHECK_THROWS_AS(UniformDensity1D(1.0, 1.0), ParameterError);
}
