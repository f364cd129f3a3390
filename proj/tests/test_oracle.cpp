#include <doctest.h>

#include <cmath>

#include "wqmc/errors.hpp"
#include "wqmc/oracle.hpp"
#include "wqmc/problems.hpp"

using namespace wqmc;

namespace {

QuadratureSpec unit_square(std::size_t n, QuadratureRule rule) {
  return {{{0.0, 1.0}, {0.0, 1.0}}, {n, n}, rule};
}

}  // namespace

TEST_CASE("constant and linear integrands") {
  const Integrand one = [](std::span<const double>) { return 1.0; };
  for (auto rule : {QuadratureRule::kMidpoint, QuadratureRule::kTrapezoid}) {
    const auto r = tensor_quadrature(one, unit_square(17, rule));
    CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  const Integrand lin = [](std::span<const double> x) { return x[0]; };
  const auto r = tensor_quadrature(lin, unit_square(9, QuadratureRule::kTrapezoid));
  CHECK(r.values[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.error_estimates[0] <= 1e-14);
}

TEST_CASE("midpoint on x^2 with Richardson") {
  const Integrand sq = [](std::span<const double> x) { return x[0] * x[0]; };
  const auto r = tensor_quadrature(sq, unit_square(4, QuadratureRule::kMidpoint));
  CHECK(r.values[0] == doctest::Approx(0.328125).epsilon(1e-14));
  CHECK(r.error_estimates[0] == doctest::Approx(0.015625).epsilon(1e-12));
  CHECK(r.richardson[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(r.evaluations == 16 + 4);
  const auto h = halve(unit_square(4, QuadratureRule::kMidpoint));
  CHECK(h.nodes[0] == 2);
  const auto ht = halve(unit_square(9, QuadratureRule::kTrapezoid));
  CHECK(ht.nodes[0] == 5);
}

TEST_CASE("second-order convergence and rescaling") {
  const Integrand g = [](std::span<const double> x) { return std::exp(x[0]) * std::sin(3.0 * x[1]); };
  const double exact = (std::exp(1.0) - 1.0) * (1.0 - std::cos(3.0)) / 3.0;
  for (auto rule : {QuadratureRule::kMidpoint, QuadratureRule::kTrapezoid}) {
    const std::size_t off = rule == QuadratureRule::kTrapezoid ? 1 : 0;
    const double e1 = std::abs(tensor_quadrature(g, unit_square(16 + off, rule)).values[0] - exact);
    const double e2 = std::abs(tensor_quadrature(g, unit_square(32 + off, rule)).values[0] - exact);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  }

  const Integrand pi = [](std::span<const double> x) { return std::exp(-x[0] * x[0] - 2.0 * x[1] * x[1]); };
  const Integrand pi8 = [&](std::span<const double> x) { return 8.0 * pi(x); };
  const Integrand f = [](std::span<const double> x) { return x[0] + x[1] * x[1]; };
  const QuadratureSpec spec{{{-1.0, 2.0}, {-1.5, 1.0}}, {65, 65}, QuadratureRule::kTrapezoid};
  const auto a = reference_expectation(pi, f, spec);
  const auto b = reference_expectation(pi8, f, spec);
  CHECK(a.value == b.value);
  CHECK(b.denominator == 8.0 * a.denominator);
}

TEST_CASE("shared-node expectations agree with single calls") {
  const Banana2D pi;
  const Integrand dens = [&](std::span<const double> x) { return pi(x); };
  const QuadratureSpec spec{Banana2D::box(), {129, 129}, QuadratureRule::kTrapezoid};
  const VectorIntegrand both = [](std::span<const double> x, std::span<double> out) {
    out[0] = x[0] * x[0];
    out[1] = 1.0;
  };
  const auto v = reference_expectations(dens, both, 2, spec);
  const auto single = reference_expectation(dens, [](std::span<const double> x) { return x[0] * x[0]; }, spec);
  CHECK(v[0].value == single.value);
  CHECK(v[1].value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("guards") {
  const Integrand one = [](std::span<const double>) { return 1.0; };
  const Integrand zero = [](std::span<const double>) { return 0.0; };
  const QuadratureSpec big{{{0, 1}, {0, 1}, {0, 1}}, {1000, 1000, 1000}, QuadratureRule::kMidpoint};
  CHECK_THROWS_AS(tensor_quadrature(one, big), ParameterError);
  CHECK_THROWS_AS(tensor_quadrature(one, unit_square(1, QuadratureRule::kTrapezoid)), ParameterError);
  CHECK_THROWS_AS(reference_expectation(zero, one, unit_square(9, QuadratureRule::kTrapezoid)),
                  DegenerateDensityError);
  CHECK(parse_rule(rule_name(QuadratureRule::kMidpoint)) == QuadratureRule::kMidpoint);
  CHECK_THROWS_AS(parse_rule("simpson"), ParameterError);
}

TEST_CASE("banana corner-peak expectation is resolved") {
  const Banana2D pi;
  const auto f2 = genz_2d(GenzKind::kCornerPeak);
  const Integrand dens = [&](std::span<const double> x) { return pi(x); };
  const Integrand f = [&](std::span<const double> x) { return f2(x); };
  const QuadratureSpec spec{Banana2D::box(), {2049, 2049}, QuadratureRule::kTrapezoid};
  const auto r = reference_expectation(dens, f, spec);
  CHECK(r.error_estimate < 1e-7);
  CHECK(r.denominator > 0.0);
  CHECK(r.value > 0.0);
  CHECK(r.value < 1.0);
}
