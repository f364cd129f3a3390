#include <doctest.h>

#include <cmath>
#include <set>

#include "wqmc/adaptgrid.hpp"
#include "wqmc/errors.hpp"

using namespace wqmc;

namespace {

struct Counting {
  DensityFunction pi;
  std::shared_ptr<std::multiset<std::vector<double>>> seen = std::make_shared<std::multiset<std::vector<double>>>();
  double operator()(std::span<const double> x) const {
    seen->insert(std::vector<double>(x.begin(), x.end()));
    return pi(x);
  }
};

AdaptiveOptions opts(double eps, std::vector<std::size_t> res = {}, std::size_t budget = kDefaultBudget) {
  AdaptiveOptions o;
  o.epsilon = eps;
  o.initial_resolution = std::move(res);
  o.budget = budget;
  return o;
}

const std::vector<Interval> kUnit{{0, 1}};

}  // namespace

TEST_CASE("linear density: no refinement after the first step") {
  DensityFunction pi = [](std::span<const double> x) { return 1.0 + 2.0 * x[0]; };
  AdaptiveState st(pi, kUnit, opts(1e-6));
  CHECK(st.any_flagged());
  st = refine_once(std::move(st), pi);
  CHECK_FALSE(st.any_flagged());
  CHECK(st.surrogate().knots(0).size() == 3);
  CHECK(st.iterations() == 1);
}

TEST_CASE("kink at a knot gives zero indicators") {
  DensityFunction pi = [](std::span<const double> x) { return std::abs(x[0] - 0.5); };
  auto r = run_to_convergence(pi, kUnit, opts(1e-9));
  CHECK(r.report.iterations == 1);
  CHECK(r.surrogate.knots(0).values() == std::vector<double>{0.0, 0.5, 1.0});
}

TEST_CASE("x^2 from knots (0,1) inserts the midpoint") {
  DensityFunction pi = [](std::span<const double> x) { return x[0] * x[0]; };
  AdaptiveState st(pi, kUnit, opts(0.2, {1}));
  st = refine_once(std::move(st), pi);
  CHECK(st.surrogate().knots(0).values() == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(st.flags()[0] == std::vector<bool>{true, true});
  // indicator 0.25 with max value 1: epsilon 0.3 reverts the bisection
  AdaptiveState st2(pi, kUnit, opts(0.3, {1}));
  st2 = refine_once(std::move(st2), pi);
  CHECK(st2.surrogate().knots(0).size() == 2);
  CHECK_FALSE(st2.any_flagged());
  CHECK(st2.evaluations() == 3);  // the reverted midpoint was still evaluated once
}

TEST_CASE("constant density converges in one iteration with the grid unchanged") {
  DensityFunction pi = [](std::span<const double>) { return 1.0; };
  const std::vector<Interval> box{{-3, 1}, {2, 7}, {0, 1}};
  auto r = run_to_convergence(pi, box, opts(1e-8));
  CHECK(r.report.iterations == 1);
  CHECK(r.report.converged);
  CHECK(r.report.intervals == std::vector<std::size_t>{2, 2, 2});
}

TEST_CASE("budget exhaustion") {
  DensityFunction pi = [](std::span<const double> x) { return std::exp(-50 * (x[0] - 0.3) * (x[0] - 0.3)); };
  const std::vector<Interval> box{{0, 1}, {0, 1}};
  DensityFunction pi2 = [&](std::span<const double> x) { return pi(x) * pi(x.subspan(1)); };
  auto r = run_to_convergence(pi2, box, opts(1e-6, {}, 10));
  CHECK(r.report.budget_exceeded);
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.evaluations <= 10);
  CHECK_THROWS_AS(run_to_convergence(pi2, box, opts(1e-6, {}, 8)), ParameterError);
}

TEST_CASE("every grid point is evaluated exactly once") {
  Counting counter{[](std::span<const double> x) {
    return std::exp(-20 * ((x[0] - 0.2) * (x[0] - 0.2) + (x[1] + 0.4) * (x[1] + 0.4)));
  }};
  DensityFunction pi = counter;
  const std::vector<Interval> box{{-1, 1}, {-1, 1}};
  AdaptiveState st(pi, box, opts(1e-3));
  std::vector<std::vector<double>> prev_knots;
  while (st.any_flagged()) {
    std::vector<std::vector<double>> before;
    for (std::size_t j = 0; j < 2; ++j) before.push_back(st.surrogate().knots(j).values());
    st = refine_once(std::move(st), pi);
    for (std::size_t j = 0; j < 2; ++j) {
      const auto& after = st.surrogate().knots(j).values();
      CHECK(std::includes(after.begin(), after.end(), before[j].begin(), before[j].end()));
    }
  }
  CHECK(st.evaluations() == counter.seen->size());
  CHECK(st.evaluations() == st.cached_points());
  std::set<std::vector<double>> distinct(counter.seen->begin(), counter.seen->end());
  CHECK(distinct.size() == counter.seen->size());
  CHECK(st.iterations() > 3);
  // surrogate interpolates at its own knots
  std::vector<std::size_t> idx(2);
  std::vector<double> y(2);
  const auto& s = st.surrogate();
  for (std::size_t f = 0; f < s.grid_size(); f += 7) {
    s.multi_index(f, idx);
    y = {s.knots(0)[idx[0]], s.knots(1)[idx[1]]};
    CHECK(s.values()[f] == counter.pi(y));
  }
}

TEST_CASE("flags mirror intervals and history records each sweep") {
  DensityFunction pi = [](std::span<const double> x) { return 1.0 / (1.0 + 30 * x[0] * x[0]); };
  const std::vector<Interval> box{{-1, 1}};
  AdaptiveState st(pi, box, opts(1e-3));
  for (int i = 0; i < 4 && st.any_flagged(); ++i) {
    st = refine_once(std::move(st), pi);
    CHECK(st.flags()[0].size() == st.surrogate().knots(0).intervals());
  }
  CHECK(st.flags_history().size() == st.iterations());
}

TEST_CASE("local interpolation bound on a 1-D polynomial") {
  // |pi - phi| <= L_k * h_k on each cell, with L_k the max |pi'| on the cell.
  DensityFunction pi = [](std::span<const double> x) { return 1.0 + x[0] * x[0] * x[0]; };
  auto r = run_to_convergence(pi, kUnit, opts(1e-3));
  const auto& k = r.surrogate.knots(0);
  for (std::size_t c = 0; c < k.intervals(); ++c) {
    const double h = k[c + 1] - k[c];
    const double lip = 3.0 * k[c + 1] * k[c + 1];
    for (int i = 0; i <= 50; ++i) {
      const double x = k[c] + h * i / 50.0;
      const double xv[1] = {x};
      CHECK(std::abs(r.surrogate.eval(xv) - pi(xv)) <= lip * h + 1e-15);
    }
  }
}

TEST_CASE("determinism") {
  DensityFunction pi = [](std::span<const double> x) { return std::exp(-8 * (x[0] * x[0] + x[1] * x[1] - x[0] * x[1])); };
  const std::vector<Interval> box{{-2, 2}, {-2, 2}};
  auto a = run_to_convergence(pi, box, opts(1e-3));
  auto b = run_to_convergence(pi, box, opts(1e-3));
  CHECK(a.surrogate.values() == b.surrogate.values());
  CHECK(a.report.evaluations == b.report.evaluations);
}

TEST_CASE("non-finite density is rejected") {
  DensityFunction pi = [](std::span<const double> x) { return x[0] > 0.6 ? INFINITY : 1.0; };
  CHECK_THROWS_AS(run_to_convergence(pi, kUnit, opts(1e-3)), InvalidDensityError);
}
