#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wqmc/errors.hpp"
#include "wqmc/lowdisc.hpp"

using namespace wqmc;

namespace {

DigitalSequence van_der_corput(int w = kDefaultPrecision) {
  return DigitalSequence({GeneratingMatrix::identity(w)});
}

}  // namespace

TEST_CASE("identity matrix gives the van der Corput sequence") {
  auto seq = van_der_corput();
  CHECK(seq.point_at(0)[0] == 0.0);
  CHECK(seq.point_at(3)[0] == 0.75);
  auto b = seq.block(0, 4);
  REQUIRE(b.size() == 4);
  CHECK(b[0][0] == 0.0);
  CHECK(b[1][0] == 0.5);
  CHECK(b[2][0] == 0.25);
  CHECK(b[3][0] == 0.75);
}

TEST_CASE("sobol first points") {
  auto seq = sobol(2);
  auto p = seq.point_at(1);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.5);
  auto q2 = seq.point_at(2);
  auto q3 = seq.point_at(3);
  CHECK(q2[0] == 0.25);
  CHECK(q2[1] == 0.75);
  CHECK(q3[0] == 0.75);
  CHECK(q3[1] == 0.25);
}

TEST_CASE("sobol matches scipy's unscrambled reference for 4 dimensions") {
  // scipy.stats.qmc.Sobol(d=4, scramble=False).random(8)
  const double ref[8][4] = {{0, 0, 0, 0},
                            {0.5, 0.5, 0.5, 0.5},
                            {0.75, 0.25, 0.25, 0.25},
                            {0.25, 0.75, 0.75, 0.75},
                            {0.375, 0.375, 0.625, 0.875},
                            {0.875, 0.875, 0.125, 0.375},
                            {0.625, 0.125, 0.875, 0.625},
                            {0.125, 0.625, 0.375, 0.125}};
  // scipy emits points in Gray-code order; compare as sets.
  auto seq = sobol(4);
  auto pts = seq.block(0, 8);
  std::vector<std::vector<double>> a(pts.begin(), pts.end()), b;
  for (auto& r : ref) b.emplace_back(r, r + 4);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
}

TEST_CASE("block equals repeated point_at and concatenates") {
  auto seq = sobol(5);
  auto whole = seq.block(3, 300);
  for (std::uint64_t n = 0; n < 300; ++n) CHECK(whole[n] == seq.point_at(3 + n));
  auto a = seq.block(3, 100);
  auto b = seq.block(103, 200);
  a.insert(a.end(), b.begin(), b.end());
  CHECK(a == whole);
  CHECK(seq.block(7, 1)[0] == seq.point_at(7));

  std::vector<double> flat(40 * 5);
  seq.block(1000, 40, flat);
  for (std::size_t n = 0; n < 40; ++n) {
    auto p = seq.point_at(1000 + n);
    for (std::size_t j = 0; j < 5; ++j) CHECK(flat[n * 5 + j] == p[j]);
  }
}

TEST_CASE("cursor agrees with point_at from arbitrary starts") {
  auto seq = sobol(3);
  auto cur = seq.cursor(12345);
  std::vector<double> x(3);
  for (std::uint64_t n = 12345; n < 12345 + 500; ++n) {
    cur.coords(x);
    CHECK(x == seq.point_at(n));
    cur.advance();
  }
}

TEST_CASE("index overflow") {
  auto seq = van_der_corput(8);
  CHECK_NOTHROW(seq.point_at(255));
  CHECK_THROWS_AS(seq.point_at(256), IndexOverflowError);
  CHECK_THROWS_AS(seq.block(250, 7), IndexOverflowError);
  CHECK_NOTHROW(seq.block(250, 6));
}

TEST_CASE("prefixes are permutations of the dyadic grid") {
  auto seq = sobol(8);
  for (int m = 1; m <= 12; ++m) {
    const std::uint64_t n = std::uint64_t{1} << m;
    auto pts = seq.block(0, n);
    for (std::size_t j = 0; j < 8; ++j) {
      std::vector<std::uint64_t> cells;
      for (auto& p : pts) cells.push_back(static_cast<std::uint64_t>(std::ldexp(p[j], m)));
      std::sort(cells.begin(), cells.end());
      bool perm = true;
      for (std::uint64_t i = 0; i < n; ++i) perm = perm && cells[i] == i;
      CHECK(perm);
    }
  }
}

TEST_CASE("identity sequence is injective at small precision") {
  auto seq = van_der_corput(16);
  std::vector<double> xs;
  for (std::uint64_t n = 0; n < (1U << 16); ++n) xs.push_back(seq.point_at(n)[0]);
  std::sort(xs.begin(), xs.end());
  CHECK(std::adjacent_find(xs.begin(), xs.end()) == xs.end());
}

TEST_CASE("is_net") {
  auto vdc = van_der_corput();
  CHECK(is_net(vdc.block(0, 8), 3, 0));
  std::vector<UnitPoint> origin(8, UnitPoint{0.0});
  CHECK_FALSE(is_net(origin, 3, 0));
  auto s2 = sobol(2);
  CHECK(is_net(s2.block(0, 16), 4, 0));
  CHECK(is_net(s2.block(0, 8), 3, 0));
  for (int m = 1; m <= 8; ++m) CHECK(is_net(s2.block(0, std::uint64_t{1} << m), m, 0));
  CHECK_THROWS_AS(is_net(s2.block(0, 7), 3, 0), ParameterError);
}

TEST_CASE("published t-values hold for higher dimensions") {
  for (std::size_t s = 3; s <= 5; ++s) {
    auto seq = sobol(s);
    const int t = sobol_t_value(s);
    for (int m = t; m <= 10; ++m) CHECK(is_net(seq.block(0, std::uint64_t{1} << m), m, t));
  }
  CHECK(sobol_t_value(1) == 0);
  CHECK(sobol_t_value(2) == 0);
  CHECK(sobol_t_value(3) == 1);
}

TEST_CASE("generating matrix invariants") {
  std::vector<std::uint64_t> cols(4);
  for (int k = 0; k < 4; ++k) cols[k] = std::uint64_t{1} << (3 - k);
  CHECK_NOTHROW(GeneratingMatrix(cols, 4));
  cols[1] |= 1;  // below the diagonal
  CHECK_THROWS_AS(GeneratingMatrix(cols, 4), ParameterError);
  cols[1] = 0;  // zero diagonal
  CHECK_THROWS_AS(GeneratingMatrix(cols, 4), ParameterError);
  CHECK_THROWS_AS(GeneratingMatrix(std::vector<std::uint64_t>(3, 0), 4), ParameterError);
  auto seq = sobol(16);
  for (std::size_t j = 0; j < 16; ++j) {
    const auto& m = seq.matrix(j);
    for (int k = 0; k < m.precision(); ++k) {
      const auto c = m.column(k);
      CHECK(((c >> (m.precision() - 1 - k)) & 1U) == 1U);
      CHECK((c & ((std::uint64_t{1} << (m.precision() - 1 - k)) - 1)) == 0U);
    }
  }
}

TEST_CASE("direction-number parsing") {
  SUBCASE("dimension 1 only") {
    std::istringstream in("# just the identity\n1 0 0\n");
    auto seq = load_direction_numbers(in);
    CHECK(seq.dim() == 1);
    CHECK(seq.point_at(3)[0] == 0.75);
  }
  SUBCASE("embedded table reproduces sobol()") {
    std::istringstream in{std::string(embedded_direction_numbers())};
    auto seq = load_direction_numbers(in);
    CHECK(seq.dim() == 16);
    auto ref = sobol(2);
    for (std::uint64_t n = 1; n <= 3; ++n) {
      auto p = seq.point_at(n);
      auto q = ref.point_at(n);
      CHECK(p[0] == q[0]);
      CHECK(p[1] == q[1]);
    }
  }
  SUBCASE("truncated line") {
    std::istringstream in("2 1 0 1\n3 2 1 1\n");
    CHECK_THROWS_AS(load_direction_numbers(in), ParseError);
  }
  SUBCASE("dimension gap") {
    std::istringstream in("2 1 0 1\n4 2 1 1 3\n");
    CHECK_THROWS_AS(load_direction_numbers(in), ParseError);
  }
  SUBCASE("bad token") {
    std::istringstream in("2 1 0 x\n");
    CHECK_THROWS_AS(load_direction_numbers(in), ParseError);
  }
  SUBCASE("even direction integer") {
    std::istringstream in("2 1 0 2\n");
    CHECK_THROWS_AS(load_direction_numbers(in), ParseError);
  }
  SUBCASE("error names the line") {
    std::istringstream in("# header\n2 1 0 1\n3 2 1 1\n");
    try {
      load_direction_numbers(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
}
