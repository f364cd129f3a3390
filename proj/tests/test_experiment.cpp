#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "wqmc/errors.hpp"
#include "wqmc/experiment.hpp"

using namespace wqmc;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig banana_config(const std::string& out, std::size_t levels) {
  ExperimentConfig c;
  c.levels = levels;
  c.qois = {"f2"};
  c.golden = WQMC_GOLDEN_FILE;
  c.out_dir = (std::filesystem::temp_directory_path() / out).string();
  return c;
}

}  // namespace

TEST_CASE("slope fit examples") {
  std::vector<double> n, e;
  for (int k = 0; k < 5; ++k) {
    n.push_back(4096.0 * std::pow(4.0, k));
    e.push_back(3.0 / n.back());
  }
  CHECK(fit_slope(n, e).slope == doctest::Approx(-1.0).epsilon(1e-12));
  const std::vector<double> flat(n.size(), 0.25);
  CHECK(std::abs(fit_slope(n, flat).slope) <= 1e-12);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  std::vector<double> noisy;
  for (double x : n) noisy.push_back(2.0 * std::pow(x, -0.75) * (1.0 + jitter(rng)));
  const double s = fit_slope(n, noisy).slope;
  CHECK(s >= -0.8);
  CHECK(s <= -0.7);

  std::vector<double> with_zero = e;
  with_zero[1] = 0.0;
  const auto fit = fit_slope(n, with_zero);
  CHECK(fit.excluded == 1);
  CHECK(fit.used == 4);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));

  const std::vector<double> two_n{1.0, 2.0}, two_e{1.0, 0.5};
  CHECK_THROWS_AS(fit_slope(two_n, two_e), FitError);
  const std::vector<double> zeros{0.0, 0.0, 1.0, 2.0, 0.0};
  CHECK_THROWS_AS(fit_slope(n, zeros), FitError);
}

TEST_CASE("config parsing is strict") {
  auto c = config_from_json(Json::parse(R"({"problem": "predprey", "method": "combined", "qoi": "moment_P1",
                                             "levels": 3, "delta": "auto", "seed": 9})"));
  CHECK(c.problem == "predprey");
  CHECK(c.qois == std::vector<std::string>{"moment_P1"});
  CHECK(c.auto_delta);
  CHECK(c.seed == 9);
  const auto again = config_from_json(to_json(c));
  CHECK(to_json(again) == to_json(c));

  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"problme": "banana"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"levels": "four"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"method": "sparse"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"qoi": ["risk_P"]})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"delta": -1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"delta": "smart"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse("[1, 2]")), ConfigError);
}

TEST_CASE("level schedules") {
  ExperimentConfig c;
  auto s = level_schedule(c);
  REQUIRE(s.size() == 4);
  CHECK(s[0].epsilon == 5e-3);
  CHECK(s[3].samples == 4096u * 64u);
  CHECK(s[2].epsilon == doctest::Approx(5e-3 / 16.0).epsilon(1e-15));
  c.paper_scale = true;
  s = level_schedule(c);
  CHECK(s[0].samples == 400000u);
  CHECK(s[0].epsilon == 5e-4);
  c.problem = "predprey";
  s = level_schedule(c);
  CHECK(s[0].samples == 100000u);
  CHECK(s[1].epsilon == doctest::Approx(5e-6 / 4.0).epsilon(1e-15));
}

TEST_CASE("a single level gives a single row") {
  const auto c = banana_config("wqmc_test_single", 1);
  const auto res = run_experiment(c);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].points.size() == 1);
  CHECK_FALSE(res.records[0].slope.has_value());
  CHECK(res.records[0].note.find("at least 3") != std::string::npos);
  CHECK(res.csv == slurp(std::filesystem::path(c.out_dir) / "converge_banana_adaptive.csv"));
  std::istringstream lines(res.csv);
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 2);
  CHECK(res.summary["slopes"]["f2"].is_null());
}

TEST_CASE("reports are byte-stable and slopes match the csv") {
  const auto a = banana_config("wqmc_test_det_a", 3);
  auto b = a;
  b.out_dir = (std::filesystem::temp_directory_path() / "wqmc_test_det_b").string();
  const auto ra = run_experiment(a);
  run_experiment(b);
  const auto stem = std::string("converge_banana_adaptive");
  CHECK(slurp(std::filesystem::path(a.out_dir) / (stem + ".csv")) ==
        slurp(std::filesystem::path(b.out_dir) / (stem + ".csv")));
  auto ja = Json::parse(slurp(std::filesystem::path(a.out_dir) / (stem + ".json")));
  auto jb = Json::parse(slurp(std::filesystem::path(b.out_dir) / (stem + ".json")));
  // Only the output directory differs between the two configs.
  ja["config"].erase("out_dir");
  jb["config"].erase("out_dir");
  CHECK(ja == jb);

  std::istringstream csv(ra.csv);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "N,error,evals,method,qoi");
  std::vector<double> n, e;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    n.push_back(std::stod(cell));
    std::getline(row, cell, ',');
    e.push_back(std::stod(cell));
  }
  CHECK(n.size() == 3);
  CHECK(n[0] < n[1]);
  CHECK(fit_slope(n, e).slope == ja["slopes"]["f2"].get<double>());
}

TEST_CASE("missing golden values point at the oracle command") {
  auto c = banana_config("wqmc_test_missing", 1);
  c.golden = (std::filesystem::temp_directory_path() / "wqmc_no_such_golden.json").string();
  try {
    run_experiment(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("oracle") != std::string::npos);
  }
  c = banana_config("wqmc_test_missing", 1);
  c.sigma = 3.0;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}
