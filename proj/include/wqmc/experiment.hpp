#pragma once

// Convergence experiments: a problem, a surrogate method and a schedule of
// (threshold, sample count) levels, run against stored reference values.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wqmc/errors.hpp"
#include "wqmc/io.hpp"
#include "wqmc/pou.hpp"

namespace wqmc {

/// Invalid or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ExperimentConfig {
  std::string problem = "banana";  // banana | predprey
  std::string method = "adaptive";  // adaptive | combined
  /// Quantities of interest; empty selects every one the problem defines.
  std::vector<std::string> qois;
  std::size_t levels = 4;
  double delta = 0.5;
  /// Use delta = 3N / (3 + A N) per surrogate instead of `delta`.
  bool auto_delta = false;
  double tail_mult = kDefaultTailMultiplier;
  bool identity_rotation = false;
  std::uint64_t seed = 1;
  bool paper_scale = false;
  std::string out_dir = ".";
  /// Golden values file; empty means <out_dir>/golden.json.
  std::string golden;
  /// Predator-prey dataset file; empty means the built-in seeded dataset.
  std::string dataset;

  double sigma = 1.0;
  std::size_t components = 1;
  std::size_t budget = kDefaultBudget;
  std::size_t em_samples = 10000;
  /// Lattice cells per dimension for EM training data; 0 picks by dimension.
  std::size_t lattice_cells = 0;
  std::size_t quadrature_nodes = 2049;
  std::size_t reference_samples = std::size_t{1} << 22;
};

/// Strict parse: unknown keys and wrong types raise ConfigError.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);
void validate(const ExperimentConfig& c);

struct Level {
  double epsilon;
  std::size_t samples;
};

/// Desk scale: eps = 4^-k 5e-3, N = 4^k 2^12. With paper_scale: 4^-k 5e-4 and
/// 4^(k+1) 1e5 for the 2-D problem, 4^-k 5e-6 and 4^k 1e5 for predator-prey.
std::vector<Level> level_schedule(const ExperimentConfig& c);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

/// Least squares slope of log(error) against log(N). Zero errors are left
/// out; fewer than three usable points raise FitError.
SlopeFit fit_slope(std::span<const double> n, std::span<const double> error);

struct ConvergencePoint {
  std::size_t samples = 0;
  double epsilon = 0.0;
  double estimate = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

struct ConvergenceRecord {
  std::string problem;
  std::string method;
  std::string qoi;
  double reference = 0.0;
  std::vector<ConvergencePoint> points;
  std::optional<double> slope;
  std::string note;
};

struct ExperimentResult {
  std::vector<ConvergenceRecord> records;
  Json summary;
  std::string csv;
};

/// Golden table key for a quantity, e.g. "banana/sigma=1/f2".
std::string golden_key(const ExperimentConfig& c, const std::string& qoi);

/// Quadrature (2-D) or high-N self-reference (predator-prey) values for the
/// configured quantities, merged into `table`.
void compute_golden(const ExperimentConfig& c, GoldenTable& table);

/// Runs every level and writes <out_dir>/converge_<problem>_<method>.{csv,json}.
/// Missing or mismatched golden values raise ConfigError.
ExperimentResult run_experiment(const ExperimentConfig& c);

/// Builds the surrogate at `level` and returns its JSON form.
Json build_level(const ExperimentConfig& c, std::size_t level);

/// One estimate at `level` with `samples` points (0 uses the schedule).
Json integrate_level(const ExperimentConfig& c, std::size_t level, std::size_t samples);

std::vector<std::string> resolved_qois(const ExperimentConfig& c);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace wqmc
