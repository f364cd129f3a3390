// Command-line driver: golden values, surrogate builds, single estimates,
// convergence sweeps and the predator-prey dataset.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wqmc/errors.hpp"
#include "wqmc/experiment.hpp"
#include "wqmc/io.hpp"
#include "wqmc/problems.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::string config;
  std::string problem, method, delta, out_dir, golden, dataset;
  std::vector<std::string> qoi;
  std::size_t levels = 0, components = 0, budget = 0, level = 0, samples = 0;
  std::size_t reference_samples = 0, quadrature_nodes = 0, em_samples = 0;
  double tail_mult = 0.0, sigma = 0.0;
  std::uint64_t seed = 0;
  bool identity_rotation = false, paper_scale = false;
};

struct Registered {
  std::vector<std::pair<CLI::Option*, std::string>> options;  // option, config key
};

void add_common(CLI::App* app, Flags& f, Registered& reg) {
  app->add_option("--config", f.config, "JSON config file (keys mirror the long flags)");
  auto add = [&](CLI::Option* o, const std::string& key) { reg.options.emplace_back(o, key); };
  add(app->add_option("--problem", f.problem, "banana | predprey"), "problem");
  add(app->add_option("--method", f.method, "adaptive | combined"), "method");
  add(app->add_option("--qoi", f.qoi, "quantities of interest (f1..f3 or risk_P, moment_Q2, ...)")->delimiter(','),
      "qoi");
  add(app->add_option("--levels", f.levels, "number of refinement levels"), "levels");
  add(app->add_option("--delta", f.delta, "allocation threshold delta, or 'auto'"), "delta");
  add(app->add_option("--tail-mult", f.tail_mult, "Gaussian truncation multiplier a"), "tail_mult");
  add(app->add_flag("--identity-rotation", f.identity_rotation, "use U_i = I in the partition of unity"),
      "identity_rotation");
  add(app->add_option("--seed", f.seed, "seed for EM, resampling and (dataset) noise"), "seed");
  add(app->add_flag("--paper-scale", f.paper_scale, "large-scale thresholds and sample counts"), "paper_scale");
  add(app->add_option("--out-dir", f.out_dir, "output directory"), "out_dir");
  add(app->add_option("--golden", f.golden, "golden values file (default <out-dir>/golden.json)"), "golden");
  add(app->add_option("--dataset", f.dataset, "predator-prey dataset JSON"), "dataset");
  add(app->add_option("--sigma", f.sigma, "scale parameter of the 2-D density"), "sigma");
  add(app->add_option("--components", f.components, "Gaussian mixture components"), "components");
  add(app->add_option("--budget", f.budget, "density evaluation budget per surrogate"), "budget");
  add(app->add_option("--em-samples", f.em_samples, "EM training sample count"), "em_samples");
  add(app->add_option("--reference-samples", f.reference_samples, "QMC samples for the self-reference"),
      "reference_samples");
  add(app->add_option("--quadrature-nodes", f.quadrature_nodes, "nodes per dimension for the quadrature oracle"),
      "quadrature_nodes");
}

wqmc::ExperimentConfig resolve(const Flags& f, const Registered& reg) {
  wqmc::Json j = wqmc::Json::object();
  if (!f.config.empty()) {
    try {
      j = wqmc::read_json_file(f.config);
    } catch (const wqmc::ParseError& e) {
      throw wqmc::ConfigError(e.what());
    }
    if (!j.is_object()) throw wqmc::ConfigError("config file must hold a JSON object");
  }
  for (const auto& [opt, key] : reg.options) {
    if (opt->count() == 0) continue;
    if (key == "problem") j[key] = f.problem;
    if (key == "method") j[key] = f.method;
    if (key == "qoi") j[key] = f.qoi;
    if (key == "levels") j[key] = f.levels;
    if (key == "delta") {
      if (f.delta == "auto") {
        j[key] = "auto";
      } else {
        try {
          std::size_t used = 0;
          j[key] = std::stod(f.delta, &used);
          if (used != f.delta.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw wqmc::ConfigError("--delta expects a number or 'auto'");
        }
      }
    }
    if (key == "tail_mult") j[key] = f.tail_mult;
    if (key == "identity_rotation") j[key] = f.identity_rotation;
    if (key == "seed") j[key] = f.seed;
    if (key == "paper_scale") j[key] = f.paper_scale;
    if (key == "out_dir") j[key] = f.out_dir;
    if (key == "golden") j[key] = f.golden;
    if (key == "dataset") j[key] = f.dataset;
    if (key == "sigma") j[key] = f.sigma;
    if (key == "components") j[key] = f.components;
    if (key == "budget") j[key] = f.budget;
    if (key == "em_samples") j[key] = f.em_samples;
    if (key == "reference_samples") j[key] = f.reference_samples;
    if (key == "quadrature_nodes") j[key] = f.quadrature_nodes;
  }
  return wqmc::config_from_json(j);
}

std::string golden_file(const wqmc::ExperimentConfig& c) {
  return c.golden.empty() ? (std::filesystem::path(c.out_dir) / "golden.json").string() : c.golden;
}

int cmd_oracle(const wqmc::ExperimentConfig& c) {
  const auto path = golden_file(c);
  wqmc::GoldenTable table;
  if (std::filesystem::exists(path)) {
    try {
      table = wqmc::golden_from_json(wqmc::read_json_file(path));
    } catch (const wqmc::ParseError& e) {
      throw wqmc::ConfigError(e.what());
    }
  }
  wqmc::compute_golden(c, table);
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  wqmc::write_json_file(path, wqmc::to_json(table));
  for (const auto& q : wqmc::resolved_qois(c)) {
    const auto key = wqmc::golden_key(c, q);
    const auto& g = table.at(key);
    std::cout << key << " = " << wqmc::format_double(g.value) << " (error estimate "
              << wqmc::format_double(g.error_estimate) << ")\n";
  }
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_approx(const wqmc::ExperimentConfig& c, std::size_t level) {
  const auto j = wqmc::build_level(c, level);
  std::filesystem::create_directories(c.out_dir);
  const auto path = (std::filesystem::path(c.out_dir) /
                     ("model_" + c.problem + "_" + c.method + "_k" + std::to_string(level) + ".json"))
                        .string();
  wqmc::write_json_file(path, j);
  std::cout << "level " << level << ": epsilon " << wqmc::format_double(j["epsilon"].get<double>()) << ", "
            << j["grid_evaluations"].get<std::size_t>() << " grid evaluations\n";
  for (const auto& w : j["warnings"]) std::cout << "warning: " << w.get<std::string>() << "\n";
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_integrate(const wqmc::ExperimentConfig& c, std::size_t level, std::size_t samples) {
  std::cout << wqmc::integrate_level(c, level, samples).dump(2) << "\n";
  return 0;
}

int cmd_converge(const wqmc::ExperimentConfig& c) {
  const auto res = wqmc::run_experiment(c);
  for (const auto& r : res.records) {
    std::cout << r.problem << " " << r.method << " " << r.qoi << ": slope ";
    if (r.slope) {
      std::cout << wqmc::format_double(*r.slope);
    } else {
      std::cout << "n/a";
    }
    if (!r.note.empty()) std::cout << " (" << r.note << ")";
    std::cout << "\n";
  }
  std::cout << "wrote " << (std::filesystem::path(c.out_dir) / ("converge_" + c.problem + "_" + c.method)).string()
            << ".{csv,json}\n";
  return 0;
}

int cmd_dataset(const wqmc::ExperimentConfig& c, bool seed_given) {
  const std::uint64_t seed = seed_given ? c.seed : wqmc::kDatasetSeed;
  const auto d = wqmc::synth_data(wqmc::kTrueParams, std::sqrt(2.0), seed);
  std::filesystem::create_directories(c.out_dir);
  const auto path = (std::filesystem::path(c.out_dir) / "dataset.json").string();
  wqmc::write_json_file(path, wqmc::to_json(d));
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted quasi-Monte Carlo integration against unnormalized densities"};
  app.require_subcommand(1);
  Flags f;
  Registered reg;
  auto* oracle = app.add_subcommand("oracle", "compute golden reference values");
  auto* approx = app.add_subcommand("approx", "build and serialize a surrogate or partition model");
  auto* integrate = app.add_subcommand("integrate", "one estimate at a given level");
  auto* converge = app.add_subcommand("converge", "full convergence sweep with slope fits");
  auto* dataset = app.add_subcommand("dataset", "write the predator-prey dataset");
  for (auto* sub : {oracle, approx, integrate, converge, dataset}) add_common(sub, f, reg);
  for (auto* sub : {approx, integrate}) sub->add_option("--level", f.level, "level index k (default 0)");
  integrate->add_option("--samples", f.samples, "QMC samples (default: the level's N)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    const auto c = resolve(f, reg);
    if (oracle->parsed()) return cmd_oracle(c);
    if (approx->parsed()) return cmd_approx(c, f.level);
    if (integrate->parsed()) return cmd_integrate(c, f.level, f.samples);
    if (converge->parsed()) return cmd_converge(c);
    bool seed_given = false;
    for (const auto& [opt, key] : reg.options) seed_given |= key == "seed" && opt->count() > 0;
    if (!seed_given && !f.config.empty()) {
      seed_given = wqmc::read_json_file(f.config).contains("seed");
    }
    return cmd_dataset(c, seed_given);
  } catch (const wqmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const wqmc::ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const wqmc::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const wqmc::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
