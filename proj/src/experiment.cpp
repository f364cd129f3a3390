#include "wqmc/experiment.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>

#include "wqmc/adaptgrid.hpp"
#include "wqmc/errors.hpp"
#include "wqmc/lowdisc.hpp"
#include "wqmc/oracle.hpp"
#include "wqmc/problems.hpp"

namespace wqmc {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- config

namespace {

const std::set<std::string> kConfigKeys = {
    "problem",    "method",   "qoi",        "levels",        "delta",         "tail_mult",
    "identity_rotation",      "seed",       "paper_scale",   "out_dir",       "golden",
    "dataset",    "sigma",    "components", "budget",        "em_samples",    "lattice_cells",
    "quadrature_nodes",       "reference_samples"};

template <class T>
T get_field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kConfigKeys.contains(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
  }
  ExperimentConfig c;
  auto opt = [&](const char* key, auto& field) {
    if (j.contains(key)) field = get_field<std::decay_t<decltype(field)>>(j, key);
  };
  opt("problem", c.problem);
  opt("method", c.method);
  if (j.contains("qoi")) {
    if (j["qoi"].is_string()) {
      c.qois = {j["qoi"].get<std::string>()};
    } else {
      c.qois = get_field<std::vector<std::string>>(j, "qoi");
    }
  }
  opt("levels", c.levels);
  if (j.contains("delta")) {
    if (j["delta"].is_string()) {
      if (j["delta"].get<std::string>() != "auto") throw ConfigError("delta must be a number or \"auto\"");
      c.auto_delta = true;
    } else {
      c.delta = get_field<double>(j, "delta");
    }
  }
  opt("tail_mult", c.tail_mult);
  opt("identity_rotation", c.identity_rotation);
  opt("seed", c.seed);
  opt("paper_scale", c.paper_scale);
  opt("out_dir", c.out_dir);
  opt("golden", c.golden);
  opt("dataset", c.dataset);
  opt("sigma", c.sigma);
  opt("components", c.components);
  opt("budget", c.budget);
  opt("em_samples", c.em_samples);
  opt("lattice_cells", c.lattice_cells);
  opt("quadrature_nodes", c.quadrature_nodes);
  opt("reference_samples", c.reference_samples);
  validate(c);
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j = {{"problem", c.problem},
            {"method", c.method},
            {"qoi", resolved_qois(c)},
            {"levels", c.levels},
            {"tail_mult", c.tail_mult},
            {"identity_rotation", c.identity_rotation},
            {"seed", c.seed},
            {"paper_scale", c.paper_scale},
            {"out_dir", c.out_dir},
            {"golden", c.golden},
            {"dataset", c.dataset},
            {"sigma", c.sigma},
            {"components", c.components},
            {"budget", c.budget},
            {"em_samples", c.em_samples},
            {"lattice_cells", c.lattice_cells},
            {"quadrature_nodes", c.quadrature_nodes},
            {"reference_samples", c.reference_samples}};
  if (c.auto_delta) {
    j["delta"] = "auto";
  } else {
    j["delta"] = c.delta;
  }
  return j;
}

std::vector<std::string> resolved_qois(const ExperimentConfig& c) {
  if (!c.qois.empty()) return c.qois;
  if (c.problem == "banana") return {"f1", "f2", "f3"};
  std::vector<std::string> out;
  for (const auto& q : all_qois()) out.push_back(qoi_name(q));
  return out;
}

void validate(const ExperimentConfig& c) {
  if (c.problem != "banana" && c.problem != "predprey") {
    throw ConfigError("problem must be 'banana' or 'predprey', got '" + c.problem + "'");
  }
  if (c.method != "adaptive" && c.method != "combined") {
    throw ConfigError("method must be 'adaptive' or 'combined', got '" + c.method + "'");
  }
  try {
    for (const auto& q : resolved_qois(c)) {
      if (c.problem == "banana") {
        parse_genz(q);
      } else {
        parse_qoi(q);
      }
    }
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (c.levels < 1 || c.levels > 12) throw ConfigError("levels must be in 1..12");
  if (!c.auto_delta && !(c.delta > 0.0)) throw ConfigError("delta must be positive");
  if (!(c.tail_mult > 0.0) || !std::isfinite(c.tail_mult)) throw ConfigError("tail_mult must be positive");
  if (!(c.sigma > 0.0) || !std::isfinite(c.sigma)) throw ConfigError("sigma must be positive");
  if (c.components < 1 || c.components > 64) throw ConfigError("components must be in 1..64");
  if (c.budget < 16) throw ConfigError("budget is too small");
  if (c.quadrature_nodes < 3) throw ConfigError("quadrature_nodes must be at least 3");
  if (c.reference_samples < 2) throw ConfigError("reference_samples must be at least 2");
  if (c.out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

std::vector<Level> level_schedule(const ExperimentConfig& c) {
  double eps0 = 5e-3;
  double n0 = 4096.0;
  double n_shift = 0.0;
  if (c.paper_scale) {
    eps0 = c.problem == "banana" ? 5e-4 : 5e-6;
    n0 = 1e5;
    n_shift = c.problem == "banana" ? 1.0 : 0.0;
  }
  std::vector<Level> out;
  for (std::size_t k = 0; k < c.levels; ++k) {
    const double kk = static_cast<double>(k);
    out.push_back({eps0 * std::pow(4.0, -kk), static_cast<std::size_t>(n0 * std::pow(4.0, kk + n_shift))});
  }
  return out;
}

// ---------------------------------------------------------------- slopes

SlopeFit fit_slope(std::span<const double> n, std::span<const double> error) {
  if (n.size() != error.size()) throw ParameterError("fit_slope needs one error per sample size");
  std::vector<double> lx, ly;
  SlopeFit fit;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(n[i] > 0.0)) throw ParameterError("sample sizes must be positive");
    if (!(error[i] >= 0.0) || !std::isfinite(error[i])) throw ParameterError("errors must be finite and >= 0");
    if (error[i] == 0.0) {
      ++fit.excluded;
      continue;
    }
    lx.push_back(std::log(n[i]));
    ly.push_back(std::log(error[i]));
  }
  fit.used = lx.size();
  if (fit.used < 3) throw FitError("slope fit needs at least 3 points with positive error");
  const double m = static_cast<double>(fit.used);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("slope fit needs distinct sample sizes");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

// ---------------------------------------------------------------- problems

namespace {

// Caches density values by the exact bits of the point. Surrogates at
// different thresholds share most grid points, and so do repeated builds.
class MemoDensity {
 public:
  explicit MemoDensity(DensityFunction pi) : pi_(std::move(pi)) {}

  double operator()(std::span<const double> x) {
    Key key{};
    for (std::size_t j = 0; j < x.size(); ++j) key[j] = std::bit_cast<std::uint64_t>(x[j]);
    key[kMaxAdaptiveDim] = x.size();
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const double v = pi_(x);
    cache_.emplace(key, v);
    return v;
  }

 private:
  using Key = std::array<std::uint64_t, kMaxAdaptiveDim + 1>;
  struct Hash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = 0;
      for (auto v : k) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 0xbf58476d1ce4e5b9ULL;
      }
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };
  DensityFunction pi_;
  std::unordered_map<Key, double, Hash> cache_;
};

struct Problem {
  DensityFunction pi;  // memoized
  std::vector<Interval> box;
  std::vector<std::string> qois;
  VectorIntegrand f;
  std::shared_ptr<const PredPreyPosterior> posterior;
  std::optional<Dataset> dataset;
};

Dataset load_dataset(const ExperimentConfig& c) {
  if (c.dataset.empty()) return synth_data(kTrueParams, std::sqrt(2.0), kDatasetSeed);
  try {
    return dataset_from_json(read_json_file(c.dataset));
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

Problem make_problem(const ExperimentConfig& c) {
  Problem p;
  p.qois = resolved_qois(c);
  DensityFunction raw;
  if (c.problem == "banana") {
    const Banana2D banana(c.sigma);
    raw = [banana](std::span<const double> x) { return banana(x); };
    p.box = Banana2D::box();
    std::vector<Genz> g;
    for (const auto& q : p.qois) g.push_back(genz_2d(parse_genz(q)));
    p.f = [g](std::span<const double> x, std::span<double> out) {
      for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i](x);
    };
  } else {
    p.dataset = load_dataset(c);
    p.posterior = std::make_shared<const PredPreyPosterior>(*p.dataset);
    raw = [post = p.posterior](std::span<const double> x) { return (*post)(x); };
    p.box = predprey_box();
    std::vector<Qoi> q;
    for (const auto& name : p.qois) q.push_back(parse_qoi(name));
    p.f = [q](std::span<const double> x, std::span<double> out) {
      qoi_eval(q, PredPreyParams{x[0], x[1], x[2], x[3]}, out);
    };
  }
  auto memo = std::make_shared<MemoDensity>(std::move(raw));
  p.pi = [memo](std::span<const double> x) { return (*memo)(x); };
  return p;
}

std::size_t lattice_cells(const ExperimentConfig& c, std::size_t s) {
  if (c.lattice_cells > 0) return c.lattice_cells;
  return s <= 2 ? 64 : (s == 3 ? 20 : 10);
}

constexpr std::size_t kResamplePasses = 2;

struct Fitted {
  std::vector<GaussianComponent> components;
  EmResult em;
  std::size_t lattice_evaluations = 0;
};

Fitted fit_components(const ExperimentConfig& c, const Problem& p) {
  const std::size_t s = p.box.size();
  const std::vector<std::size_t> cells(s, lattice_cells(c, s));
  std::size_t per_pass = 1;
  for (auto n : cells) per_pass *= n;
  const auto samples = importance_resample(p.pi, p.box, cells, c.em_samples, c.seed, kResamplePasses);
  Fitted out;
  out.lattice_evaluations = per_pass * kResamplePasses;
  out.em = em_fit(samples, {c.components, 200, 1e-10, c.seed});
  for (const auto& g : out.em.components) out.components.push_back(g.with_tail(c.tail_mult, c.identity_rotation));
  return out;
}

struct Built {
  std::optional<TensorHatSurrogate> surrogate;
  AdaptiveReport report;
  std::optional<PartitionModel> model;
  std::size_t grid_evaluations = 0;
  std::vector<std::string> warnings;
};

Built build(const ExperimentConfig& c, const Problem& p, double epsilon, const Fitted* fitted) {
  AdaptiveOptions ao;
  ao.epsilon = epsilon;
  ao.budget = c.budget;
  Built b;
  if (c.method == "adaptive") {
    auto res = run_to_convergence(p.pi, p.box, ao);
    b.surrogate = std::move(res.surrogate);
    b.report = res.report;
    b.grid_evaluations = res.report.evaluations;
    if (res.report.budget_exceeded) b.warnings.push_back("evaluation budget exhausted before convergence");
  } else {
    PartitionOptions po;
    po.tail_multiplier = c.tail_mult;
    po.identity_rotation = c.identity_rotation;
    po.adaptive = ao;
    po.domain = p.box;
    b.model = build_partition_model(p.pi, fitted->components, po);
    b.grid_evaluations = b.model->evaluations();
    b.warnings = b.model->warnings;
  }
  return b;
}

struct Estimated {
  std::vector<double> values;
  std::size_t samples = 0;
  double skipped_mass = 0.0;
  double dropped_mass = 0.0;
  std::optional<double> pi_over_psi;
  std::vector<std::string> warnings;
};

double delta_for(const ExperimentConfig& c, std::span<const double> weights, std::size_t n) {
  return c.auto_delta ? auto_delta(weights, n) : c.delta;
}

Estimated run_estimator(const ExperimentConfig& c, const Problem& p, const Built& b, std::size_t n) {
  const std::size_t s = p.box.size();
  const auto seq = sobol(s);
  const std::size_t q = p.qois.size();
  Estimated e;
  if (b.surrogate) {
    const HatMixture hm(*b.surrogate);
    const double delta = delta_for(c, hm.weights(), n);
    if (!(delta < static_cast<double>(n))) throw ConfigError("delta must be smaller than the sample count");
    const auto alloc = select_and_allocate(hm.weights(), n, delta);
    auto rep = estimate(hm, alloc, p.f, q, seq);
    e.values = rep.values;
    e.samples = rep.samples;
    e.skipped_mass = rep.skipped_mass;
    e.dropped_mass = alloc.dropped_mass;
    e.warnings = rep.warnings;
  } else {
    // One extra output estimates the integral of pi_bar / Psi.
    const auto mix = b.model->mixture;
    const VectorIntegrand g = [&](std::span<const double> x, std::span<double> out) {
      p.f(x, out.first(q));
      out[q] = std::exp(-mix->log_psi(x));
    };
    const DeltaRule rule = [&c](std::span<const double> w, std::size_t m) { return delta_for(c, w, m); };
    auto rep = combined_estimate(*b.model, g, q + 1, n, rule, seq);
    e.values.assign(rep.values.begin(), rep.values.begin() + static_cast<std::ptrdiff_t>(q));
    e.pi_over_psi = rep.values[q];
    e.samples = rep.samples;
    e.skipped_mass = rep.skipped_mass;
    e.dropped_mass = rep.dropped_mass;
    e.warnings = rep.warnings;
  }
  return e;
}

Json reference_spec(const ExperimentConfig& c) {
  const auto sched = level_schedule(c);
  Json ds = c.dataset.empty() ? Json{{"seed", kDatasetSeed}, {"sigma", std::sqrt(2.0)}} : Json{{"file", c.dataset}};
  return {{"kind", "qmc_self_reference"},
          {"method", "combined"},
          {"epsilon", sched.back().epsilon},
          {"levels", c.levels},
          {"paper_scale", c.paper_scale},
          {"samples", c.reference_samples},
          {"components", c.components},
          {"tail_mult", c.tail_mult},
          {"identity_rotation", c.identity_rotation},
          {"delta", c.auto_delta ? Json("auto") : Json(c.delta)},
          {"seed", c.seed},
          {"budget", c.budget},
          {"em_samples", c.em_samples},
          {"lattice_cells", lattice_cells(c, 4)},
          {"dataset", ds}};
}

std::string golden_path(const ExperimentConfig& c) {
  return c.golden.empty() ? (std::filesystem::path(c.out_dir) / "golden.json").string() : c.golden;
}

}  // namespace

std::string golden_key(const ExperimentConfig& c, const std::string& qoi) {
  if (c.problem == "banana") return "banana/sigma=" + format_double(c.sigma) + "/" + qoi;
  return "predprey/" + qoi;
}

void compute_golden(const ExperimentConfig& c, GoldenTable& table) {
  validate(c);
  const Problem p = make_problem(c);
  const auto qois = p.qois;
  if (c.problem == "banana") {
    const std::size_t n = c.quadrature_nodes;
    QuadratureSpec spec{p.box, {n, n}, QuadratureRule::kTrapezoid};
    const auto ref = reference_expectations(p.pi, p.f, qois.size(), spec);
    for (std::size_t i = 0; i < qois.size(); ++i) {
      Json js = {{"kind", "tensor_quadrature"}, {"rule", rule_name(spec.rule)},       {"nodes", spec.nodes},
                 {"sigma", c.sigma},            {"box", Json::array({{-5.0, 5.0}, {-5.0, 5.0}})}};
      table[golden_key(c, qois[i])] = {ref[i].value, ref[i].error_estimate, js};
    }
    return;
  }
  const auto fitted = fit_components(c, p);
  ExperimentConfig cc = c;
  cc.method = "combined";
  const Built b = build(cc, p, level_schedule(c).back().epsilon, &fitted);
  const Estimated e = run_estimator(cc, p, b, c.reference_samples);
  const Json spec = reference_spec(c);
  for (std::size_t i = 0; i < qois.size(); ++i) {
    Json js = spec;
    js["skipped_mass"] = e.skipped_mass;
    js["grid_evaluations"] = b.grid_evaluations;
    // A QMC self-reference has no a priori error estimate.
    table[golden_key(c, qois[i])] = {e.values[i], 0.0, js};
  }
}

namespace {

GoldenValue lookup_golden(const ExperimentConfig& c, const GoldenTable& table, const std::string& qoi) {
  const auto key = golden_key(c, qoi);
  const auto it = table.find(key);
  if (it == table.end()) {
    throw ConfigError("no golden value for '" + key + "' in " + golden_path(c) +
                      "; run the oracle command first (wqmc oracle --problem " + c.problem + ")");
  }
  if (c.problem == "predprey") {
    Json want = reference_spec(c);
    Json have = it->second.spec;
    have.erase("skipped_mass");
    have.erase("grid_evaluations");
    if (have != want) {
      throw ConfigError("golden value for '" + key +
                        "' was computed with different settings; rerun the oracle command with this config");
    }
  }
  return it->second;
}

GoldenTable load_golden(const ExperimentConfig& c) {
  const auto path = golden_path(c);
  if (!std::filesystem::exists(path)) {
    throw ConfigError("golden values file " + path + " not found; run the oracle command first (wqmc oracle --problem " +
                      c.problem + ")");
  }
  try {
    return golden_from_json(read_json_file(path));
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

Json named(const std::vector<std::string>& names, std::span<const double> v) {
  Json j = Json::object();
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = v[i];
  return j;
}

Json diagnostics(const Problem& p, const Built& b, std::size_t n) {
  Json g = Json::array();
  auto one = [&](std::span<const Interval> box) {
    const std::vector<double> gamma(box.size(), 1.0);
    return g_diagnostic(gamma, 1.0, box, static_cast<double>(n));
  };
  if (b.model) {
    for (std::size_t i = 0; i < b.model->size(); ++i) g.push_back(one((*b.model->mixture)[i].local_box()));
  } else {
    g.push_back(one(p.box));
  }
  return g;
}

Json em_json(const Fitted& f) {
  return {{"iterations", f.em.iterations},
          {"converged", f.em.converged},
          {"reseeds", f.em.reseeds},
          {"log_likelihood", f.em.log_likelihood.empty() ? 0.0 : f.em.log_likelihood.back()},
          {"lattice_evaluations", f.lattice_evaluations}};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c) {
  validate(c);
  const GoldenTable table = load_golden(c);
  const Problem p = make_problem(c);
  std::vector<GoldenValue> golden;
  for (const auto& q : p.qois) golden.push_back(lookup_golden(c, table, q));

  std::optional<Fitted> fitted;
  if (c.method == "combined") fitted = fit_components(c, p);
  const auto sched = level_schedule(c);

  ExperimentResult out;
  for (std::size_t i = 0; i < p.qois.size(); ++i) {
    out.records.push_back({c.problem, c.method, p.qois[i], golden[i].value, {}, std::nullopt, ""});
  }
  Json levels = Json::array();
  for (std::size_t k = 0; k < sched.size(); ++k) {
    const Built b = build(c, p, sched[k].epsilon, fitted ? &*fitted : nullptr);
    const Estimated e = run_estimator(c, p, b, sched[k].samples);
    const std::size_t evals = b.grid_evaluations + (fitted ? fitted->lattice_evaluations : 0);
    std::vector<double> errors(p.qois.size());
    for (std::size_t i = 0; i < p.qois.size(); ++i) {
      errors[i] = std::abs(e.values[i] - golden[i].value);
      if (!std::isfinite(errors[i])) throw NumericalError("non-finite estimate for " + p.qois[i]);
      out.records[i].points.push_back({sched[k].samples, sched[k].epsilon, e.values[i], errors[i], evals});
    }
    Json lv = {{"k", k},
               {"epsilon", sched[k].epsilon},
               {"samples", sched[k].samples},
               {"evaluations", evals},
               {"grid_evaluations", b.grid_evaluations},
               {"estimates", named(p.qois, e.values)},
               {"errors", named(p.qois, errors)},
               {"skipped_mass", e.skipped_mass},
               {"dropped_mass", e.dropped_mass},
               {"g_diagnostic", diagnostics(p, b, sched[k].samples)},
               {"warnings", b.warnings}};
    for (const auto& w : e.warnings) lv["warnings"].push_back(w);
    if (b.model) {
      lv["mass"] = b.model->mass;
      lv["truncation_epsilon"] = b.model->epsilon;
      lv["pi_over_psi_integral"] = *e.pi_over_psi;
    } else {
      lv["mass"] = b.surrogate->mass();
      lv["grid"] = to_json(b.report);
    }
    levels.push_back(std::move(lv));
  }

  Json slopes = Json::object();
  Json notes = Json::object();
  Json reference = Json::object();
  for (auto& r : out.records) {
    std::vector<double> n, err;
    for (const auto& pt : r.points) {
      n.push_back(static_cast<double>(pt.samples));
      err.push_back(pt.error);
    }
    try {
      const auto fit = fit_slope(n, err);
      r.slope = fit.slope;
      if (fit.excluded > 0) r.note = std::to_string(fit.excluded) + " zero-error point(s) excluded";
    } catch (const FitError& ex) {
      r.note = ex.what();
    }
    slopes[r.qoi] = r.slope ? Json(*r.slope) : Json(nullptr);
    if (!r.note.empty()) notes[r.qoi] = r.note;
    reference[r.qoi] = r.reference;
  }

  std::ostringstream csv;
  csv << "N,error,evals,method,qoi\n";
  for (const auto& r : out.records) {
    for (const auto& pt : r.points) {
      csv << pt.samples << ',' << format_double(pt.error) << ',' << pt.evaluations << ',' << r.method << ','
          << r.qoi << '\n';
    }
  }
  out.csv = csv.str();
  out.summary = {{"problem", c.problem}, {"method", c.method},       {"config", to_json(c)},
                 {"levels", levels},     {"reference", reference}, {"slopes", slopes},
                 {"notes", notes}};
  if (fitted) out.summary["em"] = em_json(*fitted);

  std::filesystem::create_directories(c.out_dir);
  const auto stem = (std::filesystem::path(c.out_dir) / ("converge_" + c.problem + "_" + c.method)).string();
  write_text_file(stem + ".csv", out.csv);
  write_json_file(stem + ".json", out.summary);
  return out;
}

namespace {

struct LevelRun {
  Problem problem;
  std::optional<Fitted> fitted;
  Built built;
  Level level;
};

LevelRun prepare(const ExperimentConfig& c, std::size_t level) {
  validate(c);
  const auto sched = level_schedule(c);
  if (level >= sched.size()) throw ConfigError("level must be below the configured number of levels");
  LevelRun run{make_problem(c), std::nullopt, {}, sched[level]};
  if (c.method == "combined") run.fitted = fit_components(c, run.problem);
  run.built = build(c, run.problem, run.level.epsilon, run.fitted ? &*run.fitted : nullptr);
  return run;
}

}  // namespace

Json build_level(const ExperimentConfig& c, std::size_t level) {
  const LevelRun run = prepare(c, level);
  Json j = {{"problem", c.problem},
            {"method", c.method},
            {"level", level},
            {"epsilon", run.level.epsilon},
            {"grid_evaluations", run.built.grid_evaluations},
            {"warnings", run.built.warnings}};
  if (run.built.model) {
    j["model"] = to_json(*run.built.model);
    j["em"] = em_json(*run.fitted);
  } else {
    j["surrogate"] = to_json(*run.built.surrogate);
    j["grid"] = to_json(run.built.report);
  }
  return j;
}

Json integrate_level(const ExperimentConfig& c, std::size_t level, std::size_t samples) {
  const LevelRun run = prepare(c, level);
  const std::size_t n = samples > 0 ? samples : run.level.samples;
  if (n < 2) throw ConfigError("samples must be at least 2");
  const Estimated e = run_estimator(c, run.problem, run.built, n);
  Json j = {{"problem", c.problem},
            {"method", c.method},
            {"level", level},
            {"epsilon", run.level.epsilon},
            {"samples", n},
            {"grid_evaluations", run.built.grid_evaluations},
            {"estimates", named(run.problem.qois, e.values)},
            {"skipped_mass", e.skipped_mass},
            {"dropped_mass", e.dropped_mass},
            {"g_diagnostic", diagnostics(run.problem, run.built, n)},
            {"warnings", run.built.warnings}};
  for (const auto& w : e.warnings) j["warnings"].push_back(w);
  if (e.pi_over_psi) j["pi_over_psi_integral"] = *e.pi_over_psi;
  j["mass"] = run.built.model ? run.built.model->mass : run.built.surrogate->mass();
  return j;
}

}  // namespace wqmc
