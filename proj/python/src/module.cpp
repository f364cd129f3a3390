// Python bindings. Arrays go through lists/NumPy buffers; JSON-shaped
// results go through Python's json module to stay in sync with the CLI.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wqmc/adaptgrid.hpp"
#include "wqmc/errors.hpp"
#include "wqmc/experiment.hpp"
#include "wqmc/hatbasis.hpp"
#include "wqmc/io.hpp"
#include "wqmc/lowdisc.hpp"
#include "wqmc/mixture.hpp"
#include "wqmc/oracle.hpp"
#include "wqmc/problems.hpp"

namespace py = pybind11;
using namespace wqmc;

namespace {

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Json from_py(const py::object& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

std::vector<Interval> to_box(const std::vector<std::pair<double, double>>& b) {
  std::vector<Interval> out;
  for (auto [lo, hi] : b) out.push_back({lo, hi});
  return out;
}

DensityFunction wrap(const py::function& f) {
  return [f](std::span<const double> x) {
    py::array_t<double> a(static_cast<py::ssize_t>(x.size()), x.data());
    return f(a).cast<double>();
  };
}

py::array_t<double> sobol_points(std::size_t dim, std::uint64_t count, std::uint64_t start) {
  const auto seq = sobol(dim);
  py::array_t<double> out({static_cast<py::ssize_t>(count), static_cast<py::ssize_t>(dim)});
  seq.block(start, count, std::span<double>(out.mutable_data(), count * dim));
  return out;
}

bool net_check(const py::array_t<double, py::array::c_style | py::array::forcecast>& pts, int m, int t) {
  if (pts.ndim() != 2) throw ParameterError("points must be a 2-D array");
  std::vector<UnitPoint> p(static_cast<std::size_t>(pts.shape(0)));
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i].assign(pts.data(static_cast<py::ssize_t>(i), 0), pts.data(static_cast<py::ssize_t>(i), 0) + pts.shape(1));
  }
  return is_net(p, m, t);
}

py::dict allocate(const std::vector<double>& weights, std::size_t total, double delta) {
  const auto a = select_and_allocate(weights, total, delta);
  py::dict d;
  d["selected"] = a.selected;
  d["counts"] = a.counts;
  d["r"] = a.r;
  d["mass"] = a.mass;
  d["dropped_mass"] = a.dropped_mass;
  return d;
}

py::dict adaptive_surrogate(const py::function& pi, const std::vector<std::pair<double, double>>& box,
                            double epsilon, std::size_t budget) {
  AdaptiveOptions o;
  o.epsilon = epsilon;
  o.budget = budget;
  const auto box_ = to_box(box);
  const auto res = run_to_convergence(wrap(pi), box_, o);
  py::dict d;
  d["surrogate"] = to_py(to_json(res.surrogate));
  d["report"] = to_py(to_json(res.report));
  return d;
}

std::vector<double> surrogate_expectations(const py::object& surrogate, const py::function& f, std::size_t outputs,
                                           std::size_t samples, double delta) {
  const auto s = surrogate_from_json(from_py(surrogate));
  const HatMixture hm(s);
  const auto alloc = select_and_allocate(hm.weights(), samples, delta);
  const VectorIntegrand g = [&](std::span<const double> x, std::span<double> out) {
    py::array_t<double> a(static_cast<py::ssize_t>(x.size()), x.data());
    const auto v = f(a).cast<std::vector<double>>();
    if (v.size() != out.size()) throw ParameterError("integrand returned the wrong number of outputs");
    std::copy(v.begin(), v.end(), out.begin());
  };
  return estimate(hm, alloc, g, outputs, sobol(s.dim())).values;
}

double surrogate_value(const py::object& surrogate, const std::vector<double>& x) {
  return surrogate_from_json(from_py(surrogate)).eval(x);
}

py::dict quadrature_expectation(const py::function& pi, const py::function& f,
                                const std::vector<std::pair<double, double>>& box, std::size_t nodes,
                                const std::string& rule) {
  QuadratureSpec spec{to_box(box), std::vector<std::size_t>(box.size(), nodes), parse_rule(rule)};
  const auto r = reference_expectation(wrap(pi), wrap(f), spec);
  py::dict d;
  d["value"] = r.value;
  d["error_estimate"] = r.error_estimate;
  d["denominator"] = r.denominator;
  return d;
}

py::object converge(const py::dict& config) {
  const auto res = run_experiment(config_from_json(from_py(config)));
  return to_py(res.summary);
}

}  // namespace

PYBIND11_MODULE(_wqmc, m) {
  m.doc() = "Weighted quasi-Monte Carlo integration against unnormalized densities";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());

  m.def("sobol", &sobol_points, py::arg("dim"), py::arg("count"), py::arg("start") = 0,
        "Unscrambled Sobol points as a (count, dim) array.");
  m.def("is_net", &net_check, py::arg("points"), py::arg("m"), py::arg("t"));
  m.def("select_and_allocate", &allocate, py::arg("weights"), py::arg("total"), py::arg("delta"));
  m.def("auto_delta", [](const std::vector<double>& w, std::size_t n) { return auto_delta(w, n); });

  m.def("banana_log_density",
        [](const std::vector<double>& x, double sigma) { return Banana2D(sigma).log_density(x); }, py::arg("x"),
        py::arg("sigma") = 1.0);
  m.def("genz", [](const std::string& name, const std::vector<double>& x) { return genz_2d(parse_genz(name))(x); });
  m.def(
      "solve_ode",
      [](const std::array<double, 4>& x, const std::vector<double>& times, double dt) {
        std::vector<std::pair<double, double>> out;
        for (const auto& s : solve_ode(x, times, dt)) out.emplace_back(s.p, s.q);
        return out;
      },
      py::arg("params"), py::arg("times"), py::arg("dt") = kPredPreyDt);
  m.def(
      "synth_data",
      [](std::uint64_t seed, double sigma) { return to_py(to_json(synth_data(kTrueParams, sigma, seed))); },
      py::arg("seed") = kDatasetSeed, py::arg("sigma") = std::sqrt(2.0));
  m.def(
      "posterior",
      [](const std::vector<double>& x, const py::object& dataset) {
        const Dataset d = dataset.is_none() ? synth_data() : dataset_from_json(from_py(dataset));
        return PredPreyPosterior(d)(x);
      },
      py::arg("x"), py::arg("dataset") = py::none());

  m.def("adaptive_surrogate", &adaptive_surrogate, py::arg("pi"), py::arg("box"), py::arg("epsilon") = 5e-3,
        py::arg("budget") = kDefaultBudget);
  m.def("surrogate_value", &surrogate_value, py::arg("surrogate"), py::arg("x"));
  m.def("surrogate_expectations", &surrogate_expectations, py::arg("surrogate"), py::arg("f"), py::arg("outputs"),
        py::arg("samples"), py::arg("delta") = 0.5);
  m.def("quadrature_expectation", &quadrature_expectation, py::arg("pi"), py::arg("f"), py::arg("box"),
        py::arg("nodes") = 513, py::arg("rule") = "trapezoid");
  m.def("fit_slope", [](const std::vector<double>& n, const std::vector<double>& e) { return fit_slope(n, e).slope; });
  m.def("converge", &converge, py::arg("config"), "Runs a convergence sweep; returns the JSON summary.");
}
