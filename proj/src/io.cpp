#include "wqmc/io.hpp"

#include <fstream>
#include <sstream>

#include "wqmc/errors.hpp"
#include "wqmc/summation.hpp"

namespace wqmc {

namespace {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

Json box_json(const std::vector<Interval>& box) {
  Json b = Json::array();
  for (const auto& iv : box) b.push_back({iv.lower, iv.upper});
  return b;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const Json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (j.at(r).size() != j.size()) throw ParseError("covariance must be square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

Json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Json to_json(const TensorHatSurrogate& s) {
  Json knots = Json::array();
  for (const auto& k : s.all_knots()) knots.push_back(k.values());
  return {{"box", box_json(s.box())}, {"knots", knots}, {"coefficients", s.values()}, {"c", s.mass()}};
}

TensorHatSurrogate surrogate_from_json(const Json& j) {
  return guarded("surrogate", [&] {
    std::vector<Knots1D> knots;
    for (const auto& k : j.at("knots")) knots.emplace_back(k.get<std::vector<double>>());
    return TensorHatSurrogate(std::move(knots), j.at("coefficients").get<std::vector<double>>());
  });
}

Json to_json(const AdaptiveReport& r) {
  return {{"iterations", r.iterations},
          {"evaluations", r.evaluations},
          {"knots", [&] {
             std::vector<std::size_t> k;
             for (auto n : r.intervals) k.push_back(n + 1);
             return k;
           }()},
          {"flags_history_length", r.flags_history.size()},
          {"flags_history", r.flags_history},
          {"converged", r.converged},
          {"budget_exceeded", r.budget_exceeded}};
}

Json to_json(const GaussianComponent& c) {
  return {{"alpha", c.alpha()},
          {"mu", vector_json(c.mu())},
          {"Sigma", matrix_json(c.sigma())},
          {"U", matrix_json(c.rotation())},
          {"lambda", vector_json(c.eigenvalues())},
          {"a_vec", vector_json(c.half_widths())},
          {"tail_multiplier", c.tail_multiplier()},
          {"identity_rotation", c.identity_rotation()}};
}

GaussianComponent component_from_json(const Json& j) {
  return guarded("Gaussian component", [&] {
    return GaussianComponent(j.at("alpha").get<double>(), vector_from(j.at("mu")), matrix_from(j.at("Sigma")),
                             j.value("tail_multiplier", kDefaultTailMultiplier), j.value("identity_rotation", false));
  });
}

Json to_json(const PartitionModel& m) {
  Json comps = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json c = to_json((*m.mixture)[i]);
    c["surrogate"] = to_json(m.surrogates[i]);
    c["c_i"] = m.masses[i];
    if (i < m.reports.size()) c["grid"] = to_json(m.reports[i]);
    comps.push_back(std::move(c));
  }
  return {{"components", comps}, {"c", m.mass}, {"epsilon", m.epsilon}, {"warnings", m.warnings}};
}

PartitionModel partition_from_json(const Json& j) {
  return guarded("partition model", [&] {
    PartitionModel m;
    std::vector<GaussianComponent> comps;
    for (const auto& c : j.at("components")) {
      comps.push_back(component_from_json(c));
      m.surrogates.push_back(surrogate_from_json(c.at("surrogate")));
      m.masses.push_back(m.surrogates.back().mass());
      AdaptiveReport r;
      if (c.contains("grid")) {
        r.iterations = c["grid"].value("iterations", std::size_t{0});
        r.evaluations = c["grid"].value("evaluations", std::size_t{0});
      }
      for (std::size_t d = 0; d < m.surrogates.back().dim(); ++d) r.intervals.push_back(m.surrogates.back().knots(d).intervals());
      m.reports.push_back(r);
    }
    m.mixture = std::make_shared<const GaussianMixture>(std::move(comps));
    CompensatedSum c;
    for (std::size_t i = 0; i < m.size(); ++i) c.add((*m.mixture)[i].alpha() * m.masses[i]);
    m.mass = c.value();
    m.epsilon = j.value("epsilon", 0.0);
    m.warnings = j.value("warnings", std::vector<std::string>{});
    return m;
  });
}

Json to_json(const Dataset& d) {
  return {{"t_i", d.times},     {"y", d.y}, {"y_true", d.y_true}, {"sigma", d.sigma},
          {"seed", d.seed},     {"x_true", std::vector<double>(d.x_true.begin(), d.x_true.end())}};
}

Dataset dataset_from_json(const Json& j) {
  return guarded("dataset", [&] {
    Dataset d;
    d.times = j.at("t_i").get<std::vector<double>>();
    d.y = j.at("y").get<std::vector<double>>();
    d.y_true = j.value("y_true", std::vector<double>{});
    d.sigma = j.at("sigma").get<double>();
    d.seed = j.at("seed").get<std::uint64_t>();
    const auto x = j.at("x_true").get<std::vector<double>>();
    if (x.size() != 4) throw ParseError("x_true must have four entries");
    std::copy(x.begin(), x.end(), d.x_true.begin());
    if (d.y.size() != 2 * d.times.size()) throw ParseError("dataset needs two observations per time");
    return d;
  });
}

Json to_json(const GoldenTable& t) {
  Json j = Json::object();
  for (const auto& [name, g] : t) j[name] = {{"value", g.value}, {"error_estimate", g.error_estimate}, {"spec", g.spec}};
  return j;
}

GoldenTable golden_from_json(const Json& j) {
  return guarded("golden values", [&] {
    GoldenTable t;
    for (auto it = j.begin(); it != j.end(); ++it) {
      t[it.key()] = {it->at("value").get<double>(), it->value("error_estimate", 0.0), it->value("spec", Json::object())};
    }
    return t;
  });
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path);
  out << text;
  if (!out) throw ParameterError("failed writing " + path);
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace wqmc
