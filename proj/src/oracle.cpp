#include "wqmc/oracle.hpp"

#include <cmath>

#include "wqmc/errors.hpp"
#include "wqmc/summation.hpp"

namespace wqmc {

namespace {

std::size_t cells_of(const QuadratureSpec& spec, std::size_t j) {
  return spec.rule == QuadratureRule::kMidpoint ? spec.nodes[j] : spec.nodes[j] - 1;
}

void validate(const QuadratureSpec& spec) {
  if (spec.box.empty() || spec.box.size() != spec.nodes.size()) throw ParameterError("quadrature box and node counts disagree");
  double total = 1.0;
  for (std::size_t j = 0; j < spec.box.size(); ++j) {
    if (spec.nodes[j] < 2) throw ParameterError("quadrature needs at least 2 nodes per dimension");
    if (!(spec.box[j].lower < spec.box[j].upper)) throw ParameterError("quadrature box must be non-degenerate");
    total *= static_cast<double>(spec.nodes[j]);
  }
  if (total > static_cast<double>(kMaxQuadratureNodes)) {
    throw ParameterError("quadrature node budget exceeded; lower the resolution");
  }
}

// One composite rule; per-dimension abscissae and weights, tensorized.
std::vector<double> apply_rule(const VectorIntegrand& f, std::size_t outputs, const QuadratureSpec& spec,
                               std::size_t& evaluations) {
  const std::size_t s = spec.box.size();
  std::vector<std::vector<double>> xs(s), ws(s);
  std::size_t total = 1;
  for (std::size_t j = 0; j < s; ++j) {
    const double a = spec.box[j].lower, b = spec.box[j].upper;
    const std::size_t cells = cells_of(spec, j);
    const double h = (b - a) / static_cast<double>(cells);
    if (spec.rule == QuadratureRule::kMidpoint) {
      for (std::size_t i = 0; i < cells; ++i) {
        xs[j].push_back(a + (static_cast<double>(i) + 0.5) * h);
        ws[j].push_back(h);
      }
    } else {
      for (std::size_t i = 0; i <= cells; ++i) {
        xs[j].push_back(i == cells ? b : a + static_cast<double>(i) * h);
        ws[j].push_back((i == 0 || i == cells) ? 0.5 * h : h);
      }
    }
    total *= xs[j].size();
  }
  std::vector<CompensatedSum> acc(outputs);
  std::vector<double> x(s), out(outputs);
  std::vector<std::size_t> idx(s, 0);
  for (std::size_t n = 0; n < total; ++n) {
    double w = 1.0;
    for (std::size_t j = 0; j < s; ++j) {
      x[j] = xs[j][idx[j]];
      w *= ws[j][idx[j]];
    }
    f(x, out);
    for (std::size_t o = 0; o < outputs; ++o) acc[o].add(w * out[o]);
    for (std::size_t j = s; j-- > 0;) {
      if (++idx[j] < xs[j].size()) break;
      idx[j] = 0;
    }
  }
  evaluations += total;
  std::vector<double> v(outputs);
  for (std::size_t o = 0; o < outputs; ++o) v[o] = acc[o].value();
  return v;
}

}  // namespace

QuadratureSpec halve(const QuadratureSpec& spec) {
  QuadratureSpec h = spec;
  for (std::size_t j = 0; j < spec.nodes.size(); ++j) {
    if (spec.rule == QuadratureRule::kMidpoint) {
      h.nodes[j] = std::max<std::size_t>(2, spec.nodes[j] / 2);
    } else {
      h.nodes[j] = std::max<std::size_t>(2, (spec.nodes[j] - 1) / 2 + 1);
    }
  }
  return h;
}

QuadratureResult tensor_quadrature(const VectorIntegrand& f, std::size_t outputs, const QuadratureSpec& spec) {
  validate(spec);
  QuadratureResult r;
  r.values = apply_rule(f, outputs, spec, r.evaluations);
  const auto half = halve(spec);
  const auto coarse = apply_rule(f, outputs, half, r.evaluations);
  // Effective step ratio for the extrapolation: geometric mean across dimensions.
  double log_ratio = 0.0;
  for (std::size_t j = 0; j < spec.nodes.size(); ++j) {
    log_ratio += std::log(static_cast<double>(cells_of(spec, j)) / static_cast<double>(cells_of(half, j)));
  }
  const double ratio2 = std::exp(2.0 * log_ratio / static_cast<double>(spec.nodes.size()));
  for (std::size_t o = 0; o < outputs; ++o) {
    r.error_estimates.push_back(std::abs(r.values[o] - coarse[o]));
    r.richardson.push_back(ratio2 > 1.0 ? (ratio2 * r.values[o] - coarse[o]) / (ratio2 - 1.0) : r.values[o]);
  }
  return r;
}

QuadratureResult tensor_quadrature(const Integrand& f, const QuadratureSpec& spec) {
  return tensor_quadrature([&f](std::span<const double> x, std::span<double> out) { out[0] = f(x); }, 1, spec);
}

std::vector<ReferenceValue> reference_expectations(const Integrand& pi, const VectorIntegrand& f, std::size_t outputs,
                                                   const QuadratureSpec& spec) {
  std::vector<double> buf(outputs);
  const VectorIntegrand joint = [&](std::span<const double> x, std::span<double> out) {
    const double p = pi(x);
    if (!std::isfinite(p) || p < 0.0) throw InvalidDensityError("density returned a negative or non-finite value");
    out[0] = p;
    if (p == 0.0) {
      for (std::size_t o = 0; o < outputs; ++o) out[1 + o] = 0.0;
      return;
    }
    f(x, buf);
    for (std::size_t o = 0; o < outputs; ++o) out[1 + o] = p * buf[o];
  };
  validate(spec);
  std::size_t evals = 0;
  const auto fine = apply_rule(joint, outputs + 1, spec, evals);
  const auto coarse = apply_rule(joint, outputs + 1, halve(spec), evals);
  if (!(fine[0] > 0.0) || !(coarse[0] > 0.0)) throw DegenerateDensityError("density integrates to zero on the quadrature nodes");
  std::vector<ReferenceValue> out(outputs);
  for (std::size_t o = 0; o < outputs; ++o) {
    out[o].numerator = fine[1 + o];
    out[o].denominator = fine[0];
    out[o].value = fine[1 + o] / fine[0];
    out[o].error_estimate = std::abs(out[o].value - coarse[1 + o] / coarse[0]);
  }
  return out;
}

ReferenceValue reference_expectation(const Integrand& pi, const Integrand& f, const QuadratureSpec& spec) {
  return reference_expectations(pi, [&f](std::span<const double> x, std::span<double> out) { out[0] = f(x); }, 1,
                                spec)
      .front();
}

std::string rule_name(QuadratureRule rule) { return rule == QuadratureRule::kMidpoint ? "midpoint" : "trapezoid"; }

QuadratureRule parse_rule(const std::string& name) {
  if (name == "midpoint") return QuadratureRule::kMidpoint;
  if (name == "trapezoid") return QuadratureRule::kTrapezoid;
  throw ParameterError("unknown quadrature rule '" + name + "'");
}

}  // namespace wqmc
