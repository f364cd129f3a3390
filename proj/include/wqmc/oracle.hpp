#pragma once

// Brute-force tensor-product quadrature used as ground truth.

#include <cstddef>
#include <string>
#include <vector>

#include "wqmc/mixture.hpp"

namespace wqmc {

enum class QuadratureRule { kMidpoint, kTrapezoid };

inline constexpr std::size_t kMaxQuadratureNodes = 100'000'000;

/// `nodes[j]` is the per-dimension node count: cells for the midpoint rule,
/// cells + 1 for the trapezoid rule.
struct QuadratureSpec {
  std::vector<Interval> box;
  std::vector<std::size_t> nodes;
  QuadratureRule rule = QuadratureRule::kTrapezoid;
};

struct QuadratureResult {
  std::vector<double> values;
  /// |value - value at half resolution|, per output.
  std::vector<double> error_estimates;
  /// Second-order Richardson extrapolation of the two resolutions.
  std::vector<double> richardson;
  std::size_t evaluations = 0;
};

QuadratureSpec halve(const QuadratureSpec& spec);

/// Composite rule for every output of `f` on the same nodes, plus the
/// half-resolution comparison. Throws ParameterError past the node guard.
QuadratureResult tensor_quadrature(const VectorIntegrand& f, std::size_t outputs, const QuadratureSpec& spec);
QuadratureResult tensor_quadrature(const Integrand& f, const QuadratureSpec& spec);

struct ReferenceValue {
  double value = 0.0;
  double error_estimate = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
};

/// int f pi / int pi on shared nodes. Throws DegenerateDensityError unless the
/// denominator is positive.
ReferenceValue reference_expectation(const Integrand& pi, const Integrand& f, const QuadratureSpec& spec);
/// Several integrands against one density, sharing the density evaluations.
std::vector<ReferenceValue> reference_expectations(const Integrand& pi, const VectorIntegrand& f, std::size_t outputs,
                                                   const QuadratureSpec& spec);

std::string rule_name(QuadratureRule rule);
QuadratureRule parse_rule(const std::string& name);

}  // namespace wqmc
