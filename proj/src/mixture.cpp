#include "wqmc/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wqmc/errors.hpp"
#include "wqmc/summation.hpp"

namespace wqmc {

UniformDensity1D::UniformDensity1D(double lower, double upper) : lo_(lower), hi_(upper) {
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw ParameterError("uniform density needs a finite interval with lower < upper");
  }
}

double UniformDensity1D::pdf(double x) const { return (x < lo_ || x > hi_) ? 0.0 : 1.0 / (hi_ - lo_); }

double UniformDensity1D::cdf(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  return (x - lo_) / (hi_ - lo_);
}

double UniformDensity1D::inv_cdf(double z) const {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("inverse CDF argument outside [0,1]");
  return lo_ + z * (hi_ - lo_);
}

ComponentMixture::ComponentMixture(std::span<const ProductComponent> components) : components_(components) {
  if (components_.empty()) throw DegenerateMixtureError("mixture has no components");
  dim_ = components_.front().factors.size();
  if (dim_ == 0) throw ParameterError("mixture components need at least one factor");
  for (const auto& c : components_) {
    if (c.factors.size() != dim_) throw ParameterError("mixture components disagree on dimension");
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) throw ParameterError("component weights must be finite and >= 0");
  }
}

void ComponentMixture::inverse_cdf(std::size_t k, std::span<const double> u, std::span<double> x) const {
  const auto& factors = components_[k].factors;
  for (std::size_t j = 0; j < dim_; ++j) x[j] = factors[j]->inv_cdf(u[j]);
}

Allocation select_and_allocate(std::span<const double> weights, std::size_t total, double delta) {
  if (total < 1) throw ParameterError("sample count must be positive");
  const auto n = static_cast<double>(total);
  if (!(delta > 0.0 && delta < n)) throw ParameterError("delta must lie in (0, N)");
  double mass = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("weights must be finite and >= 0");
    mass += w;
  }
  if (!(mass > 0.0)) throw DegenerateMixtureError("all mixture weights are zero");

  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });

  const double target = 1.0 - delta / n;
  std::size_t positive = 0;
  while (positive < order.size() && weights[order[positive]] > 0.0) ++positive;

  std::size_t r = positive;
  double cumulative = 0.0;
  for (std::size_t v = 0; v < positive; ++v) {
    cumulative += weights[order[v]];
    if (cumulative / mass >= target) {
      r = v + 1;
      break;
    }
  }

  Allocation alloc;
  alloc.total = total;
  alloc.delta = delta;
  alloc.r = r;
  alloc.mass = mass;
  alloc.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r));
  alloc.counts.resize(r);
  std::size_t assigned = 0;
  double kept = 0.0;
  for (std::size_t v = 0; v + 1 < r; ++v) {
    const double w = weights[order[v]];
    const auto nk = static_cast<std::size_t>(std::floor(n * w / mass));
    alloc.counts[v] = nk;
    assigned += nk;
    kept += w;
  }
  kept += weights[order[r - 1]];
  alloc.counts[r - 1] = total - assigned;
  alloc.dropped_mass = std::max(0.0, 1.0 - kept / mass);
  return alloc;
}

double auto_delta(std::span<const double> weights, std::size_t total) {
  double mass = 0.0;
  double smallest = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("weights must be finite and >= 0");
    mass += w;
    if (w > 0.0 && (smallest == 0.0 || w < smallest)) smallest = w;
  }
  if (!(mass > 0.0)) throw DegenerateMixtureError("all mixture weights are zero");
  const double a = smallest / mass;
  const auto n = static_cast<double>(total);
  return 3.0 * n / (3.0 + a * n);
}

EstimateReport estimate(const MixtureModel& model, const Allocation& alloc, const VectorIntegrand& f,
                        std::size_t outputs, const DigitalSequence& seq) {
  const std::size_t s = model.dim();
  if (seq.dim() < s) throw ParameterError("digital sequence has fewer dimensions than the mixture");
  if (alloc.selected.size() != alloc.counts.size()) throw ParameterError("malformed allocation");
  if (!(alloc.mass > 0.0)) throw DegenerateMixtureError("allocation carries no mass");

  EstimateReport rep;
  rep.values.assign(outputs, 0.0);
  std::vector<CompensatedSum> totals(outputs);
  std::vector<CompensatedSum> inner(outputs);
  std::vector<double> u(seq.dim()), x(s), out(outputs);

  for (std::size_t v = 0; v < alloc.selected.size(); ++v) {
    const std::size_t k = alloc.selected[v];
    const std::size_t nk = alloc.counts[v];
    const double ck = model.weight(k);
    if (nk == 0) {
      ++rep.skipped;
      rep.skipped_mass += ck / alloc.mass;
      continue;
    }
    for (auto& acc : inner) acc = CompensatedSum{};
    auto cur = seq.cursor(0);
    for (std::size_t n = 0; n < nk; ++n) {
      if (n > 0) cur.advance();
      cur.coords(u);
      model.inverse_cdf(k, std::span<const double>(u).first(s), x);
      f(x, out);
      for (std::size_t o = 0; o < outputs; ++o) inner[o].add(out[o]);
    }
    const double scale = ck / static_cast<double>(nk);
    for (std::size_t o = 0; o < outputs; ++o) totals[o].add(scale * inner[o].value());
    rep.samples += nk;
    rep.sampled_mass += ck / alloc.mass;
  }
  for (std::size_t o = 0; o < outputs; ++o) rep.values[o] = totals[o].value() / alloc.mass;
  if (rep.skipped > 0) {
    rep.warnings.push_back(std::to_string(rep.skipped) + " selected component(s) received no samples; relative mass " +
                           std::to_string(rep.skipped_mass) + " dropped");
  }
  return rep;
}

double estimate(const MixtureModel& model, const Allocation& alloc, const Integrand& f, const DigitalSequence& seq) {
  const VectorIntegrand g = [&f](std::span<const double> x, std::span<double> out) { out[0] = f(x); };
  return estimate(model, alloc, g, 1, seq).values[0];
}

double estimate(std::span<const ProductComponent> components, const Allocation& alloc, const Integrand& f,
                const DigitalSequence& seq) {
  return estimate(ComponentMixture(components), alloc, f, seq);
}

double g_diagnostic(std::span<const double> gamma, double q, std::span<const Interval> box, double n) {
  if (gamma.size() != box.size() || gamma.empty()) throw ParameterError("gamma and box must share a positive dimension");
  if (!(q >= 1.0)) throw ParameterError("q must be >= 1");
  if (!(n > 1.0)) throw ParameterError("N must exceed 1");
  const double log_n = std::log(n);
  double prod = 1.0;
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    if (!(gamma[j] > 0.0)) throw ParameterError("product weights must be positive");
    if (!(box[j].lower < box[j].upper)) throw ParameterError("box must be non-degenerate");
    prod *= 1.0 + std::pow(gamma[j] * 3.0 * (box[j].upper - box[j].lower) * log_n, q);
  }
  return std::pow(prod - 1.0, 1.0 / q);
}

}  // namespace wqmc
