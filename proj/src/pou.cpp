#include "wqmc/pou.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "wqmc/errors.hpp"
#include "wqmc/summation.hpp"

namespace wqmc {

namespace {

constexpr double kEigenClamp = 1e-12;
constexpr double kJitter = 1e-8;
// Truncation counts as dominant once the Gaussian keeps 1% of its peak on
// the box boundary.
constexpr double kTruncationWarn = 1e-2;

// Portable uniform draw in [0,1): std::uniform_real_distribution is
// implementation-defined, so the same seed would differ across libraries.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& x, const Eigen::VectorXd& weights, const Eigen::VectorXd& mean,
                           double total) {
  const Eigen::MatrixXd centred = x.rowwise() - mean.transpose();
  return (centred.transpose() * weights.asDiagonal() * centred) / total;
}

void add_jitter(Eigen::MatrixXd& sigma) {
  const double s = static_cast<double>(sigma.rows());
  sigma.diagonal().array() += kJitter * sigma.trace() / s;
}

void check_spd(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success || !(sigma.trace() > 0.0)) {
    throw FitError("covariance is singular after regularization");
  }
}

}  // namespace

GaussianComponent::GaussianComponent(double alpha, Eigen::VectorXd mu, Eigen::MatrixXd sigma, double tail_multiplier,
                                     bool identity_rotation)
    : alpha_(alpha),
      mu_(std::move(mu)),
      sigma_(std::move(sigma)),
      tail_(tail_multiplier),
      identity_rotation_(identity_rotation) {
  const Eigen::Index s = mu_.size();
  if (s < 1) throw ParameterError("Gaussian component needs dimension >= 1");
  if (sigma_.rows() != s || sigma_.cols() != s) throw ParameterError("covariance shape does not match the mean");
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw ParameterError("component weight must be positive");
  if (!(tail_ > 0.0) || !std::isfinite(tail_)) throw ParameterError("tail multiplier must be positive");
  if (!mu_.allFinite() || !sigma_.allFinite()) throw ParameterError("Gaussian parameters must be finite");
  sigma_ = 0.5 * (sigma_ + sigma_.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma_);
  if (eig.info() != Eigen::Success) throw FitError("eigendecomposition failed");
  eigvecs_ = eig.eigenvectors();
  eigvals_ = eig.eigenvalues();
  const double lmax = eigvals_.maxCoeff();
  if (!(lmax > 0.0)) throw ParameterError("covariance has no positive eigenvalue");
  eigvals_ = eigvals_.cwiseMax(kEigenClamp * lmax);

  rotation_ = identity_rotation_ ? Eigen::MatrixXd::Identity(s, s) : eigvecs_;
  const Eigen::MatrixXd clamped = eigvecs_ * eigvals_.asDiagonal() * eigvecs_.transpose();
  const Eigen::VectorXd local_var =
      identity_rotation_ ? Eigen::VectorXd(clamped.diagonal()) : Eigen::VectorXd(eigvals_);
  half_widths_ = tail_ * local_var.cwiseSqrt();

  whitening_ = eigvecs_ * eigvals_.cwiseSqrt().cwiseInverse().asDiagonal();
  log_peak_ = -0.5 * static_cast<double>(s) * std::log(2.0 * std::numbers::pi) - 0.5 * eigvals_.array().log().sum();
}

std::vector<Interval> GaussianComponent::local_box() const {
  std::vector<Interval> box;
  for (Eigen::Index j = 0; j < half_widths_.size(); ++j) box.push_back({-half_widths_[j], half_widths_[j]});
  return box;
}

double GaussianComponent::log_pdf(std::span<const double> x) const {
  const Eigen::VectorXd w = whitening_.transpose() * (as_vector(x) - mu_);
  return log_peak_ - 0.5 * w.squaredNorm();
}

double GaussianComponent::truncation_bound() const {
  // Outside B_i some |z_j| >= h_j. The Gaussian restricted to the face z_j = h_j
  // peaks at exp(-h_j^2 / (2 Sigma'_jj)) times its peak, Sigma' = U^T Sigma U.
  const Eigen::MatrixXd local = rotation_.transpose() * eigvecs_ * eigvals_.asDiagonal() * eigvecs_.transpose() * rotation_;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < half_widths_.size(); ++j) {
    worst = std::max(worst, std::exp(-half_widths_[j] * half_widths_[j] / (2.0 * local(j, j))));
  }
  return peak() * worst;
}

GaussianComponent GaussianComponent::with_alpha(double alpha) const {
  return {alpha, mu_, sigma_, tail_, identity_rotation_};
}

GaussianComponent GaussianComponent::with_tail(double tail_multiplier, bool identity_rotation) const {
  return {alpha_, mu_, sigma_, tail_multiplier, identity_rotation};
}

void transform_to_local(const GaussianComponent& comp, std::span<const double> x, std::span<double> z) {
  Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size())) =
      comp.rotation().transpose() * (as_vector(x) - comp.mu());
}

void inverse_transform(const GaussianComponent& comp, std::span<const double> z, std::span<double> x) {
  Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())) =
      comp.mu() + comp.rotation() * as_vector(z);
}

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw ParameterError("Gaussian mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.dim() != components_.front().dim()) throw ParameterError("Gaussian components disagree on dimension");
    total += c.alpha();
  }
  if (std::abs(total - 1.0) > 1e-9) throw ParameterError("mixture weights must sum to 1");
}

double GaussianMixture::log_psi(std::span<const double> x) const {
  std::vector<double> terms(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    terms[i] = std::log(components_[i].alpha()) + components_[i].log_pdf(x);
  }
  return log_sum_exp(terms);
}

void GaussianMixture::ratios(std::span<const double> x, std::span<double> out) const {
  // Normalize relative to the largest term without adding it back, so the
  // weighted ratios sum to one within a few ulps even far in the tails.
  const std::size_t n = components_.size();
  std::vector<double> terms(n);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    terms[i] = std::log(components_[i].alpha()) + components_[i].log_pdf(x);
    m = std::max(m, terms[i]);
  }
  if (!std::isfinite(m)) {
    std::fill(out.begin(), out.end(), 1.0);
    return;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += (terms[i] = std::exp(terms[i] - m));
  for (std::size_t i = 0; i < n; ++i) out[i] = terms[i] / total / components_[i].alpha();
}

double GaussianMixture::ratio(std::size_t i, std::span<const double> x) const {
  if (i >= components_.size()) throw ParameterError("component index out of range");
  std::vector<double> r(components_.size());
  ratios(x, r);
  return r[i];
}

DensityFunction localized_target(DensityFunction pi, std::shared_ptr<const GaussianMixture> mixture, std::size_t i,
                                 std::optional<std::vector<Interval>> domain) {
  if (!mixture || i >= mixture->size()) throw ParameterError("component index out of range");
  if (domain && domain->size() != mixture->dim()) throw ParameterError("domain dimension mismatch");
  return [pi = std::move(pi), mixture = std::move(mixture), i, domain = std::move(domain)](std::span<const double> z) {
    const auto& comp = (*mixture)[i];
    std::vector<double> x(z.size());
    inverse_transform(comp, z, x);
    if (domain) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] < (*domain)[j].lower || x[j] > (*domain)[j].upper) return 0.0;
      }
    }
    const double p = pi(x);
    if (!std::isfinite(p) || p < 0.0) throw InvalidDensityError("target density returned a negative or non-finite value");
    if (p == 0.0) return 0.0;
    return p * mixture->ratio(i, x);
  };
}

EmResult em_fit(const Eigen::MatrixXd& samples, const EmOptions& options) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index s = samples.cols();
  const auto k = static_cast<Eigen::Index>(options.components);
  if (k < 1) throw ParameterError("EM needs at least one component");
  if (s < 1 || n < k * (s + 1)) throw ParameterError("EM needs at least I*(s+1) samples");
  if (!samples.allFinite()) throw ParameterError("EM samples must be finite");

  std::mt19937_64 rng(options.seed);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd global_mean = samples.colwise().mean();
  Eigen::MatrixXd global_cov = covariance(samples, ones, global_mean, static_cast<double>(n));
  add_jitter(global_cov);
  check_spd(global_cov);

  // k-means++ seeding, then one hard assignment to initialize the parameters.
  std::vector<Eigen::Index> centres{static_cast<Eigen::Index>(unit_draw(rng) * static_cast<double>(n))};
  Eigen::VectorXd d2 = (samples.rowwise() - samples.row(centres[0])).rowwise().squaredNorm();
  while (static_cast<Eigen::Index>(centres.size()) < k) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = unit_draw(rng) * total;
      double acc = 0.0;
      for (pick = 0; pick < n - 1; ++pick) {
        acc += d2[pick];
        if (acc > target) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(unit_draw(rng) * static_cast<double>(n));
    }
    centres.push_back(pick);
    d2 = d2.cwiseMin((samples.rowwise() - samples.row(pick)).rowwise().squaredNorm());
  }

  std::vector<double> alpha(k);
  std::vector<Eigen::VectorXd> mu(k);
  std::vector<Eigen::MatrixXd> sigma(k);
  {
    Eigen::VectorXi label(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) {
        const double d = (samples.row(r) - samples.row(centres[c])).squaredNorm();
        if (d < best) {
          best = d;
          label[r] = static_cast<int>(c);
        }
      }
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      Eigen::VectorXd w = (label.array() == c).cast<double>();
      const double count = w.sum();
      alpha[c] = std::max(count, 1.0) / static_cast<double>(n);
      if (count > static_cast<double>(s)) {
        mu[c] = (samples.transpose() * w) / count;
        sigma[c] = covariance(samples, w, mu[c], count);
        add_jitter(sigma[c]);
      } else {
        mu[c] = samples.row(centres[c]).transpose();
        sigma[c] = global_cov;
      }
    }
    const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    for (auto& a : alpha) a /= total;
  }

  EmResult result;
  Eigen::MatrixXd resp(n, k);
  Eigen::VectorXd row_ll(n);
  std::vector<double> terms(k);
  bool reseeded_now = false;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    std::vector<GaussianComponent> comps;
    for (Eigen::Index c = 0; c < k; ++c) {
      check_spd(sigma[c]);
      comps.emplace_back(alpha[c], mu[c], sigma[c]);
    }
    // E-step.
    CompensatedSum ll;
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::VectorXd xr = samples.row(r).transpose();
      const std::span<const double> xs(xr.data(), static_cast<std::size_t>(s));
      for (Eigen::Index c = 0; c < k; ++c) terms[c] = std::log(alpha[c]) + comps[c].log_pdf(xs);
      const double lse = log_sum_exp(terms);
      row_ll[r] = lse;
      for (Eigen::Index c = 0; c < k; ++c) resp(r, c) = std::exp(terms[c] - lse);
      ll.add(lse);
    }
    const double mean_ll = ll.value() / static_cast<double>(n);
    result.log_likelihood.push_back(mean_ll);
    result.components = std::move(comps);
    result.iterations = it + 1;
    if (it > 0 && !reseeded_now) {
      const double gain = mean_ll - result.log_likelihood[it - 1];
      if (gain <= options.tolerance * std::max(1.0, std::abs(mean_ll))) {
        result.converged = true;
        break;
      }
    }
    reseeded_now = false;

    // M-step.
    for (Eigen::Index c = 0; c < k; ++c) {
      const Eigen::VectorXd w = resp.col(c);
      const double nk = w.sum();
      if (!(nk > 1e-8 * static_cast<double>(n))) {
        if (result.reseeds > 0) throw FitError("EM component collapsed twice");
        ++result.reseeds;
        reseeded_now = true;
        Eigen::Index worst = 0;
        row_ll.minCoeff(&worst);
        mu[c] = samples.row(worst).transpose();
        sigma[c] = global_cov;
        alpha[c] = 1.0 / static_cast<double>(k);
        continue;
      }
      alpha[c] = nk / static_cast<double>(n);
      mu[c] = (samples.transpose() * w) / nk;
      sigma[c] = covariance(samples, w, mu[c], nk);
      add_jitter(sigma[c]);
    }
    const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    for (auto& a : alpha) a /= total;
  }
  return result;
}

Eigen::MatrixXd importance_resample(const DensityFunction& pi, std::span<const Interval> box,
                                    std::span<const std::size_t> cells, std::size_t count, std::uint64_t seed,
                                    std::size_t passes) {
  const std::size_t s = box.size();
  if (s == 0 || cells.size() != s) throw ParameterError("lattice shape must match the box");
  if (count == 0 || passes == 0) throw ParameterError("resampling needs a positive count and pass number");
  std::size_t total = 1;
  for (std::size_t j = 0; j < s; ++j) {
    if (cells[j] < 1) throw ParameterError("lattice needs at least one cell per dimension");
    if (!(box[j].lower < box[j].upper)) throw ParameterError("box must be non-degenerate");
    total *= cells[j];
  }

  std::vector<Interval> region(box.begin(), box.end());
  std::vector<double> values(total), x(s), width(s);
  std::vector<std::size_t> idx(s);
  auto decode = [&](std::size_t flat) {
    for (std::size_t j = s; j-- > 0;) {
      idx[j] = flat % cells[j];
      flat /= cells[j];
    }
  };
  for (std::size_t pass = 0;; ++pass) {
    for (std::size_t j = 0; j < s; ++j) width[j] = (region[j].upper - region[j].lower) / static_cast<double>(cells[j]);
    double vmax = 0.0;
    for (std::size_t f = 0; f < total; ++f) {
      decode(f);
      for (std::size_t j = 0; j < s; ++j) x[j] = region[j].lower + (static_cast<double>(idx[j]) + 0.5) * width[j];
      const double v = pi(x);
      if (!std::isfinite(v) || v < 0.0) throw InvalidDensityError("density returned a negative or non-finite value");
      values[f] = v;
      vmax = std::max(vmax, v);
    }
    if (!(vmax > 0.0)) throw DegenerateMixtureError("density vanishes on the resampling lattice");
    if (pass + 1 == passes) break;
    // Zoom onto the cells that matter, padded by one cell on each side.
    std::vector<std::size_t> lo(s, std::numeric_limits<std::size_t>::max()), hi(s, 0);
    for (std::size_t f = 0; f < total; ++f) {
      if (values[f] < 1e-8 * vmax) continue;
      decode(f);
      for (std::size_t j = 0; j < s; ++j) {
        lo[j] = std::min(lo[j], idx[j]);
        hi[j] = std::max(hi[j], idx[j]);
      }
    }
    bool shrinks = false;
    for (std::size_t j = 0; j < s; ++j) {
      const std::size_t a = lo[j] > 0 ? lo[j] - 1 : 0;
      const std::size_t b = std::min(hi[j] + 2, cells[j]);
      shrinks |= (b - a) < cells[j];
      const double base = region[j].lower;
      region[j] = {base + static_cast<double>(a) * width[j],
                   b == cells[j] ? region[j].upper : base + static_cast<double>(b) * width[j]};
    }
    if (!shrinks) break;
  }

  std::vector<double> cumulative(total);
  CompensatedSum acc;
  for (std::size_t f = 0; f < total; ++f) {
    acc.add(values[f]);
    cumulative[f] = acc.value();
  }
  const double mass = cumulative.back();
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(s));
  for (std::size_t r = 0; r < count; ++r) {
    const double u = unit_draw(rng) * mass;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    decode(static_cast<std::size_t>(it - cumulative.begin()));
    for (std::size_t j = 0; j < s; ++j) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          region[j].lower + (static_cast<double>(idx[j]) + unit_draw(rng)) * width[j];
    }
  }
  return out;
}

std::size_t PartitionModel::evaluations() const {
  std::size_t n = 0;
  for (const auto& r : reports) n += r.evaluations;
  return n;
}

double PartitionModel::eval(std::span<const double> x) const {
  std::vector<double> z(x.size());
  CompensatedSum total;
  for (std::size_t i = 0; i < surrogates.size(); ++i) {
    const auto& comp = (*mixture)[i];
    transform_to_local(comp, x, z);
    bool inside = true;
    for (std::size_t j = 0; j < z.size() && inside; ++j) inside = std::abs(z[j]) <= comp.half_widths()[j];
    if (!inside) continue;
    // Rounding can push |z_j| a hair past the box edge; clamp back in.
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = std::clamp(z[j], -comp.half_widths()[j], comp.half_widths()[j]);
    total.add(comp.alpha() * surrogates[i].eval(z));
  }
  return total.value();
}

PartitionModel build_partition_model(const DensityFunction& pi, std::vector<GaussianComponent> components,
                                     const PartitionOptions& options) {
  if (!(options.tail_multiplier > 0.0)) throw ParameterError("tail multiplier must be positive");
  if (components.empty()) throw ParameterError("partition needs at least one component");
  for (auto& c : components) c = c.with_tail(options.tail_multiplier, options.identity_rotation);

  PartitionModel model;
  model.mixture = std::make_shared<const GaussianMixture>(std::move(components));
  const auto& mix = *model.mixture;
  CompensatedSum c;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const auto& comp = mix[i];
    auto target = localized_target(pi, model.mixture, i, options.domain);
    const auto box = comp.local_box();
    auto result = run_to_convergence(target, box, options.adaptive);
    if (result.report.budget_exceeded) {
      model.warnings.push_back("component " + std::to_string(i) + ": evaluation budget exhausted before convergence");
    }
    model.masses.push_back(result.surrogate.mass());
    c.add(comp.alpha() * result.surrogate.mass());
    model.surrogates.push_back(std::move(result.surrogate));
    model.reports.push_back(std::move(result.report));

    const double bound = comp.truncation_bound();
    model.epsilon = std::max(model.epsilon, bound);
    if (bound > kTruncationWarn * comp.peak()) {
      std::ostringstream os;
      os << "component " << i << ": truncation dominates (tail bound " << bound << " vs peak " << comp.peak() << ")";
      model.warnings.push_back(os.str());
    }
  }
  model.mass = c.value();
  if (!(model.mass > 0.0)) throw DegenerateMixtureError("every localized surrogate vanished");
  return model;
}

std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t total) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("weights must be finite and >= 0");
    sum += w;
  }
  if (!(sum > 0.0)) throw DegenerateMixtureError("all weights are zero");
  std::vector<std::size_t> out(weights.size());
  std::vector<double> frac(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double q = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<std::size_t>(std::floor(q));
    frac[i] = weights[i] > 0.0 ? q - std::floor(q) : -1.0;
    assigned += out[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t v = 0; assigned < total; v = (v + 1) % order.size()) {
    ++out[order[v]];
    ++assigned;
  }
  return out;
}

CombinedReport combined_estimate(const PartitionModel& model, const VectorIntegrand& f, std::size_t outputs,
                                 std::size_t total, double delta, const DigitalSequence& seq) {
  if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  return combined_estimate(
      model, f, outputs, total, [delta](std::span<const double>, std::size_t) { return delta; }, seq);
}

CombinedReport combined_estimate(const PartitionModel& model, const VectorIntegrand& f, std::size_t outputs,
                                 std::size_t total, const DeltaRule& delta, const DigitalSequence& seq) {
  if (total < 2) throw ParameterError("combined estimator needs N >= 2");
  if (!(model.mass > 0.0) || !model.mixture) throw DegenerateMixtureError("partition model carries no mass");
  const auto& mix = *model.mixture;
  const std::size_t s = mix.dim();

  std::vector<double> shares(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) shares[i] = mix[i].alpha() * model.masses[i];

  CombinedReport rep;
  rep.budgets = largest_remainder(shares, total);
  std::vector<CompensatedSum> acc(outputs);
  for (std::size_t i = 0; i < model.size(); ++i) {
    const std::size_t ni = rep.budgets[i];
    if (ni == 0) {
      if (shares[i] > 0.0) rep.warnings.push_back("component " + std::to_string(i) + " received no samples");
      rep.skipped_mass += shares[i] / model.mass;
      continue;
    }
    HatMixture hm(model.surrogates[i]);
    double di = delta(hm.weights(), ni);
    if (!(di > 0.0)) throw ParameterError("delta must be positive");
    if (!(di < static_cast<double>(ni))) {
      di = 0.5 * static_cast<double>(ni);
      rep.warnings.push_back("component " + std::to_string(i) + ": delta reduced to " + std::to_string(di));
    }
    const auto alloc = select_and_allocate(hm.weights(), ni, di);
    const auto& comp = mix[i];
    std::vector<double> x(s);
    const VectorIntegrand g = [&](std::span<const double> z, std::span<double> out) {
      inverse_transform(comp, z, x);
      f(x, out);
    };
    auto part = estimate(hm, alloc, g, outputs, seq);
    for (auto& w : part.warnings) rep.warnings.push_back("component " + std::to_string(i) + ": " + w);
    const double scale = shares[i] / model.mass;
    for (std::size_t o = 0; o < outputs; ++o) acc[o].add(scale * part.values[o]);
    rep.samples += part.samples;
    rep.skipped_mass += scale * part.skipped_mass;
    rep.dropped_mass += scale * alloc.dropped_mass;
  }
  rep.values.resize(outputs);
  for (std::size_t o = 0; o < outputs; ++o) rep.values[o] = acc[o].value();
  return rep;
}

double combined_estimate(const PartitionModel& model, const Integrand& f, std::size_t total, double delta,
                         const DigitalSequence& seq) {
  const VectorIntegrand g = [&f](std::span<const double> x, std::span<double> out) { out[0] = f(x); };
  return combined_estimate(model, g, 1, total, delta, seq).values[0];
}

}  // namespace wqmc
