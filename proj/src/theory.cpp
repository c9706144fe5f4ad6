#include "confomp/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "confomp/errors.hpp"

namespace confomp::theory {

namespace {

double log_choose(Index n, Index k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void check_mdk(Index m, Index d, Index k) {
  if (m < 1) throw ParameterError("m must be >= 1");
  if (d < 1 || d > m) throw ParameterError("degree d must satisfy 1 <= d <= m");
  if (k < 1) throw ParameterError("sparsity K must be >= 1");
}

void check_n(Index n, Index k) {
  if (k > n) throw ParameterError("sparsity K must not exceed n");
}

BoundReport clamp_report(double raw) {
  BoundReport r;
  r.raw = raw;
  r.value = std::clamp(raw, 0.0, 1.0);
  r.clamped = !(raw >= 0.0 && raw <= 1.0);
  return r;
}

// (1 - p)^e for p in [0, 1], stable for tiny p.
double pow_one_minus(double p, Index e) {
  if (e == 0) return 1.0;
  if (p >= 1.0) return 0.0;
  return std::exp(static_cast<double>(e) * std::log1p(-p));
}

}  // namespace

double NuDistribution::prob(Index v) const {
  if (v < support_lo || v > support_hi) return 0.0;
  return probs[v - support_lo];
}

double NuDistribution::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) s += (support_lo + static_cast<double>(i)) * probs[i];
  return s;
}

NuDistribution nu_distribution(Index m, Index d, Index k) {
  check_mdk(m, d, k);
  NuDistribution nu{m, d, k, d, d, {1.0}};
  const double log_total = log_choose(m, d);
  for (Index step = 2; step <= k; ++step) {
    const Index hi = static_cast<Index>(std::min<std::int64_t>(static_cast<std::int64_t>(step) * d, m));
    std::vector<double> next(hi - d + 1, 0.0);
    for (Index z = nu.support_lo; z <= nu.support_hi; ++z) {
      const double pz = nu.probs[z - nu.support_lo];
      if (pz == 0.0) continue;
      // The new column shares `overlap` rows with the z covered ones and
      // adds d - overlap fresh rows.
      const Index lo_overlap = std::max<Index>(0, d - (m - z));
      const Index hi_overlap = std::min(d, z);
      for (Index overlap = lo_overlap; overlap <= hi_overlap; ++overlap) {
        const Index v = z + d - overlap;
        const double t =
            std::exp(log_choose(z, overlap) + log_choose(m - z, d - overlap) - log_total);
        next[v - d] += t * pz;
      }
    }
    nu.support_hi = hi;
    nu.probs = std::move(next);
  }
  return nu;
}

double expected_nu_closed(Index m, Index d, Index k) {
  check_mdk(m, d, k);
  return m * -std::expm1(k * std::log1p(-static_cast<double>(d) / m));
}

double binomial_ratio(Index v, Index d, Index m) {
  if (v < d) return 0.0;
  double r = 1.0;
  for (Index z = 0; z < d; ++z) r *= static_cast<double>(v - z) / static_cast<double>(m - z);
  return r;
}

double expected_gamma_size(Index m, Index n, Index d, Index k) {
  check_mdk(m, d, k);
  check_n(n, k);
  const auto nu = nu_distribution(m, d, k);
  double e = 0.0;
  for (Index v = nu.support_lo; v <= nu.support_hi; ++v) e += nu.prob(v) * binomial_ratio(v, d, m);
  return k + (n - k) * e;
}

double gamma_size_variance(Index m, Index n, Index d, Index k) {
  check_mdk(m, d, k);
  check_n(n, k);
  const auto nu = nu_distribution(m, d, k);
  const double off = static_cast<double>(n - k);
  double within = 0.0, mean = 0.0, second = 0.0;
  for (Index v = nu.support_lo; v <= nu.support_hi; ++v) {
    const double q = binomial_ratio(v, d, m);
    const double p = nu.prob(v);
    within += p * off * q * (1.0 - q);
    mean += p * q;
    second += p * q * q;
  }
  return within + off * off * std::max(0.0, second - mean * mean);
}

BoundReport conf_prob_lower_bound(Index m, Index d, Index k, double epsilon,
                                  const SignalModel& model) {
  check_mdk(m, d, k);
  if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be >= 0");
  const ConvolutionTable conv(model, k);
  const double p = static_cast<double>(d) / m;
  double union_sum = 0.0;
  for (Index ell = 1; ell <= k; ++ell) {
    const double log_binom = log_choose(k, ell) + ell * std::log(p) +
                             (p < 1.0 ? (k - ell) * std::log1p(-p) : (k == ell ? 0.0 : -INFINITY));
    union_sum += std::exp(log_binom) * conv.mass_near_zero(ell, epsilon);
  }
  return clamp_report(1.0 - m * union_sum);
}

BoundReport recovery_prob_lower_bound(const NuDistribution& nu, Index n) {
  check_n(n, nu.k);
  double e = 0.0;
  for (Index v = nu.support_lo; v <= nu.support_hi; ++v)
    e += nu.prob(v) * pow_one_minus(binomial_ratio(v, nu.d, nu.m), n - nu.k);
  auto r = clamp_report(e);
  r.assumptions.emplace_back(kAssumeSpark);
  return r;
}

BoundReport recovery_prob_lower_bound(Index m, Index n, Index d, Index k) {
  check_mdk(m, d, k);
  check_n(n, k);
  return recovery_prob_lower_bound(nu_distribution(m, d, k), n);
}

BoundReport pi_bar(Index m, Index n, Index d, Index k) {
  check_mdk(m, d, k);
  check_n(n, k);
  const double ratio = static_cast<double>(k) * d / m;
  const Index e = n - k;
  double raw;
  if (ratio < 1.0)
    raw = pow_one_minus(std::exp(d * std::log(ratio)), e);
  else
    raw = e == 0 ? 1.0 : 0.0;  // base 1 - (Kd/m)^d clamped at 0
  auto r = clamp_report(raw);
  r.valid = static_cast<std::int64_t>(k) * d <= m;
  r.assumptions.emplace_back(kAssumeSpark);
  return r;
}

OptimalDegree pi_bar_optimal_d(Index m, Index k, Index n) {
  if (m < 1 || k < 1) throw ParameterError("pi_bar_optimal_d: m and K must be >= 1");
  check_n(n, k);
  OptimalDegree o;
  o.d_star = m / (k * std::numbers::e);
  o.warning = o.d_star < 1.0;
  o.pi_max = pow_one_minus(std::exp(-o.d_star), n - k);

  const auto lo = static_cast<Index>(std::floor(o.d_star));
  const auto hi = static_cast<Index>(std::ceil(o.d_star));
  auto score = [&](Index d) { return d >= 1 && d <= m ? pi_bar(m, n, d, k).value : -1.0; };
  o.d_int = score(lo) >= score(hi) && lo >= 1 ? lo : std::max<Index>(hi, 1);
  return o;
}

MeasurementBound sufficient_measurements(Index n, Index k, double beta, double c) {
  if (!(beta > 1.0)) throw ParameterError("sufficient_measurements: beta must exceed 1");
  if (!(c > beta)) throw ParameterError("sufficient_measurements: c must exceed beta");
  if (k < 1 || k >= n) throw ParameterError("sufficient_measurements: need 1 <= K < n");
  MeasurementBound mb;
  const double gap = static_cast<double>(n - k);
  mb.m = static_cast<Index>(std::ceil(c * k * std::log(gap) / std::log(beta)));
  mb.prob_bound = 1.0 - std::pow(gap, 1.0 - c / beta);
  mb.warning = mb.m >= n;
  return mb;
}

MeasurementBound min_measurements(Index n, Index k) {
  return sufficient_measurements(n, k, std::numbers::e, 2.0 * std::numbers::e);
}

double asymptotic_max_sparsity(double m, double tau, double gamma) {
  if (!(m >= 3.0)) throw ParameterError("asymptotic_max_sparsity: m must be >= 3");
  if (!(tau > 1.0) || !(gamma > 1.0))
    throw ParameterError("asymptotic_max_sparsity: tau and gamma must exceed 1");
  return std::exp(-tau / gamma) / gamma * m / std::log(m);
}

Index asymptotic_max_sparsity_best(double m, double tau) {
  if (!(m >= 3.0)) throw ParameterError("asymptotic_max_sparsity: m must be >= 3");
  if (!(tau > 1.0)) throw ParameterError("asymptotic_max_sparsity: tau must exceed 1");
  return static_cast<Index>(std::floor(m / (tau * std::numbers::e * std::log(m))));
}

BoundReport noisy_conf_prob_lower_bound(Index m, Index d, Index k, double epsilon, double eta,
                                        const SignalModel& model) {
  check_mdk(m, d, k);
  if (!(epsilon >= 0.0) || !(eta >= 0.0))
    throw ParameterError("epsilon and eta must be non-negative");
  const double worst = ConvolutionTable(model, k).max_mass_near_zero(epsilon + eta);
  return clamp_report(1.0 - expected_nu_closed(m, d, k) * worst);
}

BoundReport noisy_support_recovery_bound(Index m, Index n, Index d, Index k, double eta,
                                         const SignalModel& model) {
  check_mdk(m, d, k);
  check_n(n, k);
  if (!(eta >= 0.0)) throw ParameterError("eta must be non-negative");
  const auto coverage = pi_bar(m, n, d, k);
  const double worst = ConvolutionTable(model, k).max_mass_near_zero(2.0 * eta);
  const auto confinement = clamp_report(1.0 - expected_nu_closed(m, d, k) * worst);
  BoundReport r;
  r.raw = coverage.raw * confinement.raw;
  r.value = coverage.value * confinement.value;
  r.clamped = coverage.clamped || confinement.clamped;
  r.valid = coverage.valid;
  r.assumptions = coverage.assumptions;
  return r;
}

DegreeChoice optimize_d(Index m, Index n, Index k, BoundKind kind) {
  if (m < 2) throw ParameterError("optimize_d: m too small");
  const Index lo = static_cast<Index>(std::floor(std::log(static_cast<double>(m)))) + 1;
  const Index hi = m / 2;
  if (lo > hi) throw ParameterError("optimize_d: no integer degree in (ln m, m/2]");
  DegreeChoice best{-1, -1.0, false};
  for (Index d = lo; d <= hi; ++d) {
    const auto b = kind == BoundKind::exact_recovery ? recovery_prob_lower_bound(m, n, d, k)
                                               : pi_bar(m, n, d, k);
    if (b.value > best.value) best = {d, b.value, b.valid};
  }
  return best;
}

}  // namespace confomp::theory
