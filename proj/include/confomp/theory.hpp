#pragma once

// Exact evaluators for the expectations and probability bounds attached to
// confined OMP over sparse random combinatorial matrices.

#include <string>
#include <vector>

#include "confomp/combmat.hpp"
#include "confomp/signals.hpp"

namespace confomp::theory {

/// Law of nu^(K), the number of rows of y = A x touched by K columns.
struct NuDistribution {
  Index m = 0;
  Index d = 0;
  Index k = 0;
  Index support_lo = 0;      // d
  Index support_hi = 0;      // min(K d, m)
  std::vector<double> probs; // probs[v - support_lo] = P{nu = v}

  double prob(Index v) const;
  double mean() const;
};

/// A probability bound together with the regime it was evaluated in.
struct BoundReport {
  double value = 0.0;   // always in [0, 1]
  double raw = 0.0;     // formula value before clamping
  bool valid = true;    // parameter-regime premise met (e.g. K <= m/d)
  bool clamped = false; // raw fell outside [0, 1]
  std::vector<std::string> assumptions;
};

inline constexpr const char* kAssumeSpark = "spark_exceeds_K";

/// Markov recursion over the number of covered rows, one column at a time:
/// a fresh column overlaps z covered rows in a hypergeometric number of
/// places. Binomials are handled in log space.
NuDistribution nu_distribution(Index m, Index d, Index k);

/// m (1 - (1 - d/m)^K).
double expected_nu_closed(Index m, Index d, Index k);

/// C(v, d) / C(m, d) as prod_{z<d} (v - z)/(m - z); zero when v < d.
double binomial_ratio(Index v, Index d, Index m);

/// K + (n - K) E[C(nu, d) / C(m, d)].
double expected_gamma_size(Index m, Index n, Index d, Index k);

/// Var|Gamma| for noiseless confined signals. Given nu, each of the n - K
/// off-support columns lands in Gamma independently with probability
/// C(nu, d)/C(m, d), so |Gamma| - K is a binomial mixture over nu.
double gamma_size_variance(Index m, Index n, Index d, Index k);

/// Lower bound on P{support inside Gamma} for noiseless measurements.
BoundReport conf_prob_lower_bound(Index m, Index d, Index k, double epsilon,
                                  const SignalModel& model);

/// E[(1 - C(nu, d)/C(m, d))^(n-K)], which equals P{|Gamma| = K}.
BoundReport recovery_prob_lower_bound(Index m, Index n, Index d, Index k);
/// Same, reusing a precomputed distribution for (m, d, K).
BoundReport recovery_prob_lower_bound(const NuDistribution& nu, Index n);

/// (1 - (K d / m)^d)^(n-K); valid only when K <= m/d.
BoundReport pi_bar(Index m, Index n, Index d, Index k);

struct OptimalDegree {
  double d_star = 0.0;  // m / (K e)
  Index d_int = 1;      // better of floor / ceil of d_star
  double pi_max = 0.0;  // (1 - exp(-m/(K e)))^(n-K)
  bool warning = false; // d_star < 1
};
OptimalDegree pi_bar_optimal_d(Index m, Index k, Index n);

struct MeasurementBound {
  Index m = 0;
  double prob_bound = 0.0;
  bool warning = false;  // m >= n, outside the compressive regime
};

/// m = ceil(c K ln(n-K) / ln beta) with bound 1 - (n-K)^(1 - c/beta).
MeasurementBound sufficient_measurements(Index n, Index k, double beta, double c);
/// beta = e, c = 2e: m = ceil(2 e K ln(n-K)), bound 1 - 1/(n-K).
MeasurementBound min_measurements(Index n, Index k);

/// (1/gamma) e^(-tau/gamma) m / ln m for n = m^tau, d = gamma ln m.
double asymptotic_max_sparsity(double m, double tau, double gamma);
/// floor(m / (tau e ln m)), the maximum over gamma (attained at gamma = tau).
Index asymptotic_max_sparsity_best(double m, double tau);

/// 1 - E[nu] max_{ell <= K} (F^{*ell}(eps+eta) - F^{*ell}(-eps-eta)).
BoundReport noisy_conf_prob_lower_bound(Index m, Index d, Index k, double epsilon, double eta,
                                        const SignalModel& model);

/// pi_bar times 1 - E[nu] max_{ell <= K} (F^{*ell}(2 eta) - F^{*ell}(-2 eta)).
BoundReport noisy_support_recovery_bound(Index m, Index n, Index d, Index k, double eta,
                                         const SignalModel& model);

enum class BoundKind { exact_recovery, pi_bar };

struct DegreeChoice {
  Index d = 0;
  double value = 0.0;
  bool valid = true;
};

/// Integer d in (ln m, m/2] maximising the chosen bound; lowest d on ties.
DegreeChoice optimize_d(Index m, Index n, Index k, BoundKind kind);

}  // namespace confomp::theory
