#include "confomp/confined.hpp"

#include <cmath>
#include <limits>

#include "confomp/errors.hpp"

namespace confomp {

ConfinedSet compute_confined_set(const CombMatrix& a, std::span<const double> y, double epsilon,
                                 OpCounter* counter) {
  if (static_cast<Index>(y.size()) != a.rows())
    throw ParameterError("compute_confined_set: y has length " + std::to_string(y.size()) +
                         ", expected " + std::to_string(a.rows()));
  if (!(epsilon >= 0.0)) throw ParameterError("compute_confined_set: epsilon must be >= 0");

  ConfinedSet cs;
  cs.epsilon = epsilon;
  std::vector<char> excluded(a.cols(), 0);
  for (Index i = 0; i < a.rows(); ++i) {
    if (std::abs(y[i]) > epsilon) continue;
    cs.e_rows.push_back(i);
    for (Index j : a.row(i)) excluded[j] = 1;
  }
  for (Index j = 0; j < a.cols(); ++j)
    if (!excluded[j]) cs.gamma.push_back(j);

  if (counter) {
    counter->preprocessing_flops += static_cast<std::uint64_t>(a.cols());
    counter->threshold_tests += static_cast<std::uint64_t>(a.rows());
  }
  return cs;
}

SparsityEstimate estimate_sparsity(Index nonzero_count, Index m, Index d, Index k_max) {
  if (k_max < 1) throw ParameterError("estimate_sparsity: K_max must be >= 1");
  if (m < 1 || d < 1 || d > m) throw ParameterError("estimate_sparsity: need 1 <= d <= m");
  SparsityEstimate est;
  if (nonzero_count < d) {
    est.warning = true;
    return est;
  }
  const double keep = 1.0 - static_cast<double>(d) / m;
  double best = std::numeric_limits<double>::infinity();
  double survive = 1.0;
  for (Index k = 1; k <= k_max; ++k) {
    survive *= keep;
    const double gap = std::abs(nonzero_count - m * (1.0 - survive));
    if (gap < best) {
      best = gap;
      est.k_hat = k;
    }
  }
  return est;
}

Index flat_sparsity_exact(std::span<const double> y, Index d, double theta) {
  if (theta == 0.0) throw ParameterError("flat_sparsity_exact: theta must be nonzero");
  if (d < 1) throw ParameterError("flat_sparsity_exact: d must be >= 1");
  double l1 = 0.0;
  for (double v : y) l1 += std::abs(v);
  return static_cast<Index>(std::llround(l1 / (d * std::abs(theta))));
}

}  // namespace confomp
