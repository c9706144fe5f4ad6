#pragma once

#include <span>
#include <vector>

#include "confomp/combmat.hpp"

namespace confomp {

/// Near-zero measurement rows E = {i : |y_i| <= eps} and the confined
/// column set: every column with no one in any row of E.
struct ConfinedSet {
  double epsilon = 0.0;
  IndexList e_rows;  // sorted
  IndexList gamma;   // sorted

  /// Rows of y treated as nonzero, m - |E|.
  Index nonzero_rows(Index m) const { return m - static_cast<Index>(e_rows.size()); }
};

/// Builds E and Gamma. With a counter, charges n preprocessing flops and m
/// threshold tests.
ConfinedSet compute_confined_set(const CombMatrix& a, std::span<const double> y, double epsilon,
                                 OpCounter* counter = nullptr);

struct SparsityEstimate {
  Index k_hat = 1;
  /// Set when the observed count is below d, which no K >= 1 can produce.
  bool warning = false;
};

/// argmin over K in [1, k_max] of |nonzero_count - m(1 - (1 - d/m)^K)|,
/// ties toward smaller K.
SparsityEstimate estimate_sparsity(Index nonzero_count, Index m, Index d, Index k_max);

/// round(||y||_1 / (d |theta|)); exact for noiseless flat signals.
Index flat_sparsity_exact(std::span<const double> y, Index d, double theta);

}  // namespace confomp
