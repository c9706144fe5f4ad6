#pragma once

// Greedy sparse recovery over combinatorial matrices: OMP, generalized OMP
// and their confined variants, which restrict identification to the
// confined set.

#include <span>
#include <string_view>
#include <vector>

#include "confomp/combmat.hpp"
#include "confomp/signals.hpp"

namespace confomp {

enum class EarlyExit {
  confined_exact,      // |Gamma| small enough to solve on Gamma directly
  residual_threshold,  // ||r||_2 <= residual_tol
  max_iterations,
  gamma_exhausted,     // every candidate already selected
};

std::string_view to_string(EarlyExit e);

/// Only rule implemented: among equal scores the smallest column index wins.
enum class TieBreak { lowest_index };

struct SolverConfig {
  Index k = 1;                   // target sparsity / iteration budget
  double epsilon = 1e-12;        // confinement threshold
  double residual_tol = 1e-5;    // stop once ||r||_2 <= residual_tol
  Index batch = 1;               // indices picked per gOMP iteration
  TieBreak tie_break = TieBreak::lowest_index;
};

struct GreedyResult {
  std::vector<double> x_hat;
  IndexList support;                  // sorted estimate Lambda
  IndexList selection_order;          // Lambda in the order indices were picked
  std::vector<double> residual_norms; // ||r^(0)|| = ||y||, then one per estimate
  Index iterations = 0;
  OpCounter counters;
  EarlyExit early_exit = EarlyExit::max_iterations;
  Index gamma_size = -1;              // confined variants only
};

/// Least-squares coefficients of y on the columns `lambda` (in the given
/// order), via column-pivoted Householder QR of the binary submatrix.
/// Throws RankDeficient when the smallest |R_kk| falls below 1e-10 times
/// the largest.
std::vector<double> least_squares(const CombMatrix& a, std::span<const Index> lambda,
                                  std::span<const double> y);

GreedyResult omp(const CombMatrix& a, std::span<const double> y, const SolverConfig& cfg);
GreedyResult confined_omp(const CombMatrix& a, std::span<const double> y, const SolverConfig& cfg);
GreedyResult gomp(const CombMatrix& a, std::span<const double> y, const SolverConfig& cfg);
GreedyResult confined_gomp(const CombMatrix& a, std::span<const double> y,
                           const SolverConfig& cfg);

inline constexpr double kPerfectRecoveryTol = 1e-3;

/// ||x - x_hat||_2 / ||x||_2.
double relative_error(const SparseSignal& x, std::span<const double> x_hat);
inline bool is_perfect(double rel_err) { return rel_err <= kPerfectRecoveryTol; }

}  // namespace confomp
