#include "confomp/greedy.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "confomp/confined.hpp"
#include "confomp/errors.hpp"

namespace confomp {

std::string_view to_string(EarlyExit e) {
  switch (e) {
    case EarlyExit::confined_exact: return "confined_exact";
    case EarlyExit::residual_threshold: return "residual_threshold";
    case EarlyExit::max_iterations: return "max_iterations";
    case EarlyExit::gamma_exhausted: return "gamma_exhausted";
  }
  return "unknown";
}

namespace {

constexpr double kRankTol = 1e-10;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

void check_inputs(const CombMatrix& a, std::span<const double> y, const SolverConfig& cfg) {
  if (static_cast<Index>(y.size()) != a.rows())
    throw ParameterError("solver: y has length " + std::to_string(y.size()) + ", expected " +
                         std::to_string(a.rows()));
  if (cfg.k < 1) throw ParameterError("solver: K must be >= 1");
  if (cfg.k > a.rows()) throw ParameterError("solver: K must not exceed m");
  if (cfg.batch < 1) throw ParameterError("solver: batch size N must be >= 1");
  if (!(cfg.residual_tol >= 0.0)) throw ParameterError("solver: residual tolerance must be >= 0");
  if (!(cfg.epsilon >= 0.0)) throw ParameterError("solver: epsilon must be >= 0");
}

// Fits y on `lambda`, fills x_hat/support and returns the new residual.
std::vector<double> estimate(const CombMatrix& a, std::span<const double> y,
                             std::span<const Index> lambda, GreedyResult& res) {
  std::vector<double> r(y.begin(), y.end());
  std::fill(res.x_hat.begin(), res.x_hat.end(), 0.0);
  if (!lambda.empty()) {
    const auto coef = least_squares(a, lambda, y);
    for (std::size_t k = 0; k < lambda.size(); ++k) {
      res.x_hat[lambda[k]] = coef[k];
      for (Index i : a.column(lambda[k])) r[i] -= coef[k];
    }
  }
  res.support.assign(lambda.begin(), lambda.end());
  std::sort(res.support.begin(), res.support.end());
  res.residual_norms.push_back(norm2(r));
  return r;
}

// Shared identification / augmentation / estimation loop. Each iteration
// correlates every candidate with the residual (chosen ones included, then
// masked) and extracts the `batch` largest magnitudes by repeated scans, so
// selecting among c candidates costs c-1 comparisons per pick.
void pursue(const CombMatrix& a, std::span<const double> y, const SolverConfig& cfg,
            std::span<const Index> candidates, Index batch, Index max_iter, GreedyResult& res) {
  const std::size_t c = candidates.size();
  std::vector<double> r(y.begin(), y.end());
  std::vector<double> score(c, 0.0);
  std::vector<char> chosen(c, 0);
  IndexList lambda;

  while (res.residual_norms.back() > cfg.residual_tol && res.iterations < max_iter &&
         lambda.size() < c) {
    ++res.iterations;
    const std::size_t remaining = c - lambda.size();
    if (remaining < static_cast<std::size_t>(batch)) {
      // Take all that is left; nothing to rank.
      for (std::size_t p = 0; p < c; ++p)
        if (!chosen[p]) {
          chosen[p] = 1;
          lambda.push_back(candidates[p]);
          res.selection_order.push_back(candidates[p]);
        }
    } else {
      for (std::size_t p = 0; p < c; ++p) {
        const double s = std::abs(col_correlation(a, candidates[p], r, &res.counters));
        score[p] = chosen[p] ? -1.0 : s;
      }
      for (Index pick = 0; pick < batch; ++pick) {
        std::size_t best = 0;
        for (std::size_t p = 1; p < c; ++p)
          if (score[p] > score[best]) best = p;
        res.counters.comparisons += c - 1;
        chosen[best] = 1;
        score[best] = -1.0;
        lambda.push_back(candidates[best]);
        res.selection_order.push_back(candidates[best]);
      }
    }
    r = estimate(a, y, lambda, res);
  }

  if (res.residual_norms.back() <= cfg.residual_tol)
    res.early_exit = EarlyExit::residual_threshold;
  else if (res.iterations < max_iter && lambda.size() == c)
    res.early_exit = EarlyExit::gamma_exhausted;
  else
    res.early_exit = EarlyExit::max_iterations;
}

GreedyResult start(const CombMatrix& a, std::span<const double> y) {
  GreedyResult res;
  res.x_hat.assign(a.cols(), 0.0);
  res.residual_norms.push_back(norm2(y));
  return res;
}

IndexList all_columns(const CombMatrix& a) {
  IndexList all(a.cols());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

GreedyResult confined_pursuit(const CombMatrix& a, std::span<const double> y,
                              const SolverConfig& cfg, Index batch, Index direct_limit,
                              Index max_iter) {
  auto res = start(a, y);
  const auto cs = compute_confined_set(a, y, cfg.epsilon, &res.counters);
  res.gamma_size = static_cast<Index>(cs.gamma.size());
  if (res.gamma_size <= direct_limit) {
    if (res.gamma_size > a.rows())
      throw RankDeficient("confined set larger than m cannot be solved directly");
    estimate(a, y, cs.gamma, res);
    res.selection_order = cs.gamma;
    res.early_exit = EarlyExit::confined_exact;
    return res;
  }
  pursue(a, y, cfg, cs.gamma, batch, max_iter, res);
  return res;
}

}  // namespace

std::vector<double> least_squares(const CombMatrix& a, std::span<const Index> lambda,
                                  std::span<const double> y) {
  if (lambda.empty()) throw ParameterError("least_squares: empty column set");
  if (static_cast<Index>(lambda.size()) > a.rows())
    throw ParameterError("least_squares: more columns than rows");
  if (static_cast<Index>(y.size()) != a.rows()) throw ParameterError("least_squares: bad y length");

  const Eigen::Index m = a.rows();
  const auto k = static_cast<Eigen::Index>(lambda.size());
  Eigen::MatrixXd sub = Eigen::MatrixXd::Zero(m, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Index i : a.column(lambda[c])) sub(i, c) = 1.0;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  const auto diag = qr.matrixQR().diagonal().cwiseAbs();
  if (diag.minCoeff() < kRankTol * diag.maxCoeff())
    throw RankDeficient("least_squares: column submatrix of size " + std::to_string(k) +
                        " is rank deficient");

  Eigen::Map<const Eigen::VectorXd> rhs(y.data(), m);
  qr.setThreshold(0.0);
  const Eigen::VectorXd sol = qr.solve(rhs);
  return {sol.data(), sol.data() + k};
}

GreedyResult omp(const CombMatrix& a, std::span<const double> y, const SolverConfig& cfg) {
  check_inputs(a, y, cfg);
  auto res = start(a, y);
  pursue(a, y, cfg, all_columns(a), 1, cfg.k, res);
  return res;
}

GreedyResult gomp(const CombMatrix& a, std::span<const double> y, const SolverConfig& cfg) {
  check_inputs(a, y, cfg);
  auto res = start(a, y);
  pursue(a, y, cfg, all_columns(a), cfg.batch, std::min(cfg.k, a.rows() / cfg.batch), res);
  return res;
}

GreedyResult confined_omp(const CombMatrix& a, std::span<const double> y,
                          const SolverConfig& cfg) {
  check_inputs(a, y, cfg);
  // |Gamma| < K cannot happen for noiseless confined signals; it is
  // solved on Gamma like |Gamma| = K.
  return confined_pursuit(a, y, cfg, 1, cfg.k, cfg.k);
}

GreedyResult confined_gomp(const CombMatrix& a, std::span<const double> y,
                           const SolverConfig& cfg) {
  check_inputs(a, y, cfg);
  return confined_pursuit(a, y, cfg, cfg.batch, std::max(cfg.k, cfg.batch),
                          std::min(cfg.k, a.rows() / cfg.batch));
}

double relative_error(const SparseSignal& x, std::span<const double> x_hat) {
  if (static_cast<Index>(x_hat.size()) != x.n)
    throw ParameterError("relative_error: dimension mismatch");
  const auto dense = x.dense();
  double num = 0.0, den = 0.0;
  for (Index j = 0; j < x.n; ++j) {
    const double diff = dense[j] - x_hat[j];
    num += diff * diff;
    den += dense[j] * dense[j];
  }
  if (den == 0.0) throw ParameterError("relative_error: reference signal is zero");
  return std::sqrt(num / den);
}

}  // namespace confomp
