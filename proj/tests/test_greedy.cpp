#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "confomp/confined.hpp"
#include "confomp/errors.hpp"
#include "confomp/greedy.hpp"
#include "confomp/rng.hpp"

using namespace confomp;

namespace {

std::vector<double> dense_y(Index m, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> y(m);
  for (auto& v : y) v = g(rng);
  return y;
}

// Independent reference: dense 0/1 matrix, normal equations solved by
// Gauss-Jordan with partial pivoting. Returns nullopt on a singular Gram.
struct Reference {
  IndexList order;
  std::vector<double> x;
};

std::optional<std::vector<double>> solve_normal(const std::vector<std::vector<double>>& dense,
                                                const IndexList& cols, const std::vector<double>& y) {
  const std::size_t k = cols.size();
  std::vector<std::vector<double>> g(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t i = 0; i < y.size(); ++i) g[a][b] += dense[i][cols[a]] * dense[i][cols[b]];
    for (std::size_t i = 0; i < y.size(); ++i) g[a][k] += dense[i][cols[a]] * y[i];
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(g[r][c]) > std::abs(g[p][c])) p = r;
    if (std::abs(g[p][c]) < 1e-9) return std::nullopt;
    std::swap(g[p], g[c]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = g[r][c] / g[c][c];
      for (std::size_t t = c; t <= k; ++t) g[r][t] -= f * g[c][t];
    }
  }
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c) out[c] = g[c][k] / g[c][c];
  return out;
}

std::optional<Reference> reference_omp(const CombMatrix& a, const std::vector<double>& y, Index k,
                                       const IndexList& candidates, double tol) {
  const Index m = a.rows(), n = a.cols();
  std::vector<std::vector<double>> dense(m, std::vector<double>(n, 0.0));
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) dense[i][j] = a.at(i, j) ? 1.0 : 0.0;

  Reference ref;
  ref.x.assign(n, 0.0);
  std::vector<double> r = y;
  auto norm = [](const std::vector<double>& v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  };
  while (norm(r) > tol && static_cast<Index>(ref.order.size()) < k &&
         ref.order.size() < candidates.size()) {
    Index best = -1;
    double best_score = -1.0;
    for (Index j : candidates) {
      if (std::find(ref.order.begin(), ref.order.end(), j) != ref.order.end()) continue;
      double s = 0.0;
      for (Index i = 0; i < m; ++i) s += dense[i][j] * r[i];
      if (std::abs(s) > best_score) {
        best_score = std::abs(s);
        best = j;
      }
    }
    ref.order.push_back(best);
    const auto coef = solve_normal(dense, ref.order, y);
    if (!coef) return std::nullopt;
    std::fill(ref.x.begin(), ref.x.end(), 0.0);
    for (std::size_t t = 0; t < ref.order.size(); ++t) ref.x[ref.order[t]] = (*coef)[t];
    for (Index i = 0; i < m; ++i) {
      double fit = 0.0;
      for (Index j = 0; j < n; ++j) fit += dense[i][j] * ref.x[j];
      r[i] = y[i] - fit;
    }
  }
  return ref;
}

void check_same(const GreedyResult& x, const GreedyResult& y) {
  CHECK(x.selection_order == y.selection_order);
  CHECK(x.support == y.support);
  REQUIRE(x.x_hat.size() == y.x_hat.size());
  for (std::size_t j = 0; j < x.x_hat.size(); ++j) CHECK(x.x_hat[j] == y.x_hat[j]);
}

}  // namespace

TEST_CASE("least squares on small column sets") {
  const auto a = gen_comb_matrix(20, 30, 4, 1);
  std::vector<double> y(20, 0.0);
  for (Index i : a.column(7)) y[i] = 3.0;
  const IndexList one{7};
  const auto c = least_squares(a, one, y);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == doctest::Approx(3.0).epsilon(1e-14));

  const auto x = gen_signal(30, 4, SignalModel::gaussian(), 2);
  const auto yx = matvec(a, x.dense());
  const auto coef = least_squares(a, x.support, yx);
  for (std::size_t t = 0; t < coef.size(); ++t)
    CHECK(coef[t] == doctest::Approx(x.values[t]).epsilon(1e-9));

  const CombMatrix twin(4, 3, 2, {{0, 1}, {0, 1}, {2, 3}});
  const IndexList both{0, 1};
  CHECK_THROWS_AS(least_squares(twin, both, std::vector<double>{1, 1, 0, 0}), RankDeficient);
  CHECK_THROWS_AS(least_squares(twin, IndexList{}, std::vector<double>(4, 0.0)), ParameterError);
}

TEST_CASE("one-sparse signals are found in one iteration") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto a = gen_comb_matrix(30, 60, 5, s);
    const auto x = gen_signal(60, 1, SignalModel::gaussian(), s + 77);
    SolverConfig cfg;
    cfg.k = 1;
    const auto res = omp(a, matvec(a, x.dense()), cfg);
    CHECK(res.iterations == 1);
    CHECK(res.support == x.support);
    CHECK(is_perfect(relative_error(x, res.x_hat)));
  }
}

TEST_CASE("OMP identification work over K forced iterations") {
  const Index m = 128, n = 256, d = 10;
  const auto a = gen_comb_matrix(m, n, d, 5);
  const auto y = dense_y(m, 6);
  for (Index k : {1, 4, 9}) {
    SolverConfig cfg;
    cfg.k = k;
    cfg.residual_tol = 0.0;
    const auto res = omp(a, y, cfg);
    REQUIRE(res.iterations == k);
    CHECK(res.counters.identification_flops() ==
          static_cast<std::uint64_t>(k) * n * d - static_cast<std::uint64_t>(k));
    CHECK(res.counters.inner_products == static_cast<std::uint64_t>(k) * n);
    CHECK(res.counters.preprocessing_flops == 0u);
    CHECK(res.residual_norms.size() == static_cast<std::size_t>(k) + 1);
    CHECK(res.early_exit == EarlyExit::max_iterations);
  }
}

TEST_CASE("residual is orthogonal to the chosen columns and never grows") {
  const auto a = gen_comb_matrix(60, 120, 6, 8);
  const auto y = dense_y(60, 9);
  SolverConfig cfg;
  cfg.k = 12;
  cfg.residual_tol = 0.0;
  const auto res = omp(a, y, cfg);
  auto r = y;
  for (Index j = 0; j < 120; ++j)
    for (Index i : a.column(j)) r[i] -= res.x_hat[j];
  for (Index j : res.support) CHECK(std::abs(col_correlation(a, j, r)) < 1e-10);
  for (std::size_t t = 1; t < res.residual_norms.size(); ++t)
    CHECK(res.residual_norms[t] <= res.residual_norms[t - 1] + 1e-12);
  CHECK(res.residual_norms.front() ==
        doctest::Approx(std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0))));
}

TEST_CASE("matches a dense reference on tiny instances") {
  int compared = 0;
  for (std::uint64_t s = 0; s < 400; ++s) {
    const Index m = 5 + static_cast<Index>(s % 4);
    const Index n = 6 + static_cast<Index>(s % 5);
    const Index k = 1 + static_cast<Index>(s % 2);
    const auto a = gen_comb_matrix(m, n, 2, s);
    const auto x = gen_signal(n, k, SignalModel::gaussian(), s + 5000);
    const auto y = matvec(a, x.dense());
    SolverConfig cfg;
    cfg.k = k;

    IndexList all(n);
    std::iota(all.begin(), all.end(), 0);
    const auto ref = reference_omp(a, y, k, all, cfg.residual_tol);

    // Brute-force confined set straight from the definition.
    IndexList gamma;
    for (Index j = 0; j < n; ++j) {
      bool ok = true;
      for (Index i = 0; i < m; ++i) ok &= !(a.at(i, j) && std::abs(y[i]) <= cfg.epsilon);
      if (ok) gamma.push_back(j);
    }
    CHECK(compute_confined_set(a, y, cfg.epsilon).gamma == gamma);

    if (!ref) {
      CHECK_THROWS_AS(omp(a, y, cfg), RankDeficient);
      continue;
    }
    const auto res = omp(a, y, cfg);
    CHECK(res.selection_order == ref->order);
    for (Index j = 0; j < n; ++j) CHECK(res.x_hat[j] == doctest::Approx(ref->x[j]).epsilon(1e-9));

    if (static_cast<Index>(gamma.size()) > k) {
      const auto cref = reference_omp(a, y, k, gamma, cfg.residual_tol);
      if (cref) {
        const auto cres = confined_omp(a, y, cfg);
        CHECK(cres.selection_order == cref->order);
        for (Index j = 0; j < n; ++j)
          CHECK(cres.x_hat[j] == doctest::Approx(cref->x[j]).epsilon(1e-9));
      }
    }
    ++compared;
  }
  CHECK(compared > 200);
}

TEST_CASE("confined OMP without confinement follows OMP") {
  const auto a = gen_comb_matrix(50, 100, 5, 10);
  const auto y = dense_y(50, 11);
  SolverConfig cfg;
  cfg.k = 8;
  cfg.residual_tol = 0.0;
  const auto plain = omp(a, y, cfg);
  const auto conf = confined_omp(a, y, cfg);
  CHECK(conf.gamma_size == 100);
  check_same(plain, conf);
  CHECK(conf.counters.preprocessing_flops == 100u);
  CHECK(conf.counters.identification_flops() == plain.counters.identification_flops());
}

TEST_CASE("confined OMP with Gamma equal to the support does no identification") {
  int exact = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto a = gen_comb_matrix(128, 256, 10, s);
    const auto x = gen_signal(256, 3, SignalModel::gaussian(), s + 99);
    SolverConfig cfg;
    cfg.k = 3;
    const auto res = confined_omp(a, matvec(a, x.dense()), cfg);
    if (res.gamma_size != 3) continue;
    ++exact;
    CHECK(res.early_exit == EarlyExit::confined_exact);
    CHECK(res.counters.inner_products == 0u);
    CHECK(res.counters.identification_flops() == 0u);
    CHECK(res.counters.preprocessing_flops == 256u);
    CHECK(res.iterations == 0);
    CHECK(is_perfect(relative_error(x, res.x_hat)));
  }
  CHECK(exact > 30);
}

TEST_CASE("confined OMP work is bounded by K|Gamma|d - K + n") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto a = gen_comb_matrix(100, 256, 12, s);
    const auto x = gen_signal(256, 14, SignalModel::gaussian(), s + 3);
    SolverConfig cfg;
    cfg.k = 14;
    GreedyResult res;
    try {
      res = confined_omp(a, matvec(a, x.dense()), cfg);
    } catch (const RankDeficient&) {
      continue;
    }
    const std::uint64_t g = static_cast<std::uint64_t>(res.gamma_size);
    CHECK(res.counters.total_flops() <= 14u * g * 12u - 14u + 256u);
  }
}

TEST_CASE("gOMP with a batch of one is OMP") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = gen_comb_matrix(40, 80, 4, s);
    const auto y = dense_y(40, s + 1);
    SolverConfig cfg;
    cfg.k = 7;
    cfg.batch = 1;
    cfg.residual_tol = 0.0;
    const auto g = gomp(a, y, cfg);
    const auto o = omp(a, y, cfg);
    check_same(g, o);
    CHECK(g.counters == o.counters);
    const auto cg = confined_gomp(a, y, cfg);
    const auto co = confined_omp(a, y, cfg);
    check_same(cg, co);
  }
}

TEST_CASE("gOMP on a one-sparse signal picks a batch containing the true column") {
  const auto a = gen_comb_matrix(60, 120, 6, 21);
  const auto x = gen_signal(120, 1, SignalModel::gaussian(), 22);
  SolverConfig cfg;
  cfg.k = 1;
  cfg.batch = 3;
  const auto res = gomp(a, matvec(a, x.dense()), cfg);
  CHECK(res.iterations == 1);
  CHECK(res.support.size() == 3);
  CHECK(std::binary_search(res.support.begin(), res.support.end(), x.support[0]));
  CHECK(is_perfect(relative_error(x, res.x_hat)));
}

TEST_CASE("confined gOMP without confinement follows gOMP") {
  const auto a = gen_comb_matrix(50, 100, 5, 30);
  const auto y = dense_y(50, 31);
  SolverConfig cfg;
  cfg.k = 5;
  cfg.batch = 3;
  cfg.residual_tol = 0.0;
  check_same(gomp(a, y, cfg), confined_gomp(a, y, cfg));
}

TEST_CASE("confined gOMP solves directly when Gamma is small") {
  const auto a = gen_comb_matrix(128, 256, 10, 40);
  const auto x = gen_signal(256, 2, SignalModel::gaussian(), 41);
  SolverConfig cfg;
  cfg.k = 2;
  cfg.batch = 3;
  const auto res = confined_gomp(a, matvec(a, x.dense()), cfg);
  REQUIRE(res.gamma_size <= 3);
  CHECK(res.early_exit == EarlyExit::confined_exact);
  CHECK(res.counters.inner_products == 0u);
  CHECK(is_perfect(relative_error(x, res.x_hat)));
}

TEST_CASE("gOMP takes every remaining index when fewer than N are left") {
  // Gamma = {0, 1, 2, 3, 4} on this instance: rows 5..7 are zero.
  const CombMatrix a(8, 7, 2, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {5, 6}, {6, 7}});
  const std::vector<double> y{1.0, 2.0, 3.5, 1.25, 0.5, 0.0, 0.0, 0.0};
  SolverConfig cfg;
  cfg.k = 2;
  cfg.batch = 3;
  cfg.residual_tol = 0.0;
  const auto res = confined_gomp(a, y, cfg);
  CHECK(res.gamma_size == 5);
  CHECK(res.iterations == 2);
  CHECK(res.support == IndexList{0, 1, 2, 3, 4});
  CHECK(res.selection_order.size() == 5);
}

TEST_CASE("relative error and the perfect-recovery test") {
  const auto x = gen_signal(20, 3, SignalModel::gaussian(), 1);
  auto dense = x.dense();
  CHECK(relative_error(x, dense) == 0.0);
  CHECK(is_perfect(relative_error(x, dense)));
  CHECK(relative_error(x, std::vector<double>(20, 0.0)) == doctest::Approx(1.0));
  CHECK_FALSE(is_perfect(1.0));
  for (auto& v : dense) v *= 1.0005;
  CHECK(relative_error(x, dense) == doctest::Approx(0.0005));
  CHECK(is_perfect(relative_error(x, dense)));
  SparseSignal zero{5, {}, {}, SignalModel::gaussian()};
  CHECK_THROWS_AS(relative_error(zero, std::vector<double>(5, 0.0)), ParameterError);
}

TEST_CASE("solver input checks") {
  const auto a = gen_comb_matrix(10, 20, 3, 1);
  SolverConfig cfg;
  cfg.k = 11;
  CHECK_THROWS_AS(omp(a, std::vector<double>(10, 1.0), cfg), ParameterError);
  cfg.k = 2;
  CHECK_THROWS_AS(omp(a, std::vector<double>(9, 1.0), cfg), ParameterError);
  cfg.batch = 0;
  CHECK_THROWS_AS(gomp(a, std::vector<double>(10, 1.0), cfg), ParameterError);
}
