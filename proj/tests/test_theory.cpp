#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "confomp/errors.hpp"
#include "confomp/theory.hpp"
#include "oracles.hpp"

using namespace confomp;
using namespace confomp::theory;

TEST_CASE("nu law for one column is a point mass at d") {
  const auto nu = nu_distribution(4, 2, 1);
  CHECK(nu.prob(2) == 1.0);
  CHECK(nu.prob(3) == 0.0);
}

TEST_CASE("nu law for two columns of C(4,2)") {
  const auto nu = nu_distribution(4, 2, 2);
  CHECK(nu.prob(2) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(nu.prob(3) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(nu.prob(4) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(nu.mean() == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(expected_nu_closed(4, 2, 2) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("nu law matches exhaustive enumeration") {
  for (auto [m, d, k] : {std::tuple{4, 2, 2}, {5, 2, 3}, {6, 3, 2}, {5, 2, 2}, {7, 3, 3}}) {
    const auto exact = oracle::union_size_law(m, d, k);
    const auto nu = nu_distribution(m, d, k);
    double total = 0.0;
    for (int v = 0; v <= m; ++v) {
      const double want = exact.count(v) ? exact.at(v) : 0.0;
      CHECK(std::abs(nu.prob(v) - want) <= 1e-12);
      total += nu.prob(v);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("closed-form mean of nu") {
  CHECK(expected_nu_closed(100, 10, 1) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(expected_nu_closed(100, 10, 2) == doctest::Approx(19.0).epsilon(1e-14));
  CHECK(expected_nu_closed(37, 37, 1) == doctest::Approx(37.0).epsilon(1e-14));
  CHECK(nu_distribution(100, 10, 2).mean() == doctest::Approx(19.0).epsilon(1e-12));
  CHECK_THROWS_AS(expected_nu_closed(10, 11, 1), ParameterError);
  CHECK_THROWS_AS(nu_distribution(10, 2, 0), ParameterError);
}

TEST_CASE("expected size of the confined set") {
  CHECK(expected_gamma_size(4, 7, 2, 1) == doctest::Approx(2.0).epsilon(1e-14));
  const double e = expected_gamma_size(100, 256, 10, 2);
  CHECK(e >= 2.0);
  CHECK(e <= 2.5);
  CHECK(expected_gamma_size(20, 9, 3, 9) == doctest::Approx(9.0));
}

TEST_CASE("variance of the confined-set size") {
  // nu = 2 always, so |Gamma| - 1 ~ Binomial(6, 1/6).
  CHECK(gamma_size_variance(4, 7, 2, 1) == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
  // Mixture case against the enumerated law of nu.
  const auto law = oracle::union_size_law(5, 2, 2);
  double within = 0.0, mean = 0.0, second = 0.0;
  for (const auto& [v, p] : law) {
    const double q = v * (v - 1) / 20.0;
    within += p * 4.0 * q * (1.0 - q);
    mean += p * q;
    second += p * q * q;
  }
  CHECK(gamma_size_variance(5, 6, 2, 2) == doctest::Approx(within + 16.0 * (second - mean * mean)));
  CHECK(gamma_size_variance(20, 9, 3, 9) == 0.0);
}

TEST_CASE("noiseless confinement bound") {
  CHECK(conf_prob_lower_bound(128, 10, 10, 1e-12, SignalModel::flat(1.0)).value == 1.0);
  const auto g = conf_prob_lower_bound(128, 10, 10, 1e-12, SignalModel::gaussian(0, 1));
  CHECK(g.value < 1.0);
  CHECK(1.0 - g.value < 1e-9);
  const auto big = conf_prob_lower_bound(128, 10, 10, 1e6, SignalModel::gaussian(0, 1));
  CHECK(big.value == 0.0);
  CHECK(big.clamped);
}

TEST_CASE("recovery bound") {
  const auto r = recovery_prob_lower_bound(4, 7, 2, 1);
  CHECK(r.value == doctest::Approx(std::pow(5.0 / 6.0, 6)).epsilon(1e-14));
  CHECK(r.value == doctest::Approx(0.334898).epsilon(1e-6));
  CHECK(recovery_prob_lower_bound(20, 6, 3, 6).value == 1.0);
  CHECK(r.assumptions.size() == 1);
}

TEST_CASE("coverage bound pi_bar") {
  const auto p = pi_bar(128, 256, 10, 8);
  CHECK(std::abs(p.value - 0.103740) < 1e-6);
  CHECK(std::abs(p.value - static_cast<double>(oracle::pi_bar_ld(128, 256, 10, 8))) < 1e-12);
  CHECK(p.valid);
  CHECK(pi_bar(100, 256, 10, 10).value == 0.0);
  CHECK(pi_bar(50, 60, 50, 1).value == 0.0);
  const auto invalid = pi_bar(100, 256, 10, 12);
  CHECK_FALSE(invalid.valid);
}

TEST_CASE("real and integer optimum of pi_bar") {
  const auto o = pi_bar_optimal_d(128, 8, 256);
  CHECK(o.d_star == doctest::Approx(5.886071).epsilon(1e-6));
  CHECK(o.pi_max == doctest::Approx(0.501641).epsilon(1e-5));
  CHECK_FALSE(o.warning);
  const double at_int = pi_bar(128, 256, o.d_int, 8).value;
  for (Index d = 1; d <= 128 / 8; ++d) CHECK(at_int >= pi_bar(128, 256, d, 8).value);
}

TEST_CASE("real degree optimum") {
  CHECK(pi_bar_optimal_d(11, 4, 50).d_star == doctest::Approx(11.0 / (4.0 * std::numbers::e)));
  const auto low = pi_bar_optimal_d(2, 1, 5);
  CHECK(low.d_star == doctest::Approx(2.0 / std::numbers::e));
  CHECK(low.warning);
  CHECK(low.d_int >= 1);
}

TEST_CASE("measurement counts") {
  const auto mb = min_measurements(256, 8);
  CHECK(mb.m == 240);
  CHECK(mb.prob_bound == doctest::Approx(1.0 - 1.0 / 248.0).epsilon(1e-14));
  CHECK_FALSE(mb.warning);
  const auto same = sufficient_measurements(256, 8, std::numbers::e, 2.0 * std::numbers::e);
  CHECK(same.m == mb.m);
  CHECK(same.prob_bound == mb.prob_bound);
  const auto edge = sufficient_measurements(256, 8, 2.0, 2.0 + 1e-9);
  CHECK(edge.prob_bound >= 0.0);
  CHECK(edge.prob_bound < 1e-8);
  CHECK(sufficient_measurements(20, 8, std::numbers::e, 2 * std::numbers::e).warning);
  CHECK_THROWS_AS(sufficient_measurements(256, 8, 2.0, 1.5), ParameterError);
  CHECK_THROWS_AS(sufficient_measurements(256, 8, 1.0, 3.0), ParameterError);
}

TEST_CASE("asymptotic sparsity") {
  CHECK(asymptotic_max_sparsity_best(1e4, 2.0) == 199);
  CHECK(std::floor(asymptotic_max_sparsity(1e4, 2.0, 2.0)) == 199);
  double best = 0.0, arg = 0.0;
  for (double g = 1.01; g <= 10.0; g += 0.01) {
    const double v = asymptotic_max_sparsity(1e4, 3.0, g);
    if (v > best) {
      best = v;
      arg = g;
    }
  }
  CHECK(arg == doctest::Approx(3.0).epsilon(0.01));
  CHECK(asymptotic_max_sparsity(1e4, 500.0, 2.0) < 1e-100);
}

TEST_CASE("noisy confinement bound") {
  CHECK(noisy_conf_prob_lower_bound(128, 10, 10, 0.4, 0.4, SignalModel::flat(1.0)).value == 1.0);
  const auto half = noisy_conf_prob_lower_bound(128, 10, 10, 0.5, 0.5, SignalModel::flat(1.0));
  CHECK(half.value == 0.0);
  CHECK(half.clamped);
  const auto g0 = noisy_conf_prob_lower_bound(128, 10, 10, 0.4, 0.4, SignalModel::gaussian(0, 1));
  const auto g2 = noisy_conf_prob_lower_bound(128, 10, 10, 0.4, 0.4, SignalModel::gaussian(2, 1));
  CHECK(g2.raw > g0.raw);
}

TEST_CASE("noisy support bound") {
  const auto pb = pi_bar(128, 256, 10, 8);
  const auto flat = noisy_support_recovery_bound(128, 256, 10, 8, 0.45, SignalModel::flat(1.0));
  CHECK(flat.value == doctest::Approx(pb.value).epsilon(1e-14));
  const auto g = noisy_support_recovery_bound(128, 256, 10, 8, 0.0, SignalModel::gaussian());
  CHECK(g.value == doctest::Approx(pb.value).epsilon(1e-14));
  double prev = -1.0;
  for (double mu : {0.0, 1.0, 2.0}) {
    const auto b = noisy_support_recovery_bound(128, 256, 10, 8, 0.05, SignalModel::gaussian(mu, 1));
    CHECK(b.raw >= prev);
    prev = b.raw;
  }
  CHECK(noisy_support_recovery_bound(128, 256, 10, 8, 0.5, SignalModel::flat(1.0)).value == 0.0);
}

TEST_CASE("degree optimisation") {
  const auto t4 = optimize_d(100, 256, 5, BoundKind::exact_recovery);
  CHECK(t4.d == 12);
  const auto pb = optimize_d(100, 256, 5, BoundKind::pi_bar);
  const double star = 100.0 / (5.0 * std::numbers::e);
  CHECK((pb.d == static_cast<Index>(std::floor(star)) || pb.d == static_cast<Index>(std::ceil(star))));
  const auto none = optimize_d(100, 256, 60, BoundKind::pi_bar);
  CHECK(none.d == 5);
  CHECK(none.value == 0.0);
  CHECK_FALSE(none.valid);
  CHECK_THROWS_AS(optimize_d(1, 10, 1, BoundKind::pi_bar), ParameterError);
}
