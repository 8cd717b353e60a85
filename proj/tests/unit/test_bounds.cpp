#include <doctest.h>

#include <cmath>

#include "delegate/bounds.hpp"
#include "delegate/equilibrium.hpp"
#include "delegate/error.hpp"
#include "delegate/experiments.hpp"
#include "delegate/mechanisms.hpp"
#include "delegate/orderstats.hpp"
#include "support.hpp"

using namespace delegate;

TEST_CASE("bm threshold values") {
  const auto a = bm_threshold(1.0, 5, 2);
  CHECK(a.r == doctest::Approx(std::pow(11.0, -0.1)).epsilon(1e-14));
  CHECK(a.r == doctest::Approx(0.78678).epsilon(1e-5));
  CHECK(a.guarantee == doctest::Approx(0.71526).epsilon(1e-5));
  const auto b = bm_threshold(1.0, 1, 1);
  CHECK(b.r == doctest::Approx(0.5));
  CHECK(b.guarantee == doctest::Approx(0.25));
  const auto big = bm_threshold(1.0, 10000, 10000);
  CHECK(big.r > 0.999999);
  CHECK(big.guarantee > 0.999999);
}

TEST_CASE("bm guarantee has two equal forms") {
  for (double alpha : {0.25, 0.5, 1.0, 2.0, 3.5}) {
    for (int n : {1, 2, 5, 13}) {
      for (int k : {1, 3, 10}) {
        const auto t = bm_threshold(alpha, n, k);
        const double m = alpha * n * k;
        CHECK(std::abs(t.guarantee - t.guarantee_factored) <= 1e-12);
        CHECK(std::abs(t.guarantee - t.r * m / (m + 1)) <= 1e-12);
      }
    }
  }
  // The ratio form is not the same quantity.
  const auto t = bm_threshold(1.0, 10, 1);
  CHECK(t.guarantee == doctest::Approx(0.7153).epsilon(1e-4));
  CHECK(t.ratio_form == doctest::Approx(0.9905).epsilon(1e-4));
}

TEST_CASE("closed-form bound values") {
  CHECK(pim_bound_symmetric(2) == doctest::Approx(0.5));
  CHECK(pim_bound_symmetric(5) == doctest::Approx(0.4096));
  CHECK(pim_bound_symmetric(2, 3.0) == doctest::Approx(1.5));
  CHECK(pim_bound_mhr(1) == doctest::Approx(1.0 / 3));
  CHECK(pim_bound_mhr(10) == doctest::Approx(std::sqrt(40.0 / (3 * 121 * 12))).epsilon(1e-14));
  CHECK(pim_bound_mhr(10) == doctest::Approx(0.0958266).epsilon(1e-6));
  // 1.155 / k is the large-k behaviour.
  CHECK(pim_bound_mhr(1000) * 1000 == doctest::Approx(2 / std::sqrt(3.0)).epsilon(0.01));
  CHECK(pim_bound_incpdf(9, 1000) * 1000 * 10 == doctest::Approx(std::sqrt(12.0)).epsilon(0.01));
  CHECK(pim_bound_incpdf(3, 2) == doctest::Approx(0.20412).epsilon(1e-5));
  CHECK(incomplete_info_lower_bound(2, 1) == doctest::Approx(-std::sqrt(std::log(2.0) / 5)));
  CHECK(incomplete_info_lower_bound(2, 1) < 0.0);
  CHECK(incomplete_info_lower_bound(3, 50) == doctest::Approx(49.0 / 51 - std::sqrt(std::log(3.0) / 103)));
  CHECK(incomplete_info_lower_bound(3, 50) == doctest::Approx(0.85747).epsilon(1e-4));
  CHECK(incomplete_info_lower_bound(3, 100000) > 0.99);
  CHECK(worstcase_min_ceiling(3, 10) == doctest::Approx(1.0 / 11 + std::sqrt(std::log(3.0) / 23)));
  CHECK(approx_bne_epsilon(2) == doctest::Approx(0.86466).epsilon(1e-5));
  CHECK(approx_bne_epsilon(1000000) == doctest::Approx(0.39347).epsilon(1e-4));
  CHECK(bce_ratio(1000000) == doctest::Approx(1.64872).epsilon(1e-4));
  CHECK(bce_ratio(7) * (1 - approx_bne_epsilon(7)) == doctest::Approx(1.0));
}

TEST_CASE("super-agent BM instance") {
  const double alpha = 1.0 / 29;
  const auto m = materialize(NamedInstance::super_agent_bm(alpha));
  CHECK(m.value("E_X1") == doctest::Approx(2 - alpha));
  CHECK(m.value("accept_w1_utility") == doctest::Approx(1.0));
  CHECK(m.value("reject_w1_utility") == doctest::Approx(1 + alpha));
  REQUIRE(m.spec);
  CHECK_THROWS_AS(materialize(NamedInstance::super_agent_bm(0.6)), Error);

  // E[X_(1)] from the support itself.
  const auto all = m.spec->enumerate_realizations();
  double ex1 = 0.0, total = 0.0;
  for (const auto& [inst, p] : all) {
    double best = 0.0;
    for (AgentIndex i = 0; i < inst.n(); ++i) best = std::max(best, inst.first_best(i));
    ex1 += p * best;
    total += p;
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK(ex1 == doctest::Approx(2 - alpha));

  // With omega_1 eligible, every pure equilibrium earns exactly 1.
  double eq_utility = 0.0;
  for (const auto& [inst, p] : all) {
    const auto report = enumerate_pure_nash(inst, MechanismSpec::mspm(inst.n(), 1.0));
    REQUIRE(report.has_pure_nash());
    for (const auto& r : report.nash_profiles) CHECK(r.principal_utility == 1.0);
    eq_utility += p * report.nash_profiles.front().principal_utility;
  }
  CHECK(eq_utility == doctest::Approx(1.0));
}

TEST_CASE("super-agent identity over epsilon") {
  for (double eps : {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    const double a = super_agent_alpha(eps);
    CHECK(a == doctest::Approx(eps / (3 - eps)));
    CHECK(std::abs((2 - eps) * (1 + a) - (2 - a)) <= 1e-12);
  }
  const auto m = materialize(NamedInstance::super_agent_bm(super_agent_alpha(0.1)));
  CHECK(m.value("E_X1") == doctest::Approx(1.96551724138));
  CHECK(m.value("alg_ceiling") == doctest::Approx(1.03448275862));
}

TEST_CASE("super-agent PIM instance") {
  for (double eps : {0.05, 0.1, 0.2}) {
    const auto m = materialize(NamedInstance::super_agent_pim(1.0, eps));
    CHECK(m.value("mechanism_utility") == doctest::Approx(eps / 2));
    CHECK(m.value("E_X1") == doctest::Approx(1 - eps / 2));
    CHECK(m.value("gap") == doctest::Approx(1 - eps));
    REQUIRE(m.spec);
    const auto all = m.spec->enumerate_realizations();
    REQUIRE(all.size() == 1);
    const auto& inst = all.front().first;
    const auto report = enumerate_pure_nash(inst, MechanismSpec::mspm(inst.n(), 0.0));
    REQUIRE(report.has_pure_nash());
    for (const auto& r : report.nash_profiles) CHECK(r.principal_utility == doctest::Approx(eps / 2));
  }
  CHECK_THROWS_AS(materialize(NamedInstance::super_agent_pim(1.0, 1.5)), Error);
}

TEST_CASE("Bernoulli tight instance") {
  const auto m = materialize(NamedInstance::bernoulli_tight(5, 2));
  CHECK(m.value("p") == doctest::Approx(1 - std::sqrt(0.8)).epsilon(1e-12));
  CHECK(m.value("p") == doctest::Approx(0.10557).epsilon(1e-4));
  CHECK(m.value("gap") == doctest::Approx(std::pow(0.8, 4)));
  CHECK_FALSE(m.spec);
  for (int n = 2; n <= 10; ++n) {
    for (int k : {1, 2, 5}) {
      const auto inst = materialize(NamedInstance::bernoulli_tight(n, k));
      REQUIRE(inst.x_marginal);
      const MaxOfK first_best(*inst.x_marginal, k);
      const double gap = gap_expectation({first_best, n, 1, GapSide::kTop});
      CHECK(std::abs(gap - pim_bound_symmetric(n)) <= 1e-9);
      // Exactly one agent holds a one: n q (1 - q)^(n-1) with q = 1/n.
      CHECK(std::abs(bernoulli_gap_by_count(1.0 / n, n, 1) - pim_bound_symmetric(n)) <= 1e-12);
    }
  }
}

TEST_CASE("worst-case instance bounds against Monte Carlo") {
  McOptions o;
  o.trials = 20000;
  o.seed = 3;
  for (auto [n, k] : {std::pair{3, 10}, std::pair{5, 20}}) {
    const auto r = estimate_worstcase_bne_utility(n, k, o);
    const double nk = n * k;
    CHECK(std::abs(r.est("E_X_max") - nk / (nk + 1)) <= 4 * r.est("E_X_max_se"));
    CHECK(r.est("gap") >= incomplete_info_lower_bound(n, k) - 4 * r.est("gap_se"));
    CHECK(r.estimate <= worstcase_min_ceiling(n, k) + 4 * r.std_err);
  }
  const auto m = materialize(NamedInstance::worstcase_bne(3, 10));
  CHECK(m.value("lower_bound") == doctest::Approx(9.0 / 11 - std::sqrt(std::log(3.0) / 23)));
  CHECK(m.value("lower_bound") == doctest::Approx(0.5996).epsilon(1e-3));
}
