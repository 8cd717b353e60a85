#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "delegate/orderstats.hpp"
#include "delegate/rng.hpp"
#include "support.hpp"

using namespace delegate;
using test_support::binom;

namespace {

double exp_order_mean(int r, int n) {
  double s = 0.0;
  for (int i = 1; i <= r; ++i) s += 1.0 / (n - i + 1);
  return s;
}

/// E[X_{r:n}] for a two-point law by summing over every outcome.
double two_point_order_mean(double lo, double hi, double p, int r, int n) {
  double e = 0.0;
  for (int ones = 0; ones <= n; ++ones) {
    const double w = binom(n, ones) * std::pow(p, ones) * std::pow(1 - p, n - ones);
    e += w * (r > n - ones ? hi : lo);
  }
  return e;
}

}  // namespace

TEST_CASE("uniform order statistics") {
  const MaxOfK u(Marginal::uniform01());
  for (int n = 2; n <= 8; ++n) {
    for (int r = 1; r <= n; ++r) CHECK(std::abs(order_stat_expectation(u, r, n) - double(r) / (n + 1)) <= 1e-9);
    for (int k = 1; k < n; ++k) {
      for (auto side : {GapSide::kTop, GapSide::kBottom}) {
        const GapQuery q{u, n, k, side};
        CHECK(std::abs(gap_expectation(q) - 1.0 / (n + 1)) <= 1e-9);
        CHECK(std::abs(gap_spacing_integral(q) - 1.0 / (n + 1)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("exponential gaps") {
  const MaxOfK e(Marginal::exponential(1.0));
  for (int n = 2; n <= 10; ++n) {
    for (int k = 1; k < n; ++k) {
      CAPTURE(n);
      CAPTURE(k);
      CHECK(std::abs(gap_expectation({e, n, k, GapSide::kTop}) - 1.0 / k) <= 1e-6);
      CHECK(std::abs(gap_expectation({e, n, k, GapSide::kBottom}) - 1.0 / (n - k)) <= 1e-6);
    }
    for (int r = 1; r <= n; ++r) CHECK(std::abs(order_stat_expectation(e, r, n) - exp_order_mean(r, n)) <= 1e-6);
  }
  // Rate scaling: Exp(2) gaps are half as large.
  CHECK(gap_expectation({MaxOfK(Marginal::exponential(2.0)), 5, 2, GapSide::kTop}) == doctest::Approx(0.25));
}

TEST_CASE("Bernoulli gaps are exact") {
  const MaxOfK b(Marginal::bernoulli(0.5));
  CHECK(gap_expectation({b, 4, 3, GapSide::kTop}) == 0.25);
  CHECK(gap_expectation({b, 5, 3, GapSide::kTop}) == 0.3125);
  CHECK(bernoulli_gap_by_count(0.5, 4, 3) == 0.25);
  CHECK(bernoulli_gap_by_count(0.5, 5, 3) == 0.3125);
  for (double p : {0.1, 0.3, 0.5, 0.8}) {
    const MaxOfK law(Marginal::bernoulli(p));
    for (int n = 2; n <= 9; ++n) {
      for (int k = 1; k < n; ++k) {
        const double direct = two_point_order_mean(0, 1, p, n - k + 1, n) - two_point_order_mean(0, 1, p, n - k, n);
        CHECK(gap_expectation({law, n, k, GapSide::kTop}) == doctest::Approx(direct).epsilon(1e-13));
        CHECK(bernoulli_gap_by_count(p, n, k) == doctest::Approx(direct).epsilon(1e-13));
        CHECK(gap_spacing_integral({law, n, k, GapSide::kTop}) == doctest::Approx(direct).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("spacing and split forms agree with the direct gap") {
  for (const auto& m : {Marginal::uniform01(), Marginal::linear_pdf(), Marginal::power_cdf(0.5),
                        Marginal::exponential(1.5)}) {
    for (int samples : {1, 3}) {
      const MaxOfK law(m, samples);
      for (int n = 2; n <= 6; ++n) {
        for (int k = 1; k < n; ++k) {
          CAPTURE(law.id());
          const GapQuery top{law, n, k, GapSide::kTop};
          CHECK(std::abs(gap_expectation(top) - gap_spacing_integral(top)) <= 1e-7);
          const GapQuery bottom{law, n, k, GapSide::kBottom};
          CHECK(std::abs(gap_expectation(bottom) - gap_spacing_integral(bottom)) <= 1e-7);
          const double split = order_stat_expectation(law, n - k + 1, n) - order_stat_expectation(law, n - k, n - 1);
          CHECK(std::abs(david_split_integral(law, n, k) - split) <= 1e-7);
        }
      }
    }
  }
}

TEST_CASE("telescoping identity") {
  for (const auto& m : {Marginal::uniform01(), Marginal::linear_pdf(), Marginal::exponential(1.0),
                        Marginal::power_cdf(2.0), Marginal::bernoulli(0.3)}) {
    const MaxOfK law(m, 2);
    for (int n = 2; n <= 7; ++n) {
      double sum = order_stat_expectation(law, 1, n);
      for (int k = 1; k < n; ++k) sum += gap_expectation({law, n, k, GapSide::kTop});
      CHECK(std::abs(sum - order_stat_expectation(law, n, n)) <= 1e-8);
    }
  }
}

TEST_CASE("quadrature matches Monte Carlo within 4 standard errors") {
  const std::vector<Marginal> laws{Marginal::uniform01(),      Marginal::bernoulli(0.3), Marginal::power_cdf(0.5),
                                   Marginal::exponential(1.0), Marginal::linear_pdf(),   Marginal::point_mass(0.4),
                                   Marginal::discrete({0.2, 0.5, 0.9}, {0.2, 0.5, 0.3})};
  std::uint64_t stream = 0;
  for (const auto& m : laws) {
    const MaxOfK law(m);
    for (int n = 2; n <= 6; n += 2) {
      RngStream rng(SeedPath{31, "os-mc", stream++});
      const int trials = 100000;
      std::vector<double> sum(n, 0.0), sum2(n, 0.0), draw(n);
      for (int t = 0; t < trials; ++t) {
        for (auto& d : draw) d = law.sample(rng);
        std::sort(draw.begin(), draw.end());
        for (int r = 0; r < n; ++r) {
          sum[r] += draw[r];
          sum2[r] += draw[r] * draw[r];
        }
      }
      for (int r = 1; r <= n; ++r) {
        const double mean = sum[r - 1] / trials;
        const double var = std::max(0.0, sum2[r - 1] / trials - mean * mean);
        const double se = std::sqrt(var / trials);
        CAPTURE(law.id());
        CAPTURE(r);
        CAPTURE(n);
        CHECK(std::abs(order_stat_expectation(law, r, n) - mean) <= 4 * se + 1e-12);
      }
    }
  }
}

TEST_CASE("MHR monotonicity lemma") {
  CHECK(verify_mhr_monotonicity(MaxOfK(Marginal::exponential(1.0)), 2, 3, 8).passed());
  CHECK(verify_mhr_monotonicity(MaxOfK(Marginal::uniform01()), 1, 2, 8).passed());
  for (int samples : {1, 2, 4}) {
    CHECK(verify_mhr_monotonicity(MaxOfK(Marginal::exponential(1.0), samples), 1, 2, 8).passed());
    CHECK(verify_mhr_monotonicity(MaxOfK(Marginal::uniform01(), samples), 1, 2, 8).passed());
  }
  const auto counter = verify_mhr_monotonicity(MaxOfK(Marginal::bernoulli(0.5)), 3, 4, 5);
  CHECK_FALSE(counter.holds);
  CHECK_FALSE(counter.passed());
  REQUIRE(counter.values.size() == 2);
  CHECK(counter.values[0] == 0.25);
  CHECK(counter.values[1] == 0.3125);
  // A law that is not MHR is rejected up front.
  CHECK_FALSE(verify_mhr_monotonicity(MaxOfK(Marginal::power_cdf(0.5)), 1, 2, 6).precondition);
  // MRHR side.
  CHECK(verify_mhr_monotonicity(MaxOfK(Marginal::uniform01()), 1, 2, 8, GapSide::kBottom).passed());
}

TEST_CASE("scaled monotonicity lemma") {
  const auto u = verify_scaled_monotonicity(MaxOfK(Marginal::uniform01()), 1, 3, 8);
  CHECK(u.passed());
  CHECK(verify_scaled_monotonicity(MaxOfK(Marginal::linear_pdf()), 1, 3, 6).passed());
  CHECK(verify_scaled_monotonicity(MaxOfK(Marginal::linear_pdf()), 2, 4, 8).passed());
  CHECK_FALSE(verify_scaled_monotonicity(MaxOfK(Marginal::exponential(1.0)), 1, 3, 6).precondition);
  CHECK(verify_scaled_monotonicity(MaxOfK(Marginal::exponential(1.0)), 1, 3, 6, GapSide::kBottom).precondition);
  // Independent evaluation on the linear law.
  const MaxOfK lin(Marginal::linear_pdf());
  for (int n = 3; n <= 6; ++n) {
    CHECK((n + 1) * gap_expectation({lin, n, 1, GapSide::kTop}) <= n * gap_expectation({lin, n - 1, 1, GapSide::kTop}) + 1e-7);
  }
}

TEST_CASE("MHR is preserved by order statistics") {
  CHECK(verify_mhr_preservation(MaxOfK(Marginal::uniform01()), 3, 3).passed());
  CHECK(verify_mhr_preservation(MaxOfK(Marginal::exponential(1.0)), 2, 1).passed());
  CHECK(verify_mhr_preservation(MaxOfK(Marginal::uniform01()), 4, 2).passed());
  CHECK(verify_mhr_preservation(MaxOfK(Marginal::linear_pdf()), 5, 1).passed());
}

TEST_CASE("pdf shape is preserved by extremes") {
  CHECK(verify_pdf_shape_preservation(MaxOfK(Marginal::uniform01()), 3).passed());
  CHECK(verify_pdf_shape_preservation(MaxOfK(Marginal::linear_pdf()), 2).passed());
  CHECK(verify_pdf_shape_preservation(MaxOfK(Marginal::exponential(1.0)), 3, GapSide::kBottom).passed());
  CHECK_FALSE(verify_pdf_shape_preservation(MaxOfK(Marginal::exponential(1.0)), 3, GapSide::kTop).precondition);
}

TEST_CASE("shape predicates") {
  CHECK(has_mhr(MaxOfK(Marginal::uniform01())));
  CHECK(has_mhr(MaxOfK(Marginal::exponential(1.0))));
  CHECK(has_mhr(MaxOfK(Marginal::linear_pdf())));
  CHECK_FALSE(has_mhr(MaxOfK(Marginal::power_cdf(0.5))));
  CHECK(has_mrhr(MaxOfK(Marginal::uniform01())));
  CHECK(pdf_nondecreasing(MaxOfK(Marginal::uniform01())));
  CHECK(pdf_nonincreasing(MaxOfK(Marginal::uniform01())));
  CHECK(pdf_nonincreasing(MaxOfK(Marginal::exponential(1.0))));
  CHECK_FALSE(pdf_nondecreasing(MaxOfK(Marginal::exponential(1.0))));
  const auto grid = quantile_grid(MaxOfK(Marginal::uniform01()));
  REQUIRE(grid.size() == static_cast<std::size_t>(kGridPoints));
  CHECK(grid.front() == doctest::Approx(0.0005));
}

TEST_CASE("lopez bound") {
  CHECK(lopez_bound(2, 1) == doctest::Approx(0.5));
  CHECK(lopez_bound(5, 4) == doctest::Approx(0.4096));
  CHECK(lopez_bound(2, 1, 3.0) == doctest::Approx(1.5));
  CHECK(std::abs(lopez_bound(200, 199) - std::exp(-1.0)) <= 0.002);
  for (int n = 2; n <= 20; ++n) CHECK(lopez_bound(n, n - 1) == doctest::Approx(std::pow(1 - 1.0 / n, n - 1)));
}

TEST_CASE("lopez bound dominates gaps of unit-interval laws") {
  for (const auto& m : {Marginal::uniform01(), Marginal::linear_pdf(), Marginal::power_cdf(0.3),
                        Marginal::power_cdf(4.0), Marginal::bernoulli(0.2), Marginal::bernoulli(0.7),
                        Marginal::discrete({0.1, 0.6, 1.0}, {0.5, 0.3, 0.2})}) {
    for (int samples : {1, 2, 5}) {
      const MaxOfK law(m, samples);
      for (int n = 2; n <= 6; ++n) {
        CAPTURE(law.id());
        for (int s = 1; s < n; ++s) {
          // Gap above the s-th smallest is the top gap with k = n - s.
          CHECK(gap_expectation({law, n, n - s, GapSide::kTop}) <= lopez_bound(n, s) + 1e-7);
        }
      }
    }
  }
}
