#include "delegate/orderstats.hpp"

#include <cmath>

#include <fmt/format.h>

#include "delegate/combinatorics.hpp"
#include "delegate/error.hpp"

namespace delegate {
namespace {

void check_gap_args(int n, int k) {
  require(n >= 2 && k >= 1 && k <= n - 1, fmt::format("gap needs 1 <= k <= n - 1, got k={}, n={}", k, n));
}

/// Ascending ranks (hi, lo) whose expected difference is the queried gap.
std::pair<int, int> gap_ranks(const GapQuery& q) {
  check_gap_args(q.n, q.k);
  if (q.side == GapSide::kTop) return {q.n - q.k + 1, q.n - q.k};
  return {q.k + 1, q.k};
}

/// Density of the r-th smallest of n draws at a point with pdf f and cdf F.
double order_stat_density(int r, int n, double f, double F) {
  const double c = n * binomial(n - 1, r - 1);
  return c * f * std::pow(F, r - 1) * std::pow(1.0 - F, n - r);
}

/// P(X_{r:n} > x) given F(x): fewer than r draws at or below x.
double order_stat_survival(int r, int n, double F) {
  double s = 0.0;
  for (int j = 0; j < r; ++j) s += binomial(n, j) * std::pow(F, j) * std::pow(1.0 - F, n - j);
  return s;
}

/// Sum over atom intervals [v_l, v_{l+1}) of the width times h(F(v_l)).
template <class H>
double step_integral(const MaxOfK& law, H h) {
  const auto atoms = law.atoms();
  double total = 0.0;
  double cum = 0.0;
  for (std::size_t l = 0; l + 1 < atoms.size(); ++l) {
    cum += atoms[l].prob;
    total += (atoms[l + 1].value - atoms[l].value) * h(std::min(cum, 1.0));
  }
  return total;
}

double cdf_power_integral(const MaxOfK& law, int a, int b) {
  auto h = [a, b](double F) { return std::pow(F, a) * std::pow(1.0 - F, b); };
  if (law.is_discrete()) return step_integral(law, h);
  const auto [lo, hi] = law.integration_range();
  return adaptive_simpson([&](double x) { return h(law.cdf(x)); }, lo, hi, kOrderStatQuadrature);
}

bool monotone(const std::vector<double>& v, bool increasing, std::optional<std::size_t>& failure) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double slack = kGridSlack * std::max(1.0, std::abs(v[i - 1]));
    const bool ok = increasing ? v[i] >= v[i - 1] - slack : v[i] <= v[i - 1] + slack;
    if (!ok) {
      failure = i;
      return false;
    }
  }
  return true;
}

bool grid_monotone(const MaxOfK& law, bool increasing, double (*value)(const MaxOfK&, double)) {
  std::vector<double> v;
  for (double x : quantile_grid(law)) v.push_back(value(law, x));
  std::optional<std::size_t> failure;
  return monotone(v, increasing, failure);
}

double gap_by(const MaxOfK& law, int n, int k, GapSide side) { return gap_expectation({law, n, k, side}); }

const char* side_name(GapSide side) { return side == GapSide::kTop ? "top" : "bottom"; }

}  // namespace

double order_stat_expectation(const MaxOfK& law, int r, int n) {
  require(n >= 1 && r >= 1 && r <= n, fmt::format("order statistic needs 1 <= r <= n, got r={}, n={}", r, n));
  if (law.is_discrete()) {
    const auto atoms = law.atoms();
    return atoms.front().value + step_integral(law, [r, n](double F) { return order_stat_survival(r, n, F); });
  }
  const auto [lo, hi] = law.integration_range();
  return adaptive_simpson(
      [&](double x) { return x * order_stat_density(r, n, law.pdf(x), law.cdf(x)); }, lo, hi,
      kOrderStatQuadrature);
}

double gap_expectation(const GapQuery& q) {
  const auto [r_hi, r_lo] = gap_ranks(q);
  if (q.law.is_discrete()) return order_stat_expectation(q.law, r_hi, q.n) - order_stat_expectation(q.law, r_lo, q.n);
  const auto [lo, hi] = q.law.integration_range();
  const int n = q.n;
  return adaptive_simpson(
      [&, r_hi = r_hi, r_lo = r_lo](double x) {
        const double f = q.law.pdf(x);
        const double F = q.law.cdf(x);
        return x * (order_stat_density(r_hi, n, f, F) - order_stat_density(r_lo, n, f, F));
      },
      lo, hi, kOrderStatQuadrature);
}

double gap_spacing_integral(const GapQuery& q) {
  check_gap_args(q.n, q.k);
  const int r = q.side == GapSide::kTop ? q.n - q.k : q.k;
  return binomial(q.n, r) * cdf_power_integral(q.law, r, q.n - r);
}

double david_split_integral(const MaxOfK& law, int n, int k) {
  check_gap_args(n, k);
  return binomial(n - 1, n - k) * cdf_power_integral(law, n - k, k);
}

double bernoulli_gap_by_count(double p, int n, int k) {
  check_gap_args(n, k);
  require(p > 0.0 && p < 1.0, fmt::format("Bernoulli parameter must be in (0, 1), got {}", p));
  return binomial(n, k) * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

std::vector<double> quantile_grid(const MaxOfK& law) {
  std::vector<double> grid;
  grid.reserve(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) grid.push_back(law.quantile((i + 0.5) / kGridPoints));
  return grid;
}

bool has_mhr(const MaxOfK& law) {
  if (law.is_discrete()) {
    const auto atoms = law.atoms();
    std::vector<double> h;
    double survival = 1.0;
    for (const Atom& a : atoms) {
      h.push_back(a.prob / survival);
      survival -= a.prob;
    }
    std::optional<std::size_t> failure;
    return monotone(h, true, failure);
  }
  return grid_monotone(law, true, [](const MaxOfK& l, double x) { return l.hazard(x); });
}

bool has_mrhr(const MaxOfK& law) {
  if (law.is_discrete()) return false;
  return grid_monotone(law, false, [](const MaxOfK& l, double x) { return l.pdf(x) / l.cdf(x); });
}

bool pdf_nondecreasing(const MaxOfK& law) {
  if (law.is_discrete()) return false;
  return grid_monotone(law, true, [](const MaxOfK& l, double x) { return l.pdf(x); });
}

bool pdf_nonincreasing(const MaxOfK& law) {
  if (law.is_discrete()) return false;
  return grid_monotone(law, false, [](const MaxOfK& l, double x) { return l.pdf(x); });
}

LemmaCheck verify_mhr_monotonicity(const MaxOfK& law, int k, int n_lo, int n_hi, GapSide side) {
  LemmaCheck out;
  out.name = fmt::format("gap_nonincreasing_{}", side_name(side));
  out.precondition = side == GapSide::kTop ? has_mhr(law) : has_mrhr(law);
  const int start = std::max(n_lo, k + 1);
  require(start < n_hi, fmt::format("empty n range [{}, {}] for k={}", n_lo, n_hi, k));
  for (int n = start; n <= n_hi; ++n) out.values.push_back(gap_by(law, n, k, side));
  out.holds = true;
  for (std::size_t i = 1; i < out.values.size(); ++i) {
    if (out.values[i - 1] < out.values[i] - kGapTolerance) {
      out.holds = false;
      out.first_failure = i;
      out.detail = fmt::format("gap(k={}, n={}) = {:.12g} < gap(k={}, n={}) = {:.12g}", k, start + i - 1,
                               out.values[i - 1], k, start + i, out.values[i]);
      break;
    }
  }
  return out;
}

LemmaCheck verify_scaled_monotonicity(const MaxOfK& law, int k, int n_lo, int n_hi, GapSide side) {
  LemmaCheck out;
  out.name = fmt::format("scaled_gap_{}", side_name(side));
  out.precondition = side == GapSide::kTop ? pdf_nondecreasing(law) : pdf_nonincreasing(law);
  const int start = std::max(n_lo, k + 2);
  require(start <= n_hi, fmt::format("empty n range [{}, {}] for k={}", n_lo, n_hi, k));
  double prev = gap_by(law, start - 1, k, side);
  out.holds = true;
  for (int n = start; n <= n_hi; ++n) {
    const double cur = gap_by(law, n, k, side);
    out.values.push_back(cur);
    if (out.holds && (n + 1) * cur > n * prev + kGapTolerance) {
      out.holds = false;
      out.first_failure = out.values.size() - 1;
      out.detail = fmt::format("(n+1) gap = {:.12g} > n gap' = {:.12g} at n={}", (n + 1) * cur, n * prev, n);
    }
    prev = cur;
  }
  return out;
}

LemmaCheck verify_mhr_preservation(const MaxOfK& law, int n, int r) {
  require(n >= 1 && r >= 1 && r <= n, fmt::format("order statistic needs 1 <= r <= n, got r={}, n={}", r, n));
  LemmaCheck out;
  out.name = "order_stat_mhr";
  out.precondition = !law.is_discrete() && has_mhr(law);
  if (law.is_discrete()) {
    out.detail = "continuous laws only";
    return out;
  }
  for (double x : quantile_grid(law)) {
    const double F = law.cdf(x);
    out.values.push_back(order_stat_density(r, n, law.pdf(x), F) / order_stat_survival(r, n, F));
  }
  out.holds = monotone(out.values, true, out.first_failure);
  return out;
}

LemmaCheck verify_pdf_shape_preservation(const MaxOfK& law, int n, GapSide side) {
  require(n >= 1, fmt::format("sample count must be positive, got {}", n));
  LemmaCheck out;
  const bool top = side == GapSide::kTop;
  out.name = top ? "max_pdf_nondecreasing" : "min_pdf_nonincreasing";
  out.precondition = top ? pdf_nondecreasing(law) : pdf_nonincreasing(law);
  if (law.is_discrete()) {
    out.detail = "continuous laws only";
    return out;
  }
  for (double x : quantile_grid(law)) {
    const double f = law.pdf(x);
    const double F = law.cdf(x);
    out.values.push_back(top ? n * f * std::pow(F, n - 1) : n * f * std::pow(1.0 - F, n - 1));
  }
  out.holds = monotone(out.values, top, out.first_failure);
  return out;
}

double lopez_bound(int n, int s, double L) {
  require(n >= 2 && s >= 1 && s <= n - 1, fmt::format("lopez bound needs 1 <= s <= n - 1, got s={}, n={}", s, n));
  require(L > 0.0, fmt::format("scale must be positive, got {}", L));
  const double q = static_cast<double>(s) / n;
  return L * binomial(n, s) * std::pow(q, s) * std::pow(1.0 - q, n - s);
}

}  // namespace delegate
