#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delegate/distributions.hpp"
#include "delegate/quadrature.hpp"

namespace delegate {

/// TOP: Delta_{k,n} = E[X_{n-k+1:n} - X_{n-k:n}], the gap below the k-th largest.
/// BOTTOM: delta_{k,n} = E[X_{k+1:n} - X_{k:n}], the gap above the k-th smallest.
enum class GapSide { kTop, kBottom };

struct GapQuery {
  MaxOfK law;
  int n = 2;
  int k = 1;
  GapSide side = GapSide::kTop;
};

/// Tolerance used for every order-statistic integral in this module.
inline constexpr QuadratureOptions kOrderStatQuadrature{1e-11, 40};

/// E[X_{r:n}], r-th smallest of n i.i.d. draws (1 <= r <= n). Continuous laws
/// integrate x times the order-statistic density over the truncated support;
/// discrete laws sum the survival function over the atoms exactly.
double order_stat_expectation(const MaxOfK& law, int r, int n);

/// The gap named by the query, integrated as a single difference of
/// order-statistic densities (or summed exactly for discrete laws).
double gap_expectation(const GapQuery& q);

/// Same gap through the spacing identity C(n, k) * integral F^{n-k} (1-F)^k
/// (TOP) or C(n, k) * integral F^k (1-F)^{n-k} (BOTTOM).
double gap_spacing_integral(const GapQuery& q);

/// C(n-1, n-k) * integral F^{n-k} (1-F)^k, which equals
/// E[X_{n-k+1:n}] - E[X_{n-k:n-1}]. Continuous laws only.
double david_split_integral(const MaxOfK& law, int n, int k);

/// Delta_{k,n} for a Bernoulli(p) law: exactly k ones among n draws.
double bernoulli_gap_by_count(double p, int n, int k);

/// Outcome of checking one of the order-statistic lemmas numerically.
struct LemmaCheck {
  std::string name;
  /// The lemma's hypothesis held on the test grid.
  bool precondition = false;
  /// The conclusion held (only meaningful when the precondition did).
  bool holds = false;
  /// Checked quantities in order (gaps per n, or values on the grid).
  std::vector<double> values;
  std::optional<std::size_t> first_failure;
  std::string detail;

  bool passed() const noexcept { return precondition && holds; }
};

inline constexpr double kGridSlack = 1e-9;
inline constexpr double kGapTolerance = 1e-7;
inline constexpr int kGridPoints = 1000;

/// Quantile-spaced grid (i + 0.5) / kGridPoints of the law.
std::vector<double> quantile_grid(const MaxOfK& law);

/// Hazard nondecreasing on the grid; discrete laws use P(X = v) / P(X >= v).
bool has_mhr(const MaxOfK& law);
/// f / F nonincreasing on the grid. Continuous laws only.
bool has_mrhr(const MaxOfK& law);
bool pdf_nondecreasing(const MaxOfK& law);
bool pdf_nonincreasing(const MaxOfK& law);

/// Delta_{k,n} >= Delta_{k,n+1} - tol for n in [n_lo, n_hi) with k <= n - 1
/// (TOP, needs MHR), or the same for delta under MRHR (BOTTOM).
LemmaCheck verify_mhr_monotonicity(const MaxOfK& law, int k, int n_lo, int n_hi, GapSide side = GapSide::kTop);

/// (n+1) gap_{k,n} <= n gap_{k,n-1} + tol for n in [n_lo, n_hi] with
/// k <= n - 2. TOP needs a nondecreasing pdf, BOTTOM a nonincreasing one.
LemmaCheck verify_scaled_monotonicity(const MaxOfK& law, int k, int n_lo, int n_hi, GapSide side = GapSide::kTop);

/// Hazard of the r-th smallest of n draws, g / (1 - G), nondecreasing on the
/// grid. Needs MHR.
LemmaCheck verify_mhr_preservation(const MaxOfK& law, int n, int r);

/// TOP: density n f F^{n-1} of the maximum is nondecreasing when f is.
/// BOTTOM: density n f (1-F)^{n-1} of the minimum is nonincreasing when f is.
LemmaCheck verify_pdf_shape_preservation(const MaxOfK& law, int n, GapSide side = GapSide::kTop);

/// L * C(n, s) (s/n)^s (1 - s/n)^(n-s): bound on E[X_{s+1:n} - X_{s:n}] for
/// laws on [0, L].
double lopez_bound(int n, int s, double L = 1.0);

}  // namespace delegate
