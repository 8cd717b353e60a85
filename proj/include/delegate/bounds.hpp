#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "delegate/distributions.hpp"
#include "delegate/instance.hpp"

namespace delegate {

struct BmThreshold {
  /// r = (1 / (m + 1))^(1 / m) with m = alpha * n * k.
  double r = 0.0;
  /// Additive utility floor r - r^(m + 1).
  double guarantee = 0.0;
  /// The same floor rewritten as r * m / (m + 1).
  double guarantee_factored = 0.0;
  /// (m / (m + 1))^(1 / m); kept only to report how far it is from the floor.
  double ratio_form = 0.0;
};

BmThreshold bm_threshold(double alpha, int n, int k);

/// L (1 - 1/n)^(n-1).
double pim_bound_symmetric(int n, double L = 1.0);
/// sqrt(4k / (3 (k+1)^2 (k+2))), i.e. sqrt(4/3 Var) for the max of k uniforms.
double pim_bound_mhr(int k);
/// (1 / (n+1)) sqrt(12k / ((k+1)^2 (k+2))).
double pim_bound_incpdf(int n, int k);
/// (k-1)/(k+1) - sqrt(ln n / (2k + 3)); may be negative (vacuous), never clamped.
double incomplete_info_lower_bound(int n, int k);
/// 1/(k+1) + sqrt(ln n / (2k + 3)): ceiling on E[max_i X_{i,(k)}] for uniforms.
double worstcase_min_ceiling(int n, int k);
/// 1 - exp(-n^2 / (2 (n-1)^2)).
double approx_bne_epsilon(int n);
/// exp(n^2 / (2 (n-1)^2)).
double bce_ratio(int n);

/// alpha = eps / (3 - eps).
double super_agent_alpha(double eps);

enum class NamedInstanceKind { kSuperAgentBm, kSuperAgentPim, kBernoulliTight, kWorstcaseBne };

struct NamedInstance {
  NamedInstanceKind kind = NamedInstanceKind::kSuperAgentBm;
  double alpha = 0.0;
  double L = 1.0;
  double eps = 0.0;
  int n = 2;
  int k = 1;

  static NamedInstance super_agent_bm(double alpha) { return {NamedInstanceKind::kSuperAgentBm, alpha}; }
  static NamedInstance super_agent_pim(double L, double eps) {
    return {NamedInstanceKind::kSuperAgentPim, 0.0, L, eps};
  }
  static NamedInstance bernoulli_tight(int n, int k) {
    return {NamedInstanceKind::kBernoulliTight, 0.0, 1.0, 0.0, n, k};
  }
  static NamedInstance worstcase_bne(int n, int k) {
    return {NamedInstanceKind::kWorstcaseBne, 0.0, 1.0, 0.0, n, k};
  }

  std::string id() const;
};

struct MaterializedInstance {
  /// Absent for BERNOULLI_TIGHT: its zero-valued draws are not valid solutions.
  std::optional<InstanceSpec> spec;
  /// Per-sample x law when the instance is symmetric.
  std::optional<Marginal> x_marginal;
  int k = 1;
  /// Closed-form values quoted by the construction, in a fixed order.
  std::vector<std::pair<std::string, double>> expected;

  double value(const std::string& name) const;
};

MaterializedInstance materialize(const NamedInstance& named);

}  // namespace delegate
