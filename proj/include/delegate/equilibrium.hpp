#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "delegate/core.hpp"
#include "delegate/distributions.hpp"

namespace delegate {

struct EquilibriumOptions {
  /// Agents never propose solutions outside their eligible set.
  bool rationality = true;
  /// Agents never propose a solution Pareto-dominated (in (x, y)) by another
  /// of their own candidates.
  bool pareto = true;
  /// Guard on the product of per-agent strategy counts.
  std::size_t max_profiles = 10'000'000;
};

/// Utility comparisons treat gains below this (relative to max(1, |u|)) as
/// rounding noise; expected utilities under RSPM are sums of products.
inline constexpr double kUtilityTolerance = 1e-12;

/// ABSTAIN followed by the agent's admissible slots in increasing order.
std::vector<Choice> strategy_set(const RealizedInstance& inst, const MechanismSpec& spec, AgentIndex agent,
                                 const EquilibriumOptions& options = {});

struct Deviation {
  AgentIndex agent = 0;
  Choice from;
  Choice to;
  double gain = 0.0;
};

struct NashCheck {
  bool is_nash = true;
  std::optional<Deviation> deviation;

  explicit operator bool() const noexcept { return is_nash; }
};

/// True iff no agent has a strictly profitable unilateral deviation within
/// its strategy set. RSPM payoffs are expectations over the examined subset.
NashCheck verify_nash(const RealizedInstance& inst, const MechanismSpec& spec, const StrategyProfile& profile,
                      const EquilibriumOptions& options = {});

/// An MSPM (or SPM) profile that is always a pure Nash equilibrium.
///
/// The agent i* with the largest eligible first-best (ties to the
/// tie-break-preferred agent) proposes its highest-y eligible solution whose x
/// weakly beats every lower-priority rival's eligible first-best and strictly
/// beats every higher-priority rival's; y ties go to the larger x. Every other
/// agent proposes its eligible max-x solution, or abstains if it has none.
StrategyProfile constructive_equilibrium(const RealizedInstance& inst, const MechanismSpec& spec);

/// The per-realization principal floor that every equilibrium of `spec`
/// must respect, when one applies (homogeneous thresholds; budget >= 2).
std::optional<double> equilibrium_floor(const RealizedInstance& inst, const MechanismSpec& spec);

struct ProfileRecord {
  StrategyProfile profile;
  double principal_utility = 0.0;
  std::optional<double> floor;

  bool respects_floor() const;
};

struct EquilibriumReport {
  std::vector<ProfileRecord> nash_profiles;
  std::optional<ProfileRecord> constructive;
  bool constructive_verified = false;
  std::vector<ProfileRecord> violations;
  std::size_t profiles_searched = 0;

  bool has_pure_nash() const noexcept { return !nash_profiles.empty(); }
};

/// Exhaustive pure-Nash search over the product of strategy sets. Throws
/// SEARCH_TOO_LARGE when the product exceeds options.max_profiles.
EquilibriumReport enumerate_pure_nash(const RealizedInstance& inst, const MechanismSpec& spec,
                                      const EquilibriumOptions& options = {});

nlohmann::json to_json(const StrategyProfile& profile);
nlohmann::json to_json(const EquilibriumReport& report);

struct BneMonotonicityReport {
  bool strictly_decreasing = false;
  std::vector<double> grid;
  /// Agent's expected utility (win probability times unclamped y) on the grid.
  std::vector<double> utility;
  /// First grid index where monotonicity fails.
  std::optional<std::size_t> first_failure;

  explicit operator bool() const noexcept { return strictly_decreasing; }
};

/// Checks that, in the worst-case instance, an agent's expected utility from
/// proposing a solution strictly decreases in its x when the others propose
/// their minimum-x solutions, on a 1000-point quantile grid. Comparison is
/// done on log-utilities so the check still resolves near the top of the
/// support where the win probability rounds to one.
BneMonotonicityReport bne_monotonicity_check(int n, int k, const Marginal& x_marginal);

}  // namespace delegate
