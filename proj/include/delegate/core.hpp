#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace delegate {

using AgentIndex = std::size_t;

/// A sampled solution: strictly positive utilities for the principal (x)
/// and for the agent who found it (y). The null outcome is never a Solution.
class Solution {
 public:
  Solution(double x, double y);

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }

  friend bool operator==(const Solution&, const Solution&) = default;

 private:
  double x_;
  double y_;
};

/// Position of a solution inside a realized instance.
struct SlotRef {
  AgentIndex agent = 0;
  std::size_t slot = 0;

  friend bool operator==(const SlotRef&, const SlotRef&) = default;
};

/// Every agent's observed solution multiset. Indices (agent, slot) are stable.
class RealizedInstance {
 public:
  explicit RealizedInstance(std::vector<std::vector<Solution>> solutions);

  std::size_t n() const noexcept { return solutions_.size(); }
  std::size_t k(AgentIndex agent) const { return solutions_.at(agent).size(); }
  std::span<const Solution> solutions(AgentIndex agent) const { return solutions_.at(agent); }
  const Solution& at(AgentIndex agent, std::size_t slot) const {
    return solutions_.at(agent).at(slot);
  }
  const Solution& at(SlotRef ref) const { return at(ref.agent, ref.slot); }

  /// Largest x observed by the agent, X_{i,(1)}.
  double first_best(AgentIndex agent) const;

 private:
  std::vector<std::vector<Solution>> solutions_;
};

enum class MechanismKind { kSpm, kMspm, kRspm };

/// Threshold-form eligible sets R_i = {x >= tau_i}, deterministic tie-break
/// order, and examination budget.
///
/// `priority` lists agents from most to least preferred by the tie-break rule
/// and must be a permutation of [0, n). A missing budget means unlimited.
struct MechanismSpec {
  MechanismKind kind = MechanismKind::kMspm;
  std::vector<double> thresholds;
  std::vector<AgentIndex> priority;
  std::optional<int> budget;

  static MechanismSpec spm(double tau);
  static MechanismSpec mspm(std::size_t n, double tau, std::vector<AgentIndex> priority = {});
  static MechanismSpec rspm(std::size_t n, double tau, int budget,
                            std::vector<AgentIndex> priority = {});

  std::size_t n() const noexcept { return thresholds.size(); }
  double threshold(AgentIndex agent) const { return thresholds.at(agent); }
  bool eligible(AgentIndex agent, const Solution& s) const { return s.x() >= threshold(agent); }

  /// Rank of `agent` under the tie-break order; lower is preferred.
  std::size_t rank(AgentIndex agent) const;
  bool prefers(AgentIndex a, AgentIndex b) const { return rank(a) < rank(b); }

  /// The common threshold when all agents share one, otherwise nullopt.
  std::optional<double> homogeneous_threshold() const;

  /// Throws unless the spec is well formed for an instance with n agents.
  void validate(std::size_t n) const;
};

/// One proposal per agent: a slot index, or abstain.
using Choice = std::optional<std::size_t>;
inline constexpr Choice kAbstain = std::nullopt;

struct StrategyProfile {
  std::vector<Choice> choices;

  std::size_t n() const noexcept { return choices.size(); }
  static StrategyProfile all_abstain(std::size_t n) { return {std::vector<Choice>(n, kAbstain)}; }

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
};

/// Throws if a choice is out of range or, when `rationality` is set, proposes
/// a solution outside the agent's eligible set.
void validate_profile(const RealizedInstance& inst, const MechanismSpec& spec,
                      const StrategyProfile& profile, bool rationality);

struct Outcome {
  std::optional<SlotRef> winner;
  double principal_utility = 0.0;
  std::vector<double> agent_utilities;

  static Outcome none(std::size_t n) { return {std::nullopt, 0.0, std::vector<double>(n, 0.0)}; }
  static Outcome won(const RealizedInstance& inst, SlotRef winner);
};

struct OrderStatistics {
  /// Per agent, its x-values sorted in decreasing order: X_{i,(1..k_i)}.
  std::vector<std::vector<double>> per_agent;
  /// First-best values across agents in decreasing order: X_(1..n).
  std::vector<double> first_bests;
  /// Owner of each entry of `first_bests`; equal values keep agent order.
  std::vector<AgentIndex> owners;
};

OrderStatistics order_statistics_of_instance(const RealizedInstance& inst);

/// Per-realization principal floor of MSPM with homogeneous threshold tau
/// under any equilibrium: X_(2) if X_(2) >= tau, tau if X_(1) >= tau > X_(2),
/// else 0. With a single agent X_(2) is taken as -infinity.
double theorem41_floor(std::span<const double> first_bests_desc, double tau);
double theorem41_floor(const RealizedInstance& inst, double tau);

/// Per-realization floor of RSPM with budget B >= 2. With e agents holding an
/// eligible solution, returns the unlimited-budget floor when e <= B and
/// X_(e-B+2) otherwise. A missing budget is unlimited.
double budgeted_floor(std::span<const double> first_bests_desc, double tau, std::optional<int> budget);
double budgeted_floor(const RealizedInstance& inst, double tau, std::optional<int> budget);

}  // namespace delegate
