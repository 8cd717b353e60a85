#pragma once

#include <vector>

#include "delegate/core.hpp"

namespace delegate {

struct WeightedOutcome {
  Outcome outcome;
  double prob;
};

/// Distribution over outcomes; probabilities sum to one.
using OutcomeDistribution = std::vector<WeightedOutcome>;

/// Drops proposals below each agent's threshold and adopts the survivor with
/// the largest x, breaking ties by the mechanism's priority order.
Outcome run_mspm(const RealizedInstance& inst, const MechanismSpec& spec, const StrategyProfile& profile);

/// Examines B eligible proposals chosen uniformly at random and adopts the
/// best of them. With m <= B eligible proposals this is exactly MSPM.
///
/// Probabilities are computed by ranking the m eligible proposals by the
/// principal's preference: the r-th best (0-based) wins iff it is sampled and
/// none of the r better ones is, which happens in C(m-1-r, B-1) of the
/// C(m, B) subsets. Outcomes with probability zero are omitted.
OutcomeDistribution run_rspm_exact(const RealizedInstance& inst, const MechanismSpec& spec,
                                   const StrategyProfile& profile);

/// Single-agent mechanism: accept the proposal iff x >= tau.
Outcome run_spm(const RealizedInstance& inst, const MechanismSpec& spec, Choice proposal);

/// Dispatches on spec.kind; deterministic mechanisms yield one outcome.
OutcomeDistribution run_mechanism(const RealizedInstance& inst, const MechanismSpec& spec,
                                  const StrategyProfile& profile);

double expected_principal_utility(const OutcomeDistribution& dist);
std::vector<double> expected_agent_utilities(const OutcomeDistribution& dist, std::size_t n);

}  // namespace delegate
