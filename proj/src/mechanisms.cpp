#include "delegate/mechanisms.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "delegate/combinatorics.hpp"
#include "delegate/error.hpp"

namespace delegate {
namespace {

/// Eligible proposals ordered from the principal's most to least preferred.
std::vector<SlotRef> ranked_candidates(const RealizedInstance& inst, const MechanismSpec& spec,
                                       const StrategyProfile& profile) {
  spec.validate(inst.n());
  validate_profile(inst, spec, profile, /*rationality=*/false);
  std::vector<SlotRef> out;
  for (AgentIndex i = 0; i < inst.n(); ++i) {
    const Choice& c = profile.choices[i];
    if (c && spec.eligible(i, inst.at(i, *c))) out.push_back({i, *c});
  }
  std::sort(out.begin(), out.end(), [&](const SlotRef& a, const SlotRef& b) {
    const double xa = inst.at(a).x();
    const double xb = inst.at(b).x();
    if (xa != xb) return xa > xb;
    return spec.prefers(a.agent, b.agent);
  });
  return out;
}

}  // namespace

Outcome run_mspm(const RealizedInstance& inst, const MechanismSpec& spec, const StrategyProfile& profile) {
  const auto ranked = ranked_candidates(inst, spec, profile);
  if (ranked.empty()) return Outcome::none(inst.n());
  return Outcome::won(inst, ranked.front());
}

OutcomeDistribution run_rspm_exact(const RealizedInstance& inst, const MechanismSpec& spec,
                                   const StrategyProfile& profile) {
  const auto ranked = ranked_candidates(inst, spec, profile);
  const std::size_t m = ranked.size();
  if (m == 0) return {{Outcome::none(inst.n()), 1.0}};
  const std::size_t b = spec.budget ? static_cast<std::size_t>(*spec.budget) : m;
  if (m <= b) return {{Outcome::won(inst, ranked.front()), 1.0}};

  const double subsets = binomial(m, b);
  OutcomeDistribution out;
  for (std::size_t r = 0; r + b <= m; ++r) {
    out.push_back({Outcome::won(inst, ranked[r]), binomial(m - 1 - r, b - 1) / subsets});
  }
  return out;
}

Outcome run_spm(const RealizedInstance& inst, const MechanismSpec& spec, Choice proposal) {
  require(inst.n() == 1, fmt::format("SPM needs a single agent, got {}", inst.n()));
  require(spec.n() == 1, "SPM spec must describe one agent");
  return run_mspm(inst, spec, StrategyProfile{{proposal}});
}

OutcomeDistribution run_mechanism(const RealizedInstance& inst, const MechanismSpec& spec,
                                  const StrategyProfile& profile) {
  switch (spec.kind) {
    case MechanismKind::kSpm:
      require(profile.n() == 1, "SPM profile must have one choice");
      return {{run_spm(inst, spec, profile.choices.front()), 1.0}};
    case MechanismKind::kMspm:
      return {{run_mspm(inst, spec, profile), 1.0}};
    case MechanismKind::kRspm:
      return run_rspm_exact(inst, spec, profile);
  }
  throw_invalid("unknown mechanism kind");
}

double expected_principal_utility(const OutcomeDistribution& dist) {
  double total = 0.0;
  for (const auto& w : dist) total += w.prob * w.outcome.principal_utility;
  return total;
}

std::vector<double> expected_agent_utilities(const OutcomeDistribution& dist, std::size_t n) {
  std::vector<double> u(n, 0.0);
  for (const auto& w : dist) {
    for (std::size_t i = 0; i < n && i < w.outcome.agent_utilities.size(); ++i) {
      u[i] += w.prob * w.outcome.agent_utilities[i];
    }
  }
  return u;
}

}  // namespace delegate
