#include "delegate/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "delegate/error.hpp"
#include "delegate/mechanisms.hpp"
#include "delegate/parallel.hpp"

namespace delegate {
namespace {

bool dominates(const Solution& a, const Solution& b) {
  return a.x() >= b.x() && a.y() >= b.y() && (a.x() > b.x() || a.y() > b.y());
}

struct Payoffs {
  double principal;
  std::vector<double> agents;
};

Payoffs payoffs(const RealizedInstance& inst, const MechanismSpec& spec, const StrategyProfile& profile) {
  const auto dist = run_mechanism(inst, spec, profile);
  return {expected_principal_utility(dist), expected_agent_utilities(dist, inst.n())};
}

bool strictly_better(double candidate, double current) {
  return candidate - current > kUtilityTolerance * std::max(1.0, std::abs(current));
}

/// Eligible slot with the largest x; ties to larger y, then lower slot.
std::optional<std::size_t> eligible_first_best(const RealizedInstance& inst, const MechanismSpec& spec,
                                               AgentIndex agent) {
  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < inst.k(agent); ++j) {
    const Solution& s = inst.at(agent, j);
    if (!spec.eligible(agent, s)) continue;
    if (!best) {
      best = j;
      continue;
    }
    const Solution& b = inst.at(agent, *best);
    if (s.x() > b.x() || (s.x() == b.x() && s.y() > b.y())) best = j;
  }
  return best;
}

}  // namespace

std::vector<Choice> strategy_set(const RealizedInstance& inst, const MechanismSpec& spec, AgentIndex agent,
                                 const EquilibriumOptions& options) {
  std::vector<std::size_t> slots;
  for (std::size_t j = 0; j < inst.k(agent); ++j) {
    if (!options.rationality || spec.eligible(agent, inst.at(agent, j))) slots.push_back(j);
  }
  std::vector<Choice> out{kAbstain};
  for (std::size_t j : slots) {
    const bool dominated = options.pareto && std::any_of(slots.begin(), slots.end(), [&](std::size_t other) {
                             return dominates(inst.at(agent, other), inst.at(agent, j));
                           });
    if (!dominated) out.emplace_back(j);
  }
  return out;
}

NashCheck verify_nash(const RealizedInstance& inst, const MechanismSpec& spec, const StrategyProfile& profile,
                      const EquilibriumOptions& options) {
  spec.validate(inst.n());
  validate_profile(inst, spec, profile, options.rationality);
  const Payoffs base = payoffs(inst, spec, profile);
  for (AgentIndex i = 0; i < inst.n(); ++i) {
    StrategyProfile alt = profile;
    for (const Choice& c : strategy_set(inst, spec, i, options)) {
      if (c == profile.choices[i]) continue;
      alt.choices[i] = c;
      const double u = payoffs(inst, spec, alt).agents[i];
      if (strictly_better(u, base.agents[i])) {
        return {false, Deviation{i, profile.choices[i], c, u - base.agents[i]}};
      }
    }
  }
  return {true, std::nullopt};
}

StrategyProfile constructive_equilibrium(const RealizedInstance& inst, const MechanismSpec& spec) {
  spec.validate(inst.n());
  require(spec.kind != MechanismKind::kRspm, "constructive equilibrium is defined for MSPM and SPM");
  const std::size_t n = inst.n();

  std::vector<std::optional<std::size_t>> first_best(n);
  std::optional<AgentIndex> star;
  for (AgentIndex i = 0; i < n; ++i) {
    first_best[i] = eligible_first_best(inst, spec, i);
    if (!first_best[i]) continue;
    if (!star) {
      star = i;
      continue;
    }
    const double xi = inst.at(i, *first_best[i]).x();
    const double xs = inst.at(*star, *first_best[*star]).x();
    if (xi > xs || (xi == xs && spec.prefers(i, *star))) star = i;
  }

  StrategyProfile profile = StrategyProfile::all_abstain(n);
  if (!star) return profile;
  for (AgentIndex i = 0; i < n; ++i) profile.choices[i] = first_best[i];

  // Bars the winner's proposal must clear: weakly above lower-priority
  // rivals, strictly above higher-priority ones.
  double weak_bar = -1.0;
  double strict_bar = -1.0;
  for (AgentIndex j = 0; j < n; ++j) {
    if (j == *star || !first_best[j]) continue;
    const double x = inst.at(j, *first_best[j]).x();
    if (spec.prefers(j, *star)) {
      strict_bar = std::max(strict_bar, x);
    } else {
      weak_bar = std::max(weak_bar, x);
    }
  }

  std::size_t pick = *first_best[*star];
  for (std::size_t j = 0; j < inst.k(*star); ++j) {
    const Solution& s = inst.at(*star, j);
    if (!spec.eligible(*star, s) || s.x() < weak_bar || s.x() <= strict_bar) continue;
    const Solution& p = inst.at(*star, pick);
    if (s.y() > p.y() || (s.y() == p.y() && s.x() > p.x())) pick = j;
  }
  profile.choices[*star] = pick;
  return profile;
}

std::optional<double> equilibrium_floor(const RealizedInstance& inst, const MechanismSpec& spec) {
  const auto tau = spec.homogeneous_threshold();
  if (!tau) return std::nullopt;
  if (spec.kind == MechanismKind::kRspm) {
    if (spec.budget && *spec.budget < 2 && static_cast<std::size_t>(*spec.budget) < inst.n()) return std::nullopt;
    return budgeted_floor(inst, *tau, spec.budget);
  }
  return theorem41_floor(inst, *tau);
}

bool ProfileRecord::respects_floor() const {
  if (!floor) return true;
  return principal_utility >= *floor - kUtilityTolerance * std::max(1.0, std::abs(*floor));
}

EquilibriumReport enumerate_pure_nash(const RealizedInstance& inst, const MechanismSpec& spec,
                                      const EquilibriumOptions& options) {
  spec.validate(inst.n());
  const std::size_t n = inst.n();
  std::vector<std::vector<Choice>> sets;
  std::size_t total = 1;
  for (AgentIndex i = 0; i < n; ++i) {
    sets.push_back(strategy_set(inst, spec, i, options));
    total *= sets.back().size();
    if (total > options.max_profiles) {
      throw Error(ErrorCode::kSearchTooLarge,
                  fmt::format("pure-Nash search exceeds {} profiles", options.max_profiles));
    }
  }

  const std::optional<double> floor = equilibrium_floor(inst, spec);
  auto record = [&](const StrategyProfile& p) {
    return ProfileRecord{p, expected_principal_utility(run_mechanism(inst, spec, p)), floor};
  };

  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (total + kBlock - 1) / kBlock;
  std::vector<std::vector<ProfileRecord>> found(blocks);
  parallel_for_blocks(total, kBlock, [&](std::size_t b, std::size_t begin, std::size_t end) {
    StrategyProfile p = StrategyProfile::all_abstain(n);
    for (std::size_t idx = begin; idx < end; ++idx) {
      std::size_t rest = idx;
      for (AgentIndex i = 0; i < n; ++i) {
        p.choices[i] = sets[i][rest % sets[i].size()];
        rest /= sets[i].size();
      }
      if (verify_nash(inst, spec, p, options)) found[b].push_back(record(p));
    }
  });

  EquilibriumReport report;
  report.profiles_searched = total;
  for (auto& block : found) {
    for (auto& r : block) {
      if (!r.respects_floor()) report.violations.push_back(r);
      report.nash_profiles.push_back(std::move(r));
    }
  }
  if (spec.kind != MechanismKind::kRspm) {
    const StrategyProfile c = constructive_equilibrium(inst, spec);
    report.constructive = record(c);
    report.constructive_verified = verify_nash(inst, spec, c, options).is_nash;
  }
  return report;
}

nlohmann::json to_json(const StrategyProfile& profile) {
  nlohmann::json out = nlohmann::json::array();
  for (const Choice& c : profile.choices) {
    if (c) {
      out.push_back(*c);
    } else {
      out.push_back("ABSTAIN");
    }
  }
  return out;
}

namespace {

nlohmann::json to_json(const ProfileRecord& r) {
  nlohmann::json j{{"profile", to_json(r.profile)}, {"principal_utility", r.principal_utility}};
  j["floor"] = r.floor ? nlohmann::json(*r.floor) : nlohmann::json(nullptr);
  j["respects_floor"] = r.respects_floor();
  return j;
}

}  // namespace

nlohmann::json to_json(const EquilibriumReport& report) {
  nlohmann::json profiles = nlohmann::json::array();
  nlohmann::json floors = nlohmann::json::array();
  for (const auto& r : report.nash_profiles) {
    profiles.push_back(to_json(r));
    floors.push_back(r.floor ? nlohmann::json(*r.floor) : nlohmann::json(nullptr));
  }
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& r : report.violations) violations.push_back(to_json(r));
  nlohmann::json constructive = nullptr;
  if (report.constructive) {
    constructive = to_json(*report.constructive);
    constructive["verified"] = report.constructive_verified;
  }
  return {{"nash_profiles", profiles},
          {"floors", floors},
          {"constructive", constructive},
          {"violations", violations},
          {"profiles_searched", report.profiles_searched}};
}

BneMonotonicityReport bne_monotonicity_check(int n, int k, const Marginal& x_marginal) {
  require(n >= 2 && k >= 1, fmt::format("monotonicity check needs n >= 2, k >= 1, got n={}, k={}", n, k));
  require(!x_marginal.is_discrete(), "monotonicity check needs a continuous x marginal");
  constexpr int kGrid = 1000;
  BneMonotonicityReport report;
  std::vector<double> log_u;
  for (int i = 0; i < kGrid; ++i) {
    const double x = x_marginal.quantile((i + 0.5) / kGrid);
    const double F = x_marginal.cdf(x);
    // log of 1 - (1 - F)^k, kept accurate when (1 - F)^k is tiny.
    const double log_base = std::log1p(-std::exp(k * std::log1p(-F)));
    const double log_win = (n - 1) * log_base;
    const double log_y = -2.0 * (n - 1) * log_base;
    report.grid.push_back(x);
    log_u.push_back(log_win + log_y);
    report.utility.push_back(std::exp(log_win + log_y));
  }
  for (std::size_t i = 1; i < log_u.size(); ++i) {
    if (!(log_u[i] < log_u[i - 1])) {
      report.first_failure = i;
      break;
    }
  }
  report.strictly_decreasing = !report.first_failure.has_value();
  return report;
}

}  // namespace delegate
