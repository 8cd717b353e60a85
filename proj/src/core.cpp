#include "delegate/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "delegate/error.hpp"

namespace delegate {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kHazardAtSupportEnd: return "HAZARD_AT_SUPPORT_END";
    case ErrorCode::kQuadratureNonconvergent: return "QUADRATURE_NONCONVERGENT";
    case ErrorCode::kSearchTooLarge: return "SEARCH_TOO_LARGE";
    case ErrorCode::kParse: return "PARSE";
  }
  return "UNKNOWN";
}

void throw_invalid(const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); }

Solution::Solution(double x, double y) : x_(x), y_(y) {
  if (!(x > 0.0) || !std::isfinite(x) || !(y > 0.0) || !std::isfinite(y)) {
    throw_invalid(fmt::format("solution utilities must be finite and positive, got ({}, {})", x, y));
  }
}

RealizedInstance::RealizedInstance(std::vector<std::vector<Solution>> solutions)
    : solutions_(std::move(solutions)) {
  require(!solutions_.empty(), "instance needs at least one agent");
  for (std::size_t i = 0; i < solutions_.size(); ++i) {
    require(!solutions_[i].empty(), fmt::format("agent {} has no solutions", i));
  }
}

double RealizedInstance::first_best(AgentIndex agent) const {
  const auto& s = solutions_.at(agent);
  return std::max_element(s.begin(), s.end(), [](const Solution& a, const Solution& b) {
           return a.x() < b.x();
         })->x();
}

namespace {

std::vector<AgentIndex> identity_order(std::size_t n) {
  std::vector<AgentIndex> order(n);
  std::iota(order.begin(), order.end(), AgentIndex{0});
  return order;
}

}  // namespace

MechanismSpec MechanismSpec::spm(double tau) {
  return MechanismSpec{MechanismKind::kSpm, {tau}, {0}, std::nullopt};
}

MechanismSpec MechanismSpec::mspm(std::size_t n, double tau, std::vector<AgentIndex> priority) {
  if (priority.empty()) priority = identity_order(n);
  MechanismSpec spec{MechanismKind::kMspm, std::vector<double>(n, tau), std::move(priority), std::nullopt};
  spec.validate(n);
  return spec;
}

MechanismSpec MechanismSpec::rspm(std::size_t n, double tau, int budget,
                                  std::vector<AgentIndex> priority) {
  if (priority.empty()) priority = identity_order(n);
  MechanismSpec spec{MechanismKind::kRspm, std::vector<double>(n, tau), std::move(priority), budget};
  spec.validate(n);
  return spec;
}

std::size_t MechanismSpec::rank(AgentIndex agent) const {
  auto it = std::find(priority.begin(), priority.end(), agent);
  require(it != priority.end(), fmt::format("agent {} missing from tie-break order", agent));
  return static_cast<std::size_t>(it - priority.begin());
}

std::optional<double> MechanismSpec::homogeneous_threshold() const {
  if (thresholds.empty()) return std::nullopt;
  for (double t : thresholds) {
    if (t != thresholds.front()) return std::nullopt;
  }
  return thresholds.front();
}

void MechanismSpec::validate(std::size_t n) const {
  require(thresholds.size() == n,
          fmt::format("mechanism has {} thresholds for {} agents", thresholds.size(), n));
  for (double t : thresholds) {
    require(t >= 0.0 && std::isfinite(t), fmt::format("threshold must be finite and >= 0, got {}", t));
  }
  require(priority.size() == n, "tie-break order must list every agent exactly once");
  std::vector<bool> seen(n, false);
  for (AgentIndex a : priority) {
    require(a < n && !seen[a], "tie-break order must be a permutation of the agents");
    seen[a] = true;
  }
  if (kind == MechanismKind::kSpm) require(n == 1, "SPM is a single-agent mechanism");
  if (kind == MechanismKind::kRspm) require(budget.has_value(), "RSPM requires a finite budget");
  if (budget) require(*budget >= 1, fmt::format("budget must be >= 1, got {}", *budget));
}

void validate_profile(const RealizedInstance& inst, const MechanismSpec& spec,
                      const StrategyProfile& profile, bool rationality) {
  require(profile.n() == inst.n(),
          fmt::format("profile has {} choices for {} agents", profile.n(), inst.n()));
  for (AgentIndex i = 0; i < inst.n(); ++i) {
    const Choice& c = profile.choices[i];
    if (!c) continue;
    require(*c < inst.k(i), fmt::format("agent {} proposes slot {} of {}", i, *c, inst.k(i)));
    if (rationality) {
      require(spec.eligible(i, inst.at(i, *c)),
              fmt::format("agent {} proposes ineligible slot {} under rationality", i, *c));
    }
  }
}

Outcome Outcome::won(const RealizedInstance& inst, SlotRef winner) {
  Outcome out = none(inst.n());
  const Solution& s = inst.at(winner);
  out.winner = winner;
  out.principal_utility = s.x();
  out.agent_utilities[winner.agent] = s.y();
  return out;
}

OrderStatistics order_statistics_of_instance(const RealizedInstance& inst) {
  OrderStatistics stats;
  stats.per_agent.reserve(inst.n());
  for (AgentIndex i = 0; i < inst.n(); ++i) {
    std::vector<double> xs;
    xs.reserve(inst.k(i));
    for (const Solution& s : inst.solutions(i)) xs.push_back(s.x());
    std::sort(xs.begin(), xs.end(), std::greater<>());
    stats.per_agent.push_back(std::move(xs));
  }
  stats.owners = identity_order(inst.n());
  std::stable_sort(stats.owners.begin(), stats.owners.end(), [&](AgentIndex a, AgentIndex b) {
    return stats.per_agent[a].front() > stats.per_agent[b].front();
  });
  stats.first_bests.reserve(inst.n());
  for (AgentIndex a : stats.owners) stats.first_bests.push_back(stats.per_agent[a].front());
  return stats;
}

double theorem41_floor(std::span<const double> x, double tau) {
  require(!x.empty(), "floor needs at least one first-best value");
  if (x.size() >= 2 && x[1] >= tau) return x[1];
  if (x[0] >= tau) return tau;
  return 0.0;
}

double theorem41_floor(const RealizedInstance& inst, double tau) {
  return theorem41_floor(order_statistics_of_instance(inst).first_bests, tau);
}

double budgeted_floor(std::span<const double> x, double tau, std::optional<int> budget) {
  if (!budget || static_cast<std::size_t>(*budget) >= x.size()) return theorem41_floor(x, tau);
  require(*budget >= 2, fmt::format("budgeted floor requires B >= 2, got {}", *budget));
  const auto e = static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [tau](double v) { return v >= tau; }));
  const auto b = static_cast<std::size_t>(*budget);
  if (e <= b) return theorem41_floor(x, tau);
  // X_(e-B+2) in 1-based order statistics.
  return x[e - b + 1];
}

double budgeted_floor(const RealizedInstance& inst, double tau, std::optional<int> budget) {
  return budgeted_floor(order_statistics_of_instance(inst).first_bests, tau, budget);
}

}  // namespace delegate
