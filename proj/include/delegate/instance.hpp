#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "delegate/core.hpp"
#include "delegate/distributions.hpp"
#include "delegate/rng.hpp"

namespace delegate {

/// One agent's sampling plan: slot j draws from slots[j], so k_i = slots.size().
struct AgentSpec {
  std::vector<JointDistribution> slots;

  static AgentSpec iid(const JointDistribution& dist, int k);
  static AgentSpec fixed(const std::vector<Solution>& solutions);

  std::size_t k() const noexcept { return slots.size(); }
};

struct InstanceSpec {
  std::vector<AgentSpec> agents;

  std::size_t n() const noexcept { return agents.size(); }
  static InstanceSpec symmetric(std::size_t n, int k, const JointDistribution& dist);

  void validate() const;

  /// Draws every slot in agent-major order from one stream.
  RealizedInstance realize(RngStream& rng) const;

  /// Every realization with its probability when all slots have finite
  /// support; throws otherwise or when there are more than `limit`.
  std::vector<std::pair<RealizedInstance, double>> enumerate_realizations(std::size_t limit = 1'000'000) const;
};

/// Instance JSON: {"n": int, "agents": [{"k": int, "dist": <id or [[x,y],...]>}]}.
/// An explicit solution list fixes the agent's realized multiset.
InstanceSpec instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const InstanceSpec& spec);
nlohmann::json realized_to_json(const RealizedInstance& inst);

InstanceSpec load_instance_file(const std::string& path);

}  // namespace delegate
