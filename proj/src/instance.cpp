#include "delegate/instance.hpp"

#include <fstream>

#include <fmt/format.h>

#include "delegate/error.hpp"

namespace delegate {

AgentSpec AgentSpec::iid(const JointDistribution& dist, int k) {
  require(k >= 1, fmt::format("agent needs k >= 1, got {}", k));
  return AgentSpec{std::vector<JointDistribution>(static_cast<std::size_t>(k), dist)};
}

AgentSpec AgentSpec::fixed(const std::vector<Solution>& solutions) {
  require(!solutions.empty(), "fixed agent needs at least one solution");
  AgentSpec a;
  for (const Solution& s : solutions) a.slots.push_back(JointDistribution::point(s.x(), s.y()));
  return a;
}

InstanceSpec InstanceSpec::symmetric(std::size_t n, int k, const JointDistribution& dist) {
  InstanceSpec spec;
  spec.agents.assign(n, AgentSpec::iid(dist, k));
  spec.validate();
  return spec;
}

void InstanceSpec::validate() const {
  require(!agents.empty(), "instance needs at least one agent");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    require(agents[i].k() >= 1, fmt::format("agent {} has k = 0", i));
  }
}

RealizedInstance InstanceSpec::realize(RngStream& rng) const {
  std::vector<std::vector<Solution>> sols;
  sols.reserve(agents.size());
  for (const AgentSpec& a : agents) {
    std::vector<Solution> row;
    row.reserve(a.k());
    for (const JointDistribution& d : a.slots) row.push_back(d.sample(rng));
    sols.push_back(std::move(row));
  }
  return RealizedInstance(std::move(sols));
}

std::vector<std::pair<RealizedInstance, double>> InstanceSpec::enumerate_realizations(std::size_t limit) const {
  using Support = std::vector<std::pair<Solution, double>>;
  std::vector<Support> supports;
  std::vector<std::size_t> shape;
  std::size_t total = 1;
  for (const AgentSpec& a : agents) {
    for (const JointDistribution& d : a.slots) {
      auto s = d.finite_support();
      require(s.has_value(), fmt::format("slot distribution {} is not finitely supported", d.id()));
      total *= s->size();
      require(total <= limit, fmt::format("more than {} realizations", limit));
      shape.push_back(s->size());
      supports.push_back(std::move(*s));
    }
  }

  std::vector<std::pair<RealizedInstance, double>> out;
  out.reserve(total);
  std::vector<std::size_t> digit(shape.size(), 0);
  for (std::size_t count = 0; count < total; ++count) {
    std::vector<std::vector<Solution>> sols;
    double prob = 1.0;
    std::size_t flat = 0;
    for (const AgentSpec& a : agents) {
      std::vector<Solution> row;
      for (std::size_t j = 0; j < a.k(); ++j, ++flat) {
        const auto& [sol, p] = supports[flat][digit[flat]];
        row.push_back(sol);
        prob *= p;
      }
      sols.push_back(std::move(row));
    }
    out.emplace_back(RealizedInstance(std::move(sols)), prob);
    for (std::size_t d = 0; d < digit.size(); ++d) {
      if (++digit[d] < shape[d]) break;
      digit[d] = 0;
    }
  }
  return out;
}

InstanceSpec instance_from_json(const nlohmann::json& j) {
  try {
    InstanceSpec spec;
    const auto& agents = j.at("agents");
    if (!agents.is_array()) throw Error(ErrorCode::kParse, "\"agents\" must be an array");
    for (const auto& a : agents) {
      const int k = a.at("k").get<int>();
      const auto& dist = a.at("dist");
      if (dist.is_string()) {
        spec.agents.push_back(AgentSpec::iid(parse_joint(dist.get<std::string>()), k));
      } else if (dist.is_array()) {
        std::vector<Solution> sols;
        for (const auto& pair : dist) {
          if (!pair.is_array() || pair.size() != 2) throw Error(ErrorCode::kParse, "explicit solutions are [x, y] pairs");
          sols.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
        if (static_cast<int>(sols.size()) != k) {
          throw Error(ErrorCode::kParse, fmt::format("agent lists {} solutions but k = {}", sols.size(), k));
        }
        spec.agents.push_back(AgentSpec::fixed(sols));
      } else {
        throw Error(ErrorCode::kParse, "\"dist\" must be a distribution id or a list of [x, y] pairs");
      }
    }
    const int n = j.at("n").get<int>();
    if (n != static_cast<int>(spec.agents.size())) {
      throw Error(ErrorCode::kParse, fmt::format("\"n\" is {} but {} agents are listed", n, spec.agents.size()));
    }
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("instance JSON: {}", e.what()));
  }
}

nlohmann::json instance_to_json(const InstanceSpec& spec) {
  nlohmann::json agents = nlohmann::json::array();
  for (const AgentSpec& a : spec.agents) {
    bool all_points = true;
    bool shared = true;
    for (const JointDistribution& d : a.slots) {
      const auto s = d.finite_support();
      all_points = all_points && s && s->size() == 1;
      shared = shared && d.id() == a.slots.front().id();
    }
    nlohmann::json entry{{"k", a.k()}};
    if (all_points) {
      nlohmann::json sols = nlohmann::json::array();
      for (const JointDistribution& d : a.slots) {
        const auto s = d.finite_support();
        sols.push_back({s->front().first.x(), s->front().first.y()});
      }
      entry["dist"] = sols;
    } else if (shared) {
      entry["dist"] = a.slots.front().id();
    } else {
      throw_invalid("agents with per-slot distributions cannot be written as instance JSON");
    }
    agents.push_back(entry);
  }
  return {{"n", spec.n()}, {"agents", agents}};
}

nlohmann::json realized_to_json(const RealizedInstance& inst) {
  nlohmann::json agents = nlohmann::json::array();
  for (AgentIndex i = 0; i < inst.n(); ++i) {
    nlohmann::json sols = nlohmann::json::array();
    for (const Solution& s : inst.solutions(i)) sols.push_back({s.x(), s.y()});
    agents.push_back({{"k", inst.k(i)}, {"dist", sols}});
  }
  return {{"n", inst.n()}, {"agents", agents}};
}

InstanceSpec load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, fmt::format("cannot open instance file '{}'", path));
  try {
    return instance_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("'{}': {}", path, e.what()));
  }
}

}  // namespace delegate
