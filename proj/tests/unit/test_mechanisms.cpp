#include <doctest.h>

#include <map>
#include <numeric>

#include "delegate/error.hpp"
#include "delegate/mechanisms.hpp"
#include "support.hpp"

using namespace delegate;
using test_support::from_x;
using test_support::make_instance;

namespace {

double prob_of_winner(const OutcomeDistribution& d, AgentIndex agent) {
  double p = 0.0;
  for (const auto& w : d)
    if (w.outcome.winner && w.outcome.winner->agent == agent) p += w.prob;
  return p;
}

/// Brute force over every B-subset of the eligible proposals.
std::map<std::size_t, double> rspm_by_subsets(const RealizedInstance& inst, const MechanismSpec& spec,
                                              const StrategyProfile& profile) {
  std::vector<AgentIndex> eligible;
  for (AgentIndex i = 0; i < inst.n(); ++i)
    if (profile.choices[i] && spec.eligible(i, inst.at(i, *profile.choices[i]))) eligible.push_back(i);
  const std::size_t m = eligible.size();
  const std::size_t b = std::min<std::size_t>(m, static_cast<std::size_t>(*spec.budget));
  std::map<std::size_t, double> out;
  std::size_t subsets = 0;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != b) continue;
    ++subsets;
    std::optional<AgentIndex> best;
    for (std::size_t j = 0; j < m; ++j) {
      if (!(mask >> j & 1u)) continue;
      const AgentIndex a = eligible[j];
      if (!best) {
        best = a;
        continue;
      }
      const double xa = inst.at(a, *profile.choices[a]).x();
      const double xb = inst.at(*best, *profile.choices[*best]).x();
      if (xa > xb || (xa == xb && spec.prefers(a, *best))) best = a;
    }
    if (best) out[*best] += 1.0;
  }
  for (auto& [a, c] : out) c /= static_cast<double>(subsets);
  return out;
}

}  // namespace

TEST_CASE("MSPM picks the best eligible proposal") {
  const auto inst = from_x({{0.4}, {0.6}});
  const StrategyProfile both{{0, 0}};
  SUBCASE("no threshold") {
    const auto o = run_mspm(inst, MechanismSpec::mspm(2, 0.0), both);
    REQUIRE(o.winner);
    CHECK(o.winner->agent == 1);
    CHECK(o.principal_utility == 0.6);
    CHECK(o.agent_utilities == std::vector<double>{0.0, 1.0});
  }
  SUBCASE("threshold above every proposal") {
    const auto o = run_mspm(inst, MechanismSpec::mspm(2, 0.7), both);
    CHECK_FALSE(o.winner);
    CHECK(o.principal_utility == 0.0);
  }
  SUBCASE("ties follow the priority order") {
    const auto tie = from_x({{0.6}, {0.6}});
    CHECK(run_mspm(tie, MechanismSpec::mspm(2, 0.0, {1, 0}), both).winner->agent == 1);
    CHECK(run_mspm(tie, MechanismSpec::mspm(2, 0.0), both).winner->agent == 0);
  }
  SUBCASE("abstaining agents are ignored") {
    const auto o = run_mspm(inst, MechanismSpec::mspm(2, 0.0), {{0, kAbstain}});
    CHECK(o.winner->agent == 0);
  }
}

TEST_CASE("RSPM exact probabilities") {
  SUBCASE("three proposals, budget two") {
    const auto inst = from_x({{0.9}, {0.5}, {0.1}});
    const auto d = run_rspm_exact(inst, MechanismSpec::rspm(3, 0.0, 2), {{0, 0, 0}});
    CHECK(prob_of_winner(d, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(prob_of_winner(d, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(prob_of_winner(d, 2) == 0.0);
    CHECK(d.size() == 2);
  }
  SUBCASE("four proposals, budget two") {
    const auto inst = from_x({{0.9}, {0.7}, {0.5}, {0.3}});
    const auto d = run_rspm_exact(inst, MechanismSpec::rspm(4, 0.0, 2), {{0, 0, 0, 0}});
    CHECK(prob_of_winner(d, 0) == doctest::Approx(0.5));
    CHECK(prob_of_winner(d, 1) == doctest::Approx(2.0 / 6.0));
    CHECK(prob_of_winner(d, 2) == doctest::Approx(1.0 / 6.0));
    CHECK(prob_of_winner(d, 3) == 0.0);
    CHECK(expected_principal_utility(d) == doctest::Approx(0.9 / 2 + 0.7 / 3 + 0.5 / 6));
  }
  SUBCASE("budget covering every proposal equals MSPM") {
    const auto inst = from_x({{0.9}, {0.5}});
    const auto d = run_rspm_exact(inst, MechanismSpec::rspm(2, 0.0, 2), {{0, 0}});
    REQUIRE(d.size() == 1);
    CHECK(d[0].prob == 1.0);
    CHECK(d[0].outcome.winner->agent == 0);
  }
}

TEST_CASE("RSPM matches subset enumeration on random instances") {
  RngStream rng(SeedPath{3, "rspm-oracle", 0});
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng() % 6;
    const auto inst = test_support::grid_instance(rng, n, 2);
    const int budget = 1 + static_cast<int>(rng() % 4);
    std::vector<AgentIndex> prio(n);
    std::iota(prio.begin(), prio.end(), 0);
    std::shuffle(prio.begin(), prio.end(), rng);
    const double tau = 0.1 * static_cast<double>(rng() % 8);
    const auto spec = MechanismSpec::rspm(n, tau, budget, prio);
    StrategyProfile profile;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = rng() % 3;
      profile.choices.push_back(r == 2 ? kAbstain : Choice(r));
    }
    CAPTURE(t);
    const auto d = run_rspm_exact(inst, spec, profile);
    double total = 0.0;
    for (const auto& w : d) {
      total += w.prob;
      if (w.outcome.winner) {
        const auto& s = inst.at(*w.outcome.winner);
        CHECK(spec.eligible(w.outcome.winner->agent, s));
        CHECK(profile.choices[w.outcome.winner->agent] == w.outcome.winner->slot);
        CHECK(w.outcome.principal_utility == s.x());
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    const auto oracle = rspm_by_subsets(inst, spec, profile);
    for (AgentIndex i = 0; i < n; ++i) {
      const double want = oracle.count(i) ? oracle.at(i) : 0.0;
      CHECK(prob_of_winner(d, i) == doctest::Approx(want).epsilon(1e-12));
    }

    // Unlimited examination collapses to MSPM.
    const auto big = MechanismSpec::rspm(n, tau, static_cast<int>(n), prio);
    const auto collapsed = run_rspm_exact(inst, big, profile);
    REQUIRE(collapsed.size() == 1);
    auto mspm = big;
    mspm.kind = MechanismKind::kMspm;
    mspm.budget.reset();
    const auto direct = run_mspm(inst, mspm, profile);
    CHECK(collapsed[0].outcome.winner == direct.winner);
    CHECK(collapsed[0].outcome.principal_utility == direct.principal_utility);
  }
}

TEST_CASE("MSPM is invariant under consistent relabeling") {
  RngStream rng(SeedPath{4, "mspm-perm", 0});
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng() % 4;
    const auto inst = test_support::grid_instance(rng, n, 2);
    std::vector<AgentIndex> prio(n), perm(n);
    std::iota(prio.begin(), prio.end(), 0);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(prio.begin(), prio.end(), rng);
    std::shuffle(perm.begin(), perm.end(), rng);
    StrategyProfile profile;
    for (std::size_t i = 0; i < n; ++i) profile.choices.push_back(Choice(rng() % 2));
    const double tau = 0.1 * static_cast<double>(rng() % 8);

    // New agent j is old agent perm[j].
    std::vector<std::vector<Solution>> sols;
    StrategyProfile moved;
    std::vector<AgentIndex> inverse(n);
    for (std::size_t j = 0; j < n; ++j) {
      sols.emplace_back(inst.solutions(perm[j]).begin(), inst.solutions(perm[j]).end());
      moved.choices.push_back(profile.choices[perm[j]]);
      inverse[perm[j]] = j;
    }
    std::vector<AgentIndex> moved_prio;
    for (AgentIndex a : prio) moved_prio.push_back(inverse[a]);
    const RealizedInstance relabeled(std::move(sols));

    const auto a = run_mspm(inst, MechanismSpec::mspm(n, tau, prio), profile);
    const auto b = run_mspm(relabeled, MechanismSpec::mspm(n, tau, moved_prio), moved);
    CHECK(a.principal_utility == b.principal_utility);
    CHECK(bool(a.winner) == bool(b.winner));
    if (a.winner) CHECK(inverse[a.winner->agent] == b.winner->agent);
  }
}

TEST_CASE("SPM accepts above the threshold") {
  const auto spec = MechanismSpec::spm(0.5);
  CHECK(run_spm(from_x({{0.8}}), spec, 0).principal_utility == 0.8);
  CHECK_FALSE(run_spm(from_x({{0.4}}), spec, 0).winner);
  CHECK_FALSE(run_spm(from_x({{0.8}}), spec, kAbstain).winner);
  CHECK_THROWS_AS(run_spm(from_x({{0.8}, {0.3}}), spec, 0), Error);
}

TEST_CASE("agent utility goes to the winner only") {
  const auto inst = make_instance({{{0.3, 2.0}}, {{0.8, 5.0}}});
  const auto d = run_mechanism(inst, MechanismSpec::mspm(2, 0.0), {{0, 0}});
  const auto u = expected_agent_utilities(d, 2);
  CHECK(u == std::vector<double>{0.0, 5.0});
}
