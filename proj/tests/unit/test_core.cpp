#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "delegate/core.hpp"
#include "delegate/error.hpp"
#include "delegate/rng.hpp"
#include "support.hpp"

using namespace delegate;
using test_support::from_x;

TEST_CASE("solutions must have positive finite utilities") {
  CHECK_NOTHROW(Solution(0.1, 2.0));
  CHECK_THROWS_AS(Solution(0.0, 1.0), Error);
  CHECK_THROWS_AS(Solution(1.0, -1.0), Error);
  CHECK_THROWS_AS(Solution(std::nan(""), 1.0), Error);
}

TEST_CASE("instances need a solution for every agent") {
  CHECK_THROWS_AS(RealizedInstance({}), Error);
  CHECK_THROWS_AS(RealizedInstance({{Solution(0.5, 1)}, {}}), Error);
  const auto inst = from_x({{0.2, 0.9}, {0.5}});
  CHECK(inst.k(0) == 2);
  CHECK(inst.at(SlotRef{0, 1}).x() == 0.9);
  CHECK(inst.first_best(0) == 0.9);
}

TEST_CASE("order statistics of an instance") {
  SUBCASE("two agents") {
    const auto os = order_statistics_of_instance(from_x({{0.2, 0.9}, {0.5, 0.5}}));
    CHECK(os.first_bests == std::vector<double>{0.9, 0.5});
    CHECK(os.per_agent[0] == std::vector<double>{0.9, 0.2});
    CHECK(os.owners == std::vector<AgentIndex>{0, 1});
  }
  SUBCASE("single agent") {
    const auto os = order_statistics_of_instance(from_x({{0.3}}));
    CHECK(os.first_bests == std::vector<double>{0.3});
  }
  SUBCASE("ties keep agent order") {
    const auto os = order_statistics_of_instance(from_x({{0.1}, {0.7}, {0.7}}));
    CHECK(os.first_bests == std::vector<double>{0.7, 0.7, 0.1});
    CHECK(os.owners == std::vector<AgentIndex>{1, 2, 0});
  }
}

TEST_CASE("theorem41 floor branches") {
  const auto inst = from_x({{0.9}, {0.5}});
  CHECK(theorem41_floor(inst, 0.0) == 0.5);
  CHECK(theorem41_floor(inst, 0.7) == 0.7);
  CHECK(theorem41_floor(inst, 0.95) == 0.0);
  // A lone agent has no runner-up.
  CHECK(theorem41_floor(from_x({{0.4}}), 0.0) == 0.0);
  CHECK(theorem41_floor(from_x({{0.4}}), 0.3) == 0.3);
}

TEST_CASE("budgeted floor") {
  const auto five = from_x({{0.9}, {0.8}, {0.7}, {0.6}, {0.5}});
  CHECK(budgeted_floor(five, 0.0, 2) == 0.5);
  CHECK(budgeted_floor(five, 0.0, 3) == 0.6);
  CHECK(budgeted_floor(five, 0.0, 5) == 0.8);
  CHECK(budgeted_floor(five, 0.0, std::nullopt) == 0.8);
  CHECK(budgeted_floor(from_x({{0.9}, {0.1}}), 0.5, 2) == 0.5);
  CHECK_THROWS_AS(budgeted_floor(five, 0.0, 1), Error);
}

TEST_CASE("floor properties on random instances") {
  RngStream rng(SeedPath{11, "core-floors", 0});
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + rng() % 5;
    const std::size_t k = 1 + rng() % 3;
    const auto inst = test_support::grid_instance(rng, n, k);
    const auto fb = test_support::first_bests_desc(inst);
    CAPTURE(t);
    CHECK(theorem41_floor(inst, 0.0) == fb[1]);
    for (double tau : {0.0, 0.15, 0.35, 0.5, 0.75, 1.0, 1.2}) {
      CHECK(budgeted_floor(inst, tau, static_cast<int>(n)) == theorem41_floor(inst, tau));
      CHECK(budgeted_floor(inst, tau, static_cast<int>(n + 3)) == theorem41_floor(inst, tau));
    }
    const auto os = order_statistics_of_instance(inst);
    CHECK(os.first_bests == fb);
  }
}

TEST_CASE("order statistics are invariant to agent relabeling") {
  RngStream rng(SeedPath{5, "core-perm", 0});
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng() % 4;
    const auto inst = test_support::grid_instance(rng, n, 2);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<Solution>> sols;
    for (std::size_t i : perm) sols.emplace_back(inst.solutions(i).begin(), inst.solutions(i).end());
    const RealizedInstance permuted(std::move(sols));
    const auto a = order_statistics_of_instance(inst);
    const auto b = order_statistics_of_instance(permuted);
    CHECK(a.first_bests == b.first_bests);
    auto pa = a.per_agent, pb = b.per_agent;
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    CHECK(pa == pb);
    // Owners map back to agents holding the same first-best.
    for (std::size_t r = 0; r < n; ++r) CHECK(inst.first_best(perm[b.owners[r]]) == a.first_bests[r]);
  }
}

TEST_CASE("mechanism spec validation") {
  CHECK_NOTHROW(MechanismSpec::mspm(3, 0.5).validate(3));
  CHECK_THROWS_AS(MechanismSpec::mspm(3, 0.5).validate(2), Error);
  CHECK_THROWS_AS(MechanismSpec::spm(0.5).validate(2), Error);
  CHECK_THROWS_AS(MechanismSpec::mspm(2, 0.0, {0, 0}).validate(2), Error);
  CHECK_THROWS_AS(MechanismSpec::rspm(2, 0.0, 0).validate(2), Error);
  auto rspm = MechanismSpec::rspm(2, 0.0, 2);
  rspm.budget.reset();
  CHECK_THROWS_AS(rspm.validate(2), Error);

  const auto spec = MechanismSpec::mspm(3, 0.0, {2, 0, 1});
  CHECK(spec.prefers(2, 0));
  CHECK(spec.prefers(0, 1));
  CHECK(spec.homogeneous_threshold() == 0.0);
}

TEST_CASE("profile validation under rationality") {
  const auto inst = from_x({{0.2, 0.9}, {0.5}});
  const auto spec = MechanismSpec::mspm(2, 0.4);
  CHECK_NOTHROW(validate_profile(inst, spec, {{1, 0}}, true));
  CHECK_THROWS_AS(validate_profile(inst, spec, {{0, 0}}, true), Error);
  CHECK_NOTHROW(validate_profile(inst, spec, {{0, 0}}, false));
  CHECK_THROWS_AS(validate_profile(inst, spec, {{2, 0}}, false), Error);
  CHECK_NOTHROW(validate_profile(inst, spec, StrategyProfile::all_abstain(2), true));
}

TEST_CASE("rng streams are reproducible and independent") {
  RngStream a(SeedPath{7, "label", 3});
  RngStream b(SeedPath{7, "label", 3});
  RngStream c(SeedPath{7, "label", 4});
  RngStream d(SeedPath{7, "other", 3});
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a();
    CHECK(va == b());
    firsts.insert(va);
  }
  CHECK(firsts.size() == 1000);
  CHECK(c() != RngStream(SeedPath{7, "label", 3})());
  CHECK(d() != RngStream(SeedPath{7, "label", 3})());

  RngStream u(SeedPath{1, "u", 0});
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform01();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
    sum += v;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}
