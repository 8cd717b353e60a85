#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "delegate/core.hpp"
#include "delegate/parallel.hpp"
#include "delegate/rng.hpp"

namespace delegate {

inline constexpr std::uint64_t kDefaultSeed = 7;
inline constexpr int kCriterionCount = 13;

struct AcceptanceOptions {
  std::uint64_t seed = kDefaultSeed;
  /// Tenfold fewer Monte Carlo trials with 4-sigma margins.
  bool quick = false;
  /// Multiplies lower bounds and divides upper bounds before comparing.
  /// Anything but 1 deliberately breaks the suite; used to test failure paths.
  double bound_scale = 1.0;
  unsigned workers = default_workers();
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the listed criteria (all when empty) in increasing order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, const std::vector<int>& only = {});

/// "PASS  3  title  (1.2 s)  detail"
std::string format_result(const CriterionResult& r);

/// n agents with k solutions each; x and y drawn from {0.1, 0.2, ..., 1.0}.
RealizedInstance random_grid_instance(RngStream& rng, std::size_t n, std::size_t k);

/// Uniformly random permutation of [0, n).
std::vector<AgentIndex> random_priority(RngStream& rng, std::size_t n);

}  // namespace delegate
