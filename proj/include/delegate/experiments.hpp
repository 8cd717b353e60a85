#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delegate/core.hpp"
#include "delegate/distributions.hpp"
#include "delegate/instance.hpp"
#include "delegate/parallel.hpp"
#include "delegate/rng.hpp"

namespace delegate {

inline constexpr std::size_t kDefaultTrials = 30000;
inline constexpr std::size_t kMinTrials = 1000;

struct McOptions {
  std::size_t trials = kDefaultTrials;
  std::uint64_t seed = 1;
  /// Standard errors allowed on the wrong side of every statistical check.
  double se_margin = 3.0;
  unsigned workers = default_workers();
};

/// One statistical or exact comparison attached to a result.
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // ">=", "<=", "==", "~="
  double reference = 0.0;
  double slack = 0.0;
  bool pass = false;
};

using NamedValues = std::vector<std::pair<std::string, double>>;

struct McResult {
  std::string name;
  double estimate = 0.0;
  double std_err = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  /// Closed-form reference values.
  NamedValues refs;
  /// Secondary estimates (and their standard errors, suffixed "_se").
  NamedValues estimates;
  std::vector<Check> checks;

  bool passed() const noexcept;
  double ref(std::string_view key) const;
  double est(std::string_view key) const;
  /// First failing check, if any.
  const Check* first_failure() const noexcept;
};

/// Mean and standard error of a per-trial sample.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_se(const std::vector<double>& values);
/// sqrt(p (1 - p) / trials) for a frequency estimate.
MeanSe frequency_se(const std::vector<double>& indicators);

/// Runs trial(rng, index) for every index on workers; trial t reads only the
/// stream (seed, label, t), and results come back in trial order.
template <class T, class Trial>
std::vector<T> run_trials(const McOptions& options, std::string_view label, Trial trial) {
  std::vector<T> out(options.trials);
  parallel_for_blocks(
      options.trials, 256,
      [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
          RngStream rng(SeedPath{options.seed, label, t});
          out[t] = trial(rng, t);
        }
      },
      options.workers);
  return out;
}

// --------------------------------------------------------------- event E

struct PrELowerBounds {
  double product_lb = 0.0;
  double exp_lb = 0.0;
};

/// product_lb = [prod_{j=2..k} (1 - q^{j-1} / 2)]^n with q = (k-1)/(kn-1);
/// exp_lb = exp(-n^2 / (2 (n-1)^2)).
PrELowerBounds closed_form_prE_lower_bounds(int n, int k);

/// First (n, k) in [2, n_max] x [2, k_max] where product_lb < exp_lb.
std::optional<std::pair<int, int>> prE_bound_sweep(int n_max, int k_max);

/// Does agent-wise alignment hold on one sample of n agents with k uniform
/// (x, y) solutions each? For every agent the argmax of x^{k(n-1)} y must be
/// the argmax of x (ties to the smaller slot). `x_max` receives the largest x.
bool sample_event_E(int n, int k, RngStream& rng, double* x_max = nullptr);

McResult estimate_pr_event_E(int n, int k, const McOptions& options = {});

/// E[X_max 1_E] alongside Pr[E] and E[X_max] on shared samples.
McResult estimate_bce_utility(int n, int k, const McOptions& options = {});

// ------------------------------------------------------- complete info

/// Every agent proposes its minimum-x solution in the worst-case instance;
/// reports E[max_i X_{i,(k)}], E[X_max] and their gap.
McResult estimate_worstcase_bne_utility(int n, int k, const McOptions& options = {});

/// MSPM (SPM when n = 1) with threshold tau (default: the BM threshold),
/// x ~ PowerCdf(alpha), y ~ Uniform01, constructive equilibrium per draw.
McResult estimate_threshold_mechanism_utility(double alpha, int n, int k, const McOptions& options = {},
                                              std::optional<double> tau = std::nullopt);

/// Couples one agent with k draws under SPM(tau) against the same draws split
/// across agents (sizes `split`, summing to k) under MSPM(tau); both sides play
/// the constructive equilibrium.
McResult correspondence_experiment(int k, const JointDistribution& dist, const std::vector<int>& split, double tau,
                                   const McOptions& options = {});

/// Principal utility of `mech` on draws of `spec`. MSPM and SPM play the
/// constructive equilibrium; RSPM takes the worst pure equilibrium found by
/// enumeration and skips (and counts) draws that have none. Every used draw is
/// checked against its per-realization floor.
McResult simulate_mechanism(const InstanceSpec& spec, const MechanismSpec& mech, const McOptions& options = {});

/// E[X_(1) - X_(2)] over n agents with k draws each from `x_marginal`.
McResult estimate_first_best_gap(int n, int k, const Marginal& x_marginal, const McOptions& options = {});

/// Bernoulli tight instance: exact gap by binomial arithmetic, Monte Carlo
/// gap, and the symmetric bound.
McResult bernoulli_tightness(int n, int k, const McOptions& options = {});

/// First-best gap of uniform agents against the MHR and increasing-pdf bounds.
McResult pim_bounds_experiment(int n, int k, const McOptions& options = {});

}  // namespace delegate
