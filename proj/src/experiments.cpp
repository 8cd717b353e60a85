#include "delegate/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "delegate/bounds.hpp"
#include "delegate/equilibrium.hpp"
#include "delegate/error.hpp"
#include "delegate/instance.hpp"
#include "delegate/mechanisms.hpp"
#include "delegate/orderstats.hpp"

namespace delegate {
namespace {

void check_options(const McOptions& o) {
  require(o.trials >= kMinTrials, fmt::format("at least {} trials required, got {}", kMinTrials, o.trials));
  require(o.se_margin >= 0.0, fmt::format("SE margin must be nonnegative, got {}", o.se_margin));
}

Check at_least(std::string name, double value, double reference, double slack) {
  return {std::move(name), value, ">=", reference, slack, value >= reference - slack};
}

Check at_most(std::string name, double value, double reference, double slack) {
  return {std::move(name), value, "<=", reference, slack, value <= reference + slack};
}

Check near(std::string name, double value, double reference, double slack) {
  return {std::move(name), value, "~=", reference, slack, std::abs(value - reference) <= slack};
}

McResult start(std::string name, const McOptions& o) {
  McResult r;
  r.name = std::move(name);
  r.trials = o.trials;
  r.seed = o.seed;
  return r;
}

std::vector<double> column(const std::vector<std::pair<double, double>>& rows, bool first) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& [a, b] : rows) out.push_back(first ? a : b);
  return out;
}

double utility_of(const RealizedInstance& inst, const MechanismSpec& spec) {
  return expected_principal_utility(run_mechanism(inst, spec, constructive_equilibrium(inst, spec)));
}

}  // namespace

bool McResult::passed() const noexcept { return first_failure() == nullptr; }

const Check* McResult::first_failure() const noexcept {
  for (const Check& c : checks) {
    if (!c.pass) return &c;
  }
  return nullptr;
}

namespace {

double lookup(const NamedValues& values, std::string_view key, const std::string& what) {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  throw_invalid(fmt::format("{} has no {} named '{}'", what, "value", key));
}

}  // namespace

double McResult::ref(std::string_view key) const { return lookup(refs, key, name); }
double McResult::est(std::string_view key) const { return lookup(estimates, key, name); }

MeanSe mean_se(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  require(values.size() >= 2, "need at least two values for a standard error");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

MeanSe frequency_se(const std::vector<double>& indicators) {
  const double n = static_cast<double>(indicators.size());
  require(!indicators.empty(), "need at least one indicator");
  const double p = std::accumulate(indicators.begin(), indicators.end(), 0.0) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

// --------------------------------------------------------------- event E

PrELowerBounds closed_form_prE_lower_bounds(int n, int k) {
  require(n >= 2 && k >= 1, fmt::format("needs n >= 2, k >= 1; got {}, {}", n, k));
  const double q = (k - 1.0) / (static_cast<double>(k) * n - 1.0);
  double log_agent = 0.0;
  double qp = 1.0;
  for (int j = 2; j <= k; ++j) {
    qp *= q;
    // q < 1/2, so the remaining terms sum to less than twice this one.
    if (0.5 * qp < 1e-18 * -log_agent) break;
    log_agent += std::log1p(-0.5 * qp);
  }
  const double r = static_cast<double>(n) / (n - 1);
  return {std::exp(n * log_agent), std::exp(-0.5 * r * r)};
}

std::optional<std::pair<int, int>> prE_bound_sweep(int n_max, int k_max) {
  for (int n = 2; n <= n_max; ++n) {
    for (int k = 2; k <= k_max; ++k) {
      const auto b = closed_form_prE_lower_bounds(n, k);
      if (b.product_lb < b.exp_lb) return std::pair{n, k};
    }
  }
  return std::nullopt;
}

bool sample_event_E(int n, int k, RngStream& rng, double* x_max) {
  require(n >= 1 && k >= 1, fmt::format("needs n, k >= 1; got {}, {}", n, k));
  const int m = k * (n - 1);
  const bool use_log = m > 64;
  auto score = [&](double x, double y) { return use_log ? m * std::log(x) + std::log(y) : std::pow(x, m) * y; };

  std::vector<double> xs(k);
  std::vector<double> ys(k);
  bool aligned = true;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      xs[j] = rng.uniform01();
      ys[j] = rng.uniform01();
    }
    int star = 0;
    for (int j = 1; j < k; ++j) {
      if (xs[j] > xs[star]) star = j;
    }
    best = std::max(best, xs[star]);
    if (!aligned || m == 0) continue;

    // x^m y can only beat the x-argmax where x >= x* y*^(1/m).
    const double cutoff = xs[star] * std::pow(ys[star], 1.0 / m) * (1.0 - 1e-9);
    const double s_star = score(xs[star], ys[star]);
    for (int j = 0; j < k && aligned; ++j) {
      if (j == star || xs[j] < cutoff) continue;
      const double s = score(xs[j], ys[j]);
      if (s > s_star || (s == s_star && j < star)) aligned = false;
    }
    if (!aligned && x_max == nullptr) return false;
  }
  if (x_max != nullptr) *x_max = best;
  return aligned;
}

McResult estimate_pr_event_E(int n, int k, const McOptions& options) {
  check_options(options);
  const auto bounds = closed_form_prE_lower_bounds(n, k);
  const auto hits = run_trials<double>(options, "prE", [n, k](RngStream& rng, std::size_t) {
    return sample_event_E(n, k, rng) ? 1.0 : 0.0;
  });
  const MeanSe p = frequency_se(hits);
  McResult r = start("prE", options);
  r.estimate = p.mean;
  r.std_err = p.se;
  r.refs = {{"product_lb", bounds.product_lb}, {"exp_lb", bounds.exp_lb}};
  const double slack = options.se_margin * p.se;
  r.checks.push_back(at_least("prE>=exp_lb", p.mean, bounds.exp_lb, slack));
  r.checks.push_back(at_least("prE>=product_lb", p.mean, bounds.product_lb, slack));
  return r;
}

McResult estimate_bce_utility(int n, int k, const McOptions& options) {
  check_options(options);
  const auto rows = run_trials<std::pair<double, double>>(options, "bce", [n, k](RngStream& rng, std::size_t) {
    double x_max = 0.0;
    const bool e = sample_event_E(n, k, rng, &x_max);
    return std::pair{e ? 1.0 : 0.0, x_max};
  });
  const auto e = column(rows, true);
  const auto x = column(rows, false);
  std::vector<double> z(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) z[t] = e[t] * x[t];

  const MeanSe pe = frequency_se(e);
  const MeanSe mx = mean_se(x);
  const MeanSe mz = mean_se(z);
  // Covariances are ignored, which only widens the band.
  const double combined = std::sqrt(mz.se * mz.se + std::pow(mx.mean * pe.se, 2) + std::pow(pe.mean * mx.se, 2));
  const double ratio = mx.mean / mz.mean;
  const double ratio_se = ratio * std::sqrt(std::pow(mx.se / mx.mean, 2) + std::pow(mz.se / mz.mean, 2));
  const double closed = static_cast<double>(n) * k / (static_cast<double>(n) * k + 1.0);

  McResult r = start("bce", options);
  r.estimate = mz.mean;
  r.std_err = mz.se;
  r.estimates = {{"prE", pe.mean},     {"prE_se", pe.se},      {"E_X_max", mx.mean},
                 {"E_X_max_se", mx.se}, {"combined_se", combined}, {"ratio", ratio},
                 {"ratio_se", ratio_se}};
  r.refs = {{"E_X_max", closed}, {"bce_ratio", bce_ratio(n)}};
  const double m = options.se_margin;
  r.checks.push_back(at_least("E[Xmax 1_E]>=Pr[E]E[Xmax]", mz.mean, pe.mean * mx.mean, m * combined));
  r.checks.push_back(at_most("E[Xmax]/E[Xmax 1_E]<=bce_ratio", ratio, bce_ratio(n), m * ratio_se));
  r.checks.push_back(near("E[Xmax]~=nk/(nk+1)", mx.mean, closed, m * mx.se));
  return r;
}

// ------------------------------------------------------- complete info

McResult estimate_worstcase_bne_utility(int n, int k, const McOptions& options) {
  check_options(options);
  require(n >= 1 && k >= 1, fmt::format("needs n, k >= 1; got {}, {}", n, k));
  McResult r = start("worstbne", options);

  const InstanceSpec spec = n >= 2 ? *materialize(NamedInstance::worstcase_bne(n, k)).spec
                                   : InstanceSpec::symmetric(1, k, parse_joint("uniform01"));
  const MechanismSpec mech = n >= 2 ? MechanismSpec::mspm(n, 0.0) : MechanismSpec::spm(0.0);
  if (n >= 2) {
    const auto mono = bne_monotonicity_check(n, k, Marginal::uniform01());
    r.checks.push_back({"min_x_best_response", mono ? 1.0 : 0.0, "==", 1.0, 0.0, mono.strictly_decreasing});
  }

  const auto rows = run_trials<std::pair<double, double>>(options, "worstbne", [&](RngStream& rng, std::size_t) {
    const RealizedInstance inst = spec.realize(rng);
    StrategyProfile p = StrategyProfile::all_abstain(inst.n());
    double x_max = 0.0;
    for (AgentIndex i = 0; i < inst.n(); ++i) {
      const auto sols = inst.solutions(i);
      std::size_t lo = 0;
      for (std::size_t j = 0; j < sols.size(); ++j) {
        if (sols[j].x() < sols[lo].x()) lo = j;
        x_max = std::max(x_max, sols[j].x());
      }
      p.choices[i] = lo;
    }
    return std::pair{expected_principal_utility(run_mechanism(inst, mech, p)), x_max};
  });
  const auto u = column(rows, true);
  const auto x = column(rows, false);
  std::vector<double> gap(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) gap[t] = x[t] - u[t];

  const MeanSe mu = mean_se(u);
  const MeanSe mx = mean_se(x);
  const MeanSe mg = mean_se(gap);
  const double closed = static_cast<double>(n) * k / (static_cast<double>(n) * k + 1.0);
  r.estimate = mu.mean;
  r.std_err = mu.se;
  r.estimates = {{"E_X_max", mx.mean}, {"E_X_max_se", mx.se}, {"gap", mg.mean}, {"gap_se", mg.se}};
  r.refs = {{"E_X_max", closed}, {"min_ceiling", worstcase_min_ceiling(n, k)}};
  const double m = options.se_margin;
  if (n >= 2) {
    const double lb = incomplete_info_lower_bound(n, k);
    r.refs.emplace_back("lower_bound", lb);
    r.checks.push_back(at_least("gap>=lower_bound", mg.mean, lb, m * mg.se));
    r.checks.push_back(at_most("E[max min]<=ceiling", mu.mean, worstcase_min_ceiling(n, k), m * mu.se));
  }
  r.checks.push_back(near("E[Xmax]~=nk/(nk+1)", mx.mean, closed, m * mx.se));
  return r;
}

McResult estimate_threshold_mechanism_utility(double alpha, int n, int k, const McOptions& options,
                                              std::optional<double> tau) {
  check_options(options);
  require(alpha > 0.0 && n >= 1 && k >= 1, fmt::format("needs alpha > 0, n, k >= 1; got {}, {}, {}", alpha, n, k));
  const BmThreshold bm = bm_threshold(alpha, n, k);
  const double t = tau.value_or(bm.r);
  require(t >= 0.0, fmt::format("threshold must be nonnegative, got {}", t));
  const InstanceSpec spec =
      InstanceSpec::symmetric(n, k, JointDistribution(IndependentProduct{Marginal::power_cdf(alpha), Marginal::uniform01()}));
  const MechanismSpec mech = n == 1 ? MechanismSpec::spm(t) : MechanismSpec::mspm(n, t);

  const auto rows = run_trials<std::pair<double, double>>(options, "threshold", [&](RngStream& rng, std::size_t) {
    const RealizedInstance inst = spec.realize(rng);
    return std::pair{utility_of(inst, mech), theorem41_floor(inst, t)};
  });
  const auto u = column(rows, true);
  const auto f = column(rows, false);
  std::size_t below = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) below += u[i] < f[i] ? 1 : 0;

  const MeanSe mu = mean_se(u);
  const MeanSe mf = mean_se(f);
  McResult r = start("threshold", options);
  r.estimate = mu.mean;
  r.std_err = mu.se;
  r.estimates = {{"floor_mean", mf.mean}, {"floor_mean_se", mf.se}};
  r.refs = {{"tau", t}};
  const double m = options.se_margin;
  r.checks.push_back({"per_trial_floor_violations", static_cast<double>(below), "==", 0.0, 0.0, below == 0});
  r.checks.push_back(at_least("utility>=E[floor]", mu.mean, mf.mean, m * mu.se));
  if (!tau) {
    r.refs.emplace_back("guarantee", bm.guarantee);
    r.checks.push_back(at_least("utility>=r-r^(ank+1)", mu.mean, bm.guarantee, m * mu.se));
  }
  if (n == 1 && t <= 1.0) {
    // A uniformly random eligible draw: P(any eligible) E[x | x >= t].
    const double a = alpha;
    const double tail_mean = a / (a + 1.0) * (1.0 - std::pow(t, a + 1.0));
    const double tail_prob = 1.0 - std::pow(t, a);
    const double analytic = tail_prob > 0.0 ? (1.0 - std::pow(t, a * k)) * tail_mean / tail_prob : 0.0;
    r.refs.emplace_back("spm_analytic", analytic);
    r.checks.push_back(near("utility~=spm_analytic", mu.mean, analytic, m * mu.se));
  }
  return r;
}

McResult correspondence_experiment(int k, const JointDistribution& dist, const std::vector<int>& split, double tau,
                                   const McOptions& options) {
  check_options(options);
  require(k >= 1, fmt::format("needs k >= 1, got {}", k));
  require(!split.empty() && std::all_of(split.begin(), split.end(), [](int s) { return s >= 1; }) &&
              std::accumulate(split.begin(), split.end(), 0) == k,
          fmt::format("split must be positive parts summing to k={}", k));
  require(tau >= 0.0, fmt::format("threshold must be nonnegative, got {}", tau));
  const MechanismSpec single = MechanismSpec::spm(tau);
  const MechanismSpec multi = MechanismSpec::mspm(split.size(), tau);

  const auto rows = run_trials<std::pair<double, double>>(options, "correspond", [&](RngStream& rng, std::size_t) {
    std::vector<Solution> draws;
    draws.reserve(k);
    for (int j = 0; j < k; ++j) draws.push_back(dist.sample(rng));
    std::vector<std::vector<Solution>> parts;
    auto it = draws.begin();
    for (int s : split) {
      parts.emplace_back(it, it + s);
      it += s;
    }
    return std::pair{utility_of(RealizedInstance(std::move(parts)), multi),
                     utility_of(RealizedInstance({draws}), single)};
  });
  const auto mu_multi = column(rows, true);
  const auto mu_single = column(rows, false);
  std::size_t violations = 0;
  std::optional<std::size_t> first;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (mu_multi[t] < mu_single[t]) {
      ++violations;
      if (!first) first = t;
    }
  }
  const MeanSe a = mean_se(mu_multi);
  const MeanSe b = mean_se(mu_single);
  McResult r = start("correspond", options);
  r.estimate = a.mean;
  r.std_err = a.se;
  r.estimates = {{"single_utility", b.mean}, {"single_utility_se", b.se}, {"violations", static_cast<double>(violations)}};
  if (first) r.estimates.emplace_back("first_violation_trial", static_cast<double>(*first));
  r.refs = {{"tau", tau}};
  r.checks.push_back({"per_trial_multi>=single", static_cast<double>(violations), "==", 0.0, 0.0, violations == 0});
  return r;
}

McResult simulate_mechanism(const InstanceSpec& spec, const MechanismSpec& mech, const McOptions& options) {
  check_options(options);
  spec.validate();
  mech.validate(spec.n());
  struct Row {
    bool used = false;
    double utility = 0.0;
    double floor = 0.0;
    bool below = false;
  };
  const auto rows = run_trials<Row>(options, "simulate", [&](RngStream& rng, std::size_t) {
    const RealizedInstance inst = spec.realize(rng);
    const auto floor = equilibrium_floor(inst, mech);
    Row row;
    if (mech.kind == MechanismKind::kRspm) {
      const auto report = enumerate_pure_nash(inst, mech);
      if (!report.has_pure_nash()) return row;
      row.utility = report.nash_profiles.front().principal_utility;
      for (const auto& rec : report.nash_profiles) row.utility = std::min(row.utility, rec.principal_utility);
      row.below = !report.violations.empty();
    } else {
      row.utility = utility_of(inst, mech);
      row.below = !ProfileRecord{{}, row.utility, floor}.respects_floor();
    }
    row.used = true;
    row.floor = floor.value_or(0.0);
    return row;
  });
  std::vector<double> u;
  std::vector<double> f;
  std::size_t below = 0;
  for (const Row& row : rows) {
    if (!row.used) continue;
    u.push_back(row.utility);
    f.push_back(row.floor);
    below += row.below ? 1 : 0;
  }
  McResult r = start("simulate", options);
  const std::size_t skipped = rows.size() - u.size();
  r.estimates = {{"skipped_no_pure_nash", static_cast<double>(skipped)}};
  if (u.size() >= 2) {
    const MeanSe mu = mean_se(u);
    const MeanSe mf = mean_se(f);
    r.estimate = mu.mean;
    r.std_err = mu.se;
    r.estimates.emplace_back("floor_mean", mf.mean);
  }
  r.checks.push_back({"per_trial_floor_violations", static_cast<double>(below), "==", 0.0, 0.0, below == 0});
  return r;
}

McResult estimate_first_best_gap(int n, int k, const Marginal& x_marginal, const McOptions& options) {
  check_options(options);
  require(n >= 2 && k >= 1, fmt::format("needs n >= 2, k >= 1; got {}, {}", n, k));
  const auto gaps = run_trials<double>(options, "first_best_gap", [&](RngStream& rng, std::size_t) {
    double top = -INFINITY;
    double second = -INFINITY;
    for (int i = 0; i < n; ++i) {
      double best = -INFINITY;
      for (int j = 0; j < k; ++j) best = std::max(best, x_marginal.sample(rng));
      if (best > top) {
        second = top;
        top = best;
      } else if (best > second) {
        second = best;
      }
    }
    return top - second;
  });
  const MeanSe g = mean_se(gaps);
  McResult r = start("first_best_gap", options);
  r.estimate = g.mean;
  r.std_err = g.se;
  return r;
}

McResult bernoulli_tightness(int n, int k, const McOptions& options) {
  const auto mat = materialize(NamedInstance::bernoulli_tight(n, k));
  const double p = mat.value("p");
  const MaxOfK first_best(*mat.x_marginal, k);
  const double exact = gap_expectation({first_best, n, 1, GapSide::kTop});
  const double by_count = bernoulli_gap_by_count(-std::expm1(k * std::log1p(-p)), n, 1);
  const double bound = pim_bound_symmetric(n, 1.0);

  McResult r = estimate_first_best_gap(n, k, *mat.x_marginal, options);
  r.name = "bernoulli_tight";
  r.refs = {{"p", p}, {"bound", bound}, {"exact_gap", exact}, {"count_gap", by_count}};
  r.checks.push_back(near("exact_gap~=(1-1/n)^(n-1)", exact, bound, 1e-9));
  r.checks.push_back(near("count_gap~=(1-1/n)^(n-1)", by_count, bound, 1e-9));
  r.checks.push_back(near("mc_gap~=(1-1/n)^(n-1)", r.estimate, bound, options.se_margin * r.std_err));
  return r;
}

McResult pim_bounds_experiment(int n, int k, const McOptions& options) {
  McResult r = estimate_first_best_gap(n, k, Marginal::uniform01(), options);
  r.name = "pim_bounds";
  const double mhr = pim_bound_mhr(k);
  const double inc = pim_bound_incpdf(n, k);
  r.refs = {{"mhr_bound", mhr}, {"incpdf_bound", inc}};
  const double slack = options.se_margin * r.std_err;
  r.checks.push_back(at_most("gap<=mhr_bound", r.estimate, mhr, slack));
  r.checks.push_back(at_most("gap<=incpdf_bound", r.estimate, inc, slack));
  return r;
}

}  // namespace delegate
