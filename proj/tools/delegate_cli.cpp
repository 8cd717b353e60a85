#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "delegate/acceptance.hpp"
#include "delegate/bounds.hpp"
#include "delegate/equilibrium.hpp"
#include "delegate/error.hpp"
#include "delegate/experiments.hpp"
#include "delegate/instance.hpp"
#include "delegate/orderstats.hpp"

namespace {

using namespace delegate;

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;

// ------------------------------------------------------------------ output

using Cell = std::variant<double, long long, std::string, bool, std::monostate>;
using Row = std::vector<std::pair<std::string, Cell>>;

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return fmt::format("{:.12g}", v);
        } else if constexpr (std::is_same_v<T, long long>) {
          return fmt::format("{}", v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          return q + "\"";
        } else {
          return "";
        }
      },
      c);
}

nlohmann::json json_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          // Round-trip through the CSV formatting so both outputs agree.
          return std::stod(fmt::format("{:.12g}", v));
        } else {
          return v;
        }
      },
      c);
}

/// Prints rows as CSV (header from the first row) or one JSON object per row.
class Emitter {
 public:
  explicit Emitter(std::string format) : json_(format == "json") {}

  void row(const Row& r) {
    if (json_) {
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      for (const auto& [k, v] : r) j[k] = json_cell(v);
      std::cout << j.dump() << '\n';
      return;
    }
    if (!header_done_) {
      std::string h;
      for (const auto& [k, v] : r) h += (h.empty() ? "" : ",") + k;
      std::cout << h << '\n';
      header_done_ = true;
    }
    std::string line;
    bool first = true;
    for (const auto& [k, v] : r) {
      line += (first ? "" : ",") + csv_cell(v);
      first = false;
    }
    std::cout << line << '\n';
  }

  void json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }
  bool is_json() const { return json_; }

 private:
  bool json_;
  bool header_done_ = false;
};

Row mc_row(Row params, const McResult& r) {
  Row row = std::move(params);
  row.emplace_back("trials", static_cast<long long>(r.trials));
  row.emplace_back("seed", static_cast<long long>(r.seed));
  row.emplace_back("estimate", r.estimate);
  row.emplace_back("std_err", r.std_err);
  auto taken = [&](const std::string& key) {
    for (const auto& [k, v] : row) if (k == key) return true;
    return false;
  };
  // A reference that shares its name with a parameter or estimate is prefixed.
  for (const auto& [k, v] : r.refs) {
    bool clash = taken(k);
    for (const auto& e : r.estimates) clash = clash || e.first == k;
    row.emplace_back(clash ? "ref_" + k : k, v);
  }
  for (const auto& [k, v] : r.estimates) row.emplace_back(taken(k) ? "mc_" + k : k, v);
  row.emplace_back("pass", r.passed());
  return row;
}

/// Reports the first failed check and returns the exit code for the run.
int verdict(const McResult& r, const std::string& where) {
  if (const Check* c = r.first_failure()) {
    fmt::print(stderr, "assertion failed [{}]: {}: {:.12g} {} {:.12g} (slack {:.3g})\n", where, c->name, c->value,
               c->relation, c->reference, c->slack);
    return kExitAssertion;
  }
  return kExitOk;
}

// ------------------------------------------------------------------- flags

struct Common {
  int n = 5;
  int k = 2;
  double tau = 0.0;
  int budget = 0;
  double alpha = 1.0;
  std::size_t trials = kDefaultTrials;
  std::uint64_t seed = kDefaultSeed;
  int reps = 1;
  std::string out = "csv";
  std::string instance_path;

  CLI::Option* tau_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;

  McOptions mc(int rep = 0) const {
    McOptions m;
    m.trials = trials;
    m.seed = seed + static_cast<std::uint64_t>(rep);
    return m;
  }
  bool has_budget() const { return budget_opt->count() > 0; }
};

/// `--config` names either a TOML manifest (read by CLI11) or an instance
/// JSON file; the latter is pulled out of argv before parsing.
std::vector<std::string> split_instance_config(int argc, char** argv, std::string& instance_path) {
  std::vector<std::string> args;
  auto is_json = [](const std::string& p) { return p.size() > 5 && p.substr(p.size() - 5) == ".json"; };
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc && is_json(argv[i + 1])) {
      instance_path = argv[++i];
    } else if (a.rfind("--config=", 0) == 0 && is_json(a.substr(9))) {
      instance_path = a.substr(9);
    } else {
      args.push_back(a);
    }
  }
  return {args.rbegin(), args.rend()};
}

MechanismSpec make_mechanism(const std::string& kind, const Common& c, std::size_t n) {
  if (kind == "spm") return MechanismSpec::spm(c.tau);
  if (kind == "rspm" || (kind.empty() && c.has_budget())) {
    require(c.has_budget(), "--budget is required for rspm");
    return MechanismSpec::rspm(n, c.tau, c.budget);
  }
  return MechanismSpec::mspm(n, c.tau);
}

// ------------------------------------------------------------- subcommands

int run_simulate(const Common& c, const std::string& mechanism, const std::string& dist) {
  Emitter out(c.out);
  const InstanceSpec spec = c.instance_path.empty() ? InstanceSpec::symmetric(c.n, c.k, parse_joint(dist))
                                                    : load_instance_file(c.instance_path);
  const MechanismSpec mech = make_mechanism(mechanism, c, spec.n());
  int code = kExitOk;
  for (int rep = 0; rep < c.reps; ++rep) {
    const McResult r = simulate_mechanism(spec, mech, c.mc(rep));
    const std::string kind = mech.kind == MechanismKind::kSpm ? "spm" : mech.kind == MechanismKind::kRspm ? "rspm" : "mspm";
    out.row(mc_row({{"mechanism", kind},
                    {"n", static_cast<long long>(spec.n())},
                    {"k", static_cast<long long>(spec.agents.front().k())},
                    {"tau", c.tau},
                    {"budget", c.has_budget() ? Cell(static_cast<long long>(c.budget)) : Cell(std::monostate{})},
                    {"dist", c.instance_path.empty() ? dist : c.instance_path}},
                   r));
    code = std::max(code, verdict(r, "simulate"));
  }
  return code;
}

int run_equilibrium(const Common& c, const std::string& mechanism, std::size_t max_profiles) {
  require(!c.instance_path.empty(), "equilibrium needs an instance file: --config <instance.json>");
  const InstanceSpec spec = load_instance_file(c.instance_path);
  std::optional<RealizedInstance> inst;
  try {
    auto all = spec.enumerate_realizations(2);
    if (all.size() == 1) inst = all.front().first;
  } catch (const Error&) {
    // Random instance: fall through to one seeded draw.
  }
  if (!inst) {
    RngStream rng(SeedPath{c.seed, "equilibrium", 0});
    inst = spec.realize(rng);
  }
  const MechanismSpec mech = make_mechanism(mechanism, c, inst->n());
  EquilibriumOptions options;
  options.max_profiles = max_profiles;
  const EquilibriumReport report = enumerate_pure_nash(*inst, mech, options);

  Emitter out(c.out);
  if (out.is_json()) {
    nlohmann::json j = to_json(report);
    j["instance"] = realized_to_json(*inst);
    out.json(j);
  } else {
    auto emit = [&](const ProfileRecord& r, const std::string& role) {
      out.row({{"role", role},
               {"profile", to_json(r.profile).dump()},
               {"principal_utility", r.principal_utility},
               {"floor", r.floor ? Cell(*r.floor) : Cell(std::monostate{})},
               {"respects_floor", r.respects_floor()}});
    };
    for (const auto& r : report.nash_profiles) emit(r, "nash");
    if (report.constructive) emit(*report.constructive, "constructive");
  }
  if (!report.violations.empty()) {
    fmt::print(stderr, "assertion failed [equilibrium]: profile {} has utility {:.12g} below floor {:.12g}\n",
               to_json(report.violations.front().profile).dump(), report.violations.front().principal_utility,
               report.violations.front().floor.value_or(0.0));
    return kExitAssertion;
  }
  if (report.constructive && !report.constructive_verified) {
    fmt::print(stderr, "assertion failed [equilibrium]: constructive profile {} is not a Nash equilibrium\n",
               to_json(report.constructive->profile).dump());
    return kExitAssertion;
  }
  if (!report.has_pure_nash()) fmt::print(stderr, "note: no pure Nash equilibrium\n");
  return kExitOk;
}

int run_orderstats(const Common& c, const std::string& dist, int samples, const std::string& side_name) {
  const GapSide side = side_name == "bottom" ? GapSide::kBottom : GapSide::kTop;
  const MaxOfK law(parse_marginal(dist), samples);
  require(c.k >= 1 && c.n >= c.k + 1, fmt::format("orderstats needs 1 <= k <= n - 1, got k={}, n={}", c.k, c.n));
  const bool unit_support = law.base().support_min() >= 0.0 && law.base().support_max() <= 1.0;

  Emitter out(c.out);
  int code = kExitOk;
  auto emit = [&](int n, Cell gap, Cell bound, const std::string& name, Cell pass) {
    out.row({{"marginal", law.id()},
             {"side", side_name},
             {"k", static_cast<long long>(c.k)},
             {"n", static_cast<long long>(n)},
             {"gap", gap},
             {"bound", bound},
             {"check_name", name},
             {"pass", pass}});
  };

  for (int n = c.k + 1; n <= c.n; ++n) {
    const GapQuery q{law, n, c.k, side};
    const double gap = gap_expectation(q);
    const double spacing = gap_spacing_integral(q);
    bool ok = std::abs(gap - spacing) <= kGapTolerance;
    Cell bound = std::monostate{};
    if (unit_support) {
      const double b = lopez_bound(n, side == GapSide::kTop ? n - c.k : c.k);
      bound = b;
      ok = ok && gap <= b + kGapTolerance;
    }
    emit(n, gap, bound, "gap", ok);
    if (!ok) {
      fmt::print(stderr, "assertion failed [orderstats]: gap at n={} is {:.12g}, spacing form {:.12g}\n", n, gap, spacing);
      code = kExitAssertion;
    }
  }

  auto lemma = [&](const LemmaCheck& chk, int n) {
    const Cell last = chk.values.empty() ? Cell(std::monostate{}) : Cell(chk.values.back());
    emit(n, last, std::monostate{}, chk.name, chk.precondition ? Cell(chk.holds) : Cell(std::string("n/a")));
    if (chk.precondition && !chk.holds) {
      if (law.is_discrete()) {
        fmt::print(stderr, "note: {} fails for discrete law {} (the lemma assumes a continuous law): {}\n", chk.name,
                   law.id(), chk.detail);
      } else {
        fmt::print(stderr, "assertion failed [orderstats]: {}: {}\n", chk.name, chk.detail);
        code = kExitAssertion;
      }
    }
  };
  if (c.n >= c.k + 2) lemma(verify_mhr_monotonicity(law, c.k, c.k + 1, c.n, side), c.n);
  if (c.n >= c.k + 2 && !law.is_discrete()) lemma(verify_scaled_monotonicity(law, c.k, c.k + 2, c.n, side), c.n);
  if (!law.is_discrete()) {
    const int r = side == GapSide::kTop ? c.n - c.k + 1 : c.k;
    lemma(verify_mhr_preservation(law, c.n, r), c.n);
    lemma(verify_pdf_shape_preservation(law, c.n, side), c.n);
  }
  return code;
}

int run_bounds(const Common& c, const std::string& formula, std::optional<double> eps, double L, int s) {
  NamedValues values;
  std::vector<std::pair<std::string, double>> params;
  auto need_eps = [&] {
    require(eps.has_value(), fmt::format("--eps is required for {}", formula));
    return *eps;
  };
  if (formula == "bm_threshold") {
    params = {{"alpha", c.alpha}, {"n", c.n}, {"k", c.k}};
    const auto b = bm_threshold(c.alpha, c.n, c.k);
    values = {{"r", b.r}, {"guarantee", b.guarantee}, {"guarantee_factored", b.guarantee_factored}, {"ratio_form", b.ratio_form}};
  } else if (formula == "symmetric") {
    params = {{"n", c.n}, {"L", L}};
    values = {{"value", pim_bound_symmetric(c.n, L)}};
  } else if (formula == "mhr") {
    params = {{"k", c.k}};
    values = {{"value", pim_bound_mhr(c.k)}};
  } else if (formula == "incpdf") {
    params = {{"n", c.n}, {"k", c.k}};
    values = {{"value", pim_bound_incpdf(c.n, c.k)}};
  } else if (formula == "incomplete") {
    params = {{"n", c.n}, {"k", c.k}};
    values = {{"value", incomplete_info_lower_bound(c.n, c.k)}};
    if (values.front().second < 0.0) fmt::print(stderr, "note: negative lower bound is vacuous\n");
  } else if (formula == "epsilon") {
    params = {{"n", c.n}};
    values = {{"value", approx_bne_epsilon(c.n)}};
  } else if (formula == "bce_ratio") {
    params = {{"n", c.n}};
    values = {{"value", bce_ratio(c.n)}};
  } else if (formula == "lopez") {
    params = {{"n", c.n}, {"s", s}, {"L", L}};
    values = {{"value", lopez_bound(c.n, s, L)}};
  } else if (formula == "prE_lb") {
    params = {{"n", c.n}, {"k", c.k}};
    const auto b = closed_form_prE_lower_bounds(c.n, c.k);
    values = {{"product_lb", b.product_lb}, {"exp_lb", b.exp_lb}};
  } else if (formula == "superagent_bm") {
    const double a = eps ? super_agent_alpha(*eps) : c.alpha;
    if (eps) params = {{"eps", *eps}};
    else params = {{"alpha", a}};
    values = materialize(NamedInstance::super_agent_bm(a)).expected;
  } else if (formula == "superagent_pim") {
    params = {{"L", L}, {"eps", need_eps()}};
    values = materialize(NamedInstance::super_agent_pim(L, *eps)).expected;
  } else if (formula == "bernoulli_tight") {
    params = {{"n", c.n}, {"k", c.k}};
    values = materialize(NamedInstance::bernoulli_tight(c.n, c.k)).expected;
  } else if (formula == "worstcase_bne") {
    params = {{"n", c.n}, {"k", c.k}};
    values = materialize(NamedInstance::worstcase_bne(c.n, c.k)).expected;
  } else {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown --formula '{}'", formula));
  }

  std::string param_text;
  for (const auto& [k, v] : params) param_text += fmt::format("{}{}={:.12g}", param_text.empty() ? "" : ";", k, v);
  Emitter out(c.out);
  if (out.is_json()) {
    nlohmann::ordered_json j{{"formula", formula}};
    nlohmann::ordered_json p = nlohmann::ordered_json::object();
    for (const auto& [k, v] : params) p[k] = v;
    j["params"] = p;
    for (const auto& [k, v] : values) j[k] = json_cell(v);
    std::cout << j.dump() << '\n';
    return kExitOk;
  }
  for (const auto& [k, v] : values) {
    out.row({{"formula", values.size() == 1 && k == "value" ? formula : formula + "." + k},
             {"params", param_text},
             {"value", v}});
  }
  return kExitOk;
}

int run_prE(const Common& c, const std::vector<int>& n_list) {
  Emitter out(c.out);
  int code = kExitOk;
  const std::vector<int> ns = n_list.empty() ? std::vector<int>{c.n} : n_list;
  for (int n : ns) {
    for (int rep = 0; rep < c.reps; ++rep) {
      const McResult r = estimate_pr_event_E(n, c.k, c.mc(rep));
      out.row(mc_row({{"n", static_cast<long long>(n)}, {"k", static_cast<long long>(c.k)}}, r));
      code = std::max(code, verdict(r, fmt::format("prE n={} k={}", n, c.k)));
    }
  }
  return code;
}

template <class F>
int run_mc(const Common& c, Row params, F f, const std::string& where) {
  Emitter out(c.out);
  int code = kExitOk;
  for (int rep = 0; rep < c.reps; ++rep) {
    const McResult r = f(c.mc(rep));
    out.row(mc_row(params, r));
    code = std::max(code, verdict(r, where));
  }
  return code;
}

int run_verify_all(const Common& c, bool quick, const std::vector<int>& only, double bound_scale) {
  AcceptanceOptions o;
  o.seed = c.seed;
  o.quick = quick;
  o.bound_scale = bound_scale;
  const auto results = run_acceptance(o, only);
  int failed = 0;
  Emitter out(c.out);
  for (const auto& r : results) {
    if (out.is_json()) {
      out.row({{"id", static_cast<long long>(r.id)},
               {"title", r.title},
               {"pass", r.pass},
               {"seconds", r.seconds},
               {"detail", r.detail}});
    } else {
      fmt::print("{}\n", format_result(r));
    }
    std::cout.flush();
    if (!r.pass) {
      if (failed == 0) fmt::print(stderr, "assertion failed [criterion {}]: {}\n", r.id, r.detail);
      ++failed;
    }
  }
  if (!out.is_json()) fmt::print("{}/{} criteria passed\n", results.size() - failed, results.size());
  return failed == 0 ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  Common c;
  CLI::App app{"Delegated choice toolkit: mechanisms, equilibria, order statistics, and bound checks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML manifest mirroring the flags (flags win), or an instance .json file");
  app.add_option("--n", c.n, "Number of agents")->capture_default_str();
  app.add_option("--k", c.k, "Solutions per agent (gap index for orderstats)")->capture_default_str();
  c.tau_opt = app.add_option("--tau", c.tau, "Eligibility threshold")->capture_default_str();
  c.budget_opt = app.add_option("--budget", c.budget, "Examination budget (RSPM)")->check(CLI::PositiveNumber);
  c.alpha_opt = app.add_option("--alpha", c.alpha, "Decay exponent / super-agent alpha")->capture_default_str();
  app.add_option("--trials", c.trials, "Monte Carlo trials")->capture_default_str()->check(CLI::Range(kMinTrials, std::size_t{1} << 40));
  app.add_option("--seed", c.seed, "Base seed")->capture_default_str()->envname("DELEGATE_SEED");
  app.add_option("--reps", c.reps, "Repetitions with seeds seed, seed+1, ...")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", c.out, "Output format")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));

  std::string mechanism;
  std::string dist = "uniform01";
  auto* simulate = app.add_subcommand("simulate", "Run a mechanism on sampled instances");
  simulate->add_option("--mechanism", mechanism, "spm, mspm or rspm")->check(CLI::IsMember({"spm", "mspm", "rspm"}));
  simulate->add_option("--dist", dist, "Joint distribution id")->capture_default_str();

  std::size_t max_profiles = EquilibriumOptions{}.max_profiles;
  auto* equilibrium = app.add_subcommand("equilibrium", "Enumerate pure Nash equilibria of an instance file");
  equilibrium->add_option("--mechanism", mechanism, "mspm or rspm")->check(CLI::IsMember({"spm", "mspm", "rspm"}));
  equilibrium->add_option("--max-profiles", max_profiles, "Search guard")->capture_default_str();

  std::string marginal = "uniform01";
  int samples = 1;
  std::string side = "top";
  auto* orderstats = app.add_subcommand("orderstats", "Order-statistic gaps and lemma checks");
  orderstats->add_option("--dist", marginal, "Marginal id")->capture_default_str();
  orderstats->add_option("--samples", samples, "Use the max of this many draws as the law")->capture_default_str()->check(CLI::PositiveNumber);
  orderstats->add_option("--side", side, "top (Delta) or bottom (delta)")->capture_default_str()->check(CLI::IsMember({"top", "bottom"}));

  std::string formula;
  std::optional<double> eps;
  double L = 1.0;
  int s = 1;
  auto* bounds = app.add_subcommand("bounds", "Closed-form bounds and named instances");
  bounds->add_option("--formula", formula,
                     "bm_threshold, symmetric, mhr, incpdf, incomplete, epsilon, bce_ratio, lopez, prE_lb, "
                     "superagent_bm, superagent_pim, bernoulli_tight, worstcase_bne")
      ->required();
  bounds->add_option("--eps", eps, "Epsilon of the super-agent instances");
  bounds->add_option("--L", L, "Support scale")->capture_default_str();
  bounds->add_option("--s", s, "Order-statistic index for lopez")->capture_default_str();

  std::vector<int> n_list;
  auto* pre = app.add_subcommand("prE", "Probability of the alignment event E");
  pre->add_option("--n-list", n_list, "Several n values (comma separated) for figure data")->delimiter(',');

  auto* bce = app.add_subcommand("bce", "Correlated-equilibrium utility on event E");
  auto* worstbne = app.add_subcommand("worstbne", "Worst-case Bayes-Nash instance");
  auto* threshold = app.add_subcommand("threshold", "Threshold MSPM with x ~ PowerCdf(alpha)");

  std::vector<int> split;
  auto* correspond = app.add_subcommand("correspond", "Single agent vs. the same draws split across agents");
  correspond->add_option("--split", split, "Agent sizes summing to k (comma separated)")->delimiter(',')->required();
  correspond->add_option("--dist", dist, "Joint distribution id")->capture_default_str();

  bool quick = false;
  std::vector<int> only;
  double bound_scale = 1.0;
  auto* verify = app.add_subcommand("verify-all", "Run every acceptance criterion");
  verify->add_flag("--quick", quick, "Fewer trials, 4-sigma margins");
  verify->add_option("--only", only, "Criterion ids (comma separated)")->delimiter(',');
  verify->add_option("--bound-scale", bound_scale, "")->group("");

  std::vector<std::string> args = split_instance_config(argc, argv, c.instance_path);
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return run_simulate(c, mechanism, dist);
    if (*equilibrium) return run_equilibrium(c, mechanism, max_profiles);
    if (*orderstats) return run_orderstats(c, marginal, samples, side);
    if (*bounds) return run_bounds(c, formula, eps, L, s);
    if (*pre) return run_prE(c, n_list);
    if (*bce) {
      return run_mc(c, {{"n", static_cast<long long>(c.n)}, {"k", static_cast<long long>(c.k)}},
                    [&](const McOptions& m) { return estimate_bce_utility(c.n, c.k, m); }, "bce");
    }
    if (*worstbne) {
      return run_mc(c, {{"n", static_cast<long long>(c.n)}, {"k", static_cast<long long>(c.k)}},
                    [&](const McOptions& m) { return estimate_worstcase_bne_utility(c.n, c.k, m); }, "worstbne");
    }
    if (*threshold) {
      const std::optional<double> tau = c.tau_opt->count() > 0 ? std::optional(c.tau) : std::nullopt;
      return run_mc(c,
                    {{"alpha", c.alpha}, {"n", static_cast<long long>(c.n)}, {"k", static_cast<long long>(c.k)}},
                    [&](const McOptions& m) { return estimate_threshold_mechanism_utility(c.alpha, c.n, c.k, m, tau); },
                    "threshold");
    }
    if (*correspond) {
      std::string parts;
      for (int p : split) parts += (parts.empty() ? "" : "x") + std::to_string(p);
      return run_mc(c, {{"k", static_cast<long long>(c.k)}, {"split", parts}, {"tau", c.tau}},
                    [&](const McOptions& m) { return correspondence_experiment(c.k, parse_joint(dist), split, c.tau, m); },
                    "correspond");
    }
    if (*verify) return run_verify_all(c, quick, only, bound_scale);
  } catch (const Error& e) {
    fmt::print(stderr, "error ({}): {}\n", to_string(e.code()), e.what());
    return e.code() == ErrorCode::kInvalidArgument || e.code() == ErrorCode::kParse ? kExitUsage : kExitAssertion;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitAssertion;
  }
  return kExitUsage;
}
