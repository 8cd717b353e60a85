#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "delegate/acceptance.hpp"
#include "delegate/bounds.hpp"
#include "delegate/equilibrium.hpp"
#include "delegate/error.hpp"
#include "delegate/experiments.hpp"
#include "delegate/instance.hpp"
#include "delegate/mechanisms.hpp"
#include "delegate/orderstats.hpp"

namespace py = pybind11;
using namespace delegate;

namespace {

using Pairs = std::vector<std::vector<std::pair<double, double>>>;

RealizedInstance to_instance(const Pairs& agents) {
  std::vector<std::vector<Solution>> sols;
  for (const auto& a : agents) {
    std::vector<Solution> row;
    for (const auto& [x, y] : a) row.emplace_back(x, y);
    sols.push_back(std::move(row));
  }
  return RealizedInstance(std::move(sols));
}

MechanismSpec to_mechanism(const std::string& kind, std::size_t n, double tau, std::optional<int> budget,
                           std::vector<AgentIndex> priority) {
  if (kind == "spm") return MechanismSpec::spm(tau);
  if (kind == "mspm") return MechanismSpec::mspm(n, tau, std::move(priority));
  if (kind == "rspm") {
    require(budget.has_value(), "rspm needs a budget");
    return MechanismSpec::rspm(n, tau, *budget, std::move(priority));
  }
  throw Error(ErrorCode::kInvalidArgument, "mechanism must be spm, mspm or rspm, got '" + kind + "'");
}

McOptions mc(std::size_t trials, std::uint64_t seed) {
  McOptions o;
  o.trials = trials;
  o.seed = seed;
  return o;
}

py::dict to_dict(const McResult& r) {
  py::dict d;
  d["name"] = r.name;
  d["estimate"] = r.estimate;
  d["std_err"] = r.std_err;
  d["trials"] = r.trials;
  d["seed"] = r.seed;
  py::dict refs, est;
  for (const auto& [k, v] : r.refs) refs[py::str(k)] = v;
  for (const auto& [k, v] : r.estimates) est[py::str(k)] = v;
  d["refs"] = refs;
  d["estimates"] = est;
  py::list checks;
  for (const auto& c : r.checks) {
    py::dict cd;
    cd["name"] = c.name;
    cd["value"] = c.value;
    cd["relation"] = c.relation;
    cd["reference"] = c.reference;
    cd["slack"] = c.slack;
    cd["pass"] = c.pass;
    checks.append(cd);
  }
  d["checks"] = checks;
  d["pass"] = r.passed();
  return d;
}

py::dict to_dict(const Outcome& o) {
  py::dict d;
  if (o.winner) d["winner"] = py::make_tuple(o.winner->agent, o.winner->slot);
  else d["winner"] = py::none();
  d["principal_utility"] = o.principal_utility;
  d["agent_utilities"] = o.agent_utilities;
  return d;
}

/// Runs `f` without the GIL; the Monte Carlo drivers spawn their own threads.
template <class F>
auto released(F f) {
  py::gil_scoped_release release;
  return f();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Delegated choice: mechanisms, equilibria, order statistics and bound experiments";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(to_string(e.code())) + ": " + e.what();
      if (e.code() == ErrorCode::kInvalidArgument || e.code() == ErrorCode::kParse) {
        PyErr_SetString(PyExc_ValueError, msg.c_str());
      } else {
        PyErr_SetString(PyExc_RuntimeError, msg.c_str());
      }
    }
  });

  m.attr("DEFAULT_SEED") = kDefaultSeed;
  m.attr("DEFAULT_TRIALS") = kDefaultTrials;

  // core / mechanisms
  m.def(
      "theorem41_floor", [](std::vector<double> fb, double tau) { return theorem41_floor(fb, tau); },
      py::arg("first_bests_desc"), py::arg("tau"));
  m.def(
      "budgeted_floor",
      [](std::vector<double> fb, double tau, std::optional<int> budget) { return budgeted_floor(fb, tau, budget); },
      py::arg("first_bests_desc"), py::arg("tau"), py::arg("budget") = py::none());
  m.def(
      "run_mechanism",
      [](const Pairs& agents, std::vector<std::optional<std::size_t>> choices, const std::string& kind, double tau,
         std::optional<int> budget, std::vector<AgentIndex> priority) {
        const auto inst = to_instance(agents);
        const auto spec = to_mechanism(kind, inst.n(), tau, budget, std::move(priority));
        py::list out;
        for (const auto& w : run_mechanism(inst, spec, {std::move(choices)})) {
          py::dict d = to_dict(w.outcome);
          d["prob"] = w.prob;
          out.append(d);
        }
        return out;
      },
      py::arg("agents"), py::arg("choices"), py::arg("mechanism") = "mspm", py::arg("tau") = 0.0,
      py::arg("budget") = py::none(), py::arg("priority") = std::vector<AgentIndex>{},
      "Outcome distribution as a list of dicts with 'prob'. `agents` holds (x, y) pairs; "
      "a choice of None abstains.");

  // equilibrium
  m.def(
      "constructive_equilibrium",
      [](const Pairs& agents, double tau, std::vector<AgentIndex> priority) {
        const auto inst = to_instance(agents);
        const auto spec = inst.n() == 1 ? MechanismSpec::spm(tau) : MechanismSpec::mspm(inst.n(), tau, std::move(priority));
        return constructive_equilibrium(inst, spec).choices;
      },
      py::arg("agents"), py::arg("tau") = 0.0, py::arg("priority") = std::vector<AgentIndex>{});
  m.def(
      "enumerate_pure_nash_json",
      [](const Pairs& agents, const std::string& kind, double tau, std::optional<int> budget,
         std::vector<AgentIndex> priority) {
        const auto inst = to_instance(agents);
        const auto spec = to_mechanism(kind, inst.n(), tau, budget, std::move(priority));
        return to_json(enumerate_pure_nash(inst, spec)).dump();
      },
      py::arg("agents"), py::arg("mechanism") = "mspm", py::arg("tau") = 0.0, py::arg("budget") = py::none(),
      py::arg("priority") = std::vector<AgentIndex>{});
  m.def(
      "bne_monotonicity_check",
      [](int n, int k, const std::string& marginal) {
        return bne_monotonicity_check(n, k, parse_marginal(marginal)).strictly_decreasing;
      },
      py::arg("n"), py::arg("k"), py::arg("marginal") = "uniform01");

  // orderstats
  auto side_of = [](const std::string& s) {
    require(s == "top" || s == "bottom", "side must be 'top' or 'bottom'");
    return s == "top" ? GapSide::kTop : GapSide::kBottom;
  };
  m.def(
      "gap_expectation",
      [side_of](const std::string& marginal, int n, int k, const std::string& side, int samples) {
        return gap_expectation({MaxOfK(parse_marginal(marginal), samples), n, k, side_of(side)});
      },
      py::arg("marginal"), py::arg("n"), py::arg("k"), py::arg("side") = "top", py::arg("samples") = 1);
  m.def(
      "order_stat_expectation",
      [](const std::string& marginal, int r, int n, int samples) {
        return order_stat_expectation(MaxOfK(parse_marginal(marginal), samples), r, n);
      },
      py::arg("marginal"), py::arg("r"), py::arg("n"), py::arg("samples") = 1);
  m.def("lopez_bound", &lopez_bound, py::arg("n"), py::arg("s"), py::arg("L") = 1.0);
  m.def("bernoulli_gap_by_count", &bernoulli_gap_by_count, py::arg("p"), py::arg("n"), py::arg("k"));

  // bounds
  m.def(
      "bm_threshold",
      [](double alpha, int n, int k) {
        const auto b = bm_threshold(alpha, n, k);
        py::dict d;
        d["r"] = b.r;
        d["guarantee"] = b.guarantee;
        d["guarantee_factored"] = b.guarantee_factored;
        d["ratio_form"] = b.ratio_form;
        return d;
      },
      py::arg("alpha"), py::arg("n"), py::arg("k"));
  m.def("pim_bound_symmetric", &pim_bound_symmetric, py::arg("n"), py::arg("L") = 1.0);
  m.def("pim_bound_mhr", &pim_bound_mhr, py::arg("k"));
  m.def("pim_bound_incpdf", &pim_bound_incpdf, py::arg("n"), py::arg("k"));
  m.def("incomplete_info_lower_bound", &incomplete_info_lower_bound, py::arg("n"), py::arg("k"));
  m.def("worstcase_min_ceiling", &worstcase_min_ceiling, py::arg("n"), py::arg("k"));
  m.def("approx_bne_epsilon", &approx_bne_epsilon, py::arg("n"));
  m.def("bce_ratio", &bce_ratio, py::arg("n"));
  m.def("super_agent_alpha", &super_agent_alpha, py::arg("eps"));
  m.def(
      "named_instance_values",
      [](const std::string& kind, double alpha, double L, double eps, int n, int k) {
        NamedInstance named;
        if (kind == "superagent_bm") named = NamedInstance::super_agent_bm(alpha);
        else if (kind == "superagent_pim") named = NamedInstance::super_agent_pim(L, eps);
        else if (kind == "bernoulli_tight") named = NamedInstance::bernoulli_tight(n, k);
        else if (kind == "worstcase_bne") named = NamedInstance::worstcase_bne(n, k);
        else throw Error(ErrorCode::kInvalidArgument, "unknown named instance '" + kind + "'");
        py::dict d;
        for (const auto& [name, v] : materialize(named).expected) d[py::str(name)] = v;
        return d;
      },
      py::arg("kind"), py::arg("alpha") = 0.0, py::arg("L") = 1.0, py::arg("eps") = 0.0, py::arg("n") = 2,
      py::arg("k") = 1);

  // experiments
  m.def(
      "closed_form_prE_lower_bounds",
      [](int n, int k) {
        const auto b = closed_form_prE_lower_bounds(n, k);
        return py::make_tuple(b.product_lb, b.exp_lb);
      },
      py::arg("n"), py::arg("k"));
  m.def(
      "estimate_pr_event_E",
      [](int n, int k, std::size_t trials, std::uint64_t seed) {
        return to_dict(released([&] { return estimate_pr_event_E(n, k, mc(trials, seed)); }));
      },
      py::arg("n"), py::arg("k"), py::arg("trials") = kDefaultTrials, py::arg("seed") = kDefaultSeed);
  m.def(
      "estimate_bce_utility",
      [](int n, int k, std::size_t trials, std::uint64_t seed) {
        return to_dict(released([&] { return estimate_bce_utility(n, k, mc(trials, seed)); }));
      },
      py::arg("n"), py::arg("k"), py::arg("trials") = kDefaultTrials, py::arg("seed") = kDefaultSeed);
  m.def(
      "estimate_worstcase_bne_utility",
      [](int n, int k, std::size_t trials, std::uint64_t seed) {
        return to_dict(released([&] { return estimate_worstcase_bne_utility(n, k, mc(trials, seed)); }));
      },
      py::arg("n"), py::arg("k"), py::arg("trials") = kDefaultTrials, py::arg("seed") = kDefaultSeed);
  m.def(
      "estimate_threshold_mechanism_utility",
      [](double alpha, int n, int k, std::size_t trials, std::uint64_t seed, std::optional<double> tau) {
        return to_dict(
            released([&] { return estimate_threshold_mechanism_utility(alpha, n, k, mc(trials, seed), tau); }));
      },
      py::arg("alpha"), py::arg("n"), py::arg("k"), py::arg("trials") = kDefaultTrials,
      py::arg("seed") = kDefaultSeed, py::arg("tau") = py::none());
  m.def(
      "correspondence_experiment",
      [](int k, const std::string& dist, std::vector<int> split, double tau, std::size_t trials, std::uint64_t seed) {
        const auto joint = parse_joint(dist);
        return to_dict(released([&] { return correspondence_experiment(k, joint, split, tau, mc(trials, seed)); }));
      },
      py::arg("k"), py::arg("dist"), py::arg("split"), py::arg("tau") = 0.0, py::arg("trials") = kDefaultTrials,
      py::arg("seed") = kDefaultSeed);

  m.def(
      "run_acceptance",
      [](bool quick, std::vector<int> only, std::uint64_t seed) {
        AcceptanceOptions o;
        o.quick = quick;
        o.seed = seed;
        const auto results = released([&] { return run_acceptance(o, only); });
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["id"] = r.id;
          d["title"] = r.title;
          d["pass"] = r.pass;
          d["detail"] = r.detail;
          d["seconds"] = r.seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("quick") = false, py::arg("only") = std::vector<int>{}, py::arg("seed") = kDefaultSeed);
}
