"""Delegated choice toolkit.

Thin wrappers over the compiled core. Instances are lists of agents, each a
list of (x, y) pairs: x is the principal's utility, y the agent's.
"""

import json

from . import _core
from ._core import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    approx_bne_epsilon,
    bce_ratio,
    bernoulli_gap_by_count,
    bm_threshold,
    bne_monotonicity_check,
    budgeted_floor,
    closed_form_prE_lower_bounds,
    constructive_equilibrium,
    correspondence_experiment,
    estimate_bce_utility,
    estimate_pr_event_E,
    estimate_threshold_mechanism_utility,
    estimate_worstcase_bne_utility,
    gap_expectation,
    incomplete_info_lower_bound,
    lopez_bound,
    named_instance_values,
    order_stat_expectation,
    pim_bound_incpdf,
    pim_bound_mhr,
    pim_bound_symmetric,
    run_acceptance,
    run_mechanism,
    super_agent_alpha,
    theorem41_floor,
    worstcase_min_ceiling,
)


def enumerate_pure_nash(agents, mechanism="mspm", tau=0.0, budget=None, priority=()):
    """Equilibrium report as a dict (nash_profiles, floors, constructive, violations)."""
    text = _core.enumerate_pure_nash_json(agents, mechanism, tau, budget, list(priority))
    return json.loads(text)


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
