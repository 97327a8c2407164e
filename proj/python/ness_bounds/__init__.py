"""Steady-state currents of open non-interacting fermion and boson systems.

Matrices are numpy arrays (real or complex). Random samplers take an explicit
``seed`` and ``stream`` so results are reproducible.
"""

import json

from ._ness import (
    NessError,
    build_designed_system,
    check_stability,
    current_bound_fermion,
    current_gamma,
    current_infinite_lambda,
    current_lambda,
    current_lower_bound_boson,
    evolve_covariance,
    ness_covariance,
    report,
    sample_goe,
    sample_haar_unitary,
    sample_wishart_channel,
    solve_damped_fixed_point,
    verify_design_saturation,
)
from . import _ness

__all__ = [
    "NessError",
    "build_designed_system",
    "check_stability",
    "current_bound_fermion",
    "current_gamma",
    "current_infinite_lambda",
    "current_lambda",
    "current_lower_bound_boson",
    "evolve_covariance",
    "ness_covariance",
    "report",
    "ribbon_current_density",
    "run_experiment",
    "run_single",
    "sample_goe",
    "sample_haar_unitary",
    "sample_wishart_channel",
    "solve_damped_fixed_point",
    "verify_design_saturation",
]


def ribbon_current_density(spec):
    """Current density of a ribbon given as a dict in the ribbon JSON format."""
    return json.loads(_ness._ribbon_current_density(json.dumps(spec)))


def run_experiment(config, jobs=1):
    """Run a scatter experiment from a config dict.

    Returns ``(csv_text, summary, exit_code)``.
    """
    csv_text, summary, code = _ness._run_experiment(json.dumps(config), jobs)
    return csv_text, json.loads(summary), code


def run_single(inputs):
    """NESS report for explicit matrices given as nested lists."""
    return json.loads(_ness._run_single(json.dumps(inputs)))
