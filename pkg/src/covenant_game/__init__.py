"""Equilibrium solver for covenant accounting adjustments.

A manager who privately learns the error in the default accounting rule
chooses whether to disclose it; lenders price debt to break even on either
message.  The package solves that disclosure subgame, the manager's effort
to become informed, and the threshold's comparative statics, and checks
the results by brute force and simulation.
"""

from .effort import EffortSolution, first_best_effort, marginal_benefit, solve_effort
from .equilibrium import EquilibriumSolution, solve_equilibrium, solve_threshold, verify_best_response
from .model import (
    BENCHMARK,
    DerivedConstants,
    ErrorDensity,
    ModelParams,
    PayoffCell,
    derived_constants,
    payoff_table,
    validate_params,
)
from .montecarlo import SimulationReport, simulate
from .statics import SignTable, closed_form_threshold_uniform, dxstar_dparam, sign_tables

__all__ = [
    "BENCHMARK",
    "DerivedConstants",
    "EffortSolution",
    "EquilibriumSolution",
    "ErrorDensity",
    "ModelParams",
    "PayoffCell",
    "SignTable",
    "SimulationReport",
    "closed_form_threshold_uniform",
    "derived_constants",
    "dxstar_dparam",
    "first_best_effort",
    "marginal_benefit",
    "payoff_table",
    "sign_tables",
    "simulate",
    "solve_effort",
    "solve_equilibrium",
    "solve_threshold",
    "validate_params",
    "verify_best_response",
]
