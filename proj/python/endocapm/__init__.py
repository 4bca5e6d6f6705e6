"""Equilibrium asset returns with an endogenously consistent market return."""

from endocapm._endocapm import (
    EndocapmError,
    EquilibriumSolution,
    RangeResult,
    SolutionFamily,
    SweepRecord,
    capm_residual,
    default_grid,
    endogenous_jacobian,
    fd_jacobian,
    market_return,
    normalized_hhi,
    optimize_return_range,
    power_law_weights,
    sample_constrained_beta,
    solution_family,
    solve_equilibrium,
    standard_jacobian,
    sweep_concentration,
    sweep_records_to_csv,
)

__all__ = [
    "EndocapmError",
    "EquilibriumSolution",
    "RangeResult",
    "SolutionFamily",
    "SweepRecord",
    "capm_residual",
    "default_grid",
    "endogenous_jacobian",
    "fd_jacobian",
    "market_return",
    "normalized_hhi",
    "optimize_return_range",
    "power_law_weights",
    "sample_constrained_beta",
    "solution_family",
    "solve_equilibrium",
    "standard_jacobian",
    "sweep_concentration",
    "sweep_records_to_csv",
]
