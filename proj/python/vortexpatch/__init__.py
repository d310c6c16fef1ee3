"""Steady vortex patch energy maximization and 2D Euler stability experiments."""

from ._core import (
    BlowUpError,
    ConvergenceFailure,
    Domain,
    Grid,
    InfeasibleConstraint,
    InfeasiblePerturbation,
    MaximizerResult,
    PatchSpec,
    SolverFailure,
    Vec2,
    admissible,
    ascent_step,
    build_grid,
    disk_green_reference,
    eddy_turnover_time,
    energy,
    evolve,
    lp_distance,
    maximizer_omega,
    measure,
    perturb,
    seed_patch,
    solve_maximizer,
    solve_stream,
    threshold_level,
    uniform_field,
    velocity,
)

__all__ = [
    "BlowUpError",
    "ConvergenceFailure",
    "Domain",
    "Grid",
    "InfeasibleConstraint",
    "InfeasiblePerturbation",
    "MaximizerResult",
    "PatchSpec",
    "SolverFailure",
    "Vec2",
    "admissible",
    "ascent_step",
    "build_grid",
    "disk_green_reference",
    "eddy_turnover_time",
    "energy",
    "evolve",
    "lp_distance",
    "maximizer_omega",
    "measure",
    "perturb",
    "seed_patch",
    "solve_maximizer",
    "solve_stream",
    "threshold_level",
    "uniform_field",
    "velocity",
]
