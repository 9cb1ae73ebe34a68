"""Deterministic limits: mean-reflected ODE and skeleton equations."""

from mrsde.skeleton.paths import ControlPath, DeterministicPath
from mrsde.skeleton.solvers import (
    solve_mr_ode,
    solve_short_mr_ode,
    solve_short_skeleton,
    solve_skeleton,
)

__all__ = [
    "ControlPath",
    "DeterministicPath",
    "solve_mr_ode",
    "solve_short_mr_ode",
    "solve_short_skeleton",
    "solve_skeleton",
]
