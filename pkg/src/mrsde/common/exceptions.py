"""Exceptions raised across the package."""

from typing import Any


class ConfigError(ValueError):
    """Invalid run configuration."""


class GridMismatchError(ValueError):
    """Path length does not match the time grid."""


class DegenerateDiffusionError(ValueError):
    """Rate evaluation needs a diffusion bounded away from zero."""


class BracketError(ArithmeticError):
    """Bisection bracket does not contain a sign change."""


class NonFiniteStateError(ArithmeticError):
    """Recursion produced NaN or infinite state.

    Args:
    ----
        step: index of the time step that produced the non-finite state
        where: name of the recursion

    """

    def __init__(self, step: int, where: str) -> None:
        super().__init__(f"Non-finite state in {where} at step {step}")
        self.step = step


class ConvergenceError(RuntimeError):
    """Optimiser exhausted its iteration budget.

    Args:
    ----
        msg: description
        result: best iterate found so far

    """

    def __init__(self, msg: str, result: Any) -> None:
        super().__init__(msg)
        self.result = result
