"""Abstract base classes for parametric coefficient and constraint families."""

import abc
from types import ModuleType
from typing import Any

import numpy as np
import numpy.typing as npt
import tensorflow as tf

FloatOrArray = float | npt.NDArray[np.float64]

LIPSCHITZ_FLOOR = 1e-12


class ParametricFn(abc.ABC):
    """Closed-form scalar function of one real variable.

    Notes:
    -----
    Subclasses write their formula once against an `ops` namespace that is
    either `numpy` or `tf.math`, so the same family can be evaluated on
    arrays and differentiated inside a `tf.GradientTape`.

    Args:
    ----
        params: family parameters

    """

    kind: str
    n_params: int

    def __init__(self, params: tuple[float, ...]) -> None:
        if len(params) != self.n_params:
            msg = f"Family {self.kind} takes {self.n_params} params, got {len(params)}"
            raise ValueError(msg)
        if not all(np.isfinite(params)):
            msg = f"Family {self.kind} params must be finite, got {params}"
            raise ValueError(msg)
        self._params = params

    @property
    def params(self) -> tuple[float, ...]:
        return self._params

    @abc.abstractmethod
    def _forward(self, x: Any, ops: ModuleType) -> Any:
        raise NotImplementedError

    @abc.abstractmethod
    def _derivative(self, x: Any, ops: ModuleType) -> Any:
        raise NotImplementedError

    def __call__(self, x: FloatOrArray) -> Any:
        return self._forward(np.asarray(x, dtype=np.float64), np)

    def derivative(self, x: FloatOrArray) -> Any:
        """Closed-form first derivative."""
        return self._derivative(np.asarray(x, dtype=np.float64), np)

    def tf_call(self, x: tf.Tensor) -> tf.Tensor:
        """Evaluate on a float64 tensor (differentiable)."""
        return self._forward(x, tf.math)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(params={list(self._params)})"

    def __eq__(self, other: object) -> bool:
        if type(self) is not type(other):
            return False
        return self._params == other._params  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return hash((self.kind, self._params))


class CoefficientFn(ParametricFn):
    """Drift or diffusion coefficient with a positive Lipschitz bound.

    Notes:
    -----
    `lipschitz_bound` is the exact constant of the family, floored at
    LIPSCHITZ_FLOOR so that constant maps still get a positive bound.
    """

    @property
    def lipschitz_bound(self) -> float:
        return max(self._lipschitz_constant(), LIPSCHITZ_FLOOR)

    @abc.abstractmethod
    def _lipschitz_constant(self) -> float:
        raise NotImplementedError


class ConstraintFn(ParametricFn):
    """Strictly increasing constraint function h with bi-Lipschitz bounds.

    Notes:
    -----
    m |x - y| <= |h(x) - h(y)| <= M |x - y| with 0 < m <= M, and `root` is
    the unique zero of h.
    """

    @property
    @abc.abstractmethod
    def m(self) -> float:
        raise NotImplementedError

    @property
    @abc.abstractmethod
    def M(self) -> float:  # noqa: N802
        raise NotImplementedError

    @property
    @abc.abstractmethod
    def root(self) -> float:
        raise NotImplementedError
