"""Registered parametric families for the constraint function h."""

from types import ModuleType
from typing import Any

from mrsde.common.constants import ConstraintKinds
from mrsde.common.registry import Categories, Registry
from mrsde.model.base import ConstraintFn


@Registry.register(Categories.CONSTRAINTS, ConstraintKinds.IDENTITY)
class Identity(ConstraintFn):
    """h(z) = z."""

    kind = ConstraintKinds.IDENTITY
    n_params = 0

    def _forward(self, x: Any, ops: ModuleType) -> Any:
        return 1.0 * x

    def _derivative(self, x: Any, ops: ModuleType) -> Any:
        return 1.0 + 0.0 * x

    @property
    def m(self) -> float:
        return 1.0

    @property
    def M(self) -> float:  # noqa: N802
        return 1.0

    @property
    def root(self) -> float:
        return 0.0


@Registry.register(Categories.CONSTRAINTS, ConstraintKinds.SHIFTED_IDENTITY)
class ShiftedIdentity(ConstraintFn):
    """h(z) = z - c."""

    kind = ConstraintKinds.SHIFTED_IDENTITY
    n_params = 1

    def _forward(self, x: Any, ops: ModuleType) -> Any:
        return x - self._params[0]

    def _derivative(self, x: Any, ops: ModuleType) -> Any:
        return 1.0 + 0.0 * x

    @property
    def m(self) -> float:
        return 1.0

    @property
    def M(self) -> float:  # noqa: N802
        return 1.0

    @property
    def root(self) -> float:
        return self._params[0]


@Registry.register(Categories.CONSTRAINTS, ConstraintKinds.AFFINE)
class AffineConstraint(ConstraintFn):
    """h(z) = a + b z with b > 0."""

    kind = ConstraintKinds.AFFINE
    n_params = 2

    def __init__(self, params: tuple[float, ...]) -> None:
        super().__init__(params)
        if self._params[1] <= 0.0:
            msg = f"Affine constraint needs a positive slope, got {self._params[1]}"
            raise ValueError(msg)

    def _forward(self, x: Any, ops: ModuleType) -> Any:
        a, b = self._params
        return a + b * x

    def _derivative(self, x: Any, ops: ModuleType) -> Any:
        return self._params[1] + 0.0 * x

    @property
    def m(self) -> float:
        return self._params[1]

    @property
    def M(self) -> float:  # noqa: N802
        return self._params[1]

    @property
    def root(self) -> float:
        a, b = self._params
        return -a / b


@Registry.register(Categories.CONSTRAINTS, ConstraintKinds.SIN_AFFINE_MONOTONE)
class SinAffineMonotone(ConstraintFn):
    """h(z) = a (z - s) + c sin(z - s) with a > |c|.

    Notes:
    -----
    The shift s is optional (defaults to 0) so both `[a, c]` and `[a, c, s]`
    are accepted; h' = a + c cos(z - s) ranges over [a - |c|, a + |c|].
    """

    kind = ConstraintKinds.SIN_AFFINE_MONOTONE
    n_params = 3

    def __init__(self, params: tuple[float, ...]) -> None:
        if len(params) == 2:
            params = (*params, 0.0)
        super().__init__(params)
        a, c, _ = self._params
        if a <= abs(c):
            msg = f"Sin-affine constraint needs a > |c|, got a={a}, c={c}"
            raise ValueError(msg)

    def _forward(self, x: Any, ops: ModuleType) -> Any:
        a, c, s = self._params
        return a * (x - s) + c * ops.sin(x - s)

    def _derivative(self, x: Any, ops: ModuleType) -> Any:
        a, c, s = self._params
        return a + c * ops.cos(x - s)

    @property
    def m(self) -> float:
        a, c, _ = self._params
        return a - abs(c)

    @property
    def M(self) -> float:  # noqa: N802
        a, c, _ = self._params
        return a + abs(c)

    @property
    def root(self) -> float:
        return self._params[2]


def build_constraint(
    kind: str,
    params: tuple[float, ...] | list[float] = (),
) -> ConstraintFn:
    """Build a constraint function from the registry."""
    constraint: ConstraintFn = Registry.build(Categories.CONSTRAINTS, kind, params)
    return constraint
