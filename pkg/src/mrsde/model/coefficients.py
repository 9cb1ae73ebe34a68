"""Registered parametric families for drift and diffusion coefficients."""

from types import ModuleType
from typing import Any

from mrsde.common.constants import CoefficientKinds
from mrsde.common.registry import Categories, Registry
from mrsde.model.base import CoefficientFn


@Registry.register(Categories.COEFFICIENTS, CoefficientKinds.CONSTANT)
class Constant(CoefficientFn):
    """f(x) = a."""

    kind = CoefficientKinds.CONSTANT
    n_params = 1

    def _forward(self, x: Any, ops: ModuleType) -> Any:
        return self._params[0] + 0.0 * x

    def _derivative(self, x: Any, ops: ModuleType) -> Any:
        return 0.0 * x

    def _lipschitz_constant(self) -> float:
        return 0.0


@Registry.register(Categories.COEFFICIENTS, CoefficientKinds.AFFINE)
class Affine(CoefficientFn):
    """f(x) = a + b x."""

    kind = CoefficientKinds.AFFINE
    n_params = 2

    def _forward(self, x: Any, ops: ModuleType) -> Any:
        a, b = self._params
        return a + b * x

    def _derivative(self, x: Any, ops: ModuleType) -> Any:
        return self._params[1] + 0.0 * x

    def _lipschitz_constant(self) -> float:
        return abs(self._params[1])


@Registry.register(Categories.COEFFICIENTS, CoefficientKinds.SIN_AFFINE)
class SinAffine(CoefficientFn):
    """f(x) = a x + c sin(x)."""

    kind = CoefficientKinds.SIN_AFFINE
    n_params = 2

    def _forward(self, x: Any, ops: ModuleType) -> Any:
        a, c = self._params
        return a * x + c * ops.sin(x)

    def _derivative(self, x: Any, ops: ModuleType) -> Any:
        a, c = self._params
        return a + c * ops.cos(x)

    def _lipschitz_constant(self) -> float:
        a, c = self._params
        return abs(a) + abs(c)


@Registry.register(Categories.COEFFICIENTS, CoefficientKinds.SATURATED_LINEAR)
class SaturatedLinear(CoefficientFn):
    """f(x) = a tanh(b x)."""

    kind = CoefficientKinds.SATURATED_LINEAR
    n_params = 2

    def _forward(self, x: Any, ops: ModuleType) -> Any:
        a, b = self._params
        return a * ops.tanh(b * x)

    def _derivative(self, x: Any, ops: ModuleType) -> Any:
        a, b = self._params
        return a * b / ops.cosh(b * x) ** 2

    def _lipschitz_constant(self) -> float:
        a, b = self._params
        return abs(a * b)


def build_coefficient(
    kind: str,
    params: tuple[float, ...] | list[float],
) -> CoefficientFn:
    """Build a coefficient from the registry."""
    coefficient: CoefficientFn = Registry.build(Categories.COEFFICIENTS, kind, params)
    return coefficient
