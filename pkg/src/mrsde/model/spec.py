"""Problem instances and their randomized regularity checks."""

import dataclasses
from collections.abc import Mapping
from typing import Any

import numpy as np
import numpy.typing as npt

from mrsde.common.constants import SPOT_CHECK_PAIRS
from mrsde.model.base import CoefficientFn, ConstraintFn, FloatOrArray, ParametricFn
from mrsde.model.coefficients import build_coefficient
from mrsde.model.constraints import build_constraint

ROOT_TOL = 1e-12
ROUNDING_SLACK = 1e-12  # Relative slack for floating point in spot-checks
DERIVATIVE_GRID = 20_001
CHECK_HALF_WIDTH = 10.0
ADMISSIBLE_START = "initial datum assumption h(xi) >= 0"


@dataclasses.dataclass(frozen=True)
class ModelSpec:
    """Data of a mean-reflected SDE dX = b(X)dt + sigma(X)dB + dK, E[h(X)] >= 0.

    Args:
    ----
        xi: initial datum
        horizon: final time T
        b: drift coefficient
        sigma: diffusion coefficient
        h: constraint function
        sigma_floor: declared lower bound on |sigma| (0 allows degeneracy)
        state_radius: half-width of the window around xi where the floor is checked

    """

    xi: float
    horizon: float
    b: CoefficientFn
    sigma: CoefficientFn
    h: ConstraintFn
    sigma_floor: float = 0.0
    state_radius: float = 5.0

    @property
    def nondegenerate(self) -> bool:
        return self.sigma_floor > 0.0

    @classmethod
    def from_dict(cls, block: Mapping[str, Any]) -> "ModelSpec":
        """Build from the JSON model block {"xi", "T", "b", "sigma", "h", ...}."""
        return cls(
            xi=float(block["xi"]),
            horizon=float(block["T"]),
            b=build_coefficient(block["b"]["kind"], list(block["b"].get("params", []))),
            sigma=build_coefficient(
                block["sigma"]["kind"],
                list(block["sigma"].get("params", [])),
            ),
            h=build_constraint(block["h"]["kind"], list(block["h"].get("params", []))),
            sigma_floor=float(block.get("sigma_floor", 0.0)),
            state_radius=float(block.get("state_radius", 5.0)),
        )


@dataclasses.dataclass(frozen=True)
class Violation:
    """A failed invariant with the sample points that witness it."""

    invariant: str
    detail: str
    witnesses: tuple[float, ...] = ()


@dataclasses.dataclass(frozen=True)
class ValidationReport:
    """Violations (empty when valid) and the observed regularity constants."""

    violations: tuple[Violation, ...]
    observed: dict[str, float]

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid


def evaluate(f: ParametricFn, x: FloatOrArray) -> Any:
    """Evaluate a coefficient or constraint function."""
    return f(x)


def _random_pairs(
    rng: np.random.Generator,
    centre: float,
    half_width: float,
    n_pairs: int,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    # Half the pairs are far apart, half are close to probe local slopes
    x = rng.uniform(centre - half_width, centre + half_width, n_pairs)
    far = rng.uniform(centre - half_width, centre + half_width, n_pairs // 2)
    near = x[n_pairs // 2 :] + rng.normal(0.0, 1e-3, n_pairs - n_pairs // 2)
    y = np.concatenate([far, near])
    keep = x != y

    return x[keep], y[keep]


def _check_lipschitz(
    name: str,
    f: CoefficientFn,
    x: npt.NDArray[np.float64],
    y: npt.NDArray[np.float64],
) -> list[Violation]:
    lhs = np.abs(f(x) - f(y))
    scale = 1.0 + np.maximum(np.abs(f(x)), np.abs(f(y)))
    rhs = f.lipschitz_bound * np.abs(x - y) + ROUNDING_SLACK * scale
    bad = np.flatnonzero(lhs > rhs)
    if bad.size == 0:
        return []

    i = int(bad[0])
    return [
        Violation(
            f"{name} Lipschitz bound",
            f"|{name}(x) - {name}(y)| = {lhs[i]} > {f.lipschitz_bound} |x - y|",
            (float(x[i]), float(y[i])),
        ),
    ]


def _check_constraint(
    h: ConstraintFn,
    x: npt.NDArray[np.float64],
    y: npt.NDArray[np.float64],
) -> tuple[list[Violation], dict[str, float]]:
    violations: list[Violation] = []
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    h_lo, h_hi = h(lo), h(hi)
    gap = hi - lo
    slack = ROUNDING_SLACK * (1.0 + np.maximum(np.abs(h_lo), np.abs(h_hi)))

    bad = np.flatnonzero(h_hi <= h_lo)
    if bad.size:
        i = int(bad[0])
        violations.append(
            Violation(
                "h strictly increasing",
                f"h({lo[i]}) >= h({hi[i]})",
                (float(lo[i]), float(hi[i])),
            ),
        )

    rise = h_hi - h_lo
    bad = np.flatnonzero((rise < h.m * gap - slack) | (rise > h.M * gap + slack))
    if bad.size:
        i = int(bad[0])
        violations.append(
            Violation(
                "h bi-Lipschitz bounds",
                f"slope {rise[i] / gap[i]} outside [{h.m}, {h.M}]",
                (float(lo[i]), float(hi[i])),
            ),
        )

    grid = np.linspace(
        h.root - CHECK_HALF_WIDTH,
        h.root + CHECK_HALF_WIDTH,
        DERIVATIVE_GRID,
    )
    slopes = h.derivative(grid)
    observed = {"m": float(slopes.min()), "M": float(slopes.max())}
    if observed["m"] < h.m - ROUNDING_SLACK or observed["M"] > h.M + ROUNDING_SLACK:
        violations.append(
            Violation(
                "h derivative range",
                f"h' spans [{observed['m']}, {observed['M']}], declared [{h.m}, {h.M}]",
                (float(grid[np.argmin(slopes)]), float(grid[np.argmax(slopes)])),
            ),
        )

    if abs(float(h(h.root))) > ROOT_TOL:
        detail = f"h({h.root}) = {h(h.root)}"
        violations.append(Violation("h(root) = 0", detail, (h.root,)))

    return violations, observed


def validate(
    spec: ModelSpec,
    n_pairs: int = SPOT_CHECK_PAIRS,
    seed: int = 0,
) -> ValidationReport:
    """Check the regularity assumptions of a model by randomized spot-checks.

    Args:
    ----
        spec: model to check
        n_pairs: random pairs per function
        seed: seed of the sampling generator (reports are deterministic)

    Returns:
    -------
        report listing every violated invariant with witnessing points

    """
    rng = np.random.default_rng(seed)
    half_width = max(CHECK_HALF_WIDTH, spec.state_radius)
    violations: list[Violation] = []
    observed: dict[str, float] = {}

    if not (np.isfinite(spec.xi) and np.isfinite(spec.horizon) and spec.horizon > 0.0):
        violations.append(
            Violation(
                "finite data",
                f"xi={spec.xi}, T={spec.horizon}",
                (spec.xi, spec.horizon),
            ),
        )

    for name, coefficient in (("b", spec.b), ("sigma", spec.sigma)):
        x, y = _random_pairs(rng, spec.xi, half_width, n_pairs)
        violations += _check_lipschitz(name, coefficient, x, y)

    x, y = _random_pairs(rng, spec.h.root, half_width, n_pairs)
    h_violations, h_observed = _check_constraint(spec.h, x, y)
    violations += h_violations
    observed.update(h_observed)

    h_xi = float(spec.h(spec.xi))
    if h_xi < 0.0:
        violations.append(
            Violation(
                ADMISSIBLE_START,
                f"{ADMISSIBLE_START} fails: h({spec.xi}) = {h_xi}",
                (spec.xi,),
            ),
        )

    if spec.sigma_floor < 0.0:
        detail = f"sigma_floor = {spec.sigma_floor}"
        violations.append(Violation("sigma_floor >= 0", detail))
    elif spec.sigma_floor > 0.0:
        lo_x, hi_x = spec.xi - spec.state_radius, spec.xi + spec.state_radius
        grid = np.linspace(lo_x, hi_x, DERIVATIVE_GRID)
        magnitude = np.abs(spec.sigma(grid))
        observed["sigma_min"] = float(magnitude.min())
        bad = np.flatnonzero(magnitude < spec.sigma_floor)
        if bad.size:
            i = int(bad[0])
            violations.append(
                Violation(
                    "|sigma| >= sigma_floor",
                    f"|sigma({grid[i]})| = {magnitude[i]} < {spec.sigma_floor}",
                    (float(grid[i]),),
                ),
            )

    return ValidationReport(tuple(violations), observed)
