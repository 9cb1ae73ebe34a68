"""Empirical measures on the line and the reflection functionals H and G0.

Notes:
-----
H(x, nu) = int h(x + z) nu(dz) shifts a law by x, and G0(nu) is the
smallest nonnegative shift with H >= 0. Because h is increasing with slope
in [m, M], H(., nu) inherits the same slope bounds, which gives both the
bisection bracket used here and the Lipschitz estimate
|G0(mu) - G0(nu)| <= (M / m) W1(mu, nu).
"""

import dataclasses
from collections.abc import Callable

import numpy as np
import numpy.typing as npt

from mrsde.common.constants import TOL_G0
from mrsde.common.exceptions import BracketError
from mrsde.model.base import ConstraintFn

MAX_BISECTIONS = 200


@dataclasses.dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Equal-weight atom cloud (1/n per atom), atoms sorted nondecreasing.

    Args:
    ----
        atoms: sorted finite atoms, n >= 1

    """

    atoms: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        atoms = np.array(self.atoms, dtype=np.float64)
        if atoms.ndim != 1 or atoms.size == 0:
            msg = f"Empirical measure needs non-empty 1D atoms, got shape {atoms.shape}"
            raise ValueError(msg)
        if not np.all(np.isfinite(atoms)):
            msg = "Empirical measure atoms must be finite"
            raise ValueError(msg)
        if np.any(np.diff(atoms) < 0.0):
            msg = "Atoms must be sorted; use EmpiricalMeasure.from_samples"
            raise ValueError(msg)
        atoms.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_samples(cls, samples: npt.ArrayLike) -> "EmpiricalMeasure":
        """Sort samples into a measure."""
        return cls(np.sort(np.asarray(samples, dtype=np.float64)))

    @classmethod
    def dirac(cls, value: float, n: int = 1) -> "EmpiricalMeasure":
        """Dirac mass at value, represented by n identical atoms."""
        return cls(np.full(n, float(value)))

    @property
    def n(self) -> int:
        return int(self.atoms.size)

    def mean(self) -> float:
        return float(np.mean(self.atoms))

    def shifted(self, c: float) -> "EmpiricalMeasure":
        """Push-forward under z -> z + c."""
        return EmpiricalMeasure(self.atoms + c)


def h_mean(h: ConstraintFn, x: float, nu: EmpiricalMeasure) -> float:
    """H(x, nu) = (1/n) sum_i h(x + atom_i), summed in ascending atom order."""
    return float(np.mean(h(x + nu.atoms)))


def bisect_root(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    x_tol: float = 0.0,
    f_tol: float = 0.0,
    max_iter: int = MAX_BISECTIONS,
) -> float:
    """Bisection for an increasing function with fn(lo) < 0 <= fn(hi).

    Notes:
    -----
    The upper end of the bracket is returned, so fn(result) >= 0. Stops when
    the bracket is narrower than x_tol, when fn(hi) <= f_tol, or when no
    floating point midpoint remains.

    Args:
    ----
        fn: increasing function
        lo: lower bracket end
        hi: upper bracket end
        x_tol: bracket width tolerance
        f_tol: residual tolerance on fn(hi)
        max_iter: maximum number of halvings

    Returns:
    -------
        upper end of the final bracket

    """
    f_hi = fn(hi)
    if f_hi < 0.0:
        msg = f"Bracket [{lo}, {hi}] has fn(hi) = {f_hi} < 0"
        raise BracketError(msg)
    if f_hi <= f_tol:
        return hi

    f_lo = fn(lo)
    if f_lo >= 0.0:
        if f_lo <= f_tol:
            return lo
        msg = f"Bracket [{lo}, {hi}] has fn(lo) = {f_lo} > 0"
        raise BracketError(msg)

    for _ in range(max_iter):
        if hi - lo <= x_tol:
            break
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        f_mid = fn(mid)
        if f_mid >= 0.0:
            hi = mid
            if f_mid <= f_tol:
                break
        else:
            lo = mid

    return hi


def g0(h: ConstraintFn, nu: EmpiricalMeasure, tol: float = TOL_G0) -> float:
    """G0(nu) = inf{x >= 0 : H(x, nu) >= 0}.

    Args:
    ----
        h: constraint function with bi-Lipschitz bounds m, M
        nu: empirical measure
        tol: root tolerance in units of H (|H(result)| <= tol m)

    Returns:
    -------
        nonnegative reflection amount

    """
    if tol <= 0.0:
        msg = f"Tolerance must be positive, got {tol}"
        raise ValueError(msg)

    h0 = h_mean(h, 0.0, nu)
    if h0 >= 0.0:
        return 0.0

    # H(x) - H(0) lies in [m x, M x], so the root sits in [-H0/M, -H0/m]
    lo = -h0 / h.M
    hi = -h0 / h.m + 0.5 * tol

    return bisect_root(lambda x: h_mean(h, x, nu), lo, hi, f_tol=tol * h.m)


def w1(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """Exact W1 between equal-size equal-weight clouds: mean gap of sorted atoms."""
    if mu.n != nu.n:
        msg = f"W1 needs equal-size clouds, got {mu.n} and {nu.n}"
        raise ValueError(msg)

    return float(np.mean(np.abs(mu.atoms - nu.atoms)))
