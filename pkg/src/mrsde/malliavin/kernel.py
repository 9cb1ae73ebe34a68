"""Malliavin derivative kernel D_r X_t on the grid and its diagnostics."""

import dataclasses
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt

from mrsde.common.exceptions import GridMismatchError
from mrsde.common.grid import TimeGrid
from mrsde.common.logger import get_logger
from mrsde.malliavin.tangent import TangentBundle, euler_path
from mrsde.model.spec import ModelSpec
from mrsde.skeleton.paths import ControlPath

logger = get_logger(__name__)


@dataclasses.dataclass(frozen=True, eq=False)
class MalliavinKernel:
    """Dense matrix d[j, k] = D_{t_j} X_{t_k}, zero for j > k.

    Args:
    ----
        grid: time grid
        d: (n_steps + 1, n_steps + 1) upper-triangular matrix

    """

    grid: TimeGrid
    d: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        size = self.grid.n_steps + 1
        d = np.array(self.d, dtype=np.float64)
        if d.shape != (size, size):
            msg = f"Kernel has shape {d.shape}, grid expects ({size}, {size})"
            raise GridMismatchError(msg)
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    def row(self, r_index: int) -> npt.NDArray[np.float64]:
        """D_{t_r} X_{t_k} for k >= r."""
        row: npt.NDArray[np.float64] = self.d[r_index, r_index:]
        return row


@dataclasses.dataclass(frozen=True)
class CameronMartinReport:
    fd_derivative: float
    kernel_pairing: float
    abs_error: float


def _check_index(grid: TimeGrid, index: int, name: str) -> None:
    if not 0 <= index <= grid.n_steps:
        msg = f"{name} {index} outside grid 0..{grid.n_steps}"
        raise IndexError(msg)


def kernel_product(bundle: TangentBundle) -> MalliavinKernel:
    """Product formula D_r X_t = sqrt(eps) Y_t Z_r sigma(X_r) for r <= t.

    The diagonal is set to sqrt(eps) sigma(X_r) exactly.
    """
    scale = np.sqrt(bundle.epsilon) * bundle.sigma_x
    d = np.triu(np.outer(bundle.z * scale, bundle.y))
    np.fill_diagonal(d, scale)

    return MalliavinKernel(bundle.grid, d)


def kernel_direct(
    spec: ModelSpec,
    bundle: TangentBundle,
    r_index: int,
) -> npt.NDArray[np.float64]:
    """Euler solve of the linear equation for D_r X from t_r on the bundle's noise.

    Args:
    ----
        spec: model
        bundle: tangent bundle supplying X and the increments
        r_index: grid index of r

    Returns:
    -------
        D_{t_r} X_{t_k} for k = r, ..., n_steps

    """
    _check_index(bundle.grid, r_index, "r_index")
    sqrt_eps = np.sqrt(bundle.epsilon)
    x = bundle.x[r_index:-1]
    noise = sqrt_eps * spec.sigma.derivative(x) * bundle.increments[r_index:]
    factors = 1.0 + spec.b.derivative(x) * bundle.grid.dt + noise
    start = sqrt_eps * float(bundle.sigma_x[r_index])

    return start * np.concatenate([[1.0], np.cumprod(factors)])


def malliavin_covariance(kernel: MalliavinKernel, t_index: int) -> float:
    """<DX_t, DX_t> as the left-endpoint sum over r < t of d[r, t]^2 dt."""
    _check_index(kernel.grid, t_index, "t_index")
    column = kernel.d[:t_index, t_index]
    return float(np.sum(column**2) * kernel.grid.dt)


def cameron_martin_check(
    spec: ModelSpec,
    bundle: TangentBundle,
    k: ControlPath,
    bump: float,
) -> CameronMartinReport:
    """Directional derivative of X_T along a Cameron-Martin shift, with K frozen.

    Notes:
    -----
    The increments are shifted by bump * k_j * dt and X is re-solved with
    the bundle's K path, which the shift leaves unchanged. The finite
    difference is compared with the pairing sum_j d[j, N] k_j dt.

    Args:
    ----
        spec: model
        bundle: tangent bundle
        k: direction, one value per cell
        bump: finite-difference step (> 0)

    Returns:
    -------
        both derivatives and their absolute difference

    """
    if bump <= 0.0:
        msg = f"Bump must be positive, got {bump}"
        raise ValueError(msg)
    grid = bundle.grid
    if k.grid.n_steps != grid.n_steps:
        msg = f"Direction has {k.grid.n_steps} cells, grid has {grid.n_steps}"
        raise GridMismatchError(msg)

    shifted = bundle.increments + bump * k.phi * grid.dt
    x_bumped = euler_path(spec, grid, shifted, bundle.k_path, bundle.epsilon)
    fd_derivative = (x_bumped[-1] - bundle.x[-1]) / bump

    kernel = kernel_product(bundle)
    kernel_pairing = float(np.sum(kernel.d[:-1, -1] * k.phi) * grid.dt)

    return CameronMartinReport(
        fd_derivative=float(fd_derivative),
        kernel_pairing=kernel_pairing,
        abs_error=abs(float(fd_derivative) - kernel_pairing),
    )


def kernel_moment(kernels: Sequence[MalliavinKernel], p: float) -> float:
    """sup_r E[sup_{s >= r} |D_r X_s|^p] over independent kernels.

    Only a finiteness diagnostic for the moment bound of the derivative.
    """
    if not kernels:
        msg = "Need at least one kernel"
        raise ValueError(msg)
    if p < 1.0:
        msg = f"Moment order must be >= 1, got {p}"
        raise ValueError(msg)
    grid = kernels[0].grid
    if any(kernel.grid != grid for kernel in kernels):
        msg = "Kernels must share one grid"
        raise GridMismatchError(msg)

    row_sups = np.stack([np.max(np.abs(kernel.d) ** p, axis=1) for kernel in kernels])
    return float(np.max(np.mean(row_sups, axis=0)))
