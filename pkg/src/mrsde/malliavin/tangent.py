"""Single-path simulation of X with its first variation Y and inverse Z.

Notes:
-----
K is a law functional, so the per-path system treats it as a given
deterministic input. With dX = b(X) dt + sqrt(eps) sigma(X) dB + dK,

    dY = b'(X) Y dt + sqrt(eps) sigma'(X) Y dB,             Y_0 = 1,
    dZ = -(b'(X) - eps sigma'(X)^2) Z dt - sqrt(eps) sigma'(X) Z dB, Z_0 = 1,

and Y Z = 1 for the exact processes.
"""

import dataclasses

import numpy as np
import numpy.typing as npt

from mrsde.common.exceptions import NonFiniteStateError
from mrsde.common.grid import TimeGrid
from mrsde.common.logger import get_logger
from mrsde.common.noise import NoiseStream
from mrsde.model.spec import ModelSpec
from mrsde.particle.system import simulate

logger = get_logger(__name__)

K_PARTICLES = 10_000


@dataclasses.dataclass(frozen=True, eq=False)
class TangentBundle:
    """One X path with its tangent processes and the noise that drove them.

    Args:
    ----
        grid: time grid
        x: state path
        y: first variation, y[0] = 1
        z: inverse first variation, z[0] = 1
        increments: Brownian increments, one per cell
        k_path: frozen reflection path
        sigma_x: sigma along the path
        epsilon: noise scale

    """

    grid: TimeGrid
    x: npt.NDArray[np.float64]
    y: npt.NDArray[np.float64]
    z: npt.NDArray[np.float64]
    increments: npt.NDArray[np.float64]
    k_path: npt.NDArray[np.float64]
    sigma_x: npt.NDArray[np.float64]
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        for name in ("x", "y", "z", "k_path", "sigma_x"):
            path = self.grid.check_path(getattr(self, name), name).copy()
            path.setflags(write=False)
            object.__setattr__(self, name, path)

        increments = np.array(self.increments, dtype=np.float64)
        if increments.shape != (self.grid.n_steps,):
            expected = (self.grid.n_steps,)
            msg = f"Increments have shape {increments.shape}, grid expects {expected}"
            raise ValueError(msg)
        increments.setflags(write=False)
        object.__setattr__(self, "increments", increments)

    def inverse_defect(self) -> float:
        """max_j |y_j z_j - 1|."""
        return float(np.max(np.abs(self.y * self.z - 1.0)))


def euler_path(
    spec: ModelSpec,
    grid: TimeGrid,
    increments: npt.NDArray[np.float64],
    k_path: npt.NDArray[np.float64],
    epsilon: float,
) -> npt.NDArray[np.float64]:
    """X on the grid for given noise increments and frozen K."""
    sqrt_eps = np.sqrt(epsilon)
    dk = np.diff(k_path)
    x = np.empty(grid.n_steps + 1)
    x[0] = spec.xi

    for j in range(grid.n_steps):
        x[j + 1] = (
            x[j]
            + float(spec.b(x[j])) * grid.dt
            + sqrt_eps * float(spec.sigma(x[j])) * increments[j]
            + dk[j]
        )
        if not np.isfinite(x[j + 1]):
            raise NonFiniteStateError(j + 1, "tangent X path")

    return x


def tangent_simulate(
    spec: ModelSpec,
    grid: TimeGrid,
    seed: int,
    *,
    k_path: npt.ArrayLike | None = None,
    epsilon: float = 1.0,
    stream: int = 0,
    k_particles: int = K_PARTICLES,
) -> TangentBundle:
    """Simulate X, Y, Z along one noise path.

    Args:
    ----
        spec: model with continuously differentiable coefficients
        grid: time grid
        seed: run seed; the path uses particle 0 of the given noise stream
        k_path: frozen reflection path; estimated from a particle run when omitted
        epsilon: noise scale
        stream: noise substream
        k_particles: ensemble size for the K estimate

    Returns:
    -------
        tangent bundle

    """
    if k_path is None:
        logger.info("Estimating K from %s particles", k_particles)
        ensemble = simulate(
            spec,
            grid,
            k_particles,
            epsilon,
            seed,
            stream=stream + 1,
            keep_paths=False,
        )
        k = ensemble.k_path
    else:
        k = grid.check_path(k_path, "k_path")

    dt = grid.dt
    sqrt_eps = np.sqrt(epsilon)
    increments = NoiseStream(seed, stream).path_increments(grid.n_steps, dt)
    x = euler_path(spec, grid, increments, k, epsilon)

    db = spec.b.derivative(x[:-1])
    dsigma = spec.sigma.derivative(x[:-1])
    y_factors = 1.0 + db * dt + sqrt_eps * dsigma * increments
    z_factors = 1.0 - (db - epsilon * dsigma**2) * dt - sqrt_eps * dsigma * increments

    y = np.concatenate([[1.0], np.cumprod(y_factors)])
    z = np.concatenate([[1.0], np.cumprod(z_factors)])
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(z))):
        step = int(np.argmin(np.isfinite(y) & np.isfinite(z)))
        raise NonFiniteStateError(step, "tangent processes")

    return TangentBundle(grid, x, y, z, increments, k, spec.sigma(x), epsilon)


def picard_iterates(
    spec: ModelSpec,
    bundle: TangentBundle,
    n_iterations: int,
) -> npt.NDArray[np.float64]:
    """Sup-distance of Picard approximations to the Euler path.

    Notes:
    -----
    Y^0 = xi + K and Y^{n+1} = xi + int b(Y^n) + sqrt(eps) int sigma(Y^n) dB + K,
    both integrals discretised on the bundle's grid and noise. On a grid of
    N cells iterate N reproduces the Euler path.

    Args:
    ----
        spec: model
        bundle: path, noise and K
        n_iterations: number of Picard steps

    Returns:
    -------
        errors[n] = max_j |Y^n_j - x_j| for n = 0, ..., n_iterations

    """
    if n_iterations < 0:
        msg = f"Number of iterations must be nonnegative, got {n_iterations}"
        raise ValueError(msg)

    dt, sqrt_eps = bundle.grid.dt, np.sqrt(bundle.epsilon)
    iterate = spec.xi + bundle.k_path
    errors = np.empty(n_iterations + 1)
    errors[0] = np.max(np.abs(iterate - bundle.x))

    for n in range(1, n_iterations + 1):
        left = iterate[:-1]
        integrand = spec.b(left) * dt + sqrt_eps * spec.sigma(left) * bundle.increments
        integral = np.concatenate([[0.0], np.cumsum(integrand)])
        iterate = spec.xi + integral + bundle.k_path
        errors[n] = np.max(np.abs(iterate - bundle.x))

    return errors
