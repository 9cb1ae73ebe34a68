"""Endpoint rates inf{I(g) : g(T) = target} over piecewise-constant controls.

Notes:
-----
The terminal map phi -> Y^phi_T of the discretised skeleton is written as a
`tf.scan` over the Euler steps, and its gradient comes from reverse-mode
differentiation of that recursion (the discrete adjoint). The terminal
constraint is handled by an augmented Lagrangian; each subproblem is solved
by projected gradient descent with Barzilai-Borwein steps.
"""

import numpy as np
import numpy.typing as npt
import tensorflow as tf

from mrsde.common.constants import TOL_STATIONARY, TOL_TERMINAL, RateModes
from mrsde.common.exceptions import (
    ConvergenceError,
    DegenerateDiffusionError,
    NonFiniteStateError,
)
from mrsde.common.grid import TimeGrid
from mrsde.common.logger import get_logger
from mrsde.model.spec import ModelSpec
from mrsde.rate.path import RateResult, require_unit_horizon
from mrsde.skeleton.paths import ControlPath
from mrsde.skeleton.solvers import solve_mr_ode

logger = get_logger(__name__)

ARMIJO = 1e-4
MAX_BACKTRACKS = 50
MIN_STEP, MAX_STEP = 1e-10, 1e10
GAP_SHRINK = 0.25
PENALTY_GROWTH = 10.0


class EndpointProblem:
    """Terminal map of the skeleton and the augmented Lagrangian built on it.

    Notes:
    -----
    Gradients with respect to phi are returned in R^n (one entry per cell);
    dividing by dt gives the L2([0, T]) gradient.

    Args:
    ----
        spec: model
        grid: time grid
        k0: frozen reflection path (zeros in short-time mode)
        with_drift: include b in the dynamics (False in short-time mode)
        bound: optional energy bound N; iterates are projected onto the ball S_N

    """

    def __init__(
        self,
        spec: ModelSpec,
        grid: TimeGrid,
        k0: npt.ArrayLike,
        *,
        with_drift: bool = True,
        bound: float | None = None,
    ) -> None:
        if bound is not None and bound <= 0.0:
            msg = f"Energy bound must be positive, got {bound}"
            raise ValueError(msg)

        self.spec = spec
        self.grid = grid
        self.bound = bound
        self._with_drift = with_drift
        self._dk = tf.constant(np.diff(grid.check_path(k0, "k0")), dtype=tf.float64)
        self._terminal_and_gradient = tf.function(
            self._tf_terminal_and_gradient,
            input_signature=[tf.TensorSpec(shape=[grid.n_steps], dtype=tf.float64)],
        )

    def _tf_terminal_and_gradient(self, phi: tf.Tensor) -> tuple[tf.Tensor, tf.Tensor]:
        dt = tf.constant(self.grid.dt, dtype=tf.float64)
        y0 = tf.constant(self.spec.xi, dtype=tf.float64)

        def step(y: tf.Tensor, cell: tuple[tf.Tensor, tf.Tensor]) -> tf.Tensor:
            phi_j, dk_j = cell
            velocity = self.spec.sigma.tf_call(y) * phi_j
            if self._with_drift:
                velocity += self.spec.b.tf_call(y)
            return y + velocity * dt + dk_j

        with tf.GradientTape() as tape:
            tape.watch(phi)
            states = tf.scan(step, (phi, self._dk), initializer=y0)
            terminal = states[-1]

        return terminal, tape.gradient(terminal, phi)

    def terminal_and_gradient(
        self,
        phi: npt.ArrayLike,
    ) -> tuple[float, npt.NDArray[np.float64]]:
        """Y^phi_T and its gradient with respect to phi."""
        tf_phi = tf.constant(phi, dtype=tf.float64)
        tf_terminal, tf_grad = self._terminal_and_gradient(tf_phi)
        terminal = float(tf_terminal.numpy())
        if not np.isfinite(terminal):
            raise NonFiniteStateError(self.grid.n_steps, "skeleton terminal map")

        return terminal, tf_grad.numpy()

    def terminal(self, phi: npt.ArrayLike) -> float:
        return self.terminal_and_gradient(phi)[0]

    def energy(self, phi: npt.NDArray[np.float64]) -> float:
        return 0.5 * float(np.sum(phi**2)) * self.grid.dt

    def objective(
        self,
        phi: npt.ArrayLike,
        target: float,
        multiplier: float = 0.0,
        penalty: float = 0.0,
    ) -> float:
        """Augmented Lagrangian E(phi) + lambda (Y_T - a) + rho / 2 (Y_T - a)^2."""
        phi = np.asarray(phi, dtype=np.float64)
        gap = self.terminal(phi) - target
        return self.energy(phi) + multiplier * gap + 0.5 * penalty * gap**2

    def gradient(
        self,
        phi: npt.ArrayLike,
        target: float,
        multiplier: float = 0.0,
        penalty: float = 0.0,
    ) -> npt.NDArray[np.float64]:
        """Gradient of `objective` in R^n."""
        phi = np.asarray(phi, dtype=np.float64)
        terminal, grad = self.terminal_and_gradient(phi)
        weight = multiplier + penalty * (terminal - target)
        gradient: npt.NDArray[np.float64] = phi * self.grid.dt + weight * grad
        return gradient

    def project(self, phi: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Radial projection onto {E(phi) <= N}."""
        if self.bound is None:
            return phi
        energy = self.energy(phi)
        if energy <= self.bound:
            return phi
        return phi * np.sqrt(self.bound / energy)

    def _evaluate(
        self,
        phi: npt.NDArray[np.float64],
        target: float,
        multiplier: float,
        penalty: float,
    ) -> tuple[float, float, npt.NDArray[np.float64]]:
        """Objective, terminal gap and L2 gradient in one pass."""
        terminal, grad = self.terminal_and_gradient(phi)
        gap = terminal - target
        weight = multiplier + penalty * gap
        value = self.energy(phi) + multiplier * gap + 0.5 * penalty * gap**2
        return value, gap, phi + weight * grad / self.grid.dt

    def stationarity(
        self,
        phi: npt.NDArray[np.float64],
        l2_grad: npt.NDArray[np.float64],
    ) -> float:
        """L2 norm of the projected-gradient residual phi - P(phi - G)."""
        residual = phi - self.project(phi - l2_grad)
        return float(np.sqrt(np.sum(residual**2) * self.grid.dt))

    def minimise(
        self,
        phi: npt.NDArray[np.float64],
        target: float,
        multiplier: float,
        penalty: float,
        *,
        tol: float = TOL_STATIONARY,
        max_iter: int = 1000,
    ) -> tuple[npt.NDArray[np.float64], float, int]:
        """Projected gradient with Barzilai-Borwein steps and Armijo backtracking.

        Returns:
        -------
            final control, stationarity measure, iterations used

        """
        dt = self.grid.dt
        phi = self.project(phi)
        value, _, l2_grad = self._evaluate(phi, target, multiplier, penalty)
        step = 1.0

        for iteration in range(max_iter):
            norm = self.stationarity(phi, l2_grad)
            if norm <= tol:
                return phi, norm, iteration

            for _ in range(MAX_BACKTRACKS):
                candidate = self.project(phi - step * l2_grad)
                cand_value, _, cand_grad = self._evaluate(
                    candidate,
                    target,
                    multiplier,
                    penalty,
                )
                decrease = float(np.sum(l2_grad * (candidate - phi))) * dt
                if cand_value <= value + ARMIJO * decrease:
                    break
                step *= 0.5
            else:
                logger.warning(
                    "Line search stalled at iteration %s (stationarity %s)",
                    iteration,
                    norm,
                )
                return phi, norm, iteration

            s = candidate - phi
            y = cand_grad - l2_grad
            curvature = float(np.sum(s * y))
            if curvature > 0.0:
                step = float(np.clip(np.sum(s * s) / curvature, MIN_STEP, MAX_STEP))
            else:
                step = 1.0
            phi, value, l2_grad = candidate, cand_value, cand_grad

        return phi, self.stationarity(phi, l2_grad), max_iter


def endpoint_rate(
    spec: ModelSpec,
    target: float,
    mode: str,
    grid: TimeGrid,
    *,
    bound: float | None = None,
    tol_terminal: float = TOL_TERMINAL,
    tol_stationary: float = TOL_STATIONARY,
    initial_penalty: float = 10.0,
    max_outer: int = 50,
    max_inner: int = 1000,
) -> RateResult:
    """Endpoint rate by minimising control energy subject to Y^phi_T = target.

    Notes:
    -----
    The returned value is the energy of a feasible, stationary control and
    hence an upper bound on the infimum; it is exact for convex instances.
    The penalty weight grows tenfold whenever the terminal gap fails to
    shrink by a factor four between outer iterations.

    Args:
    ----
        spec: model with sigma_floor > 0
        target: terminal value a
        mode: `small-noise` (frozen K0) or `short-time` (no drift, unit horizon)
        grid: time grid
        bound: optional energy bound N
        tol_terminal: tolerance on |Y_T - a|
        tol_stationary: tolerance on the L2 norm of the projected gradient
        initial_penalty: starting penalty weight
        max_outer: outer (multiplier) iterations
        max_inner: inner iterations per outer iteration

    Returns:
    -------
        rate with its optimal control and diagnostics

    """
    if not spec.nondegenerate:
        msg = "Endpoint rate needs sigma_floor > 0"
        raise DegenerateDiffusionError(msg)
    if not np.isfinite(target):
        msg = f"Target must be finite, got {target}"
        raise ValueError(msg)

    if mode == RateModes.SMALL_NOISE:
        problem = EndpointProblem(spec, grid, solve_mr_ode(spec, grid).k, bound=bound)
    elif mode == RateModes.SHORT_TIME:
        require_unit_horizon(grid)
        problem = EndpointProblem(
            spec,
            grid,
            np.zeros(grid.n_steps + 1),
            with_drift=False,
            bound=bound,
        )
    else:
        msg = f"Rate mode {mode} not supported"
        raise ValueError(msg)

    phi = np.zeros(grid.n_steps)
    multiplier, penalty = 0.0, initial_penalty
    previous_gap = np.inf
    iterations = 0
    gap, norm = np.inf, np.inf

    for outer in range(max_outer):
        phi, norm, used = problem.minimise(
            phi,
            target,
            multiplier,
            penalty,
            tol=tol_stationary,
            max_iter=max_inner,
        )
        iterations += used
        gap = problem.terminal(phi) - target
        logger.info(
            "Outer iteration %s: gap %.3e, stationarity %.3e, penalty %.1e",
            outer,
            gap,
            norm,
            penalty,
        )

        if abs(gap) <= tol_terminal and norm <= tol_stationary:
            control = ControlPath(grid, phi, bound)
            return RateResult(control.energy, control, iterations, norm, True, gap)

        multiplier += penalty * gap
        if abs(gap) > GAP_SHRINK * previous_gap:
            penalty *= PENALTY_GROWTH
        previous_gap = abs(gap)

    control = ControlPath(grid, problem.project(phi), bound)
    result = RateResult(control.energy, control, iterations, norm, False, gap)
    logger.warning(
        "Endpoint rate for target %s did not converge: gap %s, stationarity %s",
        target,
        gap,
        norm,
    )
    msg = (
        f"Endpoint optimiser did not converge after {max_outer} outer iterations "
        f"(gap {gap}, stationarity {norm})"
    )
    raise ConvergenceError(msg, result)
