"""Test functions for the convergence and epsilon-limit studies."""

import pytest

import numpy as np
from scipy import integrate

from mrsde.harness import is_closed_form, run_convergence_study, run_eps_limit_study
from mrsde.model import ModelSpec


def _sup_sq_integrand(u: float) -> float:
    return 2.0 * u * np.exp(-u) / (1.0 + np.exp(-2.0 * u))


# E[sup_{t <= 1} B_t^2] is E[1 / exit time of (-1, 1)], the integral of u / cosh u
SUP_SQ_BROWNIAN = integrate.quad(_sup_sq_integrand, 0.0, np.inf)[0]
GRID_SHIFT = 0.5826


def test_is_closed_form(closed_form: ModelSpec, schilder: ModelSpec) -> None:
    assert is_closed_form(closed_form)
    assert not is_closed_form(schilder)


def test_convergence_table(closed_form: ModelSpec) -> None:
    study = run_convergence_study(closed_form, [0.1, 0.05], [100, 400], 3, n_replicates=2)

    assert [(row.dt, row.n_particles) for row in study.rows] == [
        (0.1, 100),
        (0.1, 400),
        (0.05, 100),
        (0.05, 400),
    ]
    assert all(row.k_error > 0.0 and row.x_error >= 0.0 for row in study.rows)
    assert np.isfinite(study.n_slope)
    assert len(study.table()[0]) == 4


@pytest.mark.parametrize(
    "dts,n_replicates",
    [([0.3], 1), ([0.1], 0)],
)
def test_convergence_fail(closed_form: ModelSpec, dts: list[float], n_replicates: int) -> None:
    """Test steps must divide the horizon and replicates be positive."""
    with pytest.raises(ValueError):
        _ = run_convergence_study(closed_form, dts, [10], 0, n_replicates=n_replicates)


def test_convergence_needs_closed_form(schilder: ModelSpec) -> None:
    with pytest.raises(ValueError):
        _ = run_convergence_study(schilder, [0.1], [10], 0)


def test_eps_limit(closed_form: ModelSpec) -> None:
    """Test deviations from the limit shrink with epsilon and respect the W1 bound."""
    study = run_eps_limit_study(closed_form, [0.2, 0.1, 0.05], 3000, 200, 5)

    assert SUP_SQ_BROWNIAN == pytest.approx(1.8319311884, abs=1e-8)
    assert study.decreasing()
    for row in study.rows:
        assert row.sup_k_dev <= row.w1_bound + 1e-9
        assert row.std_err > 0.0
        assert row.sup_x_second_moment >= 0.0


@pytest.mark.parametrize("epsilons,n_particles", [([], 100), ([1.5], 100), ([0.1], 10)])
def test_eps_limit_fail(closed_form: ModelSpec, epsilons: list[float], n_particles: int) -> None:
    with pytest.raises(ValueError):
        _ = run_eps_limit_study(closed_form, epsilons, n_particles, 10, 0)


@pytest.mark.slow
def test_particle_rate(closed_form: ModelSpec) -> None:
    """Test sup |K - t| decays like n^(-1/2) at the finest step."""
    study = run_convergence_study(
        closed_form,
        [0.01, 0.005, 0.002, 0.001],
        [1000, 4000, 16000],
        0,
        n_replicates=10,
    )

    assert study.n_slope == pytest.approx(-0.5, abs=0.15)


@pytest.mark.slow
def test_eps_limit_acceptance(closed_form: ModelSpec) -> None:
    """Test eps^-1 E[sup |X - X0|^2] matches the grid-monitored Brownian value."""
    n_steps = 1000
    study = run_eps_limit_study(closed_form, [0.2, 0.1, 0.05, 0.025], 3000, n_steps, 0)
    # Monitoring on the grid lowers sup |B| by about GRID_SHIFT sqrt(dt)
    shift = GRID_SHIFT * np.sqrt(1.0 / n_steps)
    expected = SUP_SQ_BROWNIAN - 2.0 * shift * np.sqrt(np.pi / 2.0) + shift**2

    assert SUP_SQ_BROWNIAN == pytest.approx(1.8319311884, abs=1e-8)
    assert study.decreasing()
    for row in study.rows:
        assert abs(row.mean_sq_sup_x_dev - row.epsilon * expected) <= 3.0 * row.std_err
