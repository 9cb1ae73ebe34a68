"""Test functions for the kernel density diagnostic."""

from typing import Any

import pytest

import numpy as np
from scipy import stats

from mrsde.common.constants import CHUNK_SIZE
from mrsde.common.grid import TimeGrid
from mrsde.malliavin import density_estimate
from mrsde.particle import simulate


def test_mass() -> None:
    samples = np.random.default_rng(0).normal(0.0, 1.0, 1000)
    estimate = density_estimate(samples, 0.2)

    assert estimate.x.shape == (512,)
    assert estimate.mass() == pytest.approx(1.0)
    assert np.all(estimate.f >= 0.0)


def test_gaussian() -> None:
    """Test the estimate of a standard normal sample across several chunks."""
    samples = np.random.default_rng(1).normal(0.0, 1.0, 2 * CHUNK_SIZE + 5)
    estimate = density_estimate(samples, 0.1, n_points=256)

    expected = stats.norm.pdf(estimate.x)
    assert np.max(np.abs(estimate.f - expected)) < 0.05


def test_dirac() -> None:
    """Test repeated samples give one Gaussian bump of the bandwidth."""
    estimate = density_estimate(np.full(10, 2.0), 0.5)

    assert estimate.x[0] == pytest.approx(0.5)
    assert estimate.x[-1] == pytest.approx(3.5)
    assert np.max(estimate.f) == pytest.approx(stats.norm.pdf(0.0, scale=0.5), rel=1e-2)


@pytest.mark.parametrize(
    "samples,bandwidth",
    [
        (np.array([1.0]), 0.1),
        (np.array([0.0, 1.0]), 0.0),
        (np.array([0.0, 1.0]), np.nan),
        (np.array([0.0, np.inf]), 0.1),
    ],
)
def test_fail(samples: np.ndarray, bandwidth: float) -> None:
    """Test too few samples, bad bandwidths and non-finite samples."""
    with pytest.raises(ValueError):
        _ = density_estimate(samples, bandwidth)


@pytest.mark.slow
@pytest.mark.parametrize("fixture", ["schilder", "closed_form"])
def test_particle_endpoint_gaussian(fixture: str, request: Any) -> None:
    """Test the estimate of particle X_1 for the Brownian-law models against N(0, 1)."""
    spec = request.getfixturevalue(fixture)
    # Constant coefficients make Euler exact, so a coarse grid suffices.
    # The KDE standard deviation at the mode is about 0.0015 here, 0.005 at 1e5 samples
    ensemble = simulate(spec, TimeGrid(1.0, 10), 1_000_000, 1.0, seed=0, keep_paths=False)
    estimate = density_estimate(ensemble.x_final, 0.05)

    assert estimate.mass() == pytest.approx(1.0, abs=1e-3)
    assert np.max(np.abs(estimate.f - stats.norm.pdf(estimate.x))) <= 0.01
