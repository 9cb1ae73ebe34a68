"""Gaussian kernel density diagnostic for the law of X_t."""

import dataclasses

import numpy as np
import numpy.typing as npt
from scipy import integrate, stats

from mrsde.common.constants import CHUNK_SIZE, KDE_GRID_POINTS

GRID_MARGIN = 3.0  # In bandwidths beyond the sample range


@dataclasses.dataclass(frozen=True, eq=False)
class DensityEstimate:
    x: npt.NDArray[np.float64]
    f: npt.NDArray[np.float64]

    def mass(self) -> float:
        return float(integrate.trapezoid(self.f, self.x))


def density_estimate(
    samples: npt.ArrayLike,
    bandwidth: float,
    n_points: int = KDE_GRID_POINTS,
) -> DensityEstimate:
    """Gaussian KDE on a uniform grid over [min - 3 bandwidth, max + 3 bandwidth].

    Notes:
    -----
    The kernel sum is accumulated over fixed sample chunks. The estimate is
    renormalised so that its trapezoid integral on the grid is one; the
    truncated Gaussian tails would otherwise lose about 0.3% of the mass.

    Args:
    ----
        samples: draws of X_t
        bandwidth: kernel standard deviation (> 0)
        n_points: grid size

    Returns:
    -------
        grid and density values

    """
    values = np.asarray(samples, dtype=np.float64).ravel()
    if values.size < 2:
        msg = f"Density estimate needs at least 2 samples, got {values.size}"
        raise ValueError(msg)
    if not np.isfinite(bandwidth) or bandwidth <= 0.0:
        msg = f"Bandwidth must be positive, got {bandwidth}"
        raise ValueError(msg)
    if not np.all(np.isfinite(values)):
        msg = "Samples must be finite"
        raise ValueError(msg)

    margin = GRID_MARGIN * bandwidth
    x = np.linspace(values.min() - margin, values.max() + margin, n_points)
    f = np.zeros(n_points)
    for start in range(0, values.size, CHUNK_SIZE):
        chunk = values[start : start + CHUNK_SIZE]
        pdf = stats.norm.pdf(
            x[np.newaxis, :],
            loc=chunk[:, np.newaxis],
            scale=bandwidth,
        )
        f += pdf.sum(axis=0)

    f /= values.size
    f /= integrate.trapezoid(f, x)

    return DensityEstimate(x, f)
