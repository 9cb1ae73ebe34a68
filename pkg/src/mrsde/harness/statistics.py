"""Monte Carlo summary statistics."""

import numpy as np
import numpy.typing as npt

MIN_BATCHES = 30


def batch_means(
    values: npt.ArrayLike,
    n_batches: int | None = None,
) -> tuple[float, float]:
    """Mean and standard error by the method of batch means.

    Args:
    ----
        values: per-batch estimates, or raw samples when n_batches is given
        n_batches: split raw samples into this many contiguous batches first

    Returns:
    -------
        (mean, standard error)

    """
    samples = np.asarray(values, dtype=np.float64).ravel()
    if n_batches is not None:
        if not 2 <= n_batches <= samples.size:
            msg = f"Cannot split {samples.size} samples into {n_batches} batches"
            raise ValueError(msg)
        batches = np.array_split(samples, n_batches)
        samples = np.array([np.mean(batch) for batch in batches])

    if samples.size < 2:
        msg = f"Batch means need at least 2 batches, got {samples.size}"
        raise ValueError(msg)

    std_err = np.std(samples, ddof=1) / np.sqrt(samples.size)
    return float(np.mean(samples)), float(std_err)


def loglog_slope(x: npt.ArrayLike, y: npt.ArrayLike) -> float:
    """Least-squares slope of log y against log x; nan if fewer than 2 usable points."""
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    usable = (xs > 0.0) & (ys > 0.0) & np.isfinite(xs) & np.isfinite(ys)
    if np.unique(xs[usable]).size < 2:
        return float("nan")

    slope, _ = np.polyfit(np.log(xs[usable]), np.log(ys[usable]), 1)
    return float(slope)
