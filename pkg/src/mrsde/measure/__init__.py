"""Empirical-measure kernel: H, G0 and the Wasserstein-1 distance."""

from mrsde.measure.empirical import EmpiricalMeasure, bisect_root, g0, h_mean, w1

__all__ = ["EmpiricalMeasure", "bisect_root", "g0", "h_mean", "w1"]
