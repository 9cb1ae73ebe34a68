"""Interacting particle approximation of mean-reflected SDEs."""

from mrsde.particle.ensemble import EnsemblePath
from mrsde.particle.system import (
    ParticleSystem,
    simulate,
    simulate_controlled,
    simulate_short_time,
)

__all__ = [
    "EnsemblePath",
    "ParticleSystem",
    "simulate",
    "simulate_controlled",
    "simulate_short_time",
]
