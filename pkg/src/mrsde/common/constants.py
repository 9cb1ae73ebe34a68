"""Module for declaring constants."""

import enum

TOL_G0 = 1e-10  # Root tolerance for G0 in units of H
TOL_INIT = 1e-9  # Admissibility tolerance for g(0) = xi
TOL_TERMINAL = 1e-6  # Endpoint constraint tolerance
TOL_STATIONARY = 1e-6  # Reduced-gradient tolerance for endpoint rates
SPOT_CHECK_PAIRS = 10_000  # Random pairs per regularity spot-check
CHUNK_SIZE = 8192  # Particles per work item (fixed, never worker dependent)
KDE_GRID_POINTS = 512
CSV_FORMAT = ".17g"


@enum.unique
class CoefficientKinds(str, enum.Enum):
    """Parametric families for drift and diffusion."""

    CONSTANT = "constant"  # a
    AFFINE = "affine"  # a + b x
    SIN_AFFINE = "sin-affine"  # a x + c sin(x)
    SATURATED_LINEAR = "saturated-linear"  # a tanh(b x)

    def __str__(self) -> str:
        """Get string representation."""
        return self.value


@enum.unique
class ConstraintKinds(str, enum.Enum):
    """Parametric families for the constraint function h."""

    IDENTITY = "identity"  # z
    SHIFTED_IDENTITY = "shifted-identity"  # z - c
    AFFINE = "affine"  # a + b z, b > 0
    SIN_AFFINE_MONOTONE = "sin-affine-monotone"  # a (z - s) + c sin(z - s), a > |c|

    def __str__(self) -> str:
        """Get string representation."""
        return self.value


@enum.unique
class Variants(str, enum.Enum):
    """Particle system variants."""

    SMALL_NOISE = "small-noise"
    CONTROLLED = "controlled"
    SHORT_TIME = "short-time"

    def __str__(self) -> str:
        """Get string representation."""
        return self.value


@enum.unique
class RateModes(str, enum.Enum):
    """Asymptotic regimes for rate functions."""

    SMALL_NOISE = "small-noise"
    SHORT_TIME = "short-time"

    def __str__(self) -> str:
        """Get string representation."""
        return self.value


@enum.unique
class EventKinds(str, enum.Enum):
    """Rare events estimated by the LDP harness."""

    ENDPOINT_ABOVE = "endpoint-above"
    ENDPOINT_BELOW = "endpoint-below"
    SUP_DEVIATION = "sup-deviation"

    def __str__(self) -> str:
        """Get string representation."""
        return self.value


@enum.unique
class EventStatistics(str, enum.Enum):
    """Sample unit of an event: one particle, or one ensemble's empirical mean."""

    PER_PARTICLE = "per-particle"
    PER_ENSEMBLE = "per-ensemble"

    def __str__(self) -> str:
        """Get string representation."""
        return self.value


@enum.unique
class ExitCodes(enum.IntEnum):
    """CLI exit codes."""

    SUCCESS = 0
    CONFIG_ERROR = 2
    NUMERICAL_ABORT = 3
