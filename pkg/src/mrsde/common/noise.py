"""Counter-based Brownian increments.

The increment of particle i at step k is draw i of a Philox generator whose
key packs (seed, stream, k). Draws are consumed sequentially, so the value
for particle i does not depend on how many particles are requested, on the
order in which steps are generated, or on the number of workers.
"""

import dataclasses

import numpy as np
import numpy.typing as npt

_STEP_BITS = 32
_STREAM_BITS = 32
_SEED_LIMIT = 2**64


@dataclasses.dataclass(frozen=True)
class NoiseStream:
    """Reproducible source of standard normal increments.

    Args:
    ----
        seed: 64-bit run seed
        stream: substream index (Monte Carlo batch, epsilon level, ...)

    """

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.seed < _SEED_LIMIT:
            msg = f"Seed must be an unsigned 64-bit integer, got {self.seed}"
            raise ValueError(msg)
        if not 0 <= self.stream < 2**_STREAM_BITS:
            msg = f"Stream index out of range: {self.stream}"
            raise ValueError(msg)

    def _key(self, step: int) -> int:
        if not 0 <= step < 2**_STEP_BITS:
            msg = f"Step index out of range: {step}"
            raise ValueError(msg)

        seed_bits = self.seed << (_STREAM_BITS + _STEP_BITS)
        return seed_bits | (self.stream << _STEP_BITS) | step

    def normals(self, step: int, n: int) -> npt.NDArray[np.float64]:
        """Standard normals for particles 0..n-1 at one step."""
        generator = np.random.Generator(np.random.Philox(key=self._key(step)))
        return generator.standard_normal(n)

    def increments(self, step: int, n: int, dt: float) -> npt.NDArray[np.float64]:
        """Brownian increments over a cell of width dt."""
        return np.sqrt(dt) * self.normals(step, n)

    def path_increments(
        self,
        n_steps: int,
        dt: float,
        particle: int = 0,
    ) -> npt.NDArray[np.float64]:
        """Increments of a single particle across all steps."""
        return np.array(
            [
                self.increments(step, particle + 1, dt)[particle]
                for step in range(n_steps)
            ],
        )
