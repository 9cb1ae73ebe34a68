"""Large-deviation rate functionals of the skeleton equations."""

from mrsde.rate.endpoint import EndpointProblem, endpoint_rate
from mrsde.rate.path import RateResult, path_rate, short_path_rate

__all__ = [
    "EndpointProblem",
    "RateResult",
    "endpoint_rate",
    "path_rate",
    "short_path_rate",
]
