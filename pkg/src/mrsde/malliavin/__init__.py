"""Malliavin derivatives of mean-reflected SDEs with the reflection frozen."""

from mrsde.malliavin.density import DensityEstimate, density_estimate
from mrsde.malliavin.kernel import (
    CameronMartinReport,
    MalliavinKernel,
    cameron_martin_check,
    kernel_direct,
    kernel_moment,
    kernel_product,
    malliavin_covariance,
)
from mrsde.malliavin.tangent import (
    TangentBundle,
    euler_path,
    picard_iterates,
    tangent_simulate,
)

__all__ = [
    "CameronMartinReport",
    "DensityEstimate",
    "MalliavinKernel",
    "TangentBundle",
    "cameron_martin_check",
    "density_estimate",
    "euler_path",
    "kernel_direct",
    "kernel_moment",
    "kernel_product",
    "malliavin_covariance",
    "picard_iterates",
    "tangent_simulate",
]
