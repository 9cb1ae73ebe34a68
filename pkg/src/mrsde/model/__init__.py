"""Problem instances: coefficient and constraint families, model data and validation."""

from mrsde.model.base import CoefficientFn, ConstraintFn
from mrsde.model.coefficients import build_coefficient
from mrsde.model.constraints import build_constraint
from mrsde.model.spec import ModelSpec, ValidationReport, Violation, evaluate, validate

__all__ = [
    "CoefficientFn",
    "ConstraintFn",
    "ModelSpec",
    "ValidationReport",
    "Violation",
    "build_coefficient",
    "build_constraint",
    "evaluate",
    "validate",
]
