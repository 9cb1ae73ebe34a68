"""Configuration for pytest."""

import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest

from mrsde.model import ModelSpec, build_coefficient, build_constraint


def make_spec(
    b: tuple[str, list[float]],
    sigma: tuple[str, list[float]],
    h: tuple[str, list[float]],
    xi: float = 0.0,
    horizon: float = 1.0,
    sigma_floor: float = 0.0,
) -> ModelSpec:
    """Build a model from (kind, params) pairs."""
    return ModelSpec(
        xi=xi,
        horizon=horizon,
        b=build_coefficient(*b),
        sigma=build_coefficient(*sigma),
        h=build_constraint(*h),
        sigma_floor=sigma_floor,
    )


@pytest.fixture(scope="session")
def closed_form() -> ModelSpec:
    """b = -1, sigma = 1, xi = 0, h = identity: K_t = t and X_t = B_t."""
    return make_spec(("constant", [-1.0]), ("constant", [1.0]), ("identity", []), sigma_floor=1.0)


@pytest.fixture(scope="session")
def ornstein_uhlenbeck() -> ModelSpec:
    """b(x) = -x, sigma = 1 with a slack constraint."""
    return make_spec(
        ("affine", [0.0, -1.0]),
        ("constant", [1.0]),
        ("affine", [1.0, 1.0]),
        sigma_floor=1.0,
    )


@pytest.fixture(scope="session")
def schilder() -> ModelSpec:
    """Brownian motion with h(z) = z + 1, so the reflection never acts."""
    return make_spec(
        ("constant", [0.0]),
        ("constant", [1.0]),
        ("affine", [1.0, 1.0]),
        sigma_floor=1.0,
    )


@pytest.fixture(scope="session")
def geometric() -> ModelSpec:
    """b = 0, sigma(x) = x, xi = 1, h = identity."""
    return make_spec(("constant", [0.0]), ("affine", [0.0, 1.0]), ("identity", []), xi=1.0)


@pytest.fixture(scope="session")
def static() -> ModelSpec:
    """No drift and no noise."""
    return make_spec(("constant", [0.0]), ("constant", [0.0]), ("identity", []), xi=1.0)


@pytest.fixture(scope="session")
def spec_factory() -> Any:
    """Factory for models not covered by the named fixtures."""
    return make_spec


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[Any], Path]:
    """Write a JSON config into the test's temporary directory."""

    def write(payload: Any, name: str = "config.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return path

    return write
