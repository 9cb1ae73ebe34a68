"""Test functions for config composition and validation."""

from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest

from mrsde.common.exceptions import ConfigError
from mrsde.config import COMMANDS, check_ranges, config_hash, load_config, resolved_block

PRESETS = ["closed_form", "ornstein_uhlenbeck", "schilder", "geometric", "static"]


@pytest.mark.parametrize("command", COMMANDS)
@pytest.mark.parametrize("preset", PRESETS)
def test_presets(command: str, preset: str) -> None:
    """Test every preset composes with every command's defaults."""
    cfg = load_config(command, preset=preset)

    assert cfg.command == command
    assert cfg.model.T == 1.0
    assert check_ranges(cfg) == []


def test_defaults() -> None:
    cfg = load_config("ldp", preset="schilder")

    assert list(cfg.ldp.epsilons) == [0.1, 0.05, 0.025]
    assert cfg.ldp.event.kind == "endpoint-above"
    assert cfg.simulate.tol == pytest.approx(1e-10)
    assert cfg.model.h.params == [1.0, 1.0]


def test_json_overrides(write_config: Callable[[Any], Path]) -> None:
    """Test JSON values merge key by key over the preset and the defaults."""
    path = write_config({"model": {"xi": 0.5}, "rate": {"targets": [0.25, 1.0]}})
    cfg = load_config("rate", path, preset="schilder")

    assert cfg.model.xi == 0.5
    assert cfg.model.sigma.params == [1.0]
    assert list(cfg.rate.targets) == [0.25, 1.0]
    assert cfg.rate.n_steps == 200


def test_model_from_json(write_config: Callable[[Any], Path]) -> None:
    model = {
        "xi": 0.0,
        "T": 2.0,
        "b": {"kind": "sin-affine", "params": [-1.0, 0.5]},
        "sigma": {"kind": "constant", "params": [1.0]},
        "h": {"kind": "identity", "params": []},
        "sigma_floor": 1.0,
    }
    cfg = load_config("simulate", write_config({"model": model}))

    assert cfg.model.T == 2.0
    assert cfg.model.state_radius == 5.0


def test_missing_model() -> None:
    """Test all mandatory model values are reported together."""
    with pytest.raises(ConfigError, match="model.xi") as err:
        _ = load_config("simulate")

    assert "model.sigma_floor" in str(err.value)


@pytest.mark.parametrize(
    "payload",
    [
        {"simulate": {"bogus": 1}},
        {"simulate": {"n_steps": "many"}},
        {"model": {"b": {"kind": "constant", "params": [1.0], "scale": 2.0}}},
        {"unknown_block": {}},
    ],
)
def test_schema_fail(write_config: Callable[[Any], Path], payload: dict[str, Any]) -> None:
    """Test unknown keys and mistyped values."""
    with pytest.raises(ConfigError):
        _ = load_config("simulate", write_config(payload), preset="closed_form")


def test_bad_json(tmp_path: Path) -> None:
    """Test parse errors carry the file, line and column."""
    path = tmp_path / "broken.json"
    path.write_text('{\n  "simulate": {"n_steps": }\n}')

    with pytest.raises(ConfigError, match=f"{path}:2:"):
        _ = load_config("simulate", path, preset="closed_form")


def test_bad_file(write_config: Callable[[Any], Path], tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        _ = load_config("simulate", tmp_path / "missing.json", preset="closed_form")
    with pytest.raises(ConfigError, match="JSON object"):
        _ = load_config("simulate", write_config([1, 2]), preset="closed_form")


@pytest.mark.parametrize("command,preset", [("plot", "closed_form"), ("simulate", "brownian")])
def test_unknown_names(command: str, preset: str) -> None:
    with pytest.raises(ConfigError):
        _ = load_config(command, preset=preset)


@pytest.mark.parametrize(
    "command,payload,problem",
    [
        ("simulate", {"simulate": {"epsilon": 2.0}}, "simulate.epsilon"),
        ("simulate", {"simulate": {"n_steps": 0}}, "simulate.n_steps"),
        ("simulate", {"simulate": {"phi": [0.0, 1.0]}}, "simulate.phi"),
        ("simulate", {"simulate": {"k_reference": 1.0}}, "k_tolerance"),
        ("simulate", {"simulate": {"seed": -1}}, "simulate.seed"),
        ("simulate", {"model": {"T": 0.0}}, "model"),
        ("skeleton", {"skeleton": {"variant": "controlled"}}, "skeleton.variant"),
        ("rate", {"rate": {"targets": []}}, "rate.targets"),
        ("rate", {"rate": {"mode": "diffusion"}}, "rate.mode"),
        ("malliavin", {"malliavin": {"bandwidth": 0.0}}, "malliavin.bandwidth"),
        ("ldp", {"ldp": {"epsilons": [0.1, 0.2]}}, "ldp.epsilons"),
        ("ldp", {"ldp": {"n_mc_batches": 10}}, "ldp.n_mc_batches"),
        ("ldp", {"ldp": {"statistic": "per-batch"}}, "ldp.statistic"),
        ("ldp", {"ldp": {"event": {"kind": "sup-deviation", "threshold": 0.0}}}, "ldp.event"),
        ("converge", {"converge": {"dts": [0.1, -0.1]}}, "converge.dts"),
    ],
)
def test_ranges(
    write_config: Callable[[Any], Path],
    command: str,
    payload: dict[str, Any],
    problem: str,
) -> None:
    """Test out-of-range values are rejected with the offending key."""
    with pytest.raises(ConfigError, match=problem):
        _ = load_config(command, write_config(payload), preset="closed_form")


def test_ranges_reported_together(write_config: Callable[[Any], Path]) -> None:
    path = write_config({"simulate": {"epsilon": -1.0, "tol": 0.0}})

    with pytest.raises(ConfigError) as err:
        _ = load_config("simulate", path, preset="closed_form")

    assert "simulate.epsilon" in str(err.value)
    assert "simulate.tol" in str(err.value)


def test_seed_override(write_config: Callable[[Any], Path]) -> None:
    """Test the seed option wins over the JSON file."""
    path = write_config({"simulate": {"seed": 3}})

    assert load_config("simulate", path, preset="closed_form").simulate.seed == 3
    assert load_config("simulate", path, preset="closed_form", seed=7).simulate.seed == 7


def test_config_hash(write_config: Callable[[Any], Path]) -> None:
    """Test the hash covers the model and active block only."""
    base = load_config("simulate", preset="closed_form")
    other_block = load_config("simulate", write_config({"rate": {"n_steps": 7}}), preset="closed_form")
    reseeded = load_config("simulate", preset="closed_form", seed=1)

    assert len(config_hash(base)) == 16
    assert int(config_hash(base), 16) >= 0
    assert config_hash(base) == config_hash(other_block)
    assert config_hash(base) != config_hash(reseeded)
    assert set(resolved_block(base)) == {"command", "model", "simulate"}
