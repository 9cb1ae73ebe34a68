"""Hydra defaults, structured schema and loader for run configs."""

from mrsde.config.loader import (
    COMMANDS,
    check_ranges,
    config_hash,
    load_config,
    resolved_block,
)

__all__ = ["COMMANDS", "check_ranges", "config_hash", "load_config", "resolved_block"]
