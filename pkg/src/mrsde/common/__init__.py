"""Shared plumbing: logging, constants, registry, grids, noise and file output."""
