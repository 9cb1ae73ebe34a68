"""Structured config schema; OmegaConf rejects unknown keys and mistyped values."""

import dataclasses

from omegaconf import MISSING


@dataclasses.dataclass
class FunctionConfig:
    kind: str = MISSING
    params: list[float] = dataclasses.field(default_factory=list)


@dataclasses.dataclass
class ModelConfig:
    xi: float = MISSING
    T: float = MISSING  # noqa: N815
    b: FunctionConfig = dataclasses.field(default_factory=FunctionConfig)
    sigma: FunctionConfig = dataclasses.field(default_factory=FunctionConfig)
    h: FunctionConfig = dataclasses.field(default_factory=FunctionConfig)
    sigma_floor: float = MISSING
    state_radius: float = 5.0


@dataclasses.dataclass
class SimulateConfig:
    variant: str = MISSING
    epsilon: float = MISSING
    n_particles: int = MISSING
    n_steps: int = MISSING
    paths_written: int = MISSING
    phi: list[float] = MISSING
    tol: float = MISSING
    seed: int = MISSING
    k_reference: float | None = None
    k_tolerance: float | None = None


@dataclasses.dataclass
class SkeletonConfig:
    variant: str = MISSING
    n_steps: int = MISSING
    phi: list[float] = MISSING
    seed: int = MISSING


@dataclasses.dataclass
class RateConfig:
    mode: str = MISSING
    n_steps: int = MISSING
    targets: list[float] = MISSING
    bound: float | None = None
    max_outer: int = MISSING
    max_inner: int = MISSING
    seed: int = MISSING


@dataclasses.dataclass
class MalliavinConfig:
    n_steps: int = MISSING
    epsilon: float = MISSING
    k_particles: int = MISSING
    bump: float = MISSING
    direction: float = MISSING
    bandwidth: float = MISSING
    picard_iterations: int = MISSING
    n_bundles: int = MISSING
    moment_p: float = MISSING
    seed: int = MISSING


@dataclasses.dataclass
class EventConfig:
    kind: str = MISSING
    threshold: float = MISSING


@dataclasses.dataclass
class LdpConfig:
    variant: str = MISSING
    epsilons: list[float] = MISSING
    event: EventConfig = dataclasses.field(default_factory=EventConfig)
    statistic: str = MISSING
    n_particles: int = MISSING
    n_steps: int = MISSING
    n_mc_batches: int = MISSING
    seed: int = MISSING


@dataclasses.dataclass
class ConvergeConfig:
    dts: list[float] = MISSING
    n_particles: list[int] = MISSING
    n_replicates: int = MISSING
    epsilons: list[float] = MISSING
    eps_n_particles: int = MISSING
    eps_n_steps: int = MISSING
    seed: int = MISSING


@dataclasses.dataclass
class RunConfig:
    command: str = MISSING
    model: ModelConfig = dataclasses.field(default_factory=ModelConfig)
    simulate: SimulateConfig = dataclasses.field(default_factory=SimulateConfig)
    skeleton: SkeletonConfig = dataclasses.field(default_factory=SkeletonConfig)
    rate: RateConfig = dataclasses.field(default_factory=RateConfig)
    malliavin: MalliavinConfig = dataclasses.field(default_factory=MalliavinConfig)
    ldp: LdpConfig = dataclasses.field(default_factory=LdpConfig)
    converge: ConvergeConfig = dataclasses.field(default_factory=ConvergeConfig)
