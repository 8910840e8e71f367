"""
Scenario Configuration

Deployment, radio and consumption parameters, and the seeded generator that
turns them into solvable problem instances.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from ..allocation.solver import NodeProfile, ProblemInstance
from ..channel.estimation import EstimatorKind, EstimatorType
from ..channel.peb_gain import (
    AsymptoticGain,
    BroadcastGain,
    MonteCarloGain,
    PebGainModel,
    RationalApproxGain,
)
from ..channel.propagation import ChannelConfig, node_generator
from ..harvesting.eh_models import EhModel
from ..utils.errors import ConfigError

logger = logging.getLogger(__name__)

# Stream tags under (master_seed, trial_index); placement uses the bare pair
NODE_STREAM = 1
BASELINE_STREAM = 2


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * np.log10(watts) + 30.0


class GeometryKind(str, Enum):
    DISK = "disk"
    ANNULUS = "annulus"
    FIXED_RING = "fixed_ring"


@dataclass(frozen=True)
class Geometry:
    """
    Node deployment region around the base station.

    Disk and annulus placements are uniform in area; the fixed ring puts
    every node at ``radius_m``.
    """

    kind: GeometryKind = GeometryKind.DISK
    radius_m: float = 50.0
    inner_m: float = 25.0
    outer_m: float = 50.0

    def __post_init__(self):
        if not self.radius_m > 0.0:
            raise ValueError(f"radius_m must be positive, got {self.radius_m}")
        if not 0.0 < self.inner_m < self.outer_m:
            raise ValueError(f"Annulus radii must satisfy 0 < inner < outer, got "
                             f"{self.inner_m}, {self.outer_m}")

    @classmethod
    def disk(cls, radius_m: float) -> "Geometry":
        return cls(kind=GeometryKind.DISK, radius_m=radius_m)

    @classmethod
    def annulus(cls, inner_m: float, outer_m: float) -> "Geometry":
        return cls(kind=GeometryKind.ANNULUS, inner_m=inner_m, outer_m=outer_m)

    @classmethod
    def fixed_ring(cls, radius_m: float) -> "Geometry":
        return cls(kind=GeometryKind.FIXED_RING, radius_m=radius_m)

    @property
    def outer_radius(self) -> float:
        return self.outer_m if self.kind == GeometryKind.ANNULUS else self.radius_m

    def with_outer_radius(self, radius_m: float) -> "Geometry":
        if self.kind == GeometryKind.ANNULUS:
            return replace(self, outer_m=radius_m)
        return replace(self, radius_m=radius_m)

    def sample_distances(self, rng: np.random.Generator, count: int) -> np.ndarray:
        # 1 - U lies in (0, 1], so no node sits on the base station
        u = 1.0 - rng.random(count)
        if self.kind == GeometryKind.DISK:
            return self.radius_m * np.sqrt(u)
        if self.kind == GeometryKind.ANNULUS:
            return np.sqrt(self.inner_m ** 2 + u * (self.outer_m ** 2 - self.inner_m ** 2))
        return np.full(count, self.radius_m)


class GainBackend(str, Enum):
    RATIONAL = "rational"
    ASYMPTOTIC = "asymptotic"
    MONTE_CARLO = "monte_carlo"
    BROADCAST = "broadcast"


@dataclass(frozen=True)
class PebProbe:
    """Single-node gain probe used by the gain-curve and validation commands."""

    distance_m: float = 11.69
    p_min: float = 1e-6
    p_max: float = 1.0
    points: int = 50

    def __post_init__(self):
        if not self.distance_m > 0.0:
            raise ValueError("peb distance must be positive")
        if not 0.0 < self.p_min < self.p_max:
            raise ValueError("peb range must satisfy 0 < p_min < p_max")
        if self.points < 2:
            raise ValueError("peb points must be at least 2")

    def grid(self) -> np.ndarray:
        return np.logspace(np.log10(self.p_min), np.log10(self.p_max), self.points)


class SweepParameter(str, Enum):
    RADIUS = "radius"
    N_NODES = "n_nodes"
    NOISE_DBM = "noise_dbm"
    C_STATIC = "c_static"


class MethodKind(str, Enum):
    OPTIMAL = "optimal"
    FIXED = "fixed"
    RANDOM = "random"
    BROADCAST = "broadcast"
    UPPER_BOUND = "upper_bound"


@dataclass(frozen=True)
class SweepMethod:
    kind: MethodKind
    param: Optional[float] = None

    @classmethod
    def parse(cls, text: str) -> "SweepMethod":
        name, _, value = text.strip().partition(":")
        kind = MethodKind(name.strip())
        if kind == MethodKind.FIXED:
            return cls(kind, float(value) if value else 0.1)
        if kind == MethodKind.BROADCAST:
            return cls(kind, float(value) if value else 3.0)
        if value:
            raise ValueError(f"Method '{name}' takes no parameter")
        return cls(kind)

    @property
    def label(self) -> str:
        if self.param is None:
            return self.kind.value
        return f"{self.kind.value}:{self.param:g}"


@dataclass(frozen=True)
class SweepSpec:
    parameter: SweepParameter
    values: Tuple[float, ...]
    methods: Tuple[SweepMethod, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.values:
            raise ValueError("Sweep values must not be empty")
        steps = np.diff(self.values)
        if len(steps) and not (np.all(steps > 0.0) or np.all(steps < 0.0)):
            raise ValueError("Sweep values must be strictly monotone")
        if not self.methods:
            raise ValueError("Sweep needs at least one method")
        if self.parameter == SweepParameter.N_NODES and any(v != int(v) or v < 1 for v in self.values):
            raise ValueError("n_nodes sweep values must be positive integers")


DEFAULT_EH = EhModel.saturating_exponential(p_max=0.02, eta_max=0.3)


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Everything needed to generate problem instances for an experiment.

    Attributes:
        n_nodes: Number of sensor nodes N
        geometry: Deployment region
        budget_e: Energy budget per block (J)
        pilot_time: Pilot fraction of the block
        epsilon: Rate bisection gap (bits/s)
        inner_tol: Relative tolerance of the pilot-power search
        trials: Monte Carlo deployments per experiment
        master_seed: Root of every random stream
        n_antennas: Base-station array size
        carrier_hz: Carrier frequency
        rician_k: Linear Rician factor
        noise_power: Noise power (W)
        antenna_gain_db: Combined antenna gain added to the Friis path gain
        gain_backend: Per-node gain model
        estimator: Channel estimator for Monte Carlo gains
        mc_samples: Draws per Monte Carlo gain evaluation
        e_coeff: Energy per bit per squared metre
        c_static: Static energy per block
        eh: RF-DC conversion model
        sweep: Optional parameter sweep
        peb: Single-node gain probe
        compare_alpha: Linear rate for the EH comparison (None uses η_max)
    """

    n_nodes: int = 20
    geometry: Geometry = field(default_factory=Geometry)
    budget_e: float = 3.0
    pilot_time: float = 0.1
    epsilon: float = 1e-3
    inner_tol: float = 1e-9
    trials: int = 1000
    master_seed: int = 0
    n_antennas: int = 32
    carrier_hz: float = 915e6
    rician_k: float = 10.0
    noise_power: float = 1e-12
    antenna_gain_db: float = 20.0
    gain_backend: GainBackend = GainBackend.RATIONAL
    estimator: EstimatorType = EstimatorType.LEAST_SQUARES
    mc_samples: int = 1000
    e_coeff: float = 1e-7
    c_static: float = 3e-6
    eh: EhModel = DEFAULT_EH
    sweep: Optional[SweepSpec] = None
    peb: PebProbe = field(default_factory=PebProbe)
    compare_alpha: Optional[float] = None

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError(f"n_nodes must be at least 1, got {self.n_nodes}")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.mc_samples < 1:
            raise ValueError(f"mc_samples must be at least 1, got {self.mc_samples}")
        if not self.e_coeff > 0.0:
            raise ValueError(f"e_coeff must be positive, got {self.e_coeff}")
        if not self.c_static >= 0.0:
            raise ValueError(f"c_static must be non-negative, got {self.c_static}")
        if self.compare_alpha is not None and not self.compare_alpha > 0.0:
            raise ValueError(f"compare_alpha must be positive, got {self.compare_alpha}")
        # Reuse the value-type validation of the solver and channel layers
        self.channel_config(0)
        ProblemInstance(
            nodes=(NodeProfile(1.0, 0.0, BroadcastGain(1.0, 1)),),
            budget_e=self.budget_e,
            pilot_time=self.pilot_time,
            eh=self.eh,
            epsilon=self.epsilon,
            inner_tol=self.inner_tol,
        )

    @property
    def antenna_gain(self) -> float:
        return 10.0 ** (self.antenna_gain_db / 10.0)

    def channel_config(self, rng_seed: int) -> ChannelConfig:
        return ChannelConfig(
            n_antennas=self.n_antennas,
            carrier_hz=self.carrier_hz,
            rician_k=self.rician_k,
            noise_power=self.noise_power,
            rng_seed=rng_seed,
            antenna_gain=self.antenna_gain,
        )

    def with_parameter(self, parameter: SweepParameter, value: float) -> "ScenarioConfig":
        """
        Copy of this config with one sweep parameter set.

        Raises:
            ConfigError: If the value makes the scenario invalid (e.g. a radius inside the annulus hole)
        """
        try:
            if parameter == SweepParameter.RADIUS:
                return replace(self, geometry=self.geometry.with_outer_radius(value))
            if parameter == SweepParameter.N_NODES:
                return replace(self, n_nodes=int(value))
            if parameter == SweepParameter.NOISE_DBM:
                return replace(self, noise_power=dbm_to_watts(value))
            return replace(self, c_static=value)
        except ValueError as e:
            raise ConfigError(f"{parameter.value}={value:g} is invalid: {e}", key='sweep.values') from e


def stream_seed(master_seed: int, *counters: int) -> int:
    """64-bit seed of the stream identified by the counters."""
    state = np.random.SeedSequence([master_seed, *counters]).generate_state(1, np.uint64)
    return int(state[0])


def build_gain(cfg: ScenarioConfig, distance_m: float, rng_seed: int) -> PebGainModel:
    """Gain model of a node at ``distance_m`` for the configured backend."""
    channel = cfg.channel_config(rng_seed)
    path_gain = channel.path_gain(distance_m)
    if cfg.gain_backend == GainBackend.RATIONAL:
        return RationalApproxGain(cfg.n_antennas * path_gain, cfg.n_antennas, cfg.noise_power)
    if cfg.gain_backend == GainBackend.ASYMPTOTIC:
        return AsymptoticGain(path_gain, cfg.n_antennas, cfg.noise_power)
    if cfg.gain_backend == GainBackend.BROADCAST:
        return BroadcastGain(cfg.n_antennas * path_gain, cfg.n_antennas)
    return MonteCarloGain(channel, distance_m, cfg.mc_samples, EstimatorKind(kind=cfg.estimator))


def place_nodes(cfg: ScenarioConfig, trial_index: int) -> np.ndarray:
    rng = node_generator(cfg.master_seed, trial_index)
    return cfg.geometry.sample_distances(rng, cfg.n_nodes)


def generate_instance(cfg: ScenarioConfig, trial_index: int) -> ProblemInstance:
    """
    Seeded deployment for one trial.

    The node distances of trial ``trial_index`` depend only on
    (master_seed, trial_index); a larger ``n_nodes`` extends the same
    placement. Per-node channel streams are tagged with the node index.

    Args:
        cfg: Scenario configuration
        trial_index: Trial counter

    Returns:
        ProblemInstance with e_i = e_coeff·d², c_i = c_static
    """
    if trial_index < 0:
        raise ValueError(f"trial_index must be non-negative, got {trial_index}")
    distances = place_nodes(cfg, trial_index)
    logger.debug("Trial %d: %d nodes, farthest at %.2f m", trial_index, len(distances),
                 float(np.max(distances)))
    nodes = []
    for index, distance in enumerate(distances):
        gain = build_gain(cfg, float(distance),
                          stream_seed(cfg.master_seed, trial_index, NODE_STREAM, index))
        nodes.append(NodeProfile(
            e_i=cfg.e_coeff * float(distance) ** 2,
            c_i=cfg.c_static,
            gain=gain,
            distance_m=float(distance),
        ))
    return ProblemInstance(
        nodes=tuple(nodes),
        budget_e=cfg.budget_e,
        pilot_time=cfg.pilot_time,
        eh=cfg.eh,
        epsilon=cfg.epsilon,
        inner_tol=cfg.inner_tol,
    )
