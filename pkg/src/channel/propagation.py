"""
Propagation

Friis path gain and seeded Rician channel draws for a uniform linear array
at the base station.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 2.998e8


@dataclass(frozen=True)
class ChannelConfig:
    """
    Radio parameters shared by every node of a deployment.

    Attributes:
        n_antennas: Base-station array size N_t
        carrier_hz: Carrier frequency
        rician_k: Linear Rician factor (``inf`` gives a pure line-of-sight channel)
        noise_power: Receiver noise power σ_n² in Watts
        rng_seed: Seed of every random draw made with this configuration
        antenna_gain: Combined transmit/receive antenna gain (linear) applied to the Friis gain
    """

    n_antennas: int = 32
    carrier_hz: float = 915e6
    rician_k: float = 10.0
    noise_power: float = 1e-12
    rng_seed: int = 0
    antenna_gain: float = 1.0

    def __post_init__(self):
        if self.n_antennas < 1:
            raise ValueError(f"n_antennas must be at least 1, got {self.n_antennas}")
        if not self.carrier_hz > 0.0:
            raise ValueError(f"carrier_hz must be positive, got {self.carrier_hz}")
        if not self.rician_k >= 0.0:
            raise ValueError(f"rician_k must be non-negative, got {self.rician_k}")
        if not self.noise_power > 0.0:
            raise ValueError(f"noise_power must be positive, got {self.noise_power}")
        if not self.antenna_gain > 0.0:
            raise ValueError(f"antenna_gain must be positive, got {self.antenna_gain}")
        if self.rng_seed < 0:
            raise ValueError(f"rng_seed must be non-negative, got {self.rng_seed}")

    def path_gain(self, distance_m: float) -> float:
        return friis_gain(self.carrier_hz, distance_m, self.antenna_gain)


@dataclass(frozen=True)
class ChannelSample:
    """One channel realisation h from the base station to a node."""

    h: np.ndarray
    distance_m: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.h)):
            raise ValueError("Channel entries must be finite")
        if not self.norm2 > 0.0:
            raise ValueError("Channel must have positive energy")

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.h, self.h).real)


def friis_gain(carrier_hz: float, distance_m: float, antenna_gain: float = 1.0) -> float:
    """
    Free-space path gain (λ/(4πd))² times the combined antenna gain.

    Args:
        carrier_hz: Carrier frequency in Hz
        distance_m: Link distance in metres
        antenna_gain: Combined transmit/receive antenna gain, unit by default

    Returns:
        Dimensionless power gain

    Raises:
        ValueError: If the distance is not positive
    """
    if not distance_m > 0.0:
        raise ValueError(f"Distance must be positive, got {distance_m}")
    wavelength = SPEED_OF_LIGHT / carrier_hz
    return antenna_gain * (wavelength / (4.0 * np.pi * distance_m)) ** 2


def los_steering(n_antennas: int, los_angle: float) -> np.ndarray:
    """Unit-modulus half-wavelength ULA response towards ``los_angle`` (radians from broadside)."""
    k = np.arange(n_antennas)
    return np.exp(1j * np.pi * k * np.sin(los_angle))


def draw_los_angle(rng: np.random.Generator) -> float:
    return float(rng.uniform(-np.pi / 2.0, np.pi / 2.0))


def node_generator(seed: int, *stream: int) -> np.random.Generator:
    """Generator for the stream identified by ``seed`` and the counters in ``stream``."""
    return np.random.default_rng(np.random.SeedSequence([seed, *stream]))


def draw_channels(cfg: ChannelConfig, distance_m: float, samples: int,
                  rng: np.random.Generator, los_angle: float) -> np.ndarray:
    """
    Draw ``samples`` Rician channels sharing one line-of-sight direction.

    Args:
        cfg: Channel configuration
        distance_m: Node distance
        samples: Number of realisations
        rng: Generator for the scattered component
        los_angle: Line-of-sight angle of the node

    Returns:
        Complex array of shape (samples, n_antennas)
    """
    gain = cfg.path_gain(distance_m)
    los = los_steering(cfg.n_antennas, los_angle)
    if np.isinf(cfg.rician_k):
        return np.sqrt(gain) * np.broadcast_to(los, (samples, cfg.n_antennas)).copy()

    shape = (samples, cfg.n_antennas)
    scattered = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    los_weight = np.sqrt(cfg.rician_k / (cfg.rician_k + 1.0))
    nlos_weight = np.sqrt(1.0 / (cfg.rician_k + 1.0))
    return np.sqrt(gain) * (los_weight * los[np.newaxis, :] + nlos_weight * scattered)


def draw_channel(cfg: ChannelConfig, distance_m: float,
                 rng: Optional[np.random.Generator] = None) -> ChannelSample:
    """
    Draw one channel realisation.

    With no generator the draw is a pure function of ``cfg.rng_seed``: the
    line-of-sight angle comes first, then the scattered part.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    angle = draw_los_angle(rng)
    h = draw_channels(cfg, distance_m, 1, rng, angle)[0]
    return ChannelSample(h=h, distance_m=float(distance_m))
