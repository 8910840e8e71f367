"""
Pilot Estimation and MRT Gain

LS and MMSE channel estimates from identity pilots, and Monte Carlo estimates
of the expected received-to-transmitted energy ratio of a maximum-ratio
beamformer built from those estimates.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np

from .propagation import (
    ChannelConfig,
    ChannelSample,
    draw_channels,
    draw_los_angle,
    los_steering,
    node_generator,
)

logger = logging.getLogger(__name__)

# Samples per Monte Carlo chunk; each chunk owns an independent stream
MC_CHUNK = 4096
AVERAGED = "averaged"
CONDITIONED = "conditioned"


class EstimatorType(str, Enum):
    LEAST_SQUARES = "ls"
    MMSE = "mmse"


@dataclass(frozen=True, eq=False)
class EstimatorKind:
    """
    Channel estimator used to steer the energy beam.

    Attributes:
        kind: LS or MMSE
        covariance: Channel covariance R_h for MMSE; ``None`` uses the Rician population covariance
    """

    kind: EstimatorType = EstimatorType.LEAST_SQUARES
    covariance: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.covariance is None:
            return
        if self.kind != EstimatorType.MMSE:
            raise ValueError("Only the MMSE estimator takes a covariance")
        r = np.asarray(self.covariance)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError("Covariance must be a square matrix")
        if not np.allclose(r, r.conj().T):
            raise ValueError("Covariance must be Hermitian")
        scale = max(float(np.max(np.abs(r))), 1e-300)
        if np.min(np.linalg.eigvalsh(r)) < -1e-9 * scale:
            raise ValueError("Covariance must be positive semidefinite")

    @classmethod
    def least_squares(cls) -> "EstimatorKind":
        return cls(kind=EstimatorType.LEAST_SQUARES)

    @classmethod
    def mmse(cls, covariance: Optional[np.ndarray] = None) -> "EstimatorKind":
        return cls(kind=EstimatorType.MMSE, covariance=covariance)


@dataclass(frozen=True)
class GainEstimate:
    gain: float
    stderr: float


def rician_covariance(cfg: ChannelConfig, distance_m: float, los_angle: float) -> np.ndarray:
    """Population covariance of the Rician channel: rank-one LOS term plus scaled identity."""
    gain = cfg.path_gain(distance_m)
    a = los_steering(cfg.n_antennas, los_angle)
    if np.isinf(cfg.rician_k):
        return gain * np.outer(a, a.conj())
    los_weight = cfg.rician_k / (cfg.rician_k + 1.0)
    return gain * (los_weight * np.outer(a, a.conj())
                   + (1.0 / (cfg.rician_k + 1.0)) * np.eye(cfg.n_antennas))


def _mmse_combiner(covariance: np.ndarray, cfg: ChannelConfig, p_pilot: float) -> np.ndarray:
    # Direction of R(P/N_t R + σ²I)^{-1}; the √(P/N_t) prefactor cancels in the gain ratio
    a = p_pilot / cfg.n_antennas * covariance + cfg.noise_power * np.eye(cfg.n_antennas)
    return np.linalg.solve(a, covariance)


def _complex_noise(rng: np.random.Generator, shape, power: float) -> np.ndarray:
    return np.sqrt(power / 2.0) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _mrt_ratio(h: np.ndarray, b: np.ndarray) -> np.ndarray:
    """|b^H h|² / ‖b‖² per row."""
    inner = np.sum(b.conj() * h, axis=1)
    return np.abs(inner) ** 2 / np.sum(np.abs(b) ** 2, axis=1)


def _channel_chunks(cfg: ChannelConfig, distance_m: float, samples: int, los_angle: float,
                    mode: str, channel: Optional[ChannelSample]):
    """Yield (chunk generator, channel block); channels are drawn before any noise."""
    for chunk_index, start in enumerate(range(0, samples, MC_CHUNK)):
        count = min(MC_CHUNK, samples - start)
        rng = node_generator(cfg.rng_seed, 1, chunk_index)
        if mode == AVERAGED:
            h = draw_channels(cfg, distance_m, count, rng, los_angle)
        else:
            h = np.broadcast_to(channel.h, (count, cfg.n_antennas))
        yield rng, h


def _check_mode(mode: str, channel: Optional[ChannelSample]) -> None:
    if mode not in (AVERAGED, CONDITIONED):
        raise ValueError(f"Unknown Monte Carlo mode: {mode}")
    if mode == CONDITIONED and channel is None:
        raise ValueError("Conditioned mode needs a channel sample")


def node_los_angle(cfg: ChannelConfig) -> float:
    return draw_los_angle(node_generator(cfg.rng_seed))


def estimate_peb_gain(estimator: EstimatorKind, cfg: ChannelConfig, distance_m: float,
                      p_pilot: float, samples: int, mode: str = AVERAGED,
                      channel: Optional[ChannelSample] = None) -> GainEstimate:
    """
    Monte Carlo estimate of E[|b^H h|²/‖b‖²] with b built from a pilot estimate of h.

    Args:
        estimator: LS or MMSE
        cfg: Channel configuration; its seed fixes every draw
        distance_m: Node distance
        p_pilot: Pilot power P^p in Watts (0 gives the noise-only beam)
        samples: Number of (channel, noise) draws
        mode: ``averaged`` draws a fresh channel per sample; ``conditioned`` holds ``channel`` fixed
        channel: Channel used in conditioned mode

    Returns:
        GainEstimate with the sample mean and its standard error
    """
    if p_pilot < 0.0:
        raise ValueError(f"Pilot power must be non-negative, got {p_pilot}")
    if samples < 1:
        raise ValueError(f"samples must be at least 1, got {samples}")
    _check_mode(mode, channel)

    los_angle = node_los_angle(cfg)
    combiner = None
    if estimator.kind == EstimatorType.MMSE:
        covariance = estimator.covariance
        if covariance is None:
            covariance = rician_covariance(cfg, distance_m, los_angle)
        combiner = _mmse_combiner(covariance, cfg, p_pilot)

    n_t = cfg.n_antennas
    ratios: List[np.ndarray] = []
    for rng, h in _channel_chunks(cfg, distance_m, samples, los_angle, mode, channel):
        noise = _complex_noise(rng, h.shape, cfg.noise_power)
        if combiner is None:
            # √P·(h + √(N_t/P)·n), scaled so that P = 0 is the noise-only limit
            b = np.sqrt(p_pilot) * h + np.sqrt(n_t) * noise
        else:
            y = np.sqrt(p_pilot / n_t) * h + noise
            b = y @ combiner.T
        ratios.append(_mrt_ratio(h, b))

    values = np.concatenate(ratios)
    stderr = float(np.std(values, ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
    return GainEstimate(gain=float(np.mean(values)), stderr=stderr)


def peb_gain_mc(estimator: EstimatorKind, cfg: ChannelConfig, distance_m: float,
                p_pilot: float, samples: int, mode: str = AVERAGED,
                channel: Optional[ChannelSample] = None) -> float:
    return estimate_peb_gain(estimator, cfg, distance_m, p_pilot, samples, mode, channel).gain


def channel_energy_mean(cfg: ChannelConfig, distance_m: float, samples: int,
                        mode: str = AVERAGED, channel: Optional[ChannelSample] = None) -> float:
    """Sample mean of ‖h‖² over the same channel draws the Monte Carlo gain uses."""
    _check_mode(mode, channel)
    los_angle = node_los_angle(cfg)
    total = 0.0
    for _, h in _channel_chunks(cfg, distance_m, samples, los_angle, mode, channel):
        total += float(np.sum(np.abs(h) ** 2))
    return total / samples
