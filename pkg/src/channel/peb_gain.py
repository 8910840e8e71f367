"""
PEB Gain Models

Per-node gain functions g(P^p): the expected ratio of received to transmitted
energy when the energy beam is steered by a channel estimate obtained with
pilot power P^p. Closed forms, a Monte Carlo backend, the concavity threshold
and a monotone/concave/bounded qualification report live here.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from scipy import optimize, special

from .estimation import (
    AVERAGED,
    EstimatorKind,
    GainEstimate,
    channel_energy_mean,
    estimate_peb_gain,
)
from .propagation import ChannelConfig, ChannelSample

logger = logging.getLogger(__name__)

CONCAVITY_FACTOR = 2.0 * np.sqrt(3.0) - 1.0
CLOSED_FORM_TOL = 1e-12


def g_hat(sigma_h2, n_antennas: int, noise_power: float, p_pilot):
    """σ_h²·(Pσ_h² + N_tσ_n²)/(Pσ_h² + N_t²σ_n²)."""
    p = np.asarray(p_pilot, dtype=float)
    value = sigma_h2 * (p * sigma_h2 + n_antennas * noise_power) / (
        p * sigma_h2 + n_antennas ** 2 * noise_power)
    return float(value) if np.ndim(value) == 0 else value


def g_hat_derivative(sigma_h2, n_antennas: int, noise_power: float, p_pilot):
    """d/dP of ``g_hat``: σ_h⁴·N_tσ_n²(N_t−1)/(Pσ_h² + N_t²σ_n²)²."""
    p = np.asarray(p_pilot, dtype=float)
    value = sigma_h2 ** 2 * n_antennas * noise_power * (n_antennas - 1) / (
        p * sigma_h2 + n_antennas ** 2 * noise_power) ** 2
    return float(value) if np.ndim(value) == 0 else value


def g_asymptotic(sigma_elem2, n_antennas: int, noise_power: float, p_pilot):
    """Large-array limit N_tσ_i⁴P/(σ_i²P + N_tσ_n²)."""
    p = np.asarray(p_pilot, dtype=float)
    value = n_antennas * sigma_elem2 ** 2 * p / (sigma_elem2 * p + n_antennas * noise_power)
    return float(value) if np.ndim(value) == 0 else value


def g_asymptotic_derivative(sigma_elem2, n_antennas: int, noise_power: float, p_pilot):
    p = np.asarray(p_pilot, dtype=float)
    value = n_antennas ** 2 * sigma_elem2 ** 2 * noise_power / (
        sigma_elem2 * p + n_antennas * noise_power) ** 2
    return float(value) if np.ndim(value) == 0 else value


class PebGainModel(ABC):
    """
    Gain function g(P^p) of one node.

    Subclasses provide ``gain``; ``derivative`` falls back to central
    differences when no analytic slope exists.
    """

    backend = "abstract"

    def __init__(self, n_antennas: int):
        if n_antennas < 1:
            raise ValueError(f"n_antennas must be at least 1, got {n_antennas}")
        self.n_antennas = int(n_antennas)
        self._curve_cache: Dict[tuple, np.ndarray] = {}

    @property
    @abstractmethod
    def sigma_h2(self) -> float:
        """Array-gain ceiling E[‖h‖²]."""

    @abstractmethod
    def gain(self, p_pilot: float) -> float:
        """Gain at pilot power ``p_pilot``."""

    def derivative(self, p_pilot: float) -> float:
        step = 1e-6 * max(p_pilot, 1e-6)
        if p_pilot >= step:
            return (self.gain(p_pilot + step) - self.gain(p_pilot - step)) / (2.0 * step)
        return (self.gain(p_pilot + step) - self.gain(p_pilot)) / step

    def stderr(self, p_pilot: float) -> float:
        return 0.0

    def curve(self, p_grid) -> np.ndarray:
        """Gains over ``p_grid``, cached per grid for repeated plotting exports."""
        grid = tuple(float(p) for p in np.atleast_1d(p_grid))
        if grid not in self._curve_cache:
            self._curve_cache[grid] = np.array([self.gain(p) for p in grid])
        return self._curve_cache[grid]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(sigma_h2={self.sigma_h2:.6g}, n_antennas={self.n_antennas})"


class RationalApproxGain(PebGainModel):
    backend = "rational"

    def __init__(self, sigma_h2: float, n_antennas: int, noise_power: float):
        super().__init__(n_antennas)
        if not sigma_h2 > 0.0 or not noise_power > 0.0:
            raise ValueError("sigma_h2 and noise_power must be positive")
        self._sigma_h2 = float(sigma_h2)
        self.noise_power = float(noise_power)

    @property
    def sigma_h2(self) -> float:
        return self._sigma_h2

    def gain(self, p_pilot: float) -> float:
        return g_hat(self._sigma_h2, self.n_antennas, self.noise_power, p_pilot)

    def derivative(self, p_pilot: float) -> float:
        return g_hat_derivative(self._sigma_h2, self.n_antennas, self.noise_power, p_pilot)


class AsymptoticGain(PebGainModel):
    backend = "asymptotic"

    def __init__(self, sigma_elem2: float, n_antennas: int, noise_power: float):
        super().__init__(n_antennas)
        if not sigma_elem2 > 0.0 or not noise_power > 0.0:
            raise ValueError("sigma_elem2 and noise_power must be positive")
        self.sigma_elem2 = float(sigma_elem2)
        self.noise_power = float(noise_power)

    @property
    def sigma_h2(self) -> float:
        return self.n_antennas * self.sigma_elem2

    def gain(self, p_pilot: float) -> float:
        return g_asymptotic(self.sigma_elem2, self.n_antennas, self.noise_power, p_pilot)

    def derivative(self, p_pilot: float) -> float:
        return g_asymptotic_derivative(self.sigma_elem2, self.n_antennas, self.noise_power, p_pilot)


class BroadcastGain(PebGainModel):
    """Incoherent broadcast: no array gain whatever the pilot power."""

    backend = "broadcast"

    def __init__(self, sigma_h2: float, n_antennas: int):
        super().__init__(n_antennas)
        if not sigma_h2 > 0.0:
            raise ValueError("sigma_h2 must be positive")
        self._sigma_h2 = float(sigma_h2)

    @property
    def sigma_h2(self) -> float:
        return self._sigma_h2

    def gain(self, p_pilot: float) -> float:
        return self._sigma_h2 / self.n_antennas

    def derivative(self, p_pilot: float) -> float:
        return 0.0


class MonteCarloGain(PebGainModel):
    """
    Simulated gain with a rational surrogate for slopes.

    Each evaluation reuses the same seeded channel and noise draws, so the
    curve is smooth in P^p. The surrogate shares the Monte Carlo plateau
    E[‖h‖²] and supplies ``derivative``.
    """

    backend = "monte_carlo"

    def __init__(self, cfg: ChannelConfig, distance_m: float, samples: int = 1000,
                 estimator: Optional[EstimatorKind] = None, mode: str = AVERAGED,
                 channel: Optional[ChannelSample] = None):
        super().__init__(cfg.n_antennas)
        if samples < 100:
            logger.warning("Monte Carlo gain with only %d samples will be noisy", samples)
        self.cfg = cfg
        self.distance_m = float(distance_m)
        self.samples = int(samples)
        self.estimator = estimator or EstimatorKind.least_squares()
        self.mode = mode
        self.channel = channel
        self._estimates: Dict[float, GainEstimate] = {}
        self._plateau = channel_energy_mean(cfg, distance_m, samples, mode, channel)
        self.surrogate = RationalApproxGain(self._plateau, cfg.n_antennas, cfg.noise_power)

    @property
    def sigma_h2(self) -> float:
        return self._plateau

    def estimate(self, p_pilot: float) -> GainEstimate:
        key = float(p_pilot)
        if key not in self._estimates:
            self._estimates[key] = estimate_peb_gain(
                self.estimator, self.cfg, self.distance_m, key, self.samples, self.mode, self.channel
            )
        return self._estimates[key]

    def gain(self, p_pilot: float) -> float:
        return self.estimate(p_pilot).gain

    def stderr(self, p_pilot: float) -> float:
        return self.estimate(p_pilot).stderr

    def derivative(self, p_pilot: float) -> float:
        return self.surrogate.derivative(p_pilot)


def gamma_quantile(shape: float, probability: float) -> float:
    """
    Inverse of the regularized lower incomplete gamma function P(shape, x).

    Solved by bracketing root search on ``scipy.special.gammainc``.
    """
    if not 0.0 < probability < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {probability}")

    def residual(x: float) -> float:
        return special.gammainc(shape, x) - probability

    upper = max(1.0, 2.0 * shape)
    while residual(upper) < 0.0:
        upper *= 2.0
    return float(optimize.brentq(residual, 0.0, upper, xtol=1e-12, rtol=1e-14))


def concavity_threshold(n_antennas: int, noise_power: float, h_norm2: float,
                        probability: float = 0.99) -> float:
    """
    Pilot power above which the conditioned gain is concave with the given probability.

    Args:
        n_antennas: Array size N_t
        noise_power: σ_n² in Watts
        h_norm2: ‖h‖² of the conditioning channel
        probability: Confidence level of the noise-norm quantile

    Returns:
        Threshold pilot power in Watts
    """
    if not h_norm2 > 0.0:
        raise ValueError(f"h_norm2 must be positive, got {h_norm2}")
    quantile = gamma_quantile(n_antennas, probability)
    return CONCAVITY_FACTOR * quantile * n_antennas * noise_power / h_norm2


@dataclass(frozen=True)
class GainQualification:
    monotone: bool
    concave: bool
    bounded: bool

    @property
    def passed(self) -> bool:
        return self.monotone and self.concave and self.bounded


def qualify_gain(g: PebGainModel, p_max_probe: float, grid_points: int = 200,
                 p_min: Optional[float] = None) -> GainQualification:
    """
    Check that g is increasing, concave and bounded by its array-gain ceiling.

    Slopes are compared on a log grid. Monte Carlo models are allowed three
    standard errors of slack; closed forms a relative 1e-12.

    Args:
        g: Gain model under test
        p_max_probe: Upper end of the probe range
        grid_points: Number of log-spaced probe points
        p_min: Lower end of the probe range (default ``p_max_probe * 1e-6``)

    Returns:
        GainQualification report
    """
    if not p_max_probe > 0.0:
        raise ValueError("p_max_probe must be positive")
    low = p_min if p_min is not None else p_max_probe * 1e-6
    grid = np.logspace(np.log10(low), np.log10(p_max_probe), grid_points)
    values = np.asarray(g.curve(grid), dtype=float)
    errors = np.array([g.stderr(p) for p in grid])

    steps = np.diff(grid)
    diffs = np.diff(values)
    slopes = diffs / steps
    scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)

    if np.any(errors > 0.0):
        diff_tol = 3.0 * np.sqrt(errors[:-1] ** 2 + errors[1:] ** 2)
        d1, d2 = steps[:-1], steps[1:]
        slope_tol = 3.0 * np.sqrt((errors[2:] / d2) ** 2
                                  + (errors[1:-1] * (1.0 / d1 + 1.0 / d2)) ** 2
                                  + (errors[:-2] / d1) ** 2)
    else:
        diff_tol = CLOSED_FORM_TOL * scale
        slope_tol = CLOSED_FORM_TOL * scale / steps.min()

    monotone = bool(np.all(diffs > -diff_tol))
    concave = bool(np.all(np.diff(slopes) < slope_tol))
    bounded = bool(values.min() >= 0.0 and values.max() <= g.sigma_h2 * (1.0 + 1e-9))
    logger.debug("%r qualification: monotone=%s concave=%s bounded=%s", g, monotone, concave, bounded)
    return GainQualification(monotone=monotone, concave=concave, bounded=bounded)
