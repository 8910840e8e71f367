"""
Two-Tone Rectifier Surrogate

A two-sinewave DC-output surrogate z_DC used to check whether a waveform
strategy keeps harvested power monotone in the average RF input power.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class WaveformStrategy(str, Enum):
    """How the RF power is split between the two tones."""

    ADAPTIVE_SINGLE_SINE = "adaptive_single_sine"
    EQUAL_RATIO = "equal_ratio"
    OPTIMAL_GRID = "optimal_grid"
    RANDOM_SPLIT = "random_split"


@dataclass(frozen=True)
class ZdcToyModel:
    """
    Fourth-order rectifier surrogate for two tones with amplitudes s0, s1.

    Attributes:
        k2: Second-order diode coefficient
        k4: Fourth-order diode coefficient
        a0: Channel amplitude of tone 0
        a1: Channel amplitude of tone 1
        strategy: Power split strategy used by ``allocate``
        ratio: s0/s1 amplitude ratio for the equal-ratio strategy
        grid_points: Resolution of the optimal split search
    """

    k2: float
    k4: float
    a0: float
    a1: float
    strategy: WaveformStrategy = WaveformStrategy.OPTIMAL_GRID
    ratio: float = 1.0
    grid_points: int = 10_000

    def __post_init__(self):
        for name in ("k2", "k4", "a0", "a1", "ratio"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive, got {getattr(self, name)}")
        if self.grid_points < 2:
            raise ValueError("grid_points must be at least 2")

    def evaluate(self, s0: float, s1: float) -> float:
        """z_DC for the given tone amplitudes."""
        if s0 < 0.0 or s1 < 0.0:
            raise ValueError("Tone amplitudes must be non-negative")
        u = (s0 * self.a0) ** 2
        v = (s1 * self.a1) ** 2
        return self.k2 * (u + v) + self.k4 * ((u + v) ** 2 + 2.0 * u * v)

    def _amplitudes(self, p_ave_rf: float, share: float) -> Tuple[float, float]:
        # share is the fraction of 2p carried by tone 0
        total = 2.0 * p_ave_rf
        return np.sqrt(total * share) / self.a0, np.sqrt(total * (1.0 - share)) / self.a1

    def _split_value(self, p_ave_rf: float, shares: np.ndarray) -> np.ndarray:
        total = 2.0 * p_ave_rf
        u = total * shares
        v = total * (1.0 - shares)
        return self.k2 * (u + v) + self.k4 * ((u + v) ** 2 + 2.0 * u * v)

    def allocate(self, p_ave_rf: float, rng: Optional[np.random.Generator] = None) -> Tuple[float, float]:
        """
        Tone amplitudes satisfying 0.5(s0²A0² + s1²A1²) = p_ave_rf.

        Args:
            p_ave_rf: Average RF input power
            rng: Generator for the random-split strategy

        Returns:
            (s0, s1)
        """
        if p_ave_rf < 0.0:
            raise ValueError(f"p_ave_rf must be non-negative, got {p_ave_rf}")

        if self.strategy == WaveformStrategy.ADAPTIVE_SINGLE_SINE:
            share = 1.0 if self.a0 >= self.a1 else 0.0
        elif self.strategy == WaveformStrategy.EQUAL_RATIO:
            weight0 = (self.ratio * self.a0) ** 2
            share = weight0 / (weight0 + self.a1 ** 2)
        elif self.strategy == WaveformStrategy.OPTIMAL_GRID:
            shares = np.linspace(0.0, 1.0, self.grid_points)
            share = float(shares[np.argmax(self._split_value(p_ave_rf, shares))])
        else:
            if rng is None:
                raise ValueError("The random-split strategy needs a random generator")
            share = float(rng.uniform(0.0, 1.0))

        return self._amplitudes(p_ave_rf, share)


def zdc_eval(model: ZdcToyModel, s0: float, s1: float) -> float:
    return model.evaluate(s0, s1)


def zdc_allocate(model: ZdcToyModel, p_ave_rf: float,
                 rng: Optional[np.random.Generator] = None) -> Tuple[float, float]:
    return model.allocate(p_ave_rf, rng)


def monotonicity_violations(model: ZdcToyModel, pairs: Iterable[Tuple[float, float]],
                            rng: Optional[np.random.Generator] = None) -> int:
    """
    Count power pairs (p, p') with p < p' whose allocated z_DC does not increase.

    Args:
        model: Surrogate with the strategy under test
        pairs: Power pairs; each is sorted before use
        rng: Generator forwarded to ``allocate``

    Returns:
        Number of violating pairs
    """
    violations = 0
    for p_a, p_b in pairs:
        low, high = sorted((p_a, p_b))
        if low == high:
            continue
        z_low = model.evaluate(*model.allocate(low, rng))
        z_high = model.evaluate(*model.allocate(high, rng))
        if not z_low < z_high:
            violations += 1
    logger.debug("%s: %d monotonicity violations", model.strategy.value, violations)
    return violations
