"""
Instance Factory for the WPSN allocator tests

Small seeded problem instances built directly from node distances, so unit
tests do not depend on the scenario generator.
"""

from typing import Optional, Sequence

import numpy as np

from src.allocation.solver import NodeProfile, ProblemInstance
from src.channel.peb_gain import AsymptoticGain, RationalApproxGain
from src.channel.propagation import friis_gain
from src.harvesting.eh_models import EhModel

CARRIER_HZ = 915e6
ANTENNA_GAIN = 100.0
N_ANTENNAS = 32
NOISE_POWER = 1e-12
E_COEFF = 1e-7
C_STATIC = 3e-6

SATURATING = EhModel.saturating_exponential(p_max=0.02, eta_max=0.3)
LINEAR = EhModel.linear(0.3)


def path_gain(distance_m: float) -> float:
    return friis_gain(CARRIER_HZ, distance_m, ANTENNA_GAIN)


def rational_instance(distances: Sequence[float], eh: EhModel = SATURATING,
                      c_static: float = C_STATIC, budget_e: float = 3.0,
                      pilot_time: float = 0.1, epsilon: float = 1e-3,
                      n_antennas: int = N_ANTENNAS, noise_power: float = NOISE_POWER) -> ProblemInstance:
    """Instance with rational-approximation gains at the given distances."""
    nodes = tuple(
        NodeProfile(
            e_i=E_COEFF * d ** 2,
            c_i=c_static,
            gain=RationalApproxGain(n_antennas * path_gain(d), n_antennas, noise_power),
            distance_m=float(d),
        )
        for d in distances
    )
    return ProblemInstance(nodes=nodes, budget_e=budget_e, pilot_time=pilot_time, eh=eh, epsilon=epsilon)


def asymptotic_instance(distances: Sequence[float], alpha: float = 0.3, c_static: float = C_STATIC,
                        n_antennas: int = 256, noise_power: float = NOISE_POWER,
                        epsilon: float = 1e-3) -> ProblemInstance:
    """Linear-EH instance with asymptotic gains; per-element variance is the path gain."""
    nodes = tuple(
        NodeProfile(
            e_i=E_COEFF * d ** 2,
            c_i=c_static,
            gain=AsymptoticGain(path_gain(d), n_antennas, noise_power),
            distance_m=float(d),
        )
        for d in distances
    )
    return ProblemInstance(nodes=nodes, budget_e=3.0, pilot_time=0.1, eh=EhModel.linear(alpha),
                           epsilon=epsilon)


def random_distances(rng: np.random.Generator, count: Optional[int] = None,
                     low: float = 5.0, high: float = 50.0) -> np.ndarray:
    if count is None:
        count = int(rng.integers(2, 6))
    return rng.uniform(low, high, size=count)
