"""
Baseline Allocators

Reference schemes the optimal split is compared against: a fixed pilot
fraction, a random pilot power, and incoherent energy broadcasting with no
channel estimation.
"""

import logging
from typing import Optional

import numpy as np

from ..channel.peb_gain import BroadcastGain
from ..utils.errors import SaturationInfeasible
from .solver import (
    AllocationSolution,
    AllocationSolver,
    ConvergenceTrace,
    ProblemInstance,
    SubproblemResult,
    SubproblemStatus,
    bisect_rate,
    infeasible_solution,
)

logger = logging.getLogger(__name__)

DEFAULT_BROADCAST_POWER = 3.0


def _solve_pinned(instance: ProblemInstance, p_pilot: float, method: str) -> AllocationSolution:
    solver = AllocationSolver(instance)
    gains = solver.gains(p_pilot)
    remaining = instance.budget_e - instance.pilot_time * p_pilot
    w_upper = solver.rate_bound(gains, remaining)

    def min_energy(w: float) -> SubproblemResult:
        try:
            demands = solver.demands(w)
        except SaturationInfeasible:
            return SubproblemResult(float("inf"), p_pilot, SubproblemStatus.SATURATED)
        return SubproblemResult(solver.total_energy(demands, p_pilot), p_pilot, SubproblemStatus.PINNED)

    w, final, trace = bisect_rate(instance, w_upper, min_energy)
    return solver.build_solution(w, final, trace, method, w_upper)


def solve_fixed(instance: ProblemInstance, pilot_fraction: float) -> AllocationSolution:
    """
    Spend a fixed fraction of E/t^p on pilots and maximise the rate for the rest.

    Args:
        instance: Problem instance
        pilot_fraction: P^p as a fraction of E/t^p, in [0, 1)

    Returns:
        AllocationSolution labelled ``fixed:<fraction>``
    """
    if not 0.0 <= pilot_fraction < 1.0:
        raise ValueError(f"pilot_fraction must lie in [0, 1), got {pilot_fraction}")
    p_pilot = pilot_fraction * instance.max_pilot_power
    return _solve_pinned(instance, p_pilot, f"fixed:{pilot_fraction:g}")


def solve_random(instance: ProblemInstance, seed: Optional[int] = None) -> AllocationSolution:
    """Pilot power drawn uniformly on [0, E/t^p], then as ``solve_fixed``."""
    rng = np.random.default_rng(seed)
    pilot_fraction = float(rng.uniform(0.0, 1.0))
    return _solve_pinned(instance, pilot_fraction * instance.max_pilot_power, "random")


def solve_broadcast(instance: ProblemInstance,
                    broadcast_power: float = DEFAULT_BROADCAST_POWER) -> AllocationSolution:
    """
    Broadcast energy without pilots for the whole energy phase.

    One omnidirectional transmission reaches every node at once, so each
    node receives P·(1 − t^p)·σ_h²/N_t whatever the network size. ``e_t``
    books the radiated energy in equal shares; it sums to P·(1 − t^p).

    Args:
        instance: Problem instance
        broadcast_power: Transmit power in Watts

    Returns:
        AllocationSolution labelled ``broadcast:<power>``; infeasible with a
        zero allocation when some node cannot cover its static consumption
    """
    if not broadcast_power > 0.0:
        raise ValueError(f"broadcast_power must be positive, got {broadcast_power}")
    method = f"broadcast:{broadcast_power:g}"
    radiated = broadcast_power * (1.0 - instance.pilot_time)
    if radiated > instance.budget_e:
        logger.warning("Broadcast at %.3g W spends %.3g J, above the %.3g J budget",
                       broadcast_power, radiated, instance.budget_e)

    gains = np.array([
        BroadcastGain(node.gain.sigma_h2, node.gain.n_antennas).gain(0.0) for node in instance.nodes
    ])
    harvested = np.asarray(instance.eh.harvest(radiated * gains), dtype=float)
    e = np.array([node.e_i for node in instance.nodes])
    c = np.array([node.c_i for node in instance.nodes])
    w = float(np.min((harvested - c) / e))
    if not w > 0.0:
        logger.info("%s: harvest does not cover the static load", method)
        return infeasible_solution(instance, method)
    return AllocationSolution(
        w_min=w,
        p_pilot=0.0,
        e_t=np.full(instance.n_nodes, radiated / instance.n_nodes),
        feasible=True,
        trace=ConvergenceTrace(),
        method=method,
    )
