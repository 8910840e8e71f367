"""
Closed-Form Specialisations

Identical-path-loss networks with the rational gain, and large arrays with the
asymptotic gain under linear harvesting, admit explicit pilot powers (and in
the second case an explicit rate).
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..channel.peb_gain import AsymptoticGain, RationalApproxGain
from ..harvesting.eh_models import EhKind, EhModel
from ..utils.errors import NumericDomainError, SaturationInfeasible
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

PLUG_BACK_TOL = 1e-8


def identical_gain_pilot(total_demand: float, sigma_h2: float, n_antennas: int,
                         noise_power: float, pilot_time: float) -> float:
    """Stationary point of E_s for identical rational gains, clamped at zero."""
    root = np.sqrt(total_demand * n_antennas * noise_power * (n_antennas - 1)
                   / (pilot_time * sigma_h2 ** 2))
    return float(max(root - n_antennas * noise_power / sigma_h2, 0.0))


def solve_closed_form_identical(instance: ProblemInstance, sigma_h2: float, n_antennas: int,
                                noise_power: float) -> AllocationSolution:
    """
    Rate bisection with the explicit pilot power of identical-gain networks.

    Every node is given the rational gain built from ``sigma_h2``; the inner
    search is replaced by ``identical_gain_pilot``.

    Args:
        instance: Problem instance; its gain models are replaced
        sigma_h2: Shared E[‖h‖²]
        n_antennas: Array size
        noise_power: Noise power σ_n²

    Returns:
        AllocationSolution labelled ``optimal``
    """
    gain = RationalApproxGain(sigma_h2, n_antennas, noise_power)
    shared = instance.with_gains([gain] * instance.n_nodes)
    solver = AllocationSolver(shared)
    p_max = shared.max_pilot_power

    def min_energy(w: float) -> SubproblemResult:
        try:
            demands = solver.demands(w)
        except SaturationInfeasible:
            return SubproblemResult(float("inf"), 0.0, SubproblemStatus.SATURATED)
        p_pilot = identical_gain_pilot(float(np.sum(demands)), sigma_h2, n_antennas,
                                       noise_power, shared.pilot_time)
        if p_pilot >= p_max:
            return SubproblemResult(solver.total_energy(demands, p_max), p_max,
                                    SubproblemStatus.UNREACHABLE)
        status = SubproblemStatus.ZERO_PILOT if p_pilot == 0.0 else SubproblemStatus.INTERIOR
        return SubproblemResult(solver.total_energy(demands, p_pilot), p_pilot, status)

    w_upper = solver.upper_bound()
    if solver.gate_fails():
        return infeasible_solution(shared, "optimal", w_upper)
    w, final, trace = bisect_rate(shared, w_upper, min_energy)
    return solver.build_solution(w, final, trace, "optimal", w_upper)


@dataclass(frozen=True)
class AsymptoticConstants:
    """Constants with E_s^*(w) = 2√(A·w + B) + C·w + D under the asymptotic gain."""

    a: float
    b: float
    c: float
    d: float

    def min_energy(self, w: float) -> float:
        return 2.0 * np.sqrt(self.a * w + self.b) + self.c * w + self.d


def asymptotic_constants(instance: ProblemInstance, sigma_elem2: Sequence[float], n_antennas: int,
                         alpha: float, noise_power: float) -> AsymptoticConstants:
    s = np.asarray(sigma_elem2, dtype=float)
    if s.shape != (instance.n_nodes,) or np.any(s <= 0.0):
        raise ValueError("One positive per-element variance per node is required")
    e = np.array([node.e_i for node in instance.nodes])
    c = np.array([node.c_i for node in instance.nodes])
    t = instance.pilot_time
    return AsymptoticConstants(
        a=float(np.sum(noise_power * e * t / (alpha * s ** 2))),
        b=float(np.sum(noise_power * c * t / (alpha * s ** 2))),
        c=float(np.sum(e / (alpha * n_antennas * s))),
        d=float(np.sum(c / (alpha * n_antennas * s))),
    )


def _node_noise_power(instance: ProblemInstance) -> float:
    powers = {getattr(node.gain, "noise_power", None) for node in instance.nodes}
    if len(powers) != 1 or None in powers:
        raise ValueError("noise_power must be given when node gains do not share one")
    return powers.pop()


def solve_asymptotic(instance: ProblemInstance, sigma_elem2: Sequence[float], n_antennas: int,
                     alpha: Optional[float] = None,
                     noise_power: Optional[float] = None) -> AllocationSolution:
    """
    Closed-form rate and pilot power for linear harvesting and the asymptotic gain.

    Args:
        instance: Problem instance with a linear EH model
        sigma_elem2: Per-node per-element channel variance σ_i²
        n_antennas: Array size
        alpha: Conversion rate (defaults to the instance's linear rate)
        noise_power: Noise power (defaults to the one shared by the node gains)

    Returns:
        AllocationSolution labelled ``asymptotic``

    Raises:
        NumericDomainError: If the discriminant is negative or the plug-back check fails
    """
    if alpha is None:
        if instance.eh.kind != EhKind.LINEAR:
            raise ValueError("The asymptotic closed form needs a linear EH model")
        alpha = instance.eh.alpha
    if noise_power is None:
        noise_power = _node_noise_power(instance)

    gains = [AsymptoticGain(s, n_antennas, noise_power) for s in sigma_elem2]
    linear = instance.with_eh(EhModel.linear(alpha)).with_gains(gains)
    solver = AllocationSolver(linear)
    k = asymptotic_constants(linear, sigma_elem2, n_antennas, alpha, noise_power)
    budget = linear.budget_e
    w_upper = solver.upper_bound()

    head = budget - k.d
    if head <= 2.0 * np.sqrt(k.b):
        logger.info("Static consumption alone exceeds the budget; returning w=0")
        return infeasible_solution(linear, "asymptotic", w_upper)

    beta = head * k.c + 2.0 * k.a
    discriminant = beta ** 2 - k.c ** 2 * (head ** 2 - 4.0 * k.b)
    if discriminant < 0.0:
        raise NumericDomainError(f"Negative discriminant {discriminant:.6g} in the asymptotic rate")
    # Smaller root of C²w² − 2βw + (E−D)² − 4B, in the cancellation-free form
    w_star = (head ** 2 - 4.0 * k.b) / (beta + np.sqrt(discriminant))

    residual = abs(k.min_energy(w_star) - budget)
    if residual > PLUG_BACK_TOL * budget:
        raise NumericDomainError(f"Asymptotic rate fails the plug-back check (residual {residual:.3g})")

    p_pilot = float(np.sqrt(np.sum(noise_power * (solver.e * w_star + solver.c)
                                   / (alpha * np.asarray(sigma_elem2) ** 2 * linear.pilot_time))))
    energies = solver.transmit_energies(solver.demands(w_star), p_pilot)
    return AllocationSolution(
        w_min=float(w_star),
        p_pilot=p_pilot,
        e_t=energies,
        feasible=True,
        trace=ConvergenceTrace(),
        method="asymptotic",
        upper_bound=w_upper,
    )
