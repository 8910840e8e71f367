"""
Max-Min Rate Solver

Splits one coherence block's energy budget between channel-estimation pilots
and per-node energy beams so that the smallest sensing rate is as large as
possible. The outer search bisects the rate; each feasibility test solves a
one-dimensional convex problem in the pilot power.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..channel.peb_gain import PebGainModel
from ..harvesting.eh_models import EhModel
from ..utils.errors import SaturationInfeasible, ZeroGain

logger = logging.getLogger(__name__)

CERTIFICATE_BUDGET_TOL = 1e-9
CERTIFICATE_CAUSALITY_TOL = 1e-6
SATURATION_MARGIN = 1e-12


@dataclass(frozen=True)
class NodeProfile:
    """
    Energy profile of one sensor node.

    Attributes:
        e_i: Energy per sensed bit (J/bit)
        c_i: Static energy per block (J)
        gain: Beamforming gain model g_i(P^p)
        distance_m: Distance to the base station, kept for reporting
    """

    e_i: float
    c_i: float
    gain: PebGainModel
    distance_m: Optional[float] = None

    def __post_init__(self):
        if not self.e_i > 0.0:
            raise ValueError(f"e_i must be positive, got {self.e_i}")
        if not self.c_i >= 0.0:
            raise ValueError(f"c_i must be non-negative, got {self.c_i}")


@dataclass(frozen=True)
class ProblemInstance:
    """
    One coherence block's allocation problem.

    Attributes:
        nodes: Node profiles
        budget_e: Energy budget E per block (J)
        pilot_time: Pilot fraction t^p of the unit block
        eh: RF-DC conversion model shared by all nodes
        epsilon: Termination gap of the rate bisection (bits/s)
        inner_tol: Relative tolerance of the pilot-power root search
    """

    nodes: Tuple[NodeProfile, ...]
    budget_e: float
    pilot_time: float
    eh: EhModel
    epsilon: float = 1e-3
    inner_tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if len(self.nodes) < 1:
            raise ValueError("A problem instance needs at least one node")
        if not self.budget_e > 0.0:
            raise ValueError(f"budget_e must be positive, got {self.budget_e}")
        if not 0.0 < self.pilot_time < 1.0:
            raise ValueError(f"pilot_time must lie in (0, 1), got {self.pilot_time}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.inner_tol < 1.0:
            raise ValueError(f"inner_tol must lie in (0, 1), got {self.inner_tol}")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def max_pilot_power(self) -> float:
        """Pilot power that would spend the whole budget, E/t^p."""
        return self.budget_e / self.pilot_time

    def with_eh(self, eh: EhModel) -> "ProblemInstance":
        return replace(self, eh=eh)

    def with_gains(self, gains: Sequence[PebGainModel]) -> "ProblemInstance":
        if len(gains) != self.n_nodes:
            raise ValueError("One gain model per node is required")
        nodes = tuple(replace(node, gain=gain) for node, gain in zip(self.nodes, gains))
        return replace(self, nodes=nodes)


class SubproblemStatus(str, Enum):
    ZERO_PILOT = "zero_pilot"
    INTERIOR = "interior"
    PINNED = "pinned"
    UNREACHABLE = "unreachable"
    SATURATED = "saturated"


@dataclass(frozen=True)
class SubproblemResult:
    """Minimum block energy E_s^*(w) and the pilot power attaining it."""

    e_s_star: float
    p_pilot: float
    status: SubproblemStatus
    inner_iterations: int = 0

    @property
    def reachable(self) -> bool:
        return self.status not in (SubproblemStatus.UNREACHABLE, SubproblemStatus.SATURATED)

    def within(self, budget_e: float) -> bool:
        # A tie with the budget counts as feasible
        return self.reachable and self.e_s_star <= budget_e


@dataclass(frozen=True)
class TraceStep:
    w_lo: float
    w_hi: float
    w_mid: float
    e_s_star: float
    p_pilot: float


@dataclass
class ConvergenceTrace:
    iterations: List[TraceStep] = field(default_factory=list)
    inner_iteration_counts: List[int] = field(default_factory=list)

    def record(self, step: TraceStep, inner_iterations: int) -> None:
        self.iterations.append(step)
        self.inner_iteration_counts.append(inner_iterations)

    def __len__(self) -> int:
        return len(self.iterations)


@dataclass(eq=False)
class AllocationSolution:
    """
    Result of an allocator.

    Attributes:
        w_min: Network sensing rate (bits/s)
        p_pilot: Pilot power P^p (W)
        e_t: Per-node transmit energy E_i^t (J)
        feasible: False when no positive-rate allocation was certified
        trace: Outer bisection history (empty for closed forms without search)
        method: Allocator label used in sweep tables
        upper_bound: Rate bound the search started from
    """

    w_min: float
    p_pilot: float
    e_t: np.ndarray
    feasible: bool
    trace: ConvergenceTrace = field(default_factory=ConvergenceTrace)
    method: str = "optimal"
    upper_bound: float = float("nan")

    @property
    def sum_et(self) -> float:
        return float(np.sum(self.e_t))

    @property
    def outer_iterations(self) -> int:
        return len(self.trace)

    def received_energy(self, instance: ProblemInstance) -> np.ndarray:
        gains = np.array([node.gain.gain(self.p_pilot) for node in instance.nodes])
        return self.e_t * gains

    def harvested_energy(self, instance: ProblemInstance) -> np.ndarray:
        return np.asarray(instance.eh.harvest(self.received_energy(instance)), dtype=float)

    def to_record(self) -> Dict[str, Any]:
        """Flat record: rate, pilot power, energies, iterations and feasibility."""
        record: Dict[str, Any] = {
            'w_min_bits_s': self.w_min,
            'p_pilot_w': self.p_pilot,
            'sum_et_j': self.sum_et,
        }
        for index, energy in enumerate(self.e_t):
            record[f'et_j_{index}'] = float(energy)
        record['outer_iters'] = self.outer_iterations
        record['feasible'] = self.feasible
        return record


def infeasible_solution(instance: ProblemInstance, method: str, upper_bound: float = 0.0,
                        trace: Optional[ConvergenceTrace] = None) -> AllocationSolution:
    return AllocationSolution(
        w_min=0.0,
        p_pilot=0.0,
        e_t=np.zeros(instance.n_nodes),
        feasible=False,
        trace=trace or ConvergenceTrace(),
        method=method,
        upper_bound=upper_bound,
    )


def outer_iteration_bound(w_upper: float, epsilon: float) -> int:
    """ceil(log2(w_upper/ε)) halvings bring [0, w_upper] down to width ε; zero if it already is."""
    if not w_upper > epsilon:
        return 0
    return max(math.ceil(math.log2(w_upper / epsilon)), 0)


def bisect_rate(instance: ProblemInstance, w_upper: float,
                min_energy: Callable[[float], SubproblemResult]
                ) -> Tuple[float, SubproblemResult, ConvergenceTrace]:
    """
    Outer rate bisection on [0, w_upper] until the bracket is at most ε wide.

    The step count never exceeds ``outer_iteration_bound(w_upper, ε)``, also
    when rounding leaves the last bracket a few ulps above ε.

    Args:
        instance: Problem instance (budget and ε)
        w_upper: Starting upper end of the bracket
        min_energy: Feasibility oracle returning E_s^*(w)

    Returns:
        (last feasible rate, its subproblem result, trace)
    """
    trace = ConvergenceTrace()
    w_lo, w_hi = 0.0, max(w_upper, 0.0)
    max_steps = outer_iteration_bound(w_hi, instance.epsilon)
    while w_hi - w_lo > instance.epsilon and len(trace) < max_steps:
        w_mid = 0.5 * (w_lo + w_hi)
        result = min_energy(w_mid)
        trace.record(TraceStep(w_lo, w_hi, w_mid, result.e_s_star, result.p_pilot),
                     result.inner_iterations)
        logger.debug("w=%.9g E_s*=%.9g P^p=%.6g (%s)", w_mid, result.e_s_star,
                     result.p_pilot, result.status.value)
        if result.within(instance.budget_e):
            w_lo = w_mid
        else:
            w_hi = w_mid
    return w_lo, min_energy(w_lo), trace


class AllocationSolver:
    """
    Per-instance evaluator of demands, energies and slopes.

    All public solver entry points build one of these; it caches the
    instance's consumption vectors.
    """

    def __init__(self, instance: ProblemInstance):
        self.instance = instance
        self.e = np.array([node.e_i for node in instance.nodes], dtype=float)
        self.c = np.array([node.c_i for node in instance.nodes], dtype=float)

    def gains(self, p_pilot: float) -> np.ndarray:
        return np.array([node.gain.gain(p_pilot) for node in self.instance.nodes], dtype=float)

    def gain_slopes(self, p_pilot: float) -> np.ndarray:
        return np.array([node.gain.derivative(p_pilot) for node in self.instance.nodes], dtype=float)

    def demands(self, w: float) -> np.ndarray:
        """Received energy η^{-1}(e_i w + c_i) each node needs; raises SaturationInfeasible."""
        if w < 0.0:
            raise ValueError(f"Rate must be non-negative, got {w}")
        return np.asarray(self.instance.eh.inverse(self.e * w + self.c), dtype=float)

    def transmit_energies(self, demands: np.ndarray, p_pilot: float) -> np.ndarray:
        gains = self.gains(p_pilot)
        with np.errstate(divide="ignore", invalid="ignore"):
            energies = np.where(demands > 0.0, demands / gains, 0.0)
        return np.where((demands > 0.0) & (gains <= 0.0), np.inf, energies)

    def total_energy(self, demands: np.ndarray, p_pilot: float) -> float:
        """E_s(P^p; w) = t^p·P^p + Σ f_i."""
        return float(self.instance.pilot_time * p_pilot
                     + np.sum(self.transmit_energies(demands, p_pilot)))

    def energy_slope(self, demands: np.ndarray, p_pilot: float) -> float:
        """E_s′(P^p; w) = t^p − Σ η^{-1}(·)·g_i′/g_i²."""
        gains = self.gains(p_pilot)
        slopes = self.gain_slopes(p_pilot)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(demands > 0.0, demands * slopes / gains ** 2, 0.0)
        terms = np.where((demands > 0.0) & (gains <= 0.0), np.inf, terms)
        return float(self.instance.pilot_time - np.sum(terms))

    def min_energy(self, w: float) -> SubproblemResult:
        """
        Minimise E_s(P^p; w) over P^p in [0, E/t^p].

        Zero pilot power when the slope at 0 is non-negative, unreachable when
        the slope is still non-positive at E/t^p, otherwise a bisection on the
        slope.
        """
        try:
            demands = self.demands(w)
        except SaturationInfeasible:
            return SubproblemResult(float("inf"), 0.0, SubproblemStatus.SATURATED)

        p_max = self.instance.max_pilot_power
        if self.energy_slope(demands, 0.0) >= 0.0:
            return SubproblemResult(self.total_energy(demands, 0.0), 0.0, SubproblemStatus.ZERO_PILOT)
        if self.energy_slope(demands, p_max) <= 0.0:
            return SubproblemResult(self.total_energy(demands, p_max), p_max, SubproblemStatus.UNREACHABLE)

        lo, hi = 0.0, p_max
        tolerance = self.instance.inner_tol * p_max
        iterations = 0
        while hi - lo > tolerance:
            mid = 0.5 * (lo + hi)
            if self.energy_slope(demands, mid) < 0.0:
                lo = mid
            else:
                hi = mid
            iterations += 1
        p_pilot = 0.5 * (lo + hi)
        return SubproblemResult(self.total_energy(demands, p_pilot), p_pilot,
                                SubproblemStatus.INTERIOR, iterations)

    def rate_bound(self, gains: np.ndarray, energy: float) -> float:
        """
        Linear-relaxation rate bound for fixed gains and transmit energy.

        Capped below the saturation limit so demands stay invertible.
        """
        if np.any(gains <= 0.0):
            return 0.0
        numerator = self.instance.eh.eta_max() * energy - np.sum(self.c / gains)
        if numerator <= 0.0:
            return 0.0
        bound = float(numerator / np.sum(self.e / gains))

        level = self.instance.eh.saturation_level
        if np.isfinite(level):
            cap = float(np.min((level - self.c) / self.e)) * (1.0 - SATURATION_MARGIN)
            bound = min(bound, max(cap, 0.0))
        return bound

    def upper_bound(self) -> float:
        return self.rate_bound(self.gains(self.instance.max_pilot_power), self.instance.budget_e)

    def gate_fails(self) -> bool:
        """Static consumption alone exceeds what a lossless best-case beam could deliver."""
        gains = self.gains(self.instance.max_pilot_power)
        if np.any(gains <= 0.0):
            return True
        return bool(np.sum(self.c / gains) > self.instance.eh.eta_max() * self.instance.budget_e)

    def build_solution(self, w: float, final: SubproblemResult, trace: ConvergenceTrace,
                       method: str, upper_bound: float) -> AllocationSolution:
        if w <= 0.0 or not final.within(self.instance.budget_e):
            logger.info("%s: no positive rate is feasible", method)
            return infeasible_solution(self.instance, method, upper_bound, trace)
        energies = self.transmit_energies(self.demands(w), final.p_pilot)
        return AllocationSolution(
            w_min=w,
            p_pilot=final.p_pilot,
            e_t=energies,
            feasible=True,
            trace=trace,
            method=method,
            upper_bound=upper_bound,
        )

    def solve(self) -> AllocationSolution:
        w_upper = self.upper_bound()
        if self.gate_fails():
            logger.info("Static consumption exceeds the best-case harvest; returning w=0")
            return infeasible_solution(self.instance, "optimal", w_upper)
        w, final, trace = bisect_rate(self.instance, w_upper, self.min_energy)
        logger.debug("Solved: w_min=%.9g after %d outer iterations", w, len(trace))
        return self.build_solution(w, final, trace, "optimal", w_upper)


def required_transmit_energy(node: NodeProfile, eh: EhModel, w: float, p_pilot: float) -> float:
    """
    Transmit energy f_i = η^{-1}(e_i w + c_i)/g_i(P^p) that sustains rate ``w``.

    Raises:
        SaturationInfeasible: If the demand reaches the harvester's saturation level
        ZeroGain: If the node's gain at ``p_pilot`` is zero
    """
    if w < 0.0 or p_pilot < 0.0:
        raise ValueError("Rate and pilot power must be non-negative")
    demand = eh.inverse(node.e_i * w + node.c_i)
    if demand == 0.0:
        return 0.0
    gain = node.gain.gain(p_pilot)
    if gain <= 0.0:
        raise ZeroGain(f"Gain is zero at P^p={p_pilot:g}")
    return demand / gain


def subproblem_min_energy(instance: ProblemInstance, w: float) -> SubproblemResult:
    return AllocationSolver(instance).min_energy(w)


def upper_bound_rate(instance: ProblemInstance) -> float:
    return AllocationSolver(instance).upper_bound()


def solve(instance: ProblemInstance) -> AllocationSolution:
    return AllocationSolver(instance).solve()


def verify_certificate(instance: ProblemInstance, solution: AllocationSolution,
                       check_gap: bool = True) -> List[str]:
    """
    List every constraint the solution violates; an empty list certifies it.

    Checks non-negativity, the block budget, energy causality per node and,
    when the rate is strictly inside its bracket and ``check_gap`` is set,
    that w_min + ε is infeasible. Baselines pass ``check_gap=False``: their
    rate is not optimal over the pilot power.
    """
    issues: List[str] = []
    if solution.w_min < 0.0 or solution.p_pilot < 0.0 or np.any(solution.e_t < 0.0):
        issues.append("negative allocation entry")
    if not solution.feasible:
        if solution.w_min != 0.0 or np.any(solution.e_t != 0.0):
            issues.append("infeasible solution carries a non-zero allocation")
        return issues

    spent = instance.pilot_time * solution.p_pilot + solution.sum_et
    if spent > instance.budget_e * (1.0 + CERTIFICATE_BUDGET_TOL):
        issues.append(f"budget exceeded: {spent:.12g} > {instance.budget_e:.12g}")

    solver = AllocationSolver(instance)
    consumption = solver.e * solution.w_min + solver.c
    harvested = solution.harvested_energy(instance)
    for index in np.flatnonzero(consumption > harvested * (1.0 + CERTIFICATE_CAUSALITY_TOL)):
        issues.append(f"energy causality violated at node {index}")

    inside_bracket = solution.w_min < solution.upper_bound - instance.epsilon
    if check_gap and np.isfinite(solution.upper_bound) and inside_bracket:
        if solver.min_energy(solution.w_min + instance.epsilon).within(instance.budget_e):
            issues.append("w_min + epsilon is still feasible")
    return issues
