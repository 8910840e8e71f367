"""
Experiment Harnesses

Convergence traces, Monte Carlo parameter sweeps, the linear-versus-saturating
harvester comparison and single-node gain curves. Every method evaluated for
a given trial index sees the same generated instance.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from ..allocation.baselines import solve_broadcast, solve_fixed, solve_random
from ..allocation.closed_form import solve_closed_form_identical
from ..allocation.solver import (
    AllocationSolution,
    ConvergenceTrace,
    ProblemInstance,
    solve,
    upper_bound_rate,
    verify_certificate,
)
from ..channel.estimation import EstimatorKind, estimate_peb_gain
from ..harvesting.eh_models import EhModel
from ..utils.errors import NumericDomainError
from .scenario import (
    BASELINE_STREAM,
    GainBackend,
    GeometryKind,
    MethodKind,
    ScenarioConfig,
    SweepMethod,
    SweepParameter,
    SweepSpec,
    build_gain,
    generate_instance,
    stream_seed,
)

logger = logging.getLogger(__name__)

THREADS_ENV = "WPSN_THREADS"

T = TypeVar("T")


def worker_count() -> int:
    """Worker threads for trial loops, from ``WPSN_THREADS`` (default 1)."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r, not an integer", THREADS_ENV, raw)
        return 1
    return max(workers, 1)


def _map_trials(func: Callable[[int], T], trials: int, workers: Optional[int]) -> List[T]:
    # Results come back in trial order whatever the schedule
    workers = worker_count() if workers is None else max(int(workers), 1)
    if workers == 1 or trials == 1:
        return [func(index) for index in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, range(trials)))


def uses_identical_closed_form(cfg: ScenarioConfig) -> bool:
    """Ring deployments with rational gains share one gain and admit the explicit pilot power."""
    return cfg.geometry.kind == GeometryKind.FIXED_RING and cfg.gain_backend == GainBackend.RATIONAL


def solve_optimal(cfg: ScenarioConfig, instance: ProblemInstance) -> AllocationSolution:
    if uses_identical_closed_form(cfg):
        gain = instance.nodes[0].gain
        return solve_closed_form_identical(instance, gain.sigma_h2, cfg.n_antennas, cfg.noise_power)
    return solve(instance)


def run_method(cfg: ScenarioConfig, instance: ProblemInstance, method: SweepMethod,
               trial_index: int) -> float:
    """Rate one method achieves on one instance."""
    if method.kind == MethodKind.OPTIMAL:
        return solve_optimal(cfg, instance).w_min
    if method.kind == MethodKind.FIXED:
        return solve_fixed(instance, method.param).w_min
    if method.kind == MethodKind.RANDOM:
        seed = stream_seed(cfg.master_seed, trial_index, BASELINE_STREAM)
        return solve_random(instance, seed).w_min
    if method.kind == MethodKind.BROADCAST:
        return solve_broadcast(instance, method.param).w_min
    return upper_bound_rate(instance)


@dataclass(frozen=True)
class SweepRow:
    parameter_value: float
    method: str
    mean_w: float
    stderr_w: float
    trials: int


@dataclass
class SweepResult:
    """
    Averaged sweep table plus the per-trial rates behind each row.

    ``per_trial`` maps (parameter value, method label) to the rate of every
    trial, in trial order.
    """

    parameter: SweepParameter
    rows: List[SweepRow] = field(default_factory=list)
    per_trial: Dict[Tuple[float, str], np.ndarray] = field(default_factory=dict)

    def means(self, method_label: str) -> np.ndarray:
        return np.array([row.mean_w for row in self.rows if row.method == method_label])

    def values(self) -> List[float]:
        return list(dict.fromkeys(row.parameter_value for row in self.rows))

    def dominance_violations(self, epsilon: float) -> List[str]:
        """Trials where a baseline beats the optimum or the optimum beats the bound."""
        issues: List[str] = []
        for value in self.values():
            optimal = self.per_trial.get((value, MethodKind.OPTIMAL.value))
            if optimal is None:
                continue
            for (point, label), rates in self.per_trial.items():
                if point != value or label == MethodKind.OPTIMAL.value:
                    continue
                if label == MethodKind.UPPER_BOUND.value:
                    bad = np.flatnonzero(optimal > rates + epsilon)
                else:
                    bad = np.flatnonzero(rates > optimal + epsilon)
                issues.extend(f"{label} at {value:g}, trial {int(i)}" for i in bad)
        return issues


def _sweep_trial(cfg: ScenarioConfig, methods: Sequence[SweepMethod]) -> Callable[[int], Dict[str, float]]:
    def run(trial_index: int) -> Dict[str, float]:
        instance = generate_instance(cfg, trial_index)
        return {method.label: run_method(cfg, instance, method, trial_index) for method in methods}
    return run


def run_sweep(cfg: ScenarioConfig, spec: Optional[SweepSpec] = None,
              workers: Optional[int] = None) -> SweepResult:
    """
    Average each method's rate over ``cfg.trials`` deployments per parameter value.

    Args:
        cfg: Base scenario
        spec: Sweep to run (defaults to ``cfg.sweep``)
        workers: Worker threads (defaults to ``WPSN_THREADS``)

    Returns:
        SweepResult with one row per (value, method) in sweep order
    """
    spec = spec or cfg.sweep
    if spec is None:
        raise ValueError("No sweep configured")

    # Every point is validated before any trial runs
    points = [(value, cfg.with_parameter(spec.parameter, value)) for value in spec.values]
    result = SweepResult(parameter=spec.parameter)
    for value, point in points:
        outcomes = _map_trials(_sweep_trial(point, spec.methods), point.trials, workers)
        for method in spec.methods:
            rates = np.array([outcome[method.label] for outcome in outcomes])
            result.per_trial[(value, method.label)] = rates
            stderr = float(np.std(rates, ddof=1) / np.sqrt(len(rates))) if len(rates) > 1 else 0.0
            result.rows.append(SweepRow(value, method.label, float(np.mean(rates)), stderr, len(rates)))
            if method.kind == MethodKind.OPTIMAL and np.any(rates == 0.0):
                logger.warning("%s=%g: %d of %d trials are infeasible", spec.parameter.value, value,
                               int(np.sum(rates == 0.0)), len(rates))
        logger.info("Finished %s=%g over %d trials", spec.parameter.value, value, point.trials)
    return result


def run_convergence(cfg: ScenarioConfig, trial_index: int = 0) -> ConvergenceTrace:
    """
    Solve one generated instance and return its outer bisection trace.

    Raises:
        NumericDomainError: If the returned allocation fails its certificate
    """
    instance = generate_instance(cfg, trial_index)
    solution = solve(instance)
    issues = verify_certificate(instance, solution)
    if issues:
        raise NumericDomainError(f"Solution of trial {trial_index} fails its certificate: "
                                 + "; ".join(issues))
    logger.info("Trial %d converged to %.6g bits/s in %d iterations", trial_index,
                solution.w_min, solution.outer_iterations)
    return solution.trace


@dataclass(frozen=True)
class ComparisonRow:
    trial: int
    w_nl: float
    w_l: float

    @property
    def rel_err(self) -> float:
        if self.w_nl == 0.0:
            return float("nan")
        return abs(self.w_nl - self.w_l) / self.w_nl


@dataclass
class ComparisonReport:
    """Per-trial rates under the saturating and the linearised harvester."""

    alpha: float
    rows: List[ComparisonRow] = field(default_factory=list)

    @property
    def errors(self) -> np.ndarray:
        errors = np.array([row.rel_err for row in self.rows], dtype=float)
        return errors[~np.isnan(errors)]

    @property
    def excluded(self) -> int:
        """Trials left out because the saturating model gives no positive rate."""
        return len(self.rows) - len(self.errors)

    def _summary(self, reducer) -> float:
        errors = self.errors
        return float(reducer(errors)) if len(errors) else float("nan")

    @property
    def median(self) -> float:
        return self._summary(np.median)

    @property
    def mean(self) -> float:
        return self._summary(np.mean)

    @property
    def max(self) -> float:
        return self._summary(np.max)


def compare_eh_models(cfg: ScenarioConfig, alpha: Optional[float] = None,
                      workers: Optional[int] = None) -> ComparisonReport:
    """
    Solve every trial under the configured harvester and under Linear(α).

    Args:
        cfg: Scenario whose EH model is the non-linear reference
        alpha: Linear conversion rate (defaults to ``cfg.compare_alpha``, then η_max)
        workers: Worker threads (defaults to ``WPSN_THREADS``)
    """
    if alpha is None:
        alpha = cfg.compare_alpha if cfg.compare_alpha is not None else cfg.eh.eta_max()
    linear = EhModel.linear(alpha)

    def run(trial_index: int) -> ComparisonRow:
        instance = generate_instance(cfg, trial_index)
        return ComparisonRow(trial_index, solve(instance).w_min, solve(instance.with_eh(linear)).w_min)

    report = ComparisonReport(alpha=alpha, rows=_map_trials(run, cfg.trials, workers))
    if report.excluded:
        logger.warning("%d of %d trials have zero rate and are excluded", report.excluded, cfg.trials)
    logger.info("Linear vs saturating EH: median relative error %.4g", report.median)
    return report


@dataclass(frozen=True)
class GainCurve:
    p_pilot_watts: np.ndarray
    gain: np.ndarray
    stderr: np.ndarray
    backend: str


def gain_curve(cfg: ScenarioConfig, distance_m: Optional[float] = None,
               p_grid: Optional[np.ndarray] = None) -> GainCurve:
    """Gain of a single node versus pilot power for the configured backend."""
    distance_m = cfg.peb.distance_m if distance_m is None else distance_m
    grid = cfg.peb.grid() if p_grid is None else np.asarray(p_grid, dtype=float)
    seed = stream_seed(cfg.master_seed)

    if cfg.gain_backend == GainBackend.MONTE_CARLO:
        channel = cfg.channel_config(seed)
        estimator = EstimatorKind(kind=cfg.estimator)
        estimates = [estimate_peb_gain(estimator, channel, distance_m, p, cfg.mc_samples) for p in grid]
        gains = np.array([estimate.gain for estimate in estimates])
        errors = np.array([estimate.stderr for estimate in estimates])
    else:
        model = build_gain(cfg, distance_m, seed)
        gains = np.asarray(model.curve(grid), dtype=float)
        errors = np.zeros_like(gains)
    return GainCurve(grid, gains, errors, cfg.gain_backend.value)
