"""
Allocation Module

Pilot/energy power split for max-min sensing rate:
- Convex pilot-power subproblem and rate bisection
- Rate upper bound and infeasibility gate
- Closed forms for identical gains and large arrays
- Fixed, random and broadcast baselines
"""

from .solver import (
    NodeProfile,
    ProblemInstance,
    AllocationSolution,
    ConvergenceTrace,
    TraceStep,
    SubproblemResult,
    SubproblemStatus,
    AllocationSolver,
    outer_iteration_bound,
    required_transmit_energy,
    subproblem_min_energy,
    upper_bound_rate,
    solve,
    verify_certificate
)
from .closed_form import solve_closed_form_identical, solve_asymptotic, asymptotic_constants
from .baselines import solve_fixed, solve_random, solve_broadcast

__all__ = [
    'NodeProfile',
    'ProblemInstance',
    'AllocationSolution',
    'ConvergenceTrace',
    'TraceStep',
    'SubproblemResult',
    'SubproblemStatus',
    'AllocationSolver',
    'outer_iteration_bound',
    'required_transmit_energy',
    'subproblem_min_energy',
    'upper_bound_rate',
    'solve',
    'verify_certificate',
    'solve_closed_form_identical',
    'solve_asymptotic',
    'asymptotic_constants',
    'solve_fixed',
    'solve_random',
    'solve_broadcast'
]
