"""
Simulation Module

Seeded deployments and the experiments built on them:
- Scenario configuration and instance generation
- Convergence traces, parameter sweeps, EH model comparison, gain curves
- CSV export of every result table
"""

from .scenario import (
    Geometry,
    GeometryKind,
    GainBackend,
    PebProbe,
    SweepParameter,
    SweepMethod,
    MethodKind,
    SweepSpec,
    ScenarioConfig,
    dbm_to_watts,
    watts_to_dbm,
    generate_instance,
    place_nodes
)
from .experiments import (
    SweepRow,
    SweepResult,
    ComparisonRow,
    ComparisonReport,
    GainCurve,
    run_sweep,
    run_convergence,
    compare_eh_models,
    gain_curve,
    solve_optimal,
    worker_count
)
from .result_exporter import ResultExporter

__all__ = [
    'Geometry',
    'GeometryKind',
    'GainBackend',
    'PebProbe',
    'SweepParameter',
    'SweepMethod',
    'MethodKind',
    'SweepSpec',
    'ScenarioConfig',
    'dbm_to_watts',
    'watts_to_dbm',
    'generate_instance',
    'place_nodes',
    'SweepRow',
    'SweepResult',
    'ComparisonRow',
    'ComparisonReport',
    'GainCurve',
    'run_sweep',
    'run_convergence',
    'compare_eh_models',
    'gain_curve',
    'solve_optimal',
    'worker_count',
    'ResultExporter'
]
