"""
Result Exporter

Writes solver and experiment results as plot-ready CSV tables. Floats carry
17 significant digits so identical runs give byte-identical files.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from ..allocation.solver import AllocationSolution, ConvergenceTrace
from ..utils.errors import ExportError
from ..utils.file_utils import CSV_FLOAT_FORMAT, FileUtils
from .experiments import ComparisonReport, GainCurve, SweepResult

logger = logging.getLogger(__name__)

SOLUTION_FILE = 'solution.csv'
SWEEP_FILE = 'sweep.csv'
CONVERGENCE_FILE = 'convergence.csv'
COMPARE_FILE = 'compare.csv'
PEB_GAIN_FILE = 'peb_gain.csv'
SCENARIO_FILE = 'scenario.cfg'


class ResultExporter:
    """
    Exports result tables to an output directory.
    """

    def __init__(self, output_dir: Path, config: Optional[Dict[str, Any]] = None):
        """
        Initialize the exporter.

        Args:
            output_dir: Directory receiving every table
            config: Export settings (``float_format``)
        """
        self.output_dir = Path(output_dir)
        self.config = config or {}
        self.float_format = self.config.get('float_format', CSV_FLOAT_FORMAT)

    def _target(self, filename: str) -> Path:
        try:
            return FileUtils.ensure_directory(self.output_dir) / filename
        except OSError as e:
            raise ExportError(f"Failed to create output directory {self.output_dir}: {e}") from e

    def _write(self, frame: pd.DataFrame, filename: str) -> Path:
        path = self._target(filename)
        try:
            frame.to_csv(path, index=False, float_format=self.float_format, lineterminator='\n')
        except OSError as e:
            raise ExportError(f"Failed to write {path}: {e}") from e
        logger.info(f"Exported {len(frame)} rows to {path}")
        return path

    def export_solution(self, solution: AllocationSolution) -> Path:
        return self._write(pd.DataFrame([solution.to_record()]), SOLUTION_FILE)

    def export_sweep(self, result: SweepResult) -> Path:
        frame = pd.DataFrame(
            [(row.parameter_value, row.method, row.mean_w, row.stderr_w, row.trials) for row in result.rows],
            columns=['parameter_value', 'method', 'mean_w', 'stderr_w', 'trials'],
        )
        return self._write(frame, SWEEP_FILE)

    def export_convergence(self, trace: ConvergenceTrace) -> Path:
        frame = pd.DataFrame(
            [(index + 1, step.w_lo, step.w_hi, step.w_mid, step.e_s_star, step.p_pilot)
             for index, step in enumerate(trace.iterations)],
            columns=['iter', 'w_lo', 'w_hi', 'w_mid', 'e_s_star', 'p_pilot'],
        )
        return self._write(frame, CONVERGENCE_FILE)

    def export_comparison(self, report: ComparisonReport) -> Path:
        frame = pd.DataFrame(
            [(row.trial, row.w_nl, row.w_l, row.rel_err) for row in report.rows],
            columns=['trial', 'w_nl', 'w_l', 'rel_err'],
        )
        return self._write(frame, COMPARE_FILE)

    def export_gain_curve(self, curve: GainCurve) -> Path:
        frame = pd.DataFrame({
            'p_pilot_watts': curve.p_pilot_watts,
            'gain': curve.gain,
            'stderr': curve.stderr,
        })
        return self._write(frame, PEB_GAIN_FILE)

    def export_scenario(self, text: str) -> Path:
        """Store the effective scenario file next to the tables."""
        path = self._target(SCENARIO_FILE)
        try:
            path.write_text(text, encoding='utf-8')
        except OSError as e:
            raise ExportError(f"Failed to write {path}: {e}") from e
        return path

    def written_files(self) -> List[Path]:
        if not self.output_dir.exists():
            return []
        return sorted(p for p in self.output_dir.iterdir() if p.is_file())
