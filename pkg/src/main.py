#!/usr/bin/env python3
"""
WPSN Allocator - Main Application

Command-line front end for the pilot/energy power-split optimizer of
wirelessly-powered sensor networks: solves single deployments, runs sweeps
and convergence traces, compares harvester models and probes gain curves.
"""

import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
import yaml

# Add the project root to the path so the ``src`` package resolves when run as a script
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from src.channel.peb_gain import qualify_gain
from src.simulation.experiments import (
    compare_eh_models,
    gain_curve,
    run_convergence,
    run_sweep,
    solve_optimal,
)
from src.simulation.result_exporter import ResultExporter
from src.simulation.scenario import ScenarioConfig, build_gain, generate_instance, stream_seed
from src.utils.config import DEFAULT_SETTINGS, ConfigManager, parse_config, write_config
from src.utils.errors import ConfigError, ExportError, NumericDomainError
from src.utils.logging import LogManager

logger = logging.getLogger('wpsn')

VERBS = ('solve', 'sweep', 'convergence', 'peb-gain', 'compare-eh', 'validate')

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERIC = 3
EXIT_EXPORT = 4

SETTINGS_PATH = project_root / 'config.yaml'


@dataclass(frozen=True)
class CliCommand:
    """
    One parsed invocation.

    Attributes:
        verb: Command name, one of VERBS
        config_path: Scenario file
        output_dir: Directory for CSV outputs (None uses the settings default)
        overrides: ``key=value`` strings applied after the file
        seed: Replaces ``scenario.master_seed`` when given
        verbose: Log at DEBUG level
    """

    verb: str
    config_path: Path
    output_dir: Optional[Path] = None
    overrides: Tuple[str, ...] = field(default_factory=tuple)
    seed: Optional[int] = None
    verbose: bool = False

    def __post_init__(self):
        if self.verb not in VERBS:
            raise ValueError(f"Unknown verb '{self.verb}', expected one of {', '.join(VERBS)}")
        object.__setattr__(self, "config_path", Path(self.config_path))
        object.__setattr__(self, "overrides", tuple(self.overrides))
        if self.seed is not None and self.seed < 0:
            raise ValueError(f"Seed must be non-negative, got {self.seed}")

    def effective_overrides(self) -> Tuple[str, ...]:
        if self.seed is None:
            return self.overrides
        return self.overrides + (f"scenario.master_seed={self.seed}",)


def _load_settings() -> Dict[str, Any]:
    if SETTINGS_PATH.exists():
        return ConfigManager.load_config(SETTINGS_PATH)
    return {section: dict(values) for section, values in DEFAULT_SETTINGS.items()}


def _configure_logging(cmd: CliCommand, settings: Dict[str, Any]) -> None:
    logging_settings = settings.get('logging', {}) or {}
    if cmd.verbose:
        level = logging.DEBUG
    else:
        try:
            level = LogManager.level_from_name(logging_settings.get('level', 'INFO'))
        except ValueError as e:
            raise ConfigError(str(e), key='logging.level') from e
    log_file = logging_settings.get('file')
    LogManager.setup_logging(level, Path(log_file) if log_file else None)


def _run_solve(cfg: ScenarioConfig, exporter: ResultExporter) -> int:
    instance = generate_instance(cfg, 0)
    solution = solve_optimal(cfg, instance)
    path = exporter.export_solution(solution)
    if not solution.feasible or solution.w_min == 0.0:
        click.echo(f"⚠️  solve: infeasible, w_min=0 written to {path}")
        return EXIT_INFEASIBLE
    click.echo(f"✅ solve: w_min={solution.w_min:.6g} bits/s, P^p={solution.p_pilot:.6g} W, "
               f"{solution.outer_iterations} iterations -> {path}")
    return EXIT_OK


def _run_sweep(cfg: ScenarioConfig, exporter: ResultExporter) -> int:
    if cfg.sweep is None:
        raise ConfigError("the sweep verb needs sweep.parameter and sweep.values", key='sweep.parameter')
    result = run_sweep(cfg)
    path = exporter.export_sweep(result)
    click.echo(f"✅ sweep: {len(result.rows)} rows over {cfg.trials} trials -> {path}")
    return EXIT_OK


def _run_convergence(cfg: ScenarioConfig, exporter: ResultExporter) -> int:
    trace = run_convergence(cfg)
    path = exporter.export_convergence(trace)
    last = trace.iterations[-1] if len(trace) else None
    final = f", last E_s*={last.e_s_star:.6g} J" if last else ""
    click.echo(f"✅ convergence: {len(trace)} iterations{final} -> {path}")
    return EXIT_OK


def _run_peb_gain(cfg: ScenarioConfig, exporter: ResultExporter) -> int:
    curve = gain_curve(cfg)
    path = exporter.export_gain_curve(curve)
    click.echo(f"✅ peb-gain: {len(curve.gain)} points ({curve.backend}) at "
               f"{cfg.peb.distance_m:g} m -> {path}")
    return EXIT_OK


def _run_compare(cfg: ScenarioConfig, exporter: ResultExporter) -> int:
    report = compare_eh_models(cfg)
    path = exporter.export_comparison(report)
    click.echo(f"✅ compare-eh: median rel_err={report.median:.4g}, max={report.max:.4g}, "
               f"{report.excluded} excluded -> {path}")
    return EXIT_OK


def _run_validate(cfg: ScenarioConfig, exporter: ResultExporter) -> int:
    gain = build_gain(cfg, cfg.peb.distance_m, stream_seed(cfg.master_seed))
    report = qualify_gain(gain, cfg.peb.p_max, p_min=cfg.peb.p_min)
    status = "✅" if report.passed else "⚠️ "
    click.echo(f"{status} validate: {gain!r} monotone={report.monotone} "
               f"concave={report.concave} bounded={report.bounded}")
    return EXIT_OK


HANDLERS = {
    'solve': _run_solve,
    'sweep': _run_sweep,
    'convergence': _run_convergence,
    'peb-gain': _run_peb_gain,
    'compare-eh': _run_compare,
    'validate': _run_validate,
}


def dispatch(cmd: CliCommand) -> int:
    """
    Run one command and map its outcome to an exit code.

    Returns:
        0 on success, 1 on a configuration error, 2 for an infeasible solve
        (w_min = 0), 3 on a numeric-domain failure, 4 when results cannot be written
    """
    try:
        settings = _load_settings()
        _configure_logging(cmd, settings)
        cfg = parse_config(cmd.config_path, cmd.effective_overrides())
    except (ConfigError, FileNotFoundError, yaml.YAMLError) as e:
        click.echo(f"❌ Config error: {e}", err=True)
        return EXIT_CONFIG

    output_dir = cmd.output_dir or Path(settings.get('output', {}).get('directory', 'results'))
    float_format = settings.get('output', {}).get('float_format')
    exporter = ResultExporter(output_dir, {'float_format': float_format} if float_format else None)
    try:
        code = HANDLERS[cmd.verb](cfg, exporter)
        if cmd.verb != 'validate':
            exporter.export_scenario(write_config(cfg))
        return code
    except ConfigError as e:
        click.echo(f"❌ Config error: {e}", err=True)
        return EXIT_CONFIG
    except (NumericDomainError, ArithmeticError) as e:
        click.echo(f"❌ Numeric error: {e}", err=True)
        if cmd.verbose:
            logger.exception("Numeric failure")
        return EXIT_NUMERIC
    except ExportError as e:
        click.echo(f"❌ Export error: {e}", err=True)
        return EXIT_EXPORT


def _command(verb: str, help_text: str):
    @click.option('--config', 'config_path', required=True,
                  type=click.Path(file_okay=True, dir_okay=False), help='Scenario file path')
    @click.option('--out', 'output_dir', type=click.Path(file_okay=False, dir_okay=True),
                  help='Output directory for CSV tables')
    @click.option('--seed', type=click.IntRange(min=0), help='Override scenario.master_seed')
    @click.option('--set', 'overrides', multiple=True, metavar='KEY=VALUE',
                  help='Override a scenario key (repeatable)')
    @click.option('--verbose', '-v', is_flag=True, help='Verbose output')
    def command(config_path: str, output_dir: Optional[str], seed: Optional[int],
                overrides: Tuple[str, ...], verbose: bool) -> None:
        cmd = CliCommand(
            verb=verb,
            config_path=Path(config_path),
            output_dir=Path(output_dir) if output_dir else None,
            overrides=overrides,
            seed=seed,
            verbose=verbose,
        )
        sys.exit(dispatch(cmd))

    command.__doc__ = help_text
    return click.command(name=verb)(command)


@click.group()
def cli() -> None:
    """
    WPSN Allocator - max-min sensing rate via pilot/energy power split.

    Every command reads a flat ``section.key = value`` scenario file and
    writes plot-ready CSV tables to the output directory.
    """


for _verb, _help in (
    ('solve', 'Solve trial 0 of the scenario and write solution.csv.'),
    ('sweep', 'Average every configured method over the sweep values and write sweep.csv.'),
    ('convergence', 'Trace the rate bisection on trial 0 and write convergence.csv.'),
    ('peb-gain', 'Evaluate the single-node gain curve and write peb_gain.csv.'),
    ('compare-eh', 'Compare saturating and linear harvesting per trial and write compare.csv.'),
    ('validate', 'Check the configured gain model is increasing, concave and bounded.'),
):
    cli.add_command(_command(_verb, _help))


if __name__ == "__main__":
    cli()
