"""
Configuration Management for the WPSN allocator

Two layers:
- Application settings (``config.yaml``): logging and export defaults, YAML.
- Scenario files: flat ``section.key = value`` lines describing one
  deployment and its experiments, parsed into a ScenarioConfig.
"""

import logging
from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple, Type

import yaml

from ..channel.estimation import EstimatorType
from ..harvesting.eh_models import EhKind, EhModel
from ..simulation.scenario import (
    GainBackend,
    Geometry,
    GeometryKind,
    PebProbe,
    ScenarioConfig,
    SweepMethod,
    SweepParameter,
    SweepSpec,
    dbm_to_watts,
)
from .errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS: Dict[str, Any] = {
    'logging': {'level': 'INFO', 'file': None},
    'output': {'directory': 'results', 'float_format': '%.16e'},
}


class ConfigManager:
    """Application settings utility."""

    @staticmethod
    def load_config(config_path: Path) -> Dict[str, Any]:
        """Load settings from a YAML file, filling missing sections with defaults."""
        if not config_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        with open(config_path, 'r') as f:
            loaded = yaml.safe_load(f) or {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"Settings file {config_path} must hold a mapping")

        settings = {section: dict(values) for section, values in DEFAULT_SETTINGS.items()}
        for section, values in loaded.items():
            if isinstance(values, dict) and section in settings:
                settings[section].update(values)
            else:
                settings[section] = values
        return settings

    @staticmethod
    def save_config(config_data: Dict[str, Any], config_path: Path) -> None:
        """Save settings to a YAML file."""
        config_path.parent.mkdir(parents=True, exist_ok=True)

        with open(config_path, 'w') as f:
            yaml.dump(config_data, f, default_flow_style=False)


# ---------------------------------------------------------------------------
# Scenario files
# ---------------------------------------------------------------------------

def _integer(minimum: int) -> Callable[[str], int]:
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            number = float(text)
            if not number.is_integer():
                raise ValueError(f"expected an integer, got {text!r}")
            value = int(number)
        if value < minimum:
            raise ValueError(f"must be at least {minimum}, got {value}")
        return value
    return parse


def _real(low: Optional[float] = None, high: Optional[float] = None, low_inclusive: bool = False,
          high_inclusive: bool = True, allow_inf: bool = False) -> Callable[[str], float]:
    def parse(text: str) -> float:
        value = float(text)
        if value != value or (value in (float("inf"), float("-inf")) and not allow_inf):
            raise ValueError(f"must be finite, got {text!r}")
        if low is not None and (value < low or (value == low and not low_inclusive)):
            raise ValueError(f"must be {'≥' if low_inclusive else '>'} {low:g}, got {value:g}")
        if high is not None and (value > high or (value == high and not high_inclusive)):
            raise ValueError(f"must be {'≤' if high_inclusive else '<'} {high:g}, got {value:g}")
        return value
    return parse


def _optional(parse: Callable[[str], Any]) -> Callable[[str], Any]:
    return lambda text: None if text == "" else parse(text)


def _choice(enum_type: Type[Enum]) -> Callable[[str], Enum]:
    def parse(text: str) -> Enum:
        try:
            return enum_type(text)
        except ValueError:
            options = "|".join(member.value for member in enum_type)
            raise ValueError(f"expected one of {options}, got {text!r}")
    return parse


def _split_list(text: str) -> List[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _float_list(text: str) -> Tuple[float, ...]:
    values = tuple(float(item) for item in _split_list(text))
    if not values:
        raise ValueError("expected a comma separated list")
    return values


def _methods(text: str) -> Tuple[SweepMethod, ...]:
    return tuple(SweepMethod.parse(item) for item in _split_list(text))


def _table(text: str) -> Tuple[Tuple[float, float], ...]:
    pairs = []
    for item in _split_list(text):
        x, sep, y = item.partition(":")
        if not sep:
            raise ValueError(f"table entries are input:output pairs, got {item!r}")
        pairs.append((float(x), float(y)))
    return tuple(pairs)


# Documented schema: dotted key -> parser. channel.noise_dbm is stored as channel.noise_power.
SCHEMA: Dict[str, Callable[[str], Any]] = {
    'scenario.n_nodes': _integer(1),
    'scenario.budget_e': _real(0.0),
    'scenario.pilot_time': _real(0.0, 1.0, high_inclusive=False),
    'scenario.epsilon': _real(0.0),
    'scenario.inner_tol': _real(0.0, 1.0, high_inclusive=False),
    'scenario.trials': _integer(1),
    'scenario.master_seed': _integer(0),
    'geometry.kind': _choice(GeometryKind),
    'geometry.radius_m': _real(0.0),
    'geometry.inner_m': _real(0.0),
    'geometry.outer_m': _real(0.0),
    'channel.n_antennas': _integer(1),
    'channel.carrier_hz': _real(0.0),
    'channel.rician_k': _real(0.0, low_inclusive=True, allow_inf=True),
    'channel.noise_power': _real(0.0),
    'channel.noise_dbm': _real(),
    'channel.antenna_gain_db': _real(),
    'channel.gain_backend': _choice(GainBackend),
    'channel.estimator': _choice(EstimatorType),
    'channel.mc_samples': _integer(1),
    'consumption.e_coeff': _real(0.0),
    'consumption.c_static': _real(0.0, low_inclusive=True),
    'eh.kind': _choice(EhKind),
    'eh.alpha': _real(0.0, 1.0),
    'eh.p_max': _real(0.0),
    'eh.eta_max': _real(0.0, 1.0),
    'eh.table': _table,
    'sweep.parameter': _choice(SweepParameter),
    'sweep.values': _float_list,
    'sweep.methods': _methods,
    'peb.distance_m': _real(0.0),
    'peb.p_min': _real(0.0),
    'peb.p_max': _real(0.0),
    'peb.points': _integer(2),
    'compare.alpha': _optional(_real(0.0, 1.0)),
}

EH_PARAMETERS = {
    EhKind.LINEAR: ('eh.alpha',),
    EhKind.SATURATING_EXP: ('eh.p_max', 'eh.eta_max'),
    EhKind.TABULATED: ('eh.table',),
}

_DEFAULTS = ScenarioConfig()


@dataclass(frozen=True)
class _Entry:
    raw: str
    line: Optional[int]


def resolve_key(key: str, line: Optional[int] = None) -> str:
    """Full dotted key for ``key``; bare keys must belong to exactly one section."""
    key = key.strip()
    if key in SCHEMA:
        return key
    if "." not in key:
        owners = [full for full in SCHEMA if full.split(".", 1)[1] == key]
        if len(owners) == 1:
            return owners[0]
        if len(owners) > 1:
            raise ConfigError(f"ambiguous key, use one of {', '.join(owners)}", key=key, line=line)
    raise ConfigError("unknown key", key=key, line=line)


def _split_assignment(text: str, line: Optional[int]) -> Tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"expected 'key = value', got {text.strip()!r}", line=line)
    return resolve_key(key, line), value.strip()


def _read_flat(text: str) -> List[Tuple[str, _Entry]]:
    assignments = []
    for number, raw_line in enumerate(text.splitlines(), start=1):
        content = raw_line.split("#", 1)[0].strip()
        if not content:
            continue
        key, value = _split_assignment(content, number)
        assignments.append((key, _Entry(value, number)))
    return assignments


def _flatten(mapping: Dict[str, Any], prefix: str = "") -> Iterable[Tuple[str, Any]]:
    for key, value in mapping.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, f"{dotted}.")
        else:
            yield dotted, value


def _yaml_text(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (list, tuple)):
        return ",".join(_yaml_text(item) for item in value)
    return str(value)


def _read_yaml(text: str) -> List[Tuple[str, _Entry]]:
    loaded = yaml.safe_load(text) or {}
    if not isinstance(loaded, dict):
        raise ConfigError("YAML scenario file must hold a mapping")
    return [(resolve_key(key), _Entry(_yaml_text(value), None)) for key, value in _flatten(loaded)]


class _ScenarioBuilder:
    """Converts resolved entries into a ScenarioConfig, keeping line numbers for errors."""

    def __init__(self, entries: Dict[str, _Entry]):
        self.entries = entries
        self.values: Dict[str, Any] = {}
        for key, entry in entries.items():
            try:
                self.values[key] = SCHEMA[key](entry.raw)
            except ValueError as e:
                raise ConfigError(str(e), key=key, line=entry.line) from e
        if 'channel.noise_dbm' in self.values:
            self.values['channel.noise_power'] = dbm_to_watts(self.values.pop('channel.noise_dbm'))
            entries['channel.noise_power'] = entries['channel.noise_dbm']

    def line(self, key: str) -> Optional[int]:
        entry = self.entries.get(key)
        return entry.line if entry else None

    def get(self, key: str, default: Any) -> Any:
        return self.values.get(key, default)

    def section_error(self, section: str, error: ValueError) -> ConfigError:
        keys = [key for key in self.entries if key.startswith(f"{section}.")]
        key = keys[-1] if keys else section
        return ConfigError(str(error), key=key, line=self.line(key))

    def geometry(self) -> Geometry:
        base = _DEFAULTS.geometry
        try:
            return Geometry(
                kind=self.get('geometry.kind', base.kind),
                radius_m=self.get('geometry.radius_m', base.radius_m),
                inner_m=self.get('geometry.inner_m', base.inner_m),
                outer_m=self.get('geometry.outer_m', base.outer_m),
            )
        except ValueError as e:
            raise self.section_error('geometry', e) from e

    def eh(self) -> EhModel:
        explicit = 'eh.kind' in self.values
        kind = self.get('eh.kind', _DEFAULTS.eh.kind)
        given = [key for key in self.values if key.startswith("eh.") and key != 'eh.kind']
        for key in given:
            if key not in EH_PARAMETERS[kind]:
                raise ConfigError(f"not a parameter of eh.kind={kind.value}", key=key, line=self.line(key))
        missing = [key for key in EH_PARAMETERS[kind] if key not in self.values]
        if explicit and missing:
            raise ConfigError(f"required for eh.kind={kind.value}", key=missing[0],
                              line=self.line('eh.kind'))
        try:
            if kind == EhKind.LINEAR:
                return EhModel.linear(self.values['eh.alpha'])
            if kind == EhKind.TABULATED:
                return EhModel.tabulated(self.values['eh.table'])
            return EhModel.saturating_exponential(
                self.get('eh.p_max', _DEFAULTS.eh.p_max),
                self.get('eh.eta_max', _DEFAULTS.eh.eta_max_param),
            )
        except ValueError as e:
            raise self.section_error('eh', e) from e

    def sweep(self) -> Optional[SweepSpec]:
        keys = [key for key in ('sweep.parameter', 'sweep.values', 'sweep.methods') if key in self.values]
        if not keys:
            return None
        for key in ('sweep.parameter', 'sweep.values'):
            if key not in self.values:
                raise ConfigError("required when a sweep is configured", key=key, line=self.line(keys[0]))
        try:
            return SweepSpec(
                parameter=self.values['sweep.parameter'],
                values=self.values['sweep.values'],
                methods=self.get('sweep.methods', (SweepMethod.parse("optimal"),)),
            )
        except ValueError as e:
            raise self.section_error('sweep', e) from e

    def peb(self) -> PebProbe:
        base = _DEFAULTS.peb
        try:
            return PebProbe(
                distance_m=self.get('peb.distance_m', base.distance_m),
                p_min=self.get('peb.p_min', base.p_min),
                p_max=self.get('peb.p_max', base.p_max),
                points=self.get('peb.points', base.points),
            )
        except ValueError as e:
            raise self.section_error('peb', e) from e

    def build(self) -> ScenarioConfig:
        flat_fields = {
            'n_nodes': 'scenario.n_nodes',
            'budget_e': 'scenario.budget_e',
            'pilot_time': 'scenario.pilot_time',
            'epsilon': 'scenario.epsilon',
            'inner_tol': 'scenario.inner_tol',
            'trials': 'scenario.trials',
            'master_seed': 'scenario.master_seed',
            'n_antennas': 'channel.n_antennas',
            'carrier_hz': 'channel.carrier_hz',
            'rician_k': 'channel.rician_k',
            'noise_power': 'channel.noise_power',
            'antenna_gain_db': 'channel.antenna_gain_db',
            'gain_backend': 'channel.gain_backend',
            'estimator': 'channel.estimator',
            'mc_samples': 'channel.mc_samples',
            'e_coeff': 'consumption.e_coeff',
            'c_static': 'consumption.c_static',
            'compare_alpha': 'compare.alpha',
        }
        kwargs = {name: self.values[key] for name, key in flat_fields.items() if key in self.values}
        kwargs.update(geometry=self.geometry(), eh=self.eh(), sweep=self.sweep(), peb=self.peb())
        try:
            return ScenarioConfig(**kwargs)
        except ValueError as e:
            # Cross-field breaches surface from the solver and channel value types
            raise ConfigError(str(e)) from e


def parse_config_text(text: str, overrides: Iterable[str] = (), yaml_format: bool = False) -> ScenarioConfig:
    """Parse scenario text; ``overrides`` are ``key=value`` strings applied last."""
    assignments = _read_yaml(text) if yaml_format else _read_flat(text)
    for item in overrides:
        key, value = _split_assignment(item, None)
        assignments.append((key, _Entry(value, None)))
    entries: Dict[str, _Entry] = {}
    for key, entry in assignments:
        if key in ('channel.noise_dbm', 'channel.noise_power'):
            # The later of the two spellings wins
            entries.pop('channel.noise_dbm', None)
            entries.pop('channel.noise_power', None)
        entries[key] = entry
    return _ScenarioBuilder(entries).build()


def parse_config(path: Path, overrides: Iterable[str] = ()) -> ScenarioConfig:
    """
    Load a scenario file.

    Flat ``section.key = value`` text by default; ``.yaml``/``.yml`` files are
    flattened to the same dotted keys. Missing keys keep their defaults.

    Args:
        path: Scenario file
        overrides: ``key=value`` strings applied after the file

    Returns:
        Validated ScenarioConfig

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigError: Unknown key, bad value or invariant breach, with key and line
    """
    path = Path(path)
    overrides = tuple(overrides)
    if not path.exists():
        raise FileNotFoundError(f"Scenario file not found: {path}")
    text = path.read_text(encoding='utf-8')
    config = parse_config_text(text, overrides, yaml_format=path.suffix.lower() in ('.yaml', '.yml'))
    logger.debug(f"Loaded scenario {path} with {len(overrides)} overrides")
    return config


def _render(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render_method(method: SweepMethod) -> str:
    if method.param is None:
        return method.kind.value
    return f"{method.kind.value}:{method.param!r}"


def write_config(cfg: ScenarioConfig) -> str:
    """Canonical flat text of ``cfg``; parsing it gives back an equal config."""
    sections: Dict[str, List[Tuple[str, Any]]] = {
        'scenario': [
            ('n_nodes', cfg.n_nodes), ('budget_e', cfg.budget_e), ('pilot_time', cfg.pilot_time),
            ('epsilon', cfg.epsilon), ('inner_tol', cfg.inner_tol), ('trials', cfg.trials),
            ('master_seed', cfg.master_seed),
        ],
        'geometry': [
            ('kind', cfg.geometry.kind), ('radius_m', cfg.geometry.radius_m),
            ('inner_m', cfg.geometry.inner_m), ('outer_m', cfg.geometry.outer_m),
        ],
        'channel': [
            ('n_antennas', cfg.n_antennas), ('carrier_hz', cfg.carrier_hz), ('rician_k', cfg.rician_k),
            ('noise_power', cfg.noise_power), ('antenna_gain_db', cfg.antenna_gain_db),
            ('gain_backend', cfg.gain_backend), ('estimator', cfg.estimator),
            ('mc_samples', cfg.mc_samples),
        ],
        'consumption': [('e_coeff', cfg.e_coeff), ('c_static', cfg.c_static)],
    }

    eh: List[Tuple[str, Any]] = [('kind', cfg.eh.kind)]
    if cfg.eh.kind == EhKind.LINEAR:
        eh.append(('alpha', cfg.eh.alpha))
    elif cfg.eh.kind == EhKind.SATURATING_EXP:
        eh.extend([('p_max', cfg.eh.p_max), ('eta_max', cfg.eh.eta_max_param)])
    else:
        eh.append(('table', ",".join(f"{x!r}:{y!r}" for x, y in cfg.eh.table)))
    sections['eh'] = eh

    if cfg.sweep is not None:
        sections['sweep'] = [
            ('parameter', cfg.sweep.parameter),
            ('values', ",".join(repr(v) for v in cfg.sweep.values)),
            ('methods', ",".join(_render_method(m) for m in cfg.sweep.methods)),
        ]
    sections['peb'] = [(f.name, getattr(cfg.peb, f.name)) for f in fields(cfg.peb)]
    sections['compare'] = [('alpha', cfg.compare_alpha)]

    lines = ["# WPSN scenario"]
    for section, items in sections.items():
        lines.append("")
        lines.extend(f"{section}.{key} = {_render(value)}".rstrip() for key, value in items)
    return "\n".join(lines) + "\n"
