# Utilities Module
# Logging, file helpers and the package error hierarchy.
# Scenario-file parsing lives in .config and is imported from there directly.

from .file_utils import FileUtils
from .logging import LogManager
from .errors import WpsnError, ConfigError, SaturationInfeasible, ZeroGain, NumericDomainError, ExportError

__all__ = [
    'FileUtils',
    'LogManager',
    'WpsnError',
    'ConfigError',
    'SaturationInfeasible',
    'ZeroGain',
    'NumericDomainError',
    'ExportError'
]
