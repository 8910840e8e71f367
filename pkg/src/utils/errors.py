"""
Error types for the WPSN power-split optimizer.

Infeasible rates are reported through return values; the classes here cover
the cases a caller has to handle explicitly.
"""

from typing import Optional


class WpsnError(Exception):
    """Base class for all package errors."""


class ConfigError(WpsnError, ValueError):
    """Invalid scenario configuration, tagged with the key and line that caused it."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        location = []
        if key is not None:
            location.append(f"key '{key}'")
        if line is not None:
            location.append(f"line {line}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class SaturationInfeasible(WpsnError, ValueError):
    """Requested harvest is at or above the harvester's saturation level."""


class ZeroGain(WpsnError, ValueError):
    """A node's beamforming gain is zero, so no transmit energy reaches it."""


class NumericDomainError(WpsnError, ArithmeticError):
    """A closed form left its numeric domain (negative discriminant, failed plug-back)."""


class ExportError(WpsnError, RuntimeError):
    """A result table or scenario file could not be written."""
