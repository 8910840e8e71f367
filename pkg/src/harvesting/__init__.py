"""
Energy Harvesting Module

RF-DC conversion models and the two-tone waveform surrogate.
"""

from .eh_models import EhKind, EhModel, eh_eval, eh_inverse, eta_max
from .waveform_toy import WaveformStrategy, ZdcToyModel, zdc_eval, zdc_allocate, monotonicity_violations

__all__ = [
    'EhKind',
    'EhModel',
    'eh_eval',
    'eh_inverse',
    'eta_max',
    'WaveformStrategy',
    'ZdcToyModel',
    'zdc_eval',
    'zdc_allocate',
    'monotonicity_violations'
]
