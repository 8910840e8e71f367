"""
Channel Module

Channel generation, pilot-based estimation and PEB gain functions:
- Friis path gain and seeded Rician draws for a ULA base station
- LS / MMSE estimation with maximum-ratio energy beams (Monte Carlo)
- Closed-form, asymptotic, broadcast and Monte Carlo gain models
- Concavity threshold and gain qualification
"""

from .propagation import ChannelConfig, ChannelSample, friis_gain, draw_channel, draw_channels
from .estimation import EstimatorKind, EstimatorType, GainEstimate, estimate_peb_gain, peb_gain_mc
from .peb_gain import (
    PebGainModel,
    RationalApproxGain,
    AsymptoticGain,
    BroadcastGain,
    MonteCarloGain,
    GainQualification,
    g_hat,
    g_hat_derivative,
    g_asymptotic,
    concavity_threshold,
    gamma_quantile,
    qualify_gain
)

__all__ = [
    'ChannelConfig',
    'ChannelSample',
    'friis_gain',
    'draw_channel',
    'draw_channels',
    'EstimatorKind',
    'EstimatorType',
    'GainEstimate',
    'estimate_peb_gain',
    'peb_gain_mc',
    'PebGainModel',
    'RationalApproxGain',
    'AsymptoticGain',
    'BroadcastGain',
    'MonteCarloGain',
    'GainQualification',
    'g_hat',
    'g_hat_derivative',
    'g_asymptotic',
    'concavity_threshold',
    'gamma_quantile',
    'qualify_gain'
]
