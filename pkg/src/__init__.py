# WPSN Allocator - Wirelessly-powered sensor network optimizer
# Splits a base station's energy budget between channel-estimation pilots
# and energy beamforming to maximise the network's minimum sensing rate.

__version__ = "0.1.0"
__author__ = "WPSN Allocator Team"
__description__ = "Max-min sensing rate optimizer for wirelessly-powered sensor networks"
