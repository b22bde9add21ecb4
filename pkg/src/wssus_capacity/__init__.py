"""Capacity bounds for noncoherent underspread WSSUS Rayleigh fading channels
under peak constraints in time and frequency, and in time only."""

from .bounds import (
    BoundCurve,
    BoundPoint,
    LinkConfig,
    awgn_inf_capacity,
    critical_bandwidth,
    lb,
    lb_approx,
    penalty_A,
    sweep,
    ub1,
    ub2,
    viterbi_lb,
)
from .channel_model import GridParams, PowerBudget, ScatteringSpec, brick, from_mesh
from .coherent_mi import Constellation, awgn_cm_mi, get_constellation, rayleigh_cm_mi
from .errors import Boundary, ConfigError, NonConvergence, NumericalFailure, SizeExceeded
from .estimators import BoundCurveTransformer, CriticalBandwidthEstimator

__version__ = "0.1.0"

__all__ = [
    "Boundary",
    "BoundCurve",
    "BoundCurveTransformer",
    "BoundPoint",
    "ConfigError",
    "Constellation",
    "CriticalBandwidthEstimator",
    "GridParams",
    "LinkConfig",
    "NonConvergence",
    "NumericalFailure",
    "PowerBudget",
    "ScatteringSpec",
    "SizeExceeded",
    "awgn_cm_mi",
    "awgn_inf_capacity",
    "brick",
    "critical_bandwidth",
    "from_mesh",
    "get_constellation",
    "lb",
    "lb_approx",
    "penalty_A",
    "rayleigh_cm_mi",
    "sweep",
    "ub1",
    "ub2",
    "viterbi_lb",
]
