"""EIT in a Lambda-like medium whose upper level is a Fano-structured continuum.

Closed-form susceptibility, two numerical oracles for it, window and
group-index analysis, and a slow-light propagation demo.
"""

from .params import AtomicSystem, FieldConfig, ParameterError
from .presets import PRESETS, paper_preset, read_params, write_params
from .susceptibility import (SusceptibilitySpectrum, chi, compute_spectrum, fano_profile,
                             group_index, r_closed)
from .analysis import WindowReport, ScalingFit, find_window, width_scaling_sweep

__version__ = "0.1.0"

__all__ = [
    "AtomicSystem",
    "FieldConfig",
    "ParameterError",
    "PRESETS",
    "ScalingFit",
    "SusceptibilitySpectrum",
    "WindowReport",
    "chi",
    "compute_spectrum",
    "fano_profile",
    "find_window",
    "group_index",
    "paper_preset",
    "r_closed",
    "read_params",
    "width_scaling_sweep",
    "write_params",
]
