"""Aliasing-free glottal excitation synthesis.

Closed-form antialiasing of piecewise polynomial (Fujisaki-Ljungqvist) and
piecewise exponential (Liljencrants-Fant) excitation models with
cosine-series kernels, an all-pole droop equalizer, and spectral
measurements of the residual aliasing.
"""

from .equalizer import EqualizerDesign, apply_iir, design_equalizer
from .exp_antialias import eval_antialiased_exp
from .fl_model import FLParams, fl_antialiased_cycle, fl_derived, fl_waveform_continuous
from .lf_model import LFParams, lf_antialiased_cycle, lf_waveform_continuous, solve_lf_coefficients
from .poly_antialias import PolynomialPulse, build_tables, eval_antialiased_poly
from .synth import F0Trajectory, SignalBuffer, synthesize, synthesize_from_config, vibrato_f0
from .window_design import FIVE_TERM, SIX_TERM, CosineSeries, half_width_for_fs

__version__ = "0.1.0"

__all__ = [
    "CosineSeries",
    "EqualizerDesign",
    "F0Trajectory",
    "FIVE_TERM",
    "FLParams",
    "LFParams",
    "PolynomialPulse",
    "SIX_TERM",
    "SignalBuffer",
    "apply_iir",
    "build_tables",
    "design_equalizer",
    "eval_antialiased_exp",
    "eval_antialiased_poly",
    "fl_antialiased_cycle",
    "fl_derived",
    "fl_waveform_continuous",
    "half_width_for_fs",
    "lf_antialiased_cycle",
    "lf_waveform_continuous",
    "solve_lf_coefficients",
    "synthesize",
    "synthesize_from_config",
    "vibrato_f0",
]
