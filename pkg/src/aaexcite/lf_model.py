"""Liljencrants-Fant excitation model with closed-form antialiasing.

Time is normalized by the period ``T0`` and amplitude by ``Ee``:

- ``t < te``: ``E0 exp(alpha t) sin(omega_g t)``
- ``te <= t < tc``: ``-Ee / (beta ta) [exp(-beta (t - te)) - exp(-beta (tc - te))]``
- ``t >= tc``: 0
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import optimize

from .exp_antialias import eval_antialiased_exp
from .poly_antialias import PolynomialPulse, cached_tables, eval_antialiased_poly
from .window_design import CosineSeries

__all__ = [
    "LFParams",
    "LFDerived",
    "InfeasibleParameters",
    "solve_lf_coefficients",
    "lf_waveform_continuous",
    "lf_flow_integral",
    "lf_antialiased_cycle",
]

BETA_BRACKET_LO = 1e-9
ALPHA_BRACKET = (-500.0, 500.0)
ROOT_XTOL = 1e-12


class InfeasibleParameters(ValueError):
    pass


@dataclass(frozen=True)
class LFParams:
    tp: float
    te: float
    ta: float
    tc: float
    Ee: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if not 0 < self.tp < self.te <= self.tc <= 1:
            raise ValueError(f"need 0 < tp < te <= tc <= 1, got {self}")
        if not self.ta > 0:
            raise ValueError("ta must be positive")
        if not self.Ee > 0:
            raise ValueError("Ee must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "LFParams":
        return cls(
            float(d["tp"]), float(d["te"]), float(d["ta"]), float(d["tc"]), float(d.get("Ee", 1.0))
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LFDerived:
    E0_over_Ee: float
    alpha: float
    omega_g: float
    beta: float


def _return_eq(b, ta, dur):
    return b * ta - 1.0 + math.exp(-b * dur)


def _return_integral(p: LFParams, beta: float) -> float:
    dur = p.tc - p.te
    tail = math.exp(-beta * dur)
    return -p.Ee / (beta * p.ta) * (-math.expm1(-beta * dur) / beta - dur * tail)


def _opening_integral_scaled(alpha: float, omega: float, te: float) -> float:
    # int_0^te exp(alpha t) sin(omega t) dt, divided by exp(alpha te)
    s, c = math.sin(omega * te), math.cos(omega * te)
    return (alpha * s - omega * c + omega * math.exp(-alpha * te)) / (alpha * alpha + omega * omega)


def _expand_bracket(f, lo, hi, what, tries=8):
    flo, fhi = f(lo), f(hi)
    for _ in range(tries):
        if np.sign(flo) != np.sign(fhi):
            return lo, hi
        lo, hi = lo * 2, hi * 2
        flo, fhi = f(lo), f(hi)
    raise InfeasibleParameters(f"no sign change found for the {what} equation")


def solve_lf_coefficients(params: LFParams) -> LFDerived:
    """Solve ``omega_g``, ``beta``, ``alpha`` and ``E0`` from the timing parameters.

    ``beta`` is the positive root of ``beta ta = 1 - exp(-beta (tc - te))``
    (amplitude continuity at ``te``); ``alpha`` zeroes the net flow over
    the period; ``E0`` puts ``E(te) = -Ee``.
    """
    p = params
    omega = math.pi / p.tp
    dur = p.tc - p.te
    if not p.ta < dur:
        raise InfeasibleParameters(f"return-phase equation needs ta < tc - te, got ta={p.ta}, tc-te={dur}")

    def beq(b):
        return _return_eq(b, p.ta, dur)

    hi = 10.0 / p.ta
    if beq(hi) <= 0:
        raise InfeasibleParameters("no sign change found for the return-phase equation")
    beta = optimize.brentq(beq, BETA_BRACKET_LO / p.ta, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)

    s_te = math.sin(omega * p.te)
    if abs(s_te) < 1e-12:
        raise InfeasibleParameters("sin(omega_g te) = 0: te is a multiple of tp")
    ret = _return_integral(p, beta)

    def flow(a):
        return -p.Ee * _opening_integral_scaled(a, omega, p.te) / s_te + ret

    lo, hi = _expand_bracket(flow, *ALPHA_BRACKET, what="zero-flow")
    alpha = optimize.brentq(flow, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    e0 = -1.0 / (math.exp(alpha * p.te) * s_te)
    return LFDerived(E0_over_Ee=e0, alpha=alpha, omega_g=omega, beta=beta)


def lf_flow_integral(params: LFParams, derived: LFDerived) -> float:
    """Net flow ``int_0^1 E(t) dt`` in closed form."""
    p, d = params, derived
    opening = p.Ee * d.E0_over_Ee * math.exp(d.alpha * p.te) * _opening_integral_scaled(d.alpha, d.omega_g, p.te)
    return opening + _return_integral(p, d.beta)


def lf_waveform_continuous(params: LFParams, derived: LFDerived, t) -> np.ndarray:
    p, d = params, derived
    t = np.asarray(t, dtype=float)
    e0 = p.Ee * d.E0_over_Ee
    with np.errstate(over="ignore", invalid="ignore"):
        opening = e0 * np.exp(d.alpha * t) * np.sin(d.omega_g * t)
        closing = -p.Ee / (d.beta * p.ta) * (np.exp(-d.beta * (t - p.te)) - math.exp(-d.beta * (p.tc - p.te)))
    out = np.where((t >= 0) & (t < p.te), opening, 0.0)
    return np.where((t >= p.te) & (t < p.tc), closing, out)


def lf_antialiased_cycle(
    params: LFParams,
    derived: LFDerived,
    series: CosineSeries,
    t_w_abs: float,
    period_s: float,
    eval_times,
) -> np.ndarray:
    """Antialiased L-F excitation of one cycle at ``eval_times`` (s from cycle start).

    Opening phase: imaginary part of ``E0`` times the antialiased complex
    exponential on ``[0, te]``.  Return phase: a real exponential plus a
    constant on ``[te, tc]``.
    """
    p, d = params, derived
    t = np.asarray(eval_times, dtype=float) / period_s
    out = np.zeros_like(t)
    tw_abs = t_w_abs / period_s

    tw = tw_abs / p.te
    tau = t / p.te
    sel = (tau > -tw) & (tau < 1 + tw)
    if sel.any():
        beta_c = complex(d.alpha, d.omega_g) * p.te
        out[sel] += p.Ee * d.E0_over_Ee * eval_antialiased_exp(series, beta_c, tau[sel], tw).imag

    dur = p.tc - p.te
    tw = tw_abs / dur
    tau = (t - p.te) / dur
    sel = (tau > -tw) & (tau < 1 + tw)
    if sel.any():
        scale = -p.Ee / (d.beta * p.ta)
        decay = eval_antialiased_exp(series, -d.beta * dur, tau[sel], tw).real
        const = eval_antialiased_poly(cached_tables(series, 0, tw), PolynomialPulse((1.0,)), tau[sel])
        out[sel] += scale * decay - scale * math.exp(-d.beta * dur) * const
    return out
