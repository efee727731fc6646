"""Fujisaki-Ljungqvist excitation model.

One period (normalized to ``T = 1``) is four polynomial pieces:

- ``0 < t <= R``: quadratic falling from ``A`` to 0
- ``R < t <= W``: cubic ending at ``B`` (``W = R + F``)
- ``W < t <= W + D``: quadratic from ``C`` to ``beta``
- ``W + D < t <= T``: constant ``beta``
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .poly_antialias import PolynomialPulse, cached_tables, eval_antialiased_poly
from .window_design import CosineSeries

__all__ = [
    "FLParams",
    "FLDerived",
    "Segment",
    "fl_derived",
    "fl_waveform_continuous",
    "fl_segments",
    "fl_antialiased_cycle",
    "fl_flow",
]


@dataclass(frozen=True)
class FLParams:
    A: float
    B: float
    C: float
    R: float
    F: float
    D: float
    T: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if not (self.R > 0 and self.F > 0 and self.D > 0):
            raise ValueError("R, F and D must be positive")
        if self.W + self.D > self.T * (1 + 1e-12):
            raise ValueError(f"R + F + D = {self.W + self.D} exceeds the period {self.T}")

    @property
    def W(self) -> float:
        return self.R + self.F

    @classmethod
    def from_dict(cls, d: dict) -> "FLParams":
        return cls(**{k: float(d[k]) for k in ("A", "B", "C", "R", "F", "D")}, T=float(d.get("T", 1.0)))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class FLDerived:
    alpha: float
    beta: float


class Segment(NamedTuple):
    """Polynomial piece starting at ``offset`` (period units) lasting ``duration``."""

    offset: float
    duration: float
    pulse: PolynomialPulse


def fl_derived(params: FLParams) -> FLDerived:
    A, B, C, R, F, D, T = params.A, params.B, params.C, params.R, params.F, params.D, params.T
    den_a = F * F - 2 * R * R
    den_b = D - 3 * (T - params.W)
    if abs(den_a) < 1e-14:
        raise ValueError("F**2 == 2 R**2 makes alpha undefined")
    if abs(den_b) < 1e-14:
        raise ValueError("D == 3 (T - W) makes beta undefined")
    return FLDerived(alpha=(4 * A * R - 6 * F * B) / den_a, beta=C * D / den_b)


def fl_segments(params: FLParams, derived: FLDerived) -> list[Segment]:
    """The four pieces as pulses in local time ``tau in [0, 1]``.

    Coefficients of ``s**j`` (``s`` = time since the piece start) are
    multiplied by ``duration**j``.  A zero-length closed phase is dropped.
    """
    A, B, C, R, F, D = params.A, params.B, params.C, params.R, params.F, params.D
    a, b = derived.alpha, derived.beta
    W = params.W
    segs = [
        Segment(0.0, R, PolynomialPulse((A, -(2 * A + R * a), A + R * a))),
        Segment(R, F, PolynomialPulse((0.0, a * F, 3 * B - 2 * F * a, -(2 * B - F * a)))),
        Segment(W, D, PolynomialPulse((C, -2 * (C - b), C - b))),
    ]
    rest = params.T - W - D
    if rest > 1e-12 * params.T:
        segs.append(Segment(W + D, rest, PolynomialPulse((b,))))
    return segs


def fl_waveform_continuous(params: FLParams, derived: FLDerived, t) -> np.ndarray:
    """Excitation ``E(t)`` on ``[0, T]`` (``t = 0`` takes the first piece's value ``A``)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    segs = fl_segments(params, derived)
    for i, (off, dur, pulse) in enumerate(segs):
        lo = off if i else -np.inf
        sel = (t > lo) & (t <= off + dur) if i else (t >= 0) & (t <= off + dur)
        out = np.where(sel, np.polynomial.polynomial.polyval((t - off) / dur, pulse.p), out)
    return out


def fl_flow(params: FLParams, derived: FLDerived, t) -> np.ndarray:
    """Glottal flow ``U_g(t) = int_0^t E`` (unnormalized)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for off, dur, pulse in fl_segments(params, derived):
        integ = np.polynomial.polynomial.polyint(pulse.p)
        tau = np.clip((t - off) / dur, 0.0, 1.0)
        out = out + dur * np.polynomial.polynomial.polyval(tau, integ)
    return out


def fl_antialiased_cycle(
    params: FLParams,
    derived: FLDerived,
    series: CosineSeries,
    t_w_abs: float,
    period_s: float,
    eval_times,
) -> np.ndarray:
    """Antialiased excitation of one cycle at ``eval_times`` (s from cycle start).

    Each piece is filtered in its own normalized time with half-width
    ``t_w_abs / (duration * period_s)``; the unit-DC normalization makes the
    pieces add up to the filtered waveform.
    """
    t = np.asarray(eval_times, dtype=float)
    out = np.zeros_like(t)
    for off, dur, pulse in fl_segments(params, derived):
        seg_s = dur * period_s
        tw = t_w_abs / seg_s
        tau = (t - off * period_s) / seg_s
        sel = (tau > -tw) & (tau <= 1 + tw)
        if sel.any():
            tables = cached_tables(series, 3, tw)
            out[sel] += eval_antialiased_poly(tables, pulse, tau[sel])
    return out
