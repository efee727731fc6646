"""Closed-form antialiasing of polynomial pulses.

A pulse ``p(tau) = sum_j p_j tau**j`` on ``0 <= tau <= 1`` is written as
``p(tau) u(tau) - p(tau) u(tau - 1)`` and each monomial step is convolved
with a cosine-series kernel.  The convolutions are linear combinations of
``cos(k pi t / t_w)``, ``sin(k pi t / t_w)`` and powers of ``t`` whose
coefficient matrices C, S, U (transition) and V (steady state) are built
once per (kernel, degree, half-width).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .window_design import CosineSeries

__all__ = [
    "PolynomialPulse",
    "AntialiasTables",
    "binomial_matrix",
    "build_tables",
    "cached_tables",
    "eval_antialiased_poly",
    "steady_state_difference",
]


@dataclass(frozen=True)
class PolynomialPulse:
    """Polynomial ``p_0 + p_1 tau + ... + p_n tau**n`` on ``[0, 1]``."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("a polynomial pulse needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("pulse coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def p(self) -> np.ndarray:
        return np.asarray(self.coefficients)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        inside = (tau >= 0) & (tau <= 1)
        return np.where(inside, np.polynomial.polynomial.polyval(tau, self.p), 0.0)


@dataclass(frozen=True, eq=False)
class AntialiasTables:
    B: np.ndarray
    C: np.ndarray  # (n+1, m), column j <-> harmonic k = j + 1
    S: np.ndarray  # (n+1, m)
    U: np.ndarray  # (n+1, n+2), column k <-> t**k
    V: np.ndarray  # (n+1, n+1), column k <-> t**k
    t_w: float
    series: CosineSeries

    @property
    def degree(self) -> int:
        return self.B.shape[0] - 1

    @property
    def dc_gain(self) -> float:
        return 2.0 * self.t_w * self.series.coefficients[0]

    def transition(self, coeffs: np.ndarray, t) -> np.ndarray:
        """``c.c_t + s.s_t + u.t_{n+1}`` for row-combination ``coeffs``."""
        t = np.asarray(t, dtype=float)
        k = np.arange(1, self.C.shape[1] + 1)
        arg = np.multiply.outer(t, k) * (np.pi / self.t_w)
        out = np.cos(arg) @ (coeffs @ self.C) + np.sin(arg) @ (coeffs @ self.S)
        return out + np.polynomial.polynomial.polyval(t, coeffs @ self.U)

    def steady(self, coeffs: np.ndarray, t) -> np.ndarray:
        """``v.t_n`` for row-combination ``coeffs``."""
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), coeffs @ self.V)


def binomial_matrix(n: int) -> np.ndarray:
    """Lower-triangular Pascal matrix, ``B[r, k] = r! / (k! (r-k)!)``."""
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    B = np.zeros((n + 1, n + 1))
    for r in range(n + 1):
        for k in range(r + 1):
            B[r, k] = math.comb(r, k)
    return B


def build_tables(series: CosineSeries, n: int, t_w: float) -> AntialiasTables:
    """Coefficient matrices for monomials up to degree ``n``.

    Row ``r`` describes ``h * (tau**r u(tau))``.  Row 0 is the integral of
    the kernel; each further row integrates the previous one (times ``r``)
    and fixes the integration constants from continuity at ``t = -t_w``
    (U column 0) and ``t = +t_w`` (V column 0).
    """
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if not t_w > 0:
        raise ValueError(f"t_w must be positive, got {t_w}")
    h = series.h
    m = series.m
    k = np.arange(1, m + 1, dtype=float)
    alt = (-1.0) ** k
    C = np.zeros((n + 1, m))
    S = np.zeros((n + 1, m))
    U = np.zeros((n + 1, n + 2))
    V = np.zeros((n + 1, n + 1))
    powers_u = t_w ** np.arange(n + 2)
    neg_powers_u = (-t_w) ** np.arange(n + 2)

    S[0] = t_w / (k * np.pi) * h[1:]
    U[0, 1] = h[0]
    for r in range(n + 1):
        if r > 0:
            C[r] = -(r * t_w / (k * np.pi)) * S[r - 1]
            S[r] = (r * t_w / (k * np.pi)) * C[r - 1]
            U[r, 1:] = r / np.arange(1, n + 2) * U[r - 1, :-1]
            V[r, 1:] = r / np.arange(1, n + 1) * V[r - 1, :-1]
        # zero at t = -t_w
        U[r, 0] = -(neg_powers_u[1:] @ U[r, 1:]) - alt @ C[r]
        # match the steady-state polynomial at t = +t_w
        V[r, 0] = powers_u @ U[r] + alt @ C[r] - powers_u[1 : n + 1] @ V[r, 1:]
    return AntialiasTables(binomial_matrix(n), C, S, U, V, float(t_w), series)


@functools.lru_cache(maxsize=256)
def _cached(coefficients: tuple[float, ...], n: int, t_w_key: float) -> AntialiasTables:
    return build_tables(CosineSeries(coefficients), n, t_w_key)


def cached_tables(series: CosineSeries, n: int, t_w: float) -> AntialiasTables:
    """``build_tables`` memoised on (coefficients, degree, t_w to 12 digits)."""
    return _cached(series.coefficients, n, float(f"{t_w:.12g}"))


def _padded(tables: AntialiasTables, pulse: PolynomialPulse) -> np.ndarray:
    if pulse.degree > tables.degree:
        raise ValueError(f"pulse degree {pulse.degree} exceeds table degree {tables.degree}")
    p = np.zeros(tables.degree + 1)
    p[: pulse.degree + 1] = pulse.p
    return p


def eval_antialiased_poly(tables: AntialiasTables, pulse: PolynomialPulse, t) -> np.ndarray:
    """Antialiased pulse value at normalized time ``t``, unit DC gain.

    Regions (``t_w`` is the normalized half-width):

    - onset only:  ``-t_w < t <= t_w`` and ``t <= 1 - t_w``
    - steady:      ``t_w < t <= 1 - t_w``
    - overlapping: ``1 - t_w < t <= t_w`` (only when ``t_w > 1/2``)
    - offset:      ``1 - t_w < t <= 1 + t_w`` and ``t > t_w``

    and zero outside ``(-t_w, 1 + t_w]``.
    """
    p = _padded(tables, pulse)
    pb = p @ tables.B
    tw = tables.t_w
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.zeros_like(t)

    in_onset = (t > -tw) & (t <= tw)
    in_offset = (t > 1 - tw) & (t <= 1 + tw)
    q1 = in_onset & (t <= 1 - tw)
    q2 = (t > tw) & (t <= 1 - tw)
    q3 = in_onset & (t > 1 - tw)
    q4 = in_offset & (t > tw)

    if q1.any():
        out[q1] = tables.transition(p, t[q1])
    if q2.any():
        out[q2] = tables.steady(p, t[q2])
    if q3.any():
        tq = t[q3]
        out[q3] = tables.transition(p, tq) - tables.transition(pb, tq - 1)
    if q4.any():
        tq = t[q4]
        out[q4] = tables.steady(p, tq) - tables.transition(pb, tq - 1)
    out /= tables.dc_gain
    return out[0] if scalar else out


def steady_state_difference(tables: AntialiasTables, pulse: PolynomialPulse, t) -> np.ndarray:
    """``v.t_n(t) - (p^T B V).t_n(t - 1)``, the closed form past ``1 + t_w``.

    Identically zero by the shifted-binomial identity; exposed so the
    cancellation can be checked numerically.
    """
    p = _padded(tables, pulse)
    t = np.asarray(t, dtype=float)
    return (tables.steady(p, t) - tables.steady(p @ tables.B, t - 1)) / tables.dc_gain
