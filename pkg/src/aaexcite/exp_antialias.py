"""Closed-form antialiasing of exponential pulses.

The pulse is ``exp(beta * tau)`` on ``0 < tau <= 1`` with complex ``beta``.
Convolving it with one cosine term ``cos(k pi s / t_w)`` restricted to
``|s| <= t_w`` gives the element function ``phi_k``, assembled from three
pieces:

- ``I1`` on ``(-t_w, t_w]``: onset, integral up to ``s = t``
- ``I2`` on ``(t_w, 1 + t_w)``: full kernel support
- ``I3`` on ``[1 - t_w, 1 + t_w)``: removes the part of the kernel that
  has run past the pulse end (``s < t - 1``)

``phi_k = I1 + I2 - I3``.  The subtraction of ``I3`` is what the
convolution integral requires; adding it fails the quadrature check in
``tests/test_exp_antialias.py``.
"""

from __future__ import annotations

import numpy as np

from .window_design import CosineSeries

__all__ = [
    "ResonanceError",
    "element_terms",
    "element_function",
    "constant_term",
    "eval_antialiased_exp",
]

MAX_ABS_BETA = 1e6
SMALL_BETA = 1e-8


class ResonanceError(ZeroDivisionError):
    """``k**2 alpha**2 + beta**2`` vanishes: beta sits on a kernel harmonic."""


def _check_beta(beta) -> complex:
    beta = complex(beta)
    if not np.isfinite(beta) or abs(beta) >= MAX_ABS_BETA:
        raise ValueError(f"beta must be finite with |beta| < {MAX_ABS_BETA:g}, got {beta}")
    return beta


def element_terms(k: int, beta, t, t_w: float):
    """``(I1, I2, I3)`` at ``t``, each zero outside its own interval."""
    if k < 1:
        raise ValueError(f"harmonic index must be >= 1, got {k}")
    beta = _check_beta(beta)
    t = np.asarray(t, dtype=float)
    a = np.pi / t_w
    ka = k * a
    den = ka * ka + beta * beta
    if abs(den) <= 1e-12 * ka * ka:
        raise ResonanceError(f"k={k}: beta={beta} makes k^2 alpha^2 + beta^2 vanish")
    sgn = -1.0 if k % 2 else 1.0
    i1 = (ka * np.sin(ka * t) - beta * np.cos(ka * t) + sgn * beta * np.exp(beta * (t_w + t))) / den
    i2 = sgn * beta * np.exp(beta * t) * (np.exp(beta * t_w) - np.exp(-beta * t_w)) / den
    eb = np.exp(beta)
    i3 = (
        ka * eb * np.sin(ka * (t - 1))
        - beta * eb * np.cos(ka * (t - 1))
        + sgn * beta * np.exp(beta * (t_w + t))
    ) / den
    zero = np.zeros((), dtype=complex)
    i1 = np.where((t > -t_w) & (t <= t_w), i1, zero)
    i2 = np.where((t > t_w) & (t < 1 + t_w), i2, zero)
    i3 = np.where((t >= 1 - t_w) & (t < 1 + t_w), i3, zero)
    return i1, i2, i3


def element_function(k: int, beta, t, t_w: float) -> np.ndarray:
    """``phi_k(t)``: ``cos(k pi s / t_w)`` on ``|s| <= t_w`` convolved with the pulse."""
    i1, i2, i3 = element_terms(k, beta, t, t_w)
    return i1 + i2 - i3


def constant_term(beta, t, t_w: float) -> np.ndarray:
    """``phi_0(t)``: the flat kernel term convolved with the pulse.

    ``(exp(beta x1) - exp(beta x0)) / beta`` over the overlap
    ``x0 = max(t - t_w, 0)``, ``x1 = min(t + t_w, 1)``; written with
    ``expm1`` so it tends to the overlap length as ``beta -> 0``.
    """
    beta = _check_beta(beta)
    t = np.asarray(t, dtype=float)
    x0 = np.maximum(t - t_w, 0.0)
    x1 = np.minimum(t + t_w, 1.0)
    length = np.maximum(x1 - x0, 0.0)
    z = beta * length
    if abs(beta) < SMALL_BETA:
        ratio = length * (1 + z / 2)
    else:
        ratio = np.expm1(z) / beta
    return np.where(length > 0, np.exp(beta * x0) * ratio, 0.0 + 0.0j)


def eval_antialiased_exp(series: CosineSeries, beta, t, t_w: float) -> np.ndarray:
    """Antialiased ``exp(beta tau)`` pulse at normalized time ``t``, unit DC gain.

    Returns a complex array; for real ``beta`` the imaginary part is zero.
    """
    h = series.coefficients
    out = h[0] * constant_term(beta, t, t_w)
    for k in range(1, len(h)):
        out = out + h[k] * element_function(k, beta, t, t_w)
    return out / (2.0 * t_w * h[0])
