"""Cosine-series antialiasing functions.

A function of the family is

    h(t) = sum_k h_k cos(k pi t / t_w),   -t_w < t <= t_w

and zero elsewhere.  Its coefficients are pinned by a square linear system
(unit height at the origin, zero level and zero even derivatives at the
end points, and one free coefficient ``q0`` for h_0).  ``q0`` is then tuned
to minimise the highest sidelobe of the continuous-time spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

__all__ = [
    "CosineSeries",
    "DesignError",
    "WindowDesignSpec",
    "FIVE_TERM",
    "SIX_TERM",
    "solve_coefficients",
    "continuous_spectrum",
    "normalized_gain",
    "first_zero",
    "sidelobe_peaks",
    "max_sidelobe_db",
    "decay_db_per_oct",
    "optimize_q0",
    "half_width_for_fs",
    "design",
    "constraint_residuals",
    "PUBLISHED",
]

#: Grid density used when scanning a spectrum for lobes.
POINTS_PER_LOBE = 64
#: Sidelobes are searched up to this multiple of the first-zero frequency.
SIDELOBE_SPAN = 50.0
Q0_BRACKET = (0.1, 0.5)
#: Sidelobe peaks below this level are not trusted for slope fits.
DECAY_FLOOR_DB = -250.0


class DesignError(ValueError):
    """Raised when a window design is infeasible or fails to converge."""


@dataclass(frozen=True)
class CosineSeries:
    """Finite-support cosine series ``h_0..h_m`` with half-width ``t_w``.

    Instances are immutable and hashable so they can key table caches.
    """

    coefficients: tuple[float, ...]
    half_width: float = 1.0

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("a cosine series needs at least one coefficient")
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "half_width", float(self.half_width))

    @property
    def h(self) -> np.ndarray:
        return np.asarray(self.coefficients)

    @property
    def m(self) -> int:
        """Index of the highest-order term."""
        return len(self.coefficients) - 1

    def with_half_width(self, half_width: float) -> "CosineSeries":
        return CosineSeries(self.coefficients, half_width)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.arange(self.m + 1)
        val = np.cos(np.multiply.outer(t, k) * (np.pi / self.half_width)) @ self.h
        inside = (t > -self.half_width) & (t <= self.half_width)
        return np.where(inside, val, 0.0)


@dataclass(frozen=True)
class WindowDesignSpec:
    """Number of enforced even-derivative orders ``P`` and free coefficient ``q0``."""

    P: int
    q0: float
    term_count: int = field(init=False)

    def __post_init__(self):
        if self.P < 1:
            raise ValueError(f"P must be >= 1, got {self.P}")
        object.__setattr__(self, "term_count", self.P + 3)


def _constraint_system(P: int, q0: float):
    m = P + 2
    k = np.arange(m + 1, dtype=float)
    alt = (-1.0) ** k
    rows = [np.ones(m + 1), alt]
    rows += [alt * k ** (2 * p) for p in range(1, P + 1)]
    rows.append(np.eye(m + 1)[0])
    q = np.zeros(m + 1)
    q[0] = 1.0
    q[-1] = q0
    return np.array(rows), q


def solve_coefficients(spec: WindowDesignSpec, half_width: float = 1.0) -> CosineSeries:
    """Solve the constraint system for the coefficients of ``spec``."""
    R, q = _constraint_system(spec.P, spec.q0)
    try:
        g = np.linalg.solve(R, q)
    except np.linalg.LinAlgError as exc:
        raise DesignError(f"constraint matrix is singular for P={spec.P}") from exc
    # the last row pins h_0 exactly; drop the solve's rounding on it
    g[0] = spec.q0
    return CosineSeries(tuple(g), half_width)


def continuous_spectrum(series: CosineSeries, f):
    """Fourier transform of the finite-support series at frequency ``f``.

    ``f`` is in cycles per unit of ``series.half_width``.  The transform of
    a real even function is real; it is returned as a float array.
    """
    f = np.asarray(f, dtype=float)
    tw = series.half_width
    x = 2.0 * f * tw
    k = np.arange(series.m + 1)
    xk = np.multiply.outer(x, np.ones_like(k, dtype=float))
    terms = np.sinc(xk - k) + np.sinc(xk + k)
    return tw * (terms @ series.h)


def normalized_gain(series: CosineSeries, u):
    """Spectrum at normalized frequency ``u = 2 f t_w`` relative to DC."""
    unit = series.with_half_width(1.0)
    return continuous_spectrum(unit, np.asarray(u, dtype=float) / 2.0) / (2.0 * unit.h[0])


def first_zero(series: CosineSeries) -> float:
    """First spectral null in normalized frequency ``u = 2 f t_w``.

    The first local minimum of ``|H|`` on a fine grid, polished with a
    bracketing root finder when the spectrum changes sign there and with a
    bounded minimiser otherwise (near-double zeros).
    """
    step = 1.0 / POINTS_PER_LOBE
    upper = 4.0 * (series.m + 2)
    # half-step offset keeps grid points off the integer zeros
    u = np.arange(step / 2, upper, step)
    g = normalized_gain(series, u)
    mag = np.abs(g)
    dips = np.nonzero((mag[1:-1] <= mag[:-2]) & (mag[1:-1] < mag[2:]))[0] + 1
    if dips.size == 0:
        raise DesignError("no spectral zero found")
    i = dips[0]

    def gain(v):
        return float(normalized_gain(series, v))

    for a, b in ((i - 1, i), (i, i + 1)):
        if np.signbit(g[a]) != np.signbit(g[b]):
            return optimize.brentq(gain, u[a], u[b], xtol=1e-14)
    res = optimize.minimize_scalar(
        lambda v: abs(gain(v)), bounds=(u[i - 1], u[i + 1]), method="bounded", options={"xatol": 1e-12}
    )
    return float(res.x)


def _refine_peak(series: CosineSeries, u0: float, step: float) -> tuple[float, float]:
    res = optimize.minimize_scalar(
        lambda v: -abs(float(normalized_gain(series, v))),
        bounds=(u0 - step, u0 + step),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.x), -float(res.fun)


def sidelobe_peaks(series: CosineSeries, u_max: float | None = None, refine: bool = False):
    """Local maxima of ``|H(u)|`` beyond the first zero.

    Returns ``(u, gain_db)`` arrays, gain relative to DC.
    """
    u0 = first_zero(series)
    if u_max is None:
        u_max = SIDELOBE_SPAN * u0
    step = 1.0 / POINTS_PER_LOBE
    u = np.arange(u0 + step / 2, u_max, step)
    mag = np.abs(normalized_gain(series, u))
    idx = np.nonzero((mag[1:-1] >= mag[:-2]) & (mag[1:-1] > mag[2:]))[0] + 1
    pu, pm = u[idx], mag[idx]
    if refine:
        refined = [_refine_peak(series, v, step) for v in pu]
        pu = np.array([r[0] for r in refined])
        pm = np.array([r[1] for r in refined])
    with np.errstate(divide="ignore"):
        return pu, 20 * np.log10(pm)


def max_sidelobe_db(series: CosineSeries) -> float:
    """Highest sidelobe level in dB relative to DC."""
    u0 = first_zero(series)
    step = 1.0 / POINTS_PER_LOBE
    u = np.arange(u0 + step / 2, SIDELOBE_SPAN * u0, step)
    mag = np.abs(normalized_gain(series, u))
    # polish the few largest grid maxima; the winner is among them
    best = 0.0
    for i in np.argsort(mag)[-3:]:
        best = max(best, _refine_peak(series, u[i], step)[1])
    return 20 * np.log10(best)


def _fit_decay(u, level_db) -> float:
    return -float(np.polyfit(np.log2(u), level_db, 1)[0])


def decay_db_per_oct(
    series: CosineSeries, octaves: tuple[float, float] | None = None, floor_db: float = DECAY_FLOOR_DB
) -> float:
    """Asymptotic sidelobe decay rate in dB per octave.

    Least-squares slope of sidelobe-peak level against log2 frequency.
    By default the fit covers the last two octaves whose peaks stay above
    ``floor_db`` (below it, double-precision cancellation and coefficient
    rounding take over), searched up to the sidelobe span.  ``octaves``
    instead fixes the band as multiples of the first-zero frequency.
    """
    u0 = first_zero(series)
    if octaves is not None:
        lo, hi = octaves[0] * u0, octaves[1] * u0
        pu, pdb = sidelobe_peaks(series, u_max=hi + 1.0, refine=True)
    else:
        pu, pdb = sidelobe_peaks(series)
        ok = pdb > floor_db
        # stop at the first peak that falls through the floor
        cut = np.argmin(ok) if not ok.all() else ok.size
        if cut < 2:
            raise DesignError("sidelobes fall below the precision floor immediately")
        hi = pu[cut - 1]
        lo = max(hi / 4, 2 * u0)
        pu, pdb = sidelobe_peaks(series, u_max=hi + 0.5, refine=True)
    sel = (pu >= lo) & (pu <= hi)
    if sel.sum() < 2:
        raise DesignError("not enough sidelobe peaks to fit a decay slope")
    return _fit_decay(pu[sel], pdb[sel])


def optimize_q0(P: int, bracket: tuple[float, float] = Q0_BRACKET, xtol: float = 1e-10) -> WindowDesignSpec:
    """Choose ``q0`` minimising the highest sidelobe for ``P`` enforced orders."""
    if not 1 <= P <= 6:
        raise ValueError(f"P must be in 1..6, got {P}")

    def cost(q0):
        try:
            return max_sidelobe_db(solve_coefficients(WindowDesignSpec(P, q0)))
        except DesignError:
            return np.inf

    res = optimize.minimize_scalar(
        cost, bounds=bracket, method="bounded", options={"xatol": xtol, "maxiter": 500}
    )
    if not res.success:
        raise DesignError(f"q0 search did not converge for P={P}; best so far q0={res.x!r} ({res.fun:.2f} dB)")
    return WindowDesignSpec(P, float(res.x))


def half_width_for_fs(series: CosineSeries, fs: float) -> float:
    """Half-width putting the first spectral zero at ``fs / 2``."""
    if not fs > 0:
        raise ValueError(f"fs must be positive, got {fs}")
    # first zero sits at u0 = 2 f t_w, so f = fs/2 gives t_w = u0 / fs
    return first_zero(series) / fs


def design(terms: int, optimize_coefficients: bool = False) -> CosineSeries:
    """Cosine series with ``terms`` coefficients (``P = terms - 3``)."""
    if not optimize_coefficients and terms in PUBLISHED:
        return PUBLISHED[terms]
    return solve_coefficients(optimize_q0(terms - 3))


FIVE_TERM = CosineSeries((0.2940462892, 0.4539870314, 0.2022629686, 0.0460129686, 0.0036907422))
SIX_TERM = CosineSeries(
    (0.2624710164, 0.4265335164, 0.2250165621, 0.0726831633, 0.0125124215, 0.0007833203)
)
PUBLISHED: dict[int, CosineSeries] = {5: FIVE_TERM, 6: SIX_TERM}


def constraint_residuals(series: CosineSeries, P: int | None = None) -> np.ndarray:
    """Residuals of the sum, end-level and even-derivative constraints."""
    h = series.h
    k = np.arange(series.m + 1, dtype=float)
    alt = (-1.0) ** k
    if P is None:
        P = series.m - 2
    res = [h.sum() - 1.0, alt @ h]
    res += [(alt * k ** (2 * p)) @ h for p in range(1, P + 1)]
    return np.array(res)
