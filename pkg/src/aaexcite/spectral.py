"""Spectral measurements: window gain, spectra, spectrograms, spurious floor."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import window_design as wd
from .equalizer import NUTTALL_TRUNCATION, cosine_window
from .window_design import CosineSeries

__all__ = [
    "NUTTALL_11",
    "NUTTALL_11_SERIES",
    "SelfConvolved",
    "SELF_CONVOLVED_NUTTALL",
    "SidelobeMeasurement",
    "analysis_window",
    "self_convolved_nuttall",
    "measure_sidelobe",
    "power_spectrum",
    "spectrogram",
    "SpuriousMeasurement",
    "measure_spurious_floor",
]

#: Nuttall 4-term window with continuous first derivative, -82.60 dB, 30 dB/oct.
NUTTALL_11 = (0.338946, 0.481973, 0.161054, 0.018027)
NUTTALL_11_SERIES = CosineSeries(NUTTALL_11)

# half-width of the self-convolved 4-term window's main lobe, in bins of its length
_SELF_CONV_MAINLOBE_BINS = 8


class SelfConvolved(NamedTuple):
    """Continuous-time self-convolution of a cosine series.

    Its spectrum is the square of the base spectrum, so levels and slopes
    in dB are exactly twice the base ones.
    """

    base: CosineSeries


SELF_CONVOLVED_NUTTALL = SelfConvolved(CosineSeries(NUTTALL_TRUNCATION))


class SidelobeMeasurement(NamedTuple):
    max_sidelobe_db: float
    decay_db_per_oct: float


def self_convolved_nuttall(length: int) -> np.ndarray:
    """Discrete self-convolution of the 4-term Nuttall window, unit DC.

    The base window has ``(length + 1) // 2`` points, so the result has
    ``length`` points for odd ``length`` (``length - 1`` for even).
    """
    base = cosine_window(NUTTALL_TRUNCATION, (length + 1) // 2)
    w = np.convolve(base, base)
    return w / w.sum()


def analysis_window(kind: str, length: int) -> np.ndarray:
    if kind == "self-convolved-nuttall":
        return self_convolved_nuttall(length)
    if kind == "nuttall-11":
        return cosine_window(NUTTALL_11, length)
    if kind == "rectangular":
        return np.ones(length)
    raise ValueError(f"unknown analysis window {kind!r}")


def _window_gain(w: np.ndarray, oversample: int):
    n = w.size
    nfft = 1 << int(np.ceil(np.log2(n * oversample)))
    spec = np.abs(np.fft.rfft(w, nfft))
    u = np.arange(spec.size) * n / nfft  # frequency in bins of the window length
    return u, spec / abs(w.sum())


def measure_sidelobe(window, floor_db: float = wd.DECAY_FLOOR_DB) -> SidelobeMeasurement:
    """Highest sidelobe (dB re DC) and sidelobe decay rate (dB/oct).

    ``window`` is a :class:`CosineSeries` or :class:`SelfConvolved`
    (measured on the analytic spectrum) or an array of window samples (zero-padded FFT).  The decay
    is the least-squares slope of the sidelobe peaks against log2
    frequency over the last two octaves whose peaks stay above
    ``floor_db``; for sampled windows the search also stops at one eighth
    of the sampling rate, where the periodic spectrum departs from the
    continuous one.
    """
    if isinstance(window, SelfConvolved):
        # the square is as accurate as the base, so the base floor applies
        base = measure_sidelobe(window.base, floor_db)
        return SidelobeMeasurement(2 * base.max_sidelobe_db, 2 * base.decay_db_per_oct)
    if isinstance(window, CosineSeries):
        return SidelobeMeasurement(wd.max_sidelobe_db(window), wd.decay_db_per_oct(window, floor_db=floor_db))
    w = np.asarray(window, dtype=float)
    if w.size == 0:
        raise ValueError("empty window")
    u, g = _window_gain(w, 64)
    dips = np.nonzero((g[1:-1] <= g[:-2]) & (g[1:-1] < g[2:]))[0] + 1
    if dips.size == 0:
        raise ValueError("window spectrum has no null")
    i0 = dips[0]
    peaks = np.nonzero((g[1:-1] >= g[:-2]) & (g[1:-1] > g[2:]))[0] + 1
    peaks = peaks[peaks > i0]
    with np.errstate(divide="ignore"):
        gdb = 20 * np.log10(g)
    max_sl = float(gdb[i0:].max())
    peaks = peaks[u[peaks] <= w.size / 8]
    ok = gdb[peaks] > floor_db
    cut = np.argmin(ok) if not ok.all() else ok.size
    if cut < 2:
        return SidelobeMeasurement(max_sl, float("nan"))
    hi = u[peaks[cut - 1]]
    lo = max(hi / 4, 2 * u[i0])
    sel = peaks[:cut][u[peaks[:cut]] >= lo]
    if sel.size < 2:
        return SidelobeMeasurement(max_sl, float("nan"))
    slope = np.polyfit(np.log2(u[sel]), gdb[sel], 1)[0]
    return SidelobeMeasurement(max_sl, -float(slope))


def power_spectrum(signal, fs: float, window: str = "self-convolved-nuttall"):
    """One-sided power spectrum of the whole windowed signal.

    Returns ``(freqs_hz, power)`` with ``power = |rfft(x w)|**2``.  The
    two-sided sum ``power[0] + 2 power[1:-1] + power[-1]`` (last term only
    for even lengths) divided by the length equals the windowed energy.
    """
    x = np.asarray(signal, dtype=float)
    w = analysis_window(window, x.size)
    if w.size < x.size:
        w = np.append(w, 0.0)
    spec = np.fft.rfft(x * w)
    return np.fft.rfftfreq(x.size, 1 / fs), np.abs(spec) ** 2


def spectrogram(signal, fs: float, window_ms: float = 40.0, shift_ms: float = 2.0, analysis: str = "self-convolved-nuttall"):
    """Magnitude STFT in dB relative to the global maximum.

    Frames are centred on multiples of the shift; the signal is zero-padded
    at both ends.  Returns ``(times_s, freqs_hz, db)`` with ``db`` shaped
    ``(n_frames, n_freqs)``.
    """
    x = np.asarray(signal, dtype=float)
    length = int(round(window_ms * fs / 1000))
    if x.size < length:
        raise ValueError(f"signal has {x.size} samples, fewer than the {length}-sample window")
    w = analysis_window(analysis, length | 1)
    length = w.size
    half = length // 2
    shift = max(1, int(round(shift_ms * fs / 1000)))
    nfft = 1 << int(np.ceil(np.log2(length)))
    padded = np.concatenate([np.zeros(half), x, np.zeros(half)])
    centres = np.arange(0, x.size, shift)
    frames = np.lib.stride_tricks.sliding_window_view(padded, length)[centres]
    power = np.abs(np.fft.rfft(frames * w, nfft, axis=1)) ** 2
    with np.errstate(divide="ignore"):
        db = 10 * np.log10(power / power.max())
    return centres / fs, np.fft.rfftfreq(nfft, 1 / fs), db


class SpuriousMeasurement(NamedTuple):
    floor_db: float
    peak_harmonic_db: float
    f0_hz: float
    band_hz: tuple[float, float]


def measure_spurious_floor(
    signal,
    fs: float,
    f0_nominal: float,
    band_hz: tuple[float, float] | None = None,
    statistic: str = "top-decile-median",
    guard_bins: int | None = None,
) -> SpuriousMeasurement:
    """Inter-harmonic spurious level relative to the strongest harmonic, in dB.

    One power spectrum of the whole (periodic) signal is taken with the
    self-convolved Nuttall window.  Bins within ``guard_bins`` of a
    multiple of f0 (DC included) are harmonic; the rest are
    inter-harmonic.  The spurious level is the ``statistic`` of the
    inter-harmonic power inside ``band_hz`` (default 1 Hz to 0.9 fs/2):

    - ``"top-decile-median"``: median of the largest 10 % of bins
    - ``"max"``: the single largest bin

    The default guard is the analysis window's main-lobe half-width plus
    four bins.  f0 is refined to the strongest bin within 5 % of
    ``f0_nominal``.
    """
    x = np.asarray(signal, dtype=float)
    if not 0 < f0_nominal < fs / 2:
        raise ValueError(f"f0 {f0_nominal} Hz is outside (0, fs/2)")
    freqs, power = power_spectrum(x, fs)
    df = freqs[1] - freqs[0]
    if guard_bins is None:
        guard_bins = _SELF_CONV_MAINLOBE_BINS + 4
    if f0_nominal < 4 * guard_bins * df:
        raise ValueError(f"f0 {f0_nominal} Hz is too low for a {x.size}-sample spectrum")

    near = (freqs > 0.95 * f0_nominal) & (freqs < 1.05 * f0_nominal)
    f0 = float(freqs[near][np.argmax(power[near])])
    harm = np.round(freqs / f0)
    dist = np.abs(freqs - harm * f0) / df
    harmonic = (harm >= 1) & (dist <= guard_bins)
    inter = dist > guard_bins
    peak = float(power[harmonic].max())

    if band_hz is None:
        band_hz = (1.0, 0.9 * fs / 2)
    sel = inter & (freqs >= band_hz[0]) & (freqs <= band_hz[1])
    if not sel.any():
        raise ValueError(f"no inter-harmonic bins in band {band_hz}")
    vals = power[sel]
    if statistic == "max":
        level = vals.max()
    elif statistic == "top-decile-median":
        level = np.median(np.sort(vals)[-max(1, vals.size // 10) :])
    else:
        raise ValueError(f"unknown statistic {statistic!r}")
    with np.errstate(divide="ignore"):
        return SpuriousMeasurement(
            float(10 * np.log10(level / peak)), float(10 * np.log10(peak)), f0, tuple(band_hz)
        )
