"""Droop equalizer for the antialiasing kernel.

The kernel's gain falls toward ``fs / 2``.  The equalizer target is its
inverse magnitude (clipped), turned into a zero-phase FIR, truncated to
161 taps under a 4-term Nuttall window, and then approximated by a
low-order all-pole IIR filter fitted with LPC on the FIR taps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .window_design import FIVE_TERM, SIX_TERM, CosineSeries, half_width_for_fs, normalized_gain

__all__ = [
    "EqualizerDesign",
    "FitError",
    "NUTTALL_TRUNCATION",
    "cosine_window",
    "default_max_attenuation_db",
    "levinson_durbin",
    "design_fir_target",
    "fit_iir_from_fir",
    "design_equalizer",
    "apply_iir",
]

FFT_LENGTH = 32768
FIR_TAPS = 161
#: 4-term cosine window, -93.32 dB highest sidelobe, 18 dB/oct.
NUTTALL_TRUNCATION = (0.355768, 0.487396, 0.144232, 0.012604)


class FitError(ValueError):
    pass


def cosine_window(coefficients, length: int) -> np.ndarray:
    """Symmetric cosine-sum window ``sum_k (-1)^k a_k cos(2 pi k n / (L - 1))``."""
    if length == 1:
        return np.ones(1)
    n = np.arange(length)
    w = np.zeros(length)
    for k, a in enumerate(coefficients):
        w += (-1) ** k * a * np.cos(2 * np.pi * k * n / (length - 1))
    return w


def default_max_attenuation_db(series: CosineSeries) -> float:
    if series.coefficients == FIVE_TERM.coefficients or len(series.coefficients) == 5:
        return 58.0
    return 68.0


@dataclass(frozen=True, eq=False)
class EqualizerDesign:
    fs: float
    fir_taps: np.ndarray
    iir_gain: float
    iir_denominator: np.ndarray
    max_attenuation_db: float

    @property
    def poles(self) -> np.ndarray:
        return np.roots(self.iir_denominator)

    def fir_response(self, freqs_hz) -> np.ndarray:
        # zero-phase: remove the linear phase of the centred taps
        _, resp = signal.freqz(self.fir_taps, worN=np.asarray(freqs_hz, dtype=float), fs=self.fs)
        return np.abs(resp)

    def iir_response(self, freqs_hz) -> np.ndarray:
        _, resp = signal.freqz([self.iir_gain], self.iir_denominator, worN=np.asarray(freqs_hz, dtype=float), fs=self.fs)
        return np.abs(resp)

    def to_dict(self) -> dict:
        return {
            "fs": self.fs,
            "gain": self.iir_gain,
            "a": self.iir_denominator.tolist(),
            "fir": self.fir_taps.tolist(),
            "max_attenuation_db": self.max_attenuation_db,
        }


def design_fir_target(series: CosineSeries, fs: float, max_attenuation_db: float | None = None) -> np.ndarray:
    """Zero-phase FIR approximating the clipped inverse kernel gain.

    Returns 161 taps centred on index 80.
    """
    if max_attenuation_db is None:
        max_attenuation_db = default_max_attenuation_db(series)
    tw = half_width_for_fs(series, fs)
    freqs = np.arange(FFT_LENGTH // 2 + 1) * fs / FFT_LENGTH
    gain = np.abs(normalized_gain(series, 2 * freqs * tw))
    ceiling = 10 ** (max_attenuation_db / 20)
    with np.errstate(divide="ignore"):
        target = np.minimum(1.0 / gain, ceiling)
    impulse = np.fft.irfft(target, n=FFT_LENGTH)
    half = FIR_TAPS // 2
    taps = np.concatenate([impulse[-half:], impulse[: half + 1]])
    return taps * cosine_window(NUTTALL_TRUNCATION, FIR_TAPS)


def levinson_durbin(r, order: int):
    """Levinson-Durbin recursion on autocorrelation ``r[0..order]``.

    Returns ``(a, err, k)``: predictor polynomial with ``a[0] = 1``,
    final prediction-error power, and reflection coefficients.
    """
    r = np.asarray(r, dtype=float)
    if r.size < order + 1:
        raise ValueError(f"need {order + 1} autocorrelation lags, got {r.size}")
    a = np.zeros(order + 1)
    a[0] = 1.0
    k = np.zeros(order)
    err = r[0]
    if err <= 0:
        raise FitError("zero-lag autocorrelation must be positive")
    for i in range(1, order + 1):
        acc = r[i] + a[1:i] @ r[i - 1 : 0 : -1]
        ki = -acc / err
        if abs(ki) >= 1:
            raise FitError(f"autocorrelation is not positive definite at order {i}")
        k[i - 1] = ki
        a[1 : i + 1] = a[1 : i + 1] + ki * a[i - 1 :: -1][:i]
        err *= 1.0 - ki * ki
    return a, err, k


def fit_iir_from_fir(fir_taps, order: int = 6) -> tuple[float, np.ndarray]:
    """All-pole fit ``gain / A(z)`` to the FIR magnitude; gain matched at DC."""
    if not 1 <= order <= 12:
        raise ValueError(f"order must be in 1..12, got {order}")
    x = np.asarray(fir_taps, dtype=float)
    full = np.correlate(x, x, mode="full")[x.size - 1 :]
    r = np.zeros(order + 1)
    r[: min(order + 1, full.size)] = full[: order + 1]
    a, _, _ = levinson_durbin(r, order)
    gain = abs(x.sum()) * a.sum()
    return float(gain), a


def design_equalizer(
    series: CosineSeries = SIX_TERM, fs: float = 44100.0, max_attenuation_db: float | None = None, order: int = 6
) -> EqualizerDesign:
    if max_attenuation_db is None:
        max_attenuation_db = default_max_attenuation_db(series)
    taps = design_fir_target(series, fs, max_attenuation_db)
    gain, a = fit_iir_from_fir(taps, order)
    return EqualizerDesign(float(fs), taps, gain, a, float(max_attenuation_db))


def apply_iir(design: EqualizerDesign, samples) -> np.ndarray:
    """Run the all-pole filter over ``samples`` from zero state."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        return x.copy()
    return signal.lfilter([design.iir_gain], design.iir_denominator, x)
