"""Excitation synthesis from an f0 trajectory.

Cycles are placed by accumulating the phase of the f0 trajectory.  Each
cycle is evaluated in closed form (antialiased) at every sample instant
it reaches, the cycles are overlap-added, and the result is optionally
passed through the droop equalizer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import fl_model, lf_model
from .equalizer import EqualizerDesign, apply_iir, design_equalizer
from .window_design import SIX_TERM, CosineSeries, half_width_for_fs

__all__ = [
    "F0Trajectory",
    "ParamTrajectory",
    "SignalBuffer",
    "SynthesisError",
    "vibrato_f0",
    "cycle_times",
    "synthesize",
]

MODELS = ("fl", "lf")
FLOW_POINTS = 64


class SynthesisError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class F0Trajectory:
    """Per-sample instantaneous f0 in Hz at sampling rate ``fs``."""

    fs: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.size and not (np.all(values > 0) and np.all(values < self.fs / 2)):
            raise ValueError("f0 values must lie in (0, fs/2)")

    @classmethod
    def constant(cls, f0: float, duration_s: float, fs: float) -> "F0Trajectory":
        return cls(fs, np.full(int(round(duration_s * fs)), float(f0)))

    @property
    def duration_s(self) -> float:
        return self.values.size / self.fs


@dataclass(frozen=True, eq=False)
class ParamTrajectory:
    """Piecewise-linear model parameters: ``{"times": [...], name: [...]}``.

    Scalars are held constant.  Times are in seconds.
    """

    times: np.ndarray
    values: Mapping[str, np.ndarray]

    @classmethod
    def from_dict(cls, d: Mapping) -> "ParamTrajectory":
        times = np.asarray(d.get("times", [0.0]), dtype=float)
        vals = {}
        for k, v in d.items():
            if k == "times":
                continue
            arr = np.atleast_1d(np.asarray(v, dtype=float))
            if arr.size == 1:
                arr = np.full(times.size, arr[0])
            if arr.size != times.size:
                raise ValueError(f"parameter {k!r} has {arr.size} breakpoints, expected {times.size}")
            vals[k] = arr
        return cls(times, vals)

    def at(self, t: float) -> dict:
        return {k: float(np.interp(t, self.times, v)) for k, v in self.values.items()}


@dataclass(eq=False)
class SignalBuffer:
    fs: float
    samples: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return self.samples.size


def vibrato_f0(f_base: float, f_d: float, f_m: float, duration_s: float, fs: float) -> F0Trajectory:
    """``f_base * 2 ** (f_d / 1200 * sin(2 pi f_m t))`` sampled at ``fs``."""
    if not f_base > 0:
        raise ValueError(f"f_base must be positive, got {f_base}")
    t = np.arange(int(round(duration_s * fs))) / fs
    return F0Trajectory(fs, f_base * 2.0 ** (f_d / 1200.0 * np.sin(2 * np.pi * f_m * t)))


def cycle_times(traj: F0Trajectory) -> np.ndarray:
    """Cycle onsets in seconds, one per whole turn of the accumulated phase.

    The phase is the trapezoid-rule integral of f0 starting at zero; onsets
    are linearly interpolated between samples.  The first onset is 0.
    """
    f = traj.values
    if f.size == 0:
        return np.zeros(0)
    phase = np.concatenate([[0.0], np.cumsum((f[1:] + f[:-1]) / (2 * traj.fs))])
    turns = np.arange(0, int(np.floor(phase[-1])) + 1, dtype=float)
    idx = np.searchsorted(phase, turns, side="left")
    idx = np.clip(idx, 1, phase.size - 1)
    lo, hi = phase[idx - 1], phase[idx]
    frac = np.where(hi > lo, (turns - lo) / np.where(hi > lo, hi - lo, 1.0), 0.0)
    onsets = (idx - 1 + frac) / traj.fs
    onsets[0] = 0.0
    return onsets


def _cycle_periods(traj: F0Trajectory, onsets: np.ndarray) -> np.ndarray:
    if onsets.size == 0:
        return onsets
    last_f0 = np.interp(onsets[-1] * traj.fs, np.arange(traj.values.size), traj.values)
    return np.diff(np.append(onsets, onsets[-1] + 1.0 / last_f0))


def _resolve_params(model: str, params, t: float, cycle: int):
    if isinstance(params, ParamTrajectory):
        values = params.at(t)
    elif isinstance(params, (fl_model.FLParams, lf_model.LFParams)):
        return params
    else:
        values = dict(params)
    try:
        if model == "fl":
            return fl_model.FLParams.from_dict(values)
        return lf_model.LFParams.from_dict(values)
    except (KeyError, ValueError) as exc:
        raise SynthesisError(f"cycle {cycle}: invalid {model} parameters {values}: {exc}") from exc


def _derive(model: str, p, cycle: int):
    try:
        return fl_model.fl_derived(p) if model == "fl" else lf_model.solve_lf_coefficients(p)
    except ValueError as exc:
        raise SynthesisError(f"cycle {cycle}: {exc}") from exc


def _continuous(model: str, p, d, tau):
    if model == "fl":
        return fl_model.fl_waveform_continuous(p, d, tau)
    return lf_model.lf_waveform_continuous(p, d, tau)


def _antialiased(model: str, p, d, series, tw, period, rel):
    if model == "fl":
        return fl_model.fl_antialiased_cycle(p, d, series, tw, period, rel)
    return lf_model.lf_antialiased_cycle(p, d, series, tw, period, rel)


def _flow_volume(model: str, p, d, period: float) -> float:
    tau = np.linspace(0.0, 1.0, FLOW_POINTS)
    e = _continuous(model, p, d, tau)
    flow = np.concatenate([[0.0], np.cumsum((e[1:] + e[:-1]) / 2 * np.diff(tau))])
    # flow and time both scale with the period
    return period * period * np.trapezoid(np.maximum(flow, 0.0), tau)


def synthesize(
    model: str,
    params,
    traj: F0Trajectory,
    series: CosineSeries = SIX_TERM,
    *,
    equalize: bool = True,
    direct: bool = False,
    constant_flow: bool = False,
    equalizer: EqualizerDesign | None = None,
) -> SignalBuffer:
    """Render an excitation signal for ``traj``.

    ``params`` is a parameter object, a mapping, or a
    :class:`ParamTrajectory` sampled at each cycle onset.  ``direct``
    samples the continuous model without antialiasing or equalization.
    """
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    fs = traj.fs
    n = traj.values.size
    out = np.zeros(n)
    tw = half_width_for_fs(series, fs)
    onsets = cycle_times(traj)
    periods = _cycle_periods(traj, onsets)
    meta = {
        "model": model,
        "fs": fs,
        "t_w_s": tw,
        "cycles": int(onsets.size),
        "window": list(series.coefficients),
        "direct": direct,
        "equalize": equalize and not direct,
        "constant_flow": constant_flow,
    }
    ref_flow = None
    for i, (t0, period) in enumerate(zip(onsets, periods)):
        p = _resolve_params(model, params, t0, i)
        d = _derive(model, p, i)
        gain = 1.0
        if constant_flow:
            vol = _flow_volume(model, p, d, period)
            if ref_flow is None:
                ref_flow = vol
            gain = ref_flow / vol if vol > 0 else 1.0
        if direct:
            first = int(np.ceil(t0 * fs))
            last = min(int(np.ceil((t0 + period) * fs)), n)
            if last <= first:
                continue
            idx = np.arange(first, last)
            tau = (idx / fs - t0) / period
            out[idx] += gain * _continuous(model, p, d, tau)
        else:
            first = max(int(np.floor((t0 - tw) * fs)) + 1, 0)
            last = min(int(np.ceil((t0 + period + tw) * fs)), n)
            if last <= first:
                continue
            idx = np.arange(first, last)
            out[idx] += gain * _antialiased(model, p, d, series, tw, period, idx / fs - t0)
    if equalize and not direct and n:
        if equalizer is None:
            equalizer = design_equalizer(series, fs)
        out = apply_iir(equalizer, out)
        meta["equalizer"] = {
            "gain": equalizer.iir_gain,
            "a": equalizer.iir_denominator.tolist(),
            "pole_moduli": np.abs(equalizer.poles).tolist(),
        }
    return SignalBuffer(fs, out, meta)


def series_for(window) -> CosineSeries:
    """Antialiasing kernel by name: 5, 6 (terms) or ``"nuttall-11"``."""
    from .spectral import NUTTALL_11_SERIES
    from .window_design import PUBLISHED

    key = str(window).lower()
    if key in ("nuttall-11", "nuttall11"):
        return NUTTALL_11_SERIES
    try:
        return PUBLISHED[int(key)]
    except (ValueError, KeyError):
        raise ValueError(f"unknown window {window!r}; use 5, 6 or nuttall-11") from None


def trajectory_from_config(f0, duration_s: float, fs: float) -> F0Trajectory:
    if isinstance(f0, Mapping):
        return vibrato_f0(
            float(f0["base"]), float(f0.get("depth_cents", 0.0)), float(f0.get("rate_hz", 0.0)), duration_s, fs
        )
    return F0Trajectory.constant(float(f0), duration_s, fs)


def synthesize_from_config(cfg: Mapping) -> SignalBuffer:
    """Run a synthesis described by a config mapping.

    Keys: ``model`` ("fl"/"lf"), ``fs``, ``duration_s``, ``f0`` (number or
    ``{"base", "depth_cents", "rate_hz"}``), ``params`` (constants, or
    breakpoint lists with a ``"times"`` key), ``window_terms`` (5/6) or
    ``window`` ("nuttall-11"), ``equalize``, ``direct``, ``constant_flow``.
    """
    model = cfg.get("model", "fl")
    fs = float(cfg.get("fs", 44100))
    traj = trajectory_from_config(cfg.get("f0", 100.0), float(cfg.get("duration_s", 1.0)), fs)
    params = cfg["params"]
    if "times" in params:
        params = ParamTrajectory.from_dict(params)
    series = series_for(cfg.get("window", cfg.get("window_terms", 6)))
    buf = synthesize(
        model,
        params,
        traj,
        series,
        equalize=bool(cfg.get("equalize", True)),
        direct=bool(cfg.get("direct", False)),
        constant_flow=bool(cfg.get("constant_flow", False)),
    )
    buf.metadata["config"] = dict(cfg)
    return buf
