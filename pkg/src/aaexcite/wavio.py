"""RIFF/WAVE (IEEE float32, mono) and CSV output for signal buffers."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .synth import SignalBuffer

__all__ = ["write_wav", "read_wav", "write_csv"]


def write_wav(buffer: SignalBuffer, path, normalize_db: float | None = None) -> Path:
    """Write ``buffer`` as 32-bit float mono WAV.

    With ``normalize_db`` the peak is scaled to ``10 ** (normalize_db / 20)``.
    """
    path = Path(path)
    x = np.asarray(buffer.samples, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot write non-finite samples")
    if normalize_db is not None and x.size:
        peak = np.abs(x).max()
        if peak > 0:
            x = x * (10 ** (normalize_db / 20) / peak)
    fs = int(round(buffer.fs))
    try:
        wavfile.write(path, fs, x.astype(np.float32))
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
    return path


def read_wav(path) -> SignalBuffer:
    path = Path(path)
    try:
        fs, data = wavfile.read(path)
    except (OSError, ValueError) as exc:
        raise OSError(f"could not read {path}: {exc}") from exc
    if data.ndim > 1:
        data = data[:, 0]
    if np.issubdtype(data.dtype, np.integer):
        data = data / float(np.iinfo(data.dtype).max)
    return SignalBuffer(float(fs), np.asarray(data), {"source": str(path)})


def write_csv(buffer: SignalBuffer, path) -> Path:
    """``index,sample`` rows with full double precision."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "sample"])
            for i, v in enumerate(buffer.samples):
                w.writerow([i, repr(float(v))])
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
    return path
