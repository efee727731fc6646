"""Command-line interface.

Subcommands::

    design-window     design or reproduce a cosine-series kernel
    design-equalizer  design the droop equalizer for a kernel
    eval-poly         evaluate an antialiased polynomial pulse at given times
    eval-pulse        tabulate a normalized antialiased polynomial pulse
    gen-fl            Fujisaki-Ljungqvist excitation from an f0 trajectory
    gen-lf            Liljencrants-Fant excitation from an f0 trajectory
    synth             run a JSON synthesis config
    analyze           spectrum, spectrogram or spurious floor of a WAV file
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import equalizer as eq
from . import spectral
from . import synth
from . import window_design as wd
from .fl_model import FLParams, fl_antialiased_cycle, fl_derived
from .lf_model import LFParams, lf_antialiased_cycle, solve_lf_coefficients
from .poly_antialias import PolynomialPulse, build_tables, eval_antialiased_poly
from .wavio import read_wav, write_csv, write_wav

log = logging.getLogger("aaexcite")

DEFAULT_FL = {"A": 0.2, "B": -1.0, "C": -0.6, "R": 0.48, "F": 0.15, "D": 0.12}
DEFAULT_LF = {"tp": 0.4134, "te": 0.5530, "ta": 0.0041, "tc": 0.5817, "Ee": 1.0}


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def _write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, default=_jsonable) + "\n")


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def cmd_design_window(args) -> int:
    P = args.terms - 3
    series = wd.design(args.terms, optimize_coefficients=args.optimize)
    meas = spectral.measure_sidelobe(series)
    out = {
        "h": list(series.coefficients),
        "P": P,
        "max_sidelobe_db": meas.max_sidelobe_db,
        "decay_db_per_oct": meas.decay_db_per_oct,
        "first_zero_normalized": wd.first_zero(series),
    }
    if args.out:
        _write_json(out, args.out)
    else:
        print(json.dumps(out, indent=2, default=_jsonable))
    if args.spectrum:
        u0 = wd.first_zero(series)
        u = np.linspace(0, 10 * u0, 4001)
        with np.errstate(divide="ignore"):
            g = 20 * np.log10(np.abs(wd.normalized_gain(series, u)))
        # frequency normalized so the first zero sits at 1
        _write_rows(args.spectrum, ["freq_normalized", "gain_db"], zip(u / u0, g))
    return 0


def cmd_design_equalizer(args) -> int:
    series = synth.series_for(args.terms)
    design = eq.design_equalizer(series, args.fs, args.max_attenuation_db, args.order)
    out = design.to_dict()
    out["pole_moduli"] = np.abs(design.poles).tolist()
    if args.out:
        _write_json(out, args.out)
    else:
        print(json.dumps(out, indent=2, default=_jsonable))
    if args.response:
        f = np.linspace(0, args.fs / 2, 1025)
        with np.errstate(divide="ignore"):
            fir = 20 * np.log10(design.fir_response(f))
            iir = 20 * np.log10(design.iir_response(f))
        _write_rows(args.response, ["freq_hz", "fir_db", "iir_db"], zip(f, fir, iir))
    return 0


def cmd_eval_poly(args) -> int:
    series = synth.series_for(args.terms)
    pulse = PolynomialPulse(_floats(args.coeffs))
    tables = build_tables(series, pulse.degree, args.tw)
    for t in _floats(args.t):
        print(f"{t!r},{float(eval_antialiased_poly(tables, pulse, t))!r}")
    return 0


def cmd_eval_pulse(args) -> int:
    series = synth.series_for(args.terms)
    pulse = PolynomialPulse(_floats(args.coeffs))
    tables = build_tables(series, pulse.degree, args.tw)
    t = np.linspace(-args.tw, 1 + args.tw, args.points)
    rows = zip(t, eval_antialiased_poly(tables, pulse, t))
    if args.out:
        _write_rows(args.out, ["t", "value"], rows)
    else:
        for a, b in rows:
            print(f"{a!r},{b!r}")
    return 0


def _load_params(args, defaults):
    params = dict(defaults)
    if args.params:
        params.update(json.loads(Path(args.params).read_text()))
    for key in defaults:
        value = getattr(args, f"p_{key}", None)
        if value is not None:
            params[key] = value
    return params


def _config_from_args(args, model) -> dict:
    defaults = DEFAULT_FL if model == "fl" else DEFAULT_LF
    if getattr(args, "tv", None):
        params = json.loads(Path(args.tv).read_text())
    else:
        params = _load_params(args, defaults)
    f0 = {"base": args.f0, "depth_cents": args.depth_cents, "rate_hz": args.rate_hz}
    return {
        "model": model,
        "fs": args.fs,
        "duration_s": args.duration,
        "f0": f0,
        "params": params,
        "window": args.terms,
        "equalize": not args.no_equalize,
        "direct": args.direct,
        "constant_flow": args.constant_flow,
    }


def _emit(buf: synth.SignalBuffer, args) -> None:
    if args.out:
        write_wav(buf, args.out, args.normalize_db)
        log.info("wrote %s (%d samples)", args.out, len(buf))
    if args.csv:
        write_csv(buf, args.csv)
    if args.manifest:
        _write_json(buf.metadata, args.manifest)


def _single_cycle(model, cfg) -> synth.SignalBuffer:
    fs = float(cfg["fs"])
    series = synth.series_for(cfg["window"])
    tw = wd.half_width_for_fs(series, fs)
    period = 1.0 / float(cfg["f0"]["base"])
    n = np.arange(int(np.floor(-tw * fs)) + 1, int(np.ceil((period + tw) * fs)))
    if model == "fl":
        p = FLParams.from_dict(cfg["params"])
        x = fl_antialiased_cycle(p, fl_derived(p), series, tw, period, n / fs)
    else:
        p = LFParams.from_dict(cfg["params"])
        x = lf_antialiased_cycle(p, solve_lf_coefficients(p), series, tw, period, n / fs)
    if cfg["equalize"]:
        x = eq.apply_iir(eq.design_equalizer(series, fs), x)
    return synth.SignalBuffer(fs, x, {"model": model, "first_sample_index": int(n[0]) if n.size else 0, "t_w_s": tw})


def _generate(args, model) -> int:
    cfg = _config_from_args(args, model)
    if getattr(args, "single_cycle", False):
        buf = _single_cycle(model, cfg)
    else:
        buf = synth.synthesize_from_config(cfg)
    _emit(buf, args)
    return 0


def cmd_gen_fl(args) -> int:
    return _generate(args, "fl")


def cmd_gen_lf(args) -> int:
    return _generate(args, "lf")


def cmd_synth(args) -> int:
    cfg = json.loads(Path(args.config).read_text())
    buf = synth.synthesize_from_config(cfg)
    _emit(buf, args)
    return 0


def cmd_analyze(args) -> int:
    buf = read_wav(args.infile)
    x = np.asarray(buf.samples, dtype=float)
    if args.mode == "spectrum":
        f, p = spectral.power_spectrum(x, buf.fs)
        with np.errstate(divide="ignore"):
            db = 10 * np.log10(p / p.max())
        _write_rows(args.out, ["freq_hz", "power_db"], zip(f, db))
    elif args.mode == "spectrogram":
        t, f, db = spectral.spectrogram(x, buf.fs, args.window_ms, args.shift_ms)
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time_s", "freq_hz", "power_db"])
            for ti, row in zip(t, db):
                w.writerows(zip(np.full(f.size, ti), f, row))
    else:
        if args.f0 is None:
            raise SystemExit("analyze --mode spurious needs --f0")
        m = spectral.measure_spurious_floor(x, buf.fs, args.f0)
        out = m._asdict()
        if args.out:
            _write_json(out, args.out)
        print(json.dumps(out, default=_jsonable))
    return 0


def _add_gen_options(p: argparse.ArgumentParser, model: str) -> None:
    p.add_argument("--fs", type=float, default=44100.0)
    p.add_argument("--duration", type=float, default=1.0, help="seconds")
    p.add_argument("--f0", type=float, default=887.0, help="base f0 in Hz")
    p.add_argument("--depth-cents", type=float, default=0.0)
    p.add_argument("--rate-hz", type=float, default=0.0)
    p.add_argument("--terms", default="6", choices=["5", "6", "nuttall-11"])
    p.add_argument("--params", help="JSON file with constant model parameters")
    names = DEFAULT_FL if model == "fl" else DEFAULT_LF
    for key in names:
        p.add_argument(f"--{key}", dest=f"p_{key}", type=float, default=None)
    p.add_argument("--no-equalize", action="store_true")
    p.add_argument("--direct", action="store_true", help="sample the model without antialiasing")
    p.add_argument("--constant-flow", action="store_true")
    _add_output_options(p)


def _add_output_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="WAV output (float32 mono)")
    p.add_argument("--csv", help="CSV output (index,sample)")
    p.add_argument("--manifest", help="JSON run manifest")
    p.add_argument("--normalize-db", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aaexcite", description="Aliasing-free glottal excitation synthesis.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design-window", help="cosine-series kernel coefficients")
    p.add_argument("--terms", type=int, choices=[5, 6], default=6)
    p.add_argument("--optimize", action="store_true", help="re-run the q0 search instead of the published set")
    p.add_argument("--out")
    p.add_argument("--spectrum")
    p.set_defaults(func=cmd_design_window)

    p = sub.add_parser("design-equalizer", help="IIR droop equalizer")
    p.add_argument("--terms", default="6", choices=["5", "6", "nuttall-11"])
    p.add_argument("--fs", type=float, default=44100.0)
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--max-attenuation-db", type=float, default=None)
    p.add_argument("--out")
    p.add_argument("--response")
    p.set_defaults(func=cmd_design_equalizer)

    p = sub.add_parser("eval-poly", help="antialiased polynomial pulse at given times")
    p.add_argument("--coeffs", required=True, help="p0,p1,...")
    p.add_argument("--tw", type=float, required=True, help="normalized half-width")
    p.add_argument("--t", required=True, help="normalized times, comma separated")
    p.add_argument("--terms", default="6", choices=["5", "6", "nuttall-11"])
    p.set_defaults(func=cmd_eval_poly)

    p = sub.add_parser("eval-pulse", help="tabulate an antialiased polynomial pulse")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--tw", type=float, required=True)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--terms", default="6", choices=["5", "6", "nuttall-11"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval_pulse)

    p = sub.add_parser("gen-fl", help="Fujisaki-Ljungqvist excitation")
    _add_gen_options(p, "fl")
    p.add_argument("--tv", help="JSON with time-varying parameter breakpoints")
    p.add_argument("--single-cycle", action="store_true")
    p.set_defaults(func=cmd_gen_fl)

    p = sub.add_parser("gen-lf", help="Liljencrants-Fant excitation")
    _add_gen_options(p, "lf")
    p.add_argument("--tv", help="JSON with time-varying parameter breakpoints")
    p.add_argument("--single-cycle", action="store_true")
    p.set_defaults(func=cmd_gen_lf)

    p = sub.add_parser("synth", help="run a JSON synthesis config")
    p.add_argument("--config", required=True)
    _add_output_options(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("analyze", help="spectral analysis of a WAV file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mode", choices=["spectrum", "spectrogram", "spurious"], default="spectrum")
    p.add_argument("--f0", type=float)
    p.add_argument("--window-ms", type=float, default=40.0)
    p.add_argument("--shift-ms", type=float, default=2.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "analyze" and args.mode != "spurious" and not args.out:
        raise SystemExit("analyze --mode spectrum/spectrogram needs --out")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"aaexcite: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
