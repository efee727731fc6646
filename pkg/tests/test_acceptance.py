"""Acceptance criteria, one test per criterion.

Each test prints a ``[ACCEPT n] PASS|FAIL ...`` line; the lines are also
collected and repeated in the pytest terminal summary.  Run just this
module with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.
"""

import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from aaexcite import spectral, synth  # noqa: E402
from aaexcite import window_design as wd  # noqa: E402
from aaexcite.equalizer import design_equalizer  # noqa: E402
from aaexcite.exp_antialias import eval_antialiased_exp  # noqa: E402
from aaexcite.fl_model import FLParams, fl_derived, fl_segments, fl_waveform_continuous  # noqa: E402
from aaexcite.lf_model import LFParams, lf_flow_integral, lf_waveform_continuous, solve_lf_coefficients  # noqa: E402
from aaexcite.poly_antialias import PolynomialPulse, build_tables, eval_antialiased_poly, steady_state_difference  # noqa: E402
from aaexcite.wavio import write_wav  # noqa: E402

RESULTS: list[str] = []

FL_TEST = {"A": 0.2, "B": -1.0, "C": -0.6, "R": 0.48, "F": 0.15, "D": 0.12}
LF_MODAL = {"tp": 0.4134, "te": 0.5530, "ta": 0.0041, "tc": 0.5817}


def report(n: int, title: str, ok: bool, detail: str, t0: float) -> None:
    line = f"[ACCEPT {n:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail} ({time.perf_counter() - t0:.1f} s)"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_window_reproduction():
    t0 = time.perf_counter()
    ok, parts = True, []
    for terms, level, decay in ((5, -99.23, 42.0), (6, -114.24, 54.0)):
        spec = wd.optimize_q0(terms - 3)
        s = wd.solve_coefficients(spec)
        coef_err = float(np.max(np.abs(s.h - wd.PUBLISHED[terms].h)))
        lv = wd.max_sidelobe_db(s)
        dc = wd.decay_db_per_oct(s)
        ok &= coef_err < 1e-4 and abs(lv - level) <= 0.3 and abs(dc - decay) <= 3.0
        parts.append(f"{terms}-term coef err {coef_err:.1e}, sidelobe {lv:.3f} dB, decay {dc:.2f} dB/oct")
    report(1, "window reproduction", ok, "; ".join(parts), t0)


def test_criterion_02_constraint_residuals():
    t0 = time.perf_counter()
    worst = 0.0
    designed = [wd.solve_coefficients(wd.optimize_q0(P)) for P in (2, 3)]
    designed += [wd.solve_coefficients(wd.WindowDesignSpec(P, q0)) for P in (1, 2, 3, 4) for q0 in (0.2, 0.3, 0.4)]
    for s in designed:
        worst = max(worst, float(np.max(np.abs(wd.constraint_residuals(s)))))
    report(2, "constraint residuals", worst < 1e-10, f"max |residual| {worst:.1e} over {len(designed)} designs", t0)


def test_criterion_03_polynomial_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240603)
    worst = 0.0
    for tw in (0.02, 0.1, 0.45, 0.6):
        for deg in range(4):
            p = PolynomialPulse(tuple(rng.normal(size=deg + 1)))
            tb = build_tables(wd.SIX_TERM, deg, tw)
            t = rng.uniform(-tw, 1 + tw, 1000)
            got = eval_antialiased_poly(tb, p, t)
            ref = np.array([oracles.convolve(wd.SIX_TERM, tw, p, x) for x in t])
            # error relative to the pulse's peak magnitude on its support
            scale = np.max(np.abs(p(np.linspace(0, 1, 1001))))
            worst = max(worst, float(np.max(np.abs(got - ref)) / scale))
    report(3, "polynomial closed form vs quadrature", worst < 1e-8, f"max relative error {worst:.1e}", t0)


def test_criterion_04_exponential_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    lf = solve_lf_coefficients(LFParams(**LF_MODAL))
    betas = [-0.5, -5.0, -243.679 * 0.0287, 2.0, complex(lf.alpha, lf.omega_g) * 0.553, -3 + 4j, 1 - 30j]
    worst = 0.0
    for tw in (0.02, 0.1, 0.45, 0.6):
        for beta in betas:
            t = rng.uniform(-tw, 1 + tw, 150)
            got = eval_antialiased_exp(wd.SIX_TERM, beta, t, tw)
            ref = np.array([oracles.convolve_exp(wd.SIX_TERM, tw, beta, x) for x in t])
            scale = max(1.0, math.exp(np.real(beta)))
            worst = max(worst, float(np.max(np.abs(got - ref)) / scale))
    report(4, "exponential closed form vs quadrature", worst < 1e-8, f"max relative error {worst:.1e} ({len(betas)} betas x 4 widths)", t0)


def test_criterion_05_out_of_support():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst_eval = worst_cancel = 0.0
    for tw in (0.02, 0.1, 0.45, 0.6):
        p = PolynomialPulse(tuple(rng.normal(size=4)))
        tb = build_tables(wd.SIX_TERM, 3, tw)
        t = 1 + tw + rng.uniform(1e-9, 3.0, 200)
        worst_eval = max(worst_eval, float(np.max(np.abs(eval_antialiased_poly(tb, p, t)))))
        worst_cancel = max(worst_cancel, float(np.max(np.abs(steady_state_difference(tb, p, t)))))
    ok = worst_eval < 1e-10 and worst_cancel < 1e-10
    report(5, "out-of-support identity", ok, f"evaluated {worst_eval:.1e}, V-matrix cancellation {worst_cancel:.1e}", t0)


def test_criterion_06_lf_invariants():
    t0 = time.perf_counter()
    p = LFParams(**LF_MODAL)
    d = solve_lf_coefficients(p)
    flow = abs(lf_flow_integral(p, d))
    left = d.E0_over_Ee * p.Ee * math.exp(d.alpha * p.te) * math.sin(d.omega_g * p.te)
    right = float(lf_waveform_continuous(p, d, p.te))
    # return branch evaluated just left of closure
    at_tc_eval = float(lf_waveform_continuous(p, d, np.nextafter(p.tc, 0)))
    ok = flow < 1e-8 * p.Ee and abs(left + p.Ee) < 1e-8 and abs(right + p.Ee) < 1e-8 and abs(at_tc_eval) < 1e-10
    detail = (
        f"flow {flow:.1e}, E(te-) {left + 1:+.1e}, E(te+) {right + 1:+.1e} (re -Ee), "
        f"E(tc) {at_tc_eval:.1e}"
    )
    report(6, "L-F solver invariants", ok, detail, t0)


def _floor(model, params, **kw):
    fs, f0 = 44100.0, 887.0
    traj = synth.F0Trajectory.constant(f0, 2.0, fs)
    buf = synth.synthesize(model, params, traj, **kw)
    return spectral.measure_spurious_floor(buf.samples, fs, f0).floor_db


def test_criterion_07_spurious_floor():
    t0 = time.perf_counter()
    n11 = synth.series_for("nuttall-11")
    fl_direct = _floor("fl", FL_TEST, direct=True)
    fl_six = _floor("fl", FL_TEST)
    fl_n11 = _floor("fl", FL_TEST, series=n11)
    lf_direct = _floor("lf", LF_MODAL, direct=True)
    lf_six = _floor("lf", LF_MODAL)
    lf_n11 = _floor("lf", LF_MODAL, series=n11)
    gap = fl_n11 - fl_six
    ok = abs(fl_direct + 60) <= 5 and fl_six <= -165 and abs(gap - 20) <= 6 and lf_direct > lf_n11 > lf_six
    detail = (
        f"F-L direct {fl_direct:.1f}, six-term {fl_six:.1f}, Nuttall-11 {fl_n11:.1f} (gap {gap:.1f}); "
        f"L-F direct {lf_direct:.1f}, six-term {lf_six:.1f}, Nuttall-11 {lf_n11:.1f} dB"
    )
    report(7, "spurious floor at 887 Hz", ok, detail, t0)


def test_criterion_08_equalizer():
    t0 = time.perf_counter()
    d = design_equalizer(wd.SIX_TERM, 44100.0)
    f = np.linspace(0, 16000, 4001)
    dev = float(np.max(np.abs(20 * np.log10(d.iir_response(f) / d.fir_response(f)))))
    radii = {fs: float(np.max(np.abs(design_equalizer(wd.SIX_TERM, fs).poles))) for fs in (16000.0, 22050.0, 44100.0, 48000.0)}
    ok = dev <= 0.2 and all(r < 1 for r in radii.values())
    detail = f"max IIR-FIR deviation {dev:.3f} dB; max pole modulus " + ", ".join(f"{fs / 1000:g}k {r:.3f}" for fs, r in radii.items())
    report(8, "equalizer", ok, detail, t0)


def test_criterion_09_fl_continuity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    worst, count = 0.0, 0
    while count < 100:
        R, F, D = rng.uniform(0.2, 0.6), rng.uniform(0.05, 0.2), rng.uniform(0.02, 0.15)
        if R + F + D >= 0.98:
            continue
        p = FLParams(A=rng.uniform(0, 1), B=rng.uniform(-2, 0), C=rng.uniform(-2, 0), R=R, F=F, D=D)
        d = fl_derived(p)
        segs = fl_segments(p, d)
        e_r = float(fl_waveform_continuous(p, d, p.R))
        e_r_right = float(segs[1].pulse(0.0))
        from_piece3 = float(segs[2].pulse(1.0))
        from_piece4 = float(segs[3].pulse(0.0))
        worst = max(worst, abs(e_r), abs(e_r_right), abs(from_piece3 - d.beta), abs(from_piece4 - d.beta))
        count += 1
    report(9, "F-L algebraic continuity", worst < 1e-12, f"max residual {worst:.1e} over {count} parameter sets", t0)


def test_criterion_10_determinism(tmp_path):
    t0 = time.perf_counter()
    cfg = {
        "model": "lf",
        "fs": 44100,
        "duration_s": 0.5,
        "f0": {"base": 220.0, "depth_cents": 6.0, "rate_hz": 5.2},
        "params": {"times": [0.0, 0.5], **LF_MODAL, "te": [0.553, 0.57]},
    }
    digests = []
    for i in range(2):
        path = tmp_path / f"run{i}.wav"
        write_wav(synth.synthesize_from_config(json.loads(json.dumps(cfg))), path)
        digests.append(path.read_bytes())
    ok = digests[0] == digests[1]
    report(10, "determinism", ok, f"{len(digests[0])}-byte WAV files {'identical' if ok else 'differ'}", t0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
