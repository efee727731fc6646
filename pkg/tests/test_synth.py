import numpy as np
import pytest
from scipy import integrate

from aaexcite import synth
from aaexcite.equalizer import apply_iir, design_equalizer
from aaexcite.fl_model import FLParams, fl_antialiased_cycle, fl_derived
from aaexcite.window_design import SIX_TERM, half_width_for_fs

FL = {"A": 0.2, "B": -1.0, "C": -0.6, "R": 0.48, "F": 0.15, "D": 0.12}
LF = {"tp": 0.4134, "te": 0.5530, "ta": 0.0041, "tc": 0.5817}


def test_vibrato_formula():
    assert np.all(synth.vibrato_f0(100, 0, 5, 0.1, 8000).values == 100)
    # quarter period of a 1 Hz modulator: sin = 1
    tr = synth.vibrato_f0(100, 1200, 1.0, 0.5, 1000)
    assert tr.values[250] == pytest.approx(200.0)


def test_onsets_constant():
    on = synth.cycle_times(synth.F0Trajectory.constant(100.0, 1.0, 8000))
    np.testing.assert_allclose(on, np.arange(on.size) * 0.01, atol=1e-12)
    on = synth.cycle_times(synth.F0Trajectory.constant(887.0, 1.0, 44100))
    assert np.max(np.abs(np.diff(on) - 1 / 887)) < 1e-7


def test_onsets_track_vibrato():
    fs, fb, fd, fm = 44100.0, 200.0, 50.0, 5.2
    tr = synth.vibrato_f0(fb, fd, fm, 1.0, fs)
    on = synth.cycle_times(tr)

    def phase(t):
        return integrate.quad(lambda s: fb * 2 ** (fd / 1200 * np.sin(2 * np.pi * fm * s)), 0, t)[0]

    # onsets sit on integer turns of the analytic phase
    for i in (5, 57, 150):
        assert phase(on[i]) == pytest.approx(i, abs=2e-3)
    inst = fb * 2 ** (fd / 1200 * np.sin(2 * np.pi * fm * (on[:-1] + on[1:]) / 2))
    assert np.max(np.abs(np.diff(on) * inst - 1)) < 2e-3


def test_empty_trajectory():
    buf = synth.synthesize("fl", FL, synth.F0Trajectory(44100.0, np.zeros(0)))
    assert len(buf) == 0


def test_bad_model():
    with pytest.raises(ValueError):
        synth.synthesize("xx", FL, synth.F0Trajectory.constant(100.0, 0.01, 8000))


def test_single_cycle_overlap_add_equivalence():
    fs, f0 = 16000.0, 100.0
    traj = synth.F0Trajectory.constant(f0, 0.05, fs)
    buf = synth.synthesize("fl", FL, traj, equalize=False)
    p = FLParams.from_dict(FL)
    d = fl_derived(p)
    tw = half_width_for_fs(SIX_TERM, fs)
    n = np.arange(len(buf))
    ref = np.zeros(len(buf))
    for t0 in synth.cycle_times(traj):
        ref += fl_antialiased_cycle(p, d, SIX_TERM, tw, 1 / f0, n / fs - t0)
    np.testing.assert_allclose(buf.samples, ref, atol=1e-13)


def test_equalized_is_iir_of_unequalized():
    traj = synth.F0Trajectory.constant(150.0, 0.05, 22050.0)
    raw = synth.synthesize("lf", LF, traj, equalize=False)
    eqd = synth.synthesize("lf", LF, traj)
    np.testing.assert_allclose(eqd.samples, apply_iir(design_equalizer(SIX_TERM, 22050.0), raw.samples), atol=1e-14)
    assert "equalizer" in eqd.metadata


def test_direct_samples_continuous_model():
    from aaexcite.fl_model import fl_waveform_continuous

    fs = 8000.0
    buf = synth.synthesize("fl", FL, synth.F0Trajectory.constant(100.0, 0.02, fs), direct=True)
    p = FLParams.from_dict(FL)
    tau = (np.arange(80) / fs) / 0.01
    np.testing.assert_allclose(buf.samples[:80], fl_waveform_continuous(p, fl_derived(p), tau), atol=1e-12)


def test_determinism():
    traj = synth.vibrato_f0(300.0, 6.0, 5.2, 0.1, 44100.0)
    a = synth.synthesize("lf", LF, traj).samples
    b = synth.synthesize("lf", LF, traj).samples
    assert a.tobytes() == b.tobytes()


def test_constant_flow_scales_cycles():
    fs = 16000.0
    traj = synth.F0Trajectory.constant(100.0, 0.03, fs)
    pt = synth.ParamTrajectory.from_dict({"times": [0.0, 0.03], **{k: v for k, v in FL.items() if k != "A"}, "A": [0.2, 0.4]})
    plain = synth.synthesize("fl", pt, traj, direct=True)
    kept = synth.synthesize("fl", pt, traj, direct=True, constant_flow=True)
    # first cycle untouched, later cycles scaled down toward the first cycle's flow
    np.testing.assert_array_equal(plain.samples[:160], kept.samples[:160])
    assert np.abs(kept.samples[160:]).max() < np.abs(plain.samples[160:]).max()


def test_param_trajectory_interpolates():
    pt = synth.ParamTrajectory.from_dict({"times": [0, 1], "A": [0.0, 1.0], "R": 0.5})
    assert pt.at(0.25) == {"A": 0.25, "R": 0.5}
    with pytest.raises(ValueError):
        synth.ParamTrajectory.from_dict({"times": [0, 1], "A": [0, 1, 2]})


def test_invalid_cycle_names_index():
    traj = synth.F0Trajectory.constant(100.0, 0.05, 8000.0)
    bad = dict(FL, times=[0.0, 0.05], R=[0.48, 0.9])
    with pytest.raises(synth.SynthesisError, match=r"cycle \d+"):
        synth.synthesize("fl", synth.ParamTrajectory.from_dict(bad), traj)


def test_series_for():
    assert synth.series_for(6) is SIX_TERM
    assert synth.series_for("nuttall-11").m == 3
    with pytest.raises(ValueError):
        synth.series_for("hann")


def test_config_roundtrip():
    cfg = {"model": "fl", "fs": 8000, "duration_s": 0.02, "f0": {"base": 120, "depth_cents": 6, "rate_hz": 5.2}, "params": FL}
    buf = synth.synthesize_from_config(cfg)
    assert len(buf) == 160
    assert buf.metadata["config"]["model"] == "fl"
