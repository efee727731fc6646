import math

import numpy as np
import pytest
from scipy import integrate

import oracles
from aaexcite.lf_model import (
    InfeasibleParameters,
    LFParams,
    lf_antialiased_cycle,
    lf_flow_integral,
    lf_waveform_continuous,
    solve_lf_coefficients,
)
from aaexcite.window_design import SIX_TERM, half_width_for_fs

MODAL = LFParams(tp=0.4134, te=0.5530, ta=0.0041, tc=0.5817)


def test_modal_solution_frozen():
    d = solve_lf_coefficients(MODAL)
    assert d.omega_g == pytest.approx(math.pi / 0.4134)
    # frozen from this solver; the invariants below are the independent check
    assert d.E0_over_Ee == pytest.approx(0.0895864, rel=1e-5)
    assert d.alpha == pytest.approx(4.6087, abs=1e-3)
    assert d.beta == pytest.approx(243.679, abs=1e-2)


def test_omega_for_half_tp():
    p = LFParams(tp=0.5, te=0.6, ta=0.01, tc=0.7)
    assert solve_lf_coefficients(p).omega_g == pytest.approx(2 * math.pi)


def test_beta_residual():
    d = solve_lf_coefficients(MODAL)
    r = d.beta * MODAL.ta - 1 + math.exp(-d.beta * (MODAL.tc - MODAL.te))
    assert abs(r) < 1e-12


def test_zero_flow_by_quadrature():
    d = solve_lf_coefficients(MODAL)
    f = lambda t: float(lf_waveform_continuous(MODAL, d, t))  # noqa: E731
    q = integrate.quad(f, 0, 1, points=[MODAL.te, MODAL.tc], epsabs=1e-13, limit=200)[0]
    assert abs(q) < 1e-10
    assert abs(lf_flow_integral(MODAL, d)) < 1e-12


def test_waveform_landmarks():
    d = solve_lf_coefficients(MODAL)
    e = lf_waveform_continuous(MODAL, d, np.array([0.0, MODAL.te, MODAL.tc, 0.9]))
    assert e[0] == 0.0
    assert e[1] == pytest.approx(-1.0, abs=1e-12)
    assert abs(e[2]) < 1e-12 and e[3] == 0.0
    # left limit of the opening branch
    left = d.E0_over_Ee * math.exp(d.alpha * MODAL.te) * math.sin(d.omega_g * MODAL.te)
    assert left == pytest.approx(-1.0, abs=1e-12)


def test_infeasible_return_phase():
    with pytest.raises(InfeasibleParameters, match="return-phase"):
        solve_lf_coefficients(LFParams(tp=0.4, te=0.55, ta=0.05, tc=0.58))


def test_invalid_ordering():
    with pytest.raises(ValueError):
        LFParams(tp=0.6, te=0.5, ta=0.01, tc=0.7)


@pytest.mark.parametrize("fs, f0", [(8000, 100.0), (44100, 887.0)])
def test_cycle_vs_quadrature(fs, f0):
    d = solve_lf_coefficients(MODAL)
    tw = half_width_for_fs(SIX_TERM, fs)
    period = 1 / f0
    t = np.linspace(-tw, period + tw, 97)[1:-1]
    got = lf_antialiased_cycle(MODAL, d, SIX_TERM, tw, period, t)
    wave = lambda x: float(lf_waveform_continuous(MODAL, d, x)) if 0 <= x <= 1 else 0.0  # noqa: E731
    breaks = [0.0, MODAL.te, MODAL.tc]
    ref = np.array([oracles.convolve_waveform(SIX_TERM, tw / period, wave, x / period, breaks) for x in t])
    assert np.max(np.abs(got - ref)) < 1e-8


def test_closed_phase_is_zero():
    d = solve_lf_coefficients(MODAL)
    tw = half_width_for_fs(SIX_TERM, 44100)
    period = 0.01
    t = np.array([(MODAL.tc + 0.05) * period, 0.0095])
    assert np.max(np.abs(lf_antialiased_cycle(MODAL, d, SIX_TERM, tw, period, t))) < 1e-10


def test_output_scales_with_Ee():
    p2 = LFParams(tp=MODAL.tp, te=MODAL.te, ta=MODAL.ta, tc=MODAL.tc, Ee=2.5)
    tw = half_width_for_fs(SIX_TERM, 16000)
    t = np.linspace(0, 0.01, 50)
    a = lf_antialiased_cycle(MODAL, solve_lf_coefficients(MODAL), SIX_TERM, tw, 0.01, t)
    b = lf_antialiased_cycle(p2, solve_lf_coefficients(p2), SIX_TERM, tw, 0.01, t)
    np.testing.assert_allclose(b, 2.5 * a, atol=1e-13)


def test_error_shrinks_with_half_width():
    # the filtered waveform approaches the continuous one as the kernel narrows
    d = solve_lf_coefficients(MODAL)
    t = np.array([0.2, 0.3, 0.45])
    cont = lf_waveform_continuous(MODAL, d, t)
    errs = [np.max(np.abs(lf_antialiased_cycle(MODAL, d, SIX_TERM, tw, 1.0, t) - cont)) for tw in (0.02, 0.01)]
    assert errs[1] < errs[0]
