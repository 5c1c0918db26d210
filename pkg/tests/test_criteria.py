"""Transversal stability quantities: weighted integrals, verdicts, moments."""
from __future__ import annotations

import math

import numpy as np
import pytest

import frontlab.criteria as cr
import frontlab.geometry as geo
from frontlab.errors import DegenerateGStar, DegenerateMStar, ValidationError
from frontlab.models import TauRegime, eval_jacobian, eval_reaction, make_model


@pytest.fixture(scope="module")
def fhn_stationary():
    m = make_model("fhn", {"mu1": 4.0, "mu2": 1.0, "mu3": 0.0})
    return geo.build_front(m, eps=0.001)[0]


@pytest.fixture(scope="module")
def bcde_front():
    return geo.build_front(make_model("bcde"), eps=0.02)[0]


@pytest.fixture(scope="module")
def cylindrical_front():
    m = make_model("cylindrical", tau_regime=TauRegime.order_eps(1.0))
    return geo.build_front(m, eps=0.01)[0]


@pytest.fixture(scope="module")
def fhn_small_tau_fronts():
    m = make_model("fhn", {"mu1": 4.0, "mu2": 1.0, "mu3": 2.0}, TauRegime.order_eps(0.12))
    return geo.build_front(m, eps=0.01)


def _mirror(sk):
    # same front traversed right to left: orientation-dependent parts flip
    f = sk.fast.samples
    fast = geo.FastJump(
        c_times_tau=-sk.fast.c_times_tau,
        samples=np.column_stack([-f[::-1, 0], f[::-1, 1], -f[::-1, 2]]),
        closed_form=None,
    )
    jp = geo.JumpPoint(sk.jump.v_star, -sk.jump.q_star,
                       sk.jump.u_star_minus, sk.jump.u_star_plus)

    def flip(s):
        return np.column_stack([-s[::-1, 0], s[::-1, 1], -s[::-1, 2]])

    left = geo.SlowOrbit(side="plus", samples=flip(sk.slow_plus.samples), c_tilde=-sk.speed)
    right = geo.SlowOrbit(side="minus", samples=flip(sk.slow_minus.samples), c_tilde=-sk.speed)
    return geo.FrontSkeleton(sk.model, jp, fast, left, right, -sk.speed, sk.eps)


def test_fhn_stationary_quantities(fhn_stationary):
    sk = fhn_stationary
    assert abs(cr.f_star(sk) - 4.0 / 3.0) < 1e-12
    assert cr.g_star(sk) == 2.0
    assert abs(cr.i_fast(sk) - (2.0 / 3.0) * math.sqrt(2.0)) < 1e-12
    assert abs(cr.i_slow(sk) - 1.0 / (3.0 * math.sqrt(3.0))) < 1e-10


def test_fhn_lambda2c_closed_form(fhn_stationary):
    lam = cr.lambda2c(fhn_stationary, 0.001)
    pred = -1.0 / (3.0 * 0.001 * math.sqrt(6.0))
    assert abs(lam - pred) < 1e-4 * abs(pred)
    assert cr.criterion_report(fhn_stationary, 0.001).verdict is cr.Verdict.LongWaveStable

    m = make_model("fhn", {"mu1": 4.0, "mu2": -1.0, "mu3": 0.0})
    sk = geo.build_front(m, eps=0.001)[0]
    lam = cr.lambda2c(sk, 0.001)
    pred = 1.0 / (5.0 * 0.001 * math.sqrt(10.0))
    assert abs(lam - pred) < 1e-4 * pred
    assert cr.criterion_report(sk, 0.001).verdict is cr.Verdict.TransversallyUnstable


def test_bcde_always_unstable(bcde_front):
    sk = bcde_front
    gs = cr.g_star(sk)
    direct = (eval_reaction(sk.model, sk.jump.u_star_plus, sk.jump.v_star)[1]
              - eval_reaction(sk.model, sk.jump.u_star_minus, sk.jump.v_star)[1])
    assert gs == direct
    assert abs(gs - (-(sk.jump.u_star_plus ** 2) * sk.jump.v_star)) < 1e-12
    assert gs < 0.0
    assert cr.f_star(sk) > 0.0
    assert cr.lambda2c(sk, 0.02) > 0.0
    assert cr.criterion_report(sk, 0.02).verdict is cr.Verdict.TransversallyUnstable


def test_cylindrical_quantities(cylindrical_front):
    sk = cylindrical_front
    assert abs(cr.f_star(sk) + 2.0 / 9.0) < 1e-12
    assert abs(cr.g_star(sk) - 4.0 / 27.0) < 1e-14
    assert abs(cr.i_fast(sk) - 2.0 * math.sqrt(2.0) / 81.0) < 1e-12


def test_cylindrical_pole_matches_bifurcation(cylindrical_front):
    tw = geo.tw_bifurcation(make_model("cylindrical"))
    assert abs(cr.m_star(cylindrical_front, tw.tau_tilde_star)) < 1e-12
    with pytest.raises(DegenerateMStar):
        cr.lambda2c_small_tau(cylindrical_front, tw.tau_tilde_star, 0.01)
    rep = cr.criterion_report(cylindrical_front, 0.01, tau_tilde=1.0)
    assert abs(rep.tau_tilde_star - tw.tau_tilde_star) < 1e-10
    assert rep.verdict is cr.Verdict.TransversallyUnstable


def test_fhn_traveling_slow_dissipation(fhn_small_tau_fronts):
    sk = max(fhn_small_tau_fronts, key=lambda s: s.speed)
    ct = sk.speed
    assert ct > 0.0
    pred = 8.0 / (ct * ct + 12.0) ** 1.5
    assert abs(cr.i_slow(sk) - pred) < 1e-8 * pred
    assert abs(cr.g_star(sk) - 2.0) < 1e-12


def test_fhn_small_tau_lambda_closed_form(fhn_small_tau_fronts):
    sk0 = min(fhn_small_tau_fronts, key=lambda s: abs(s.speed))
    lam = cr.lambda2c_small_tau(sk0, 0.12, 0.01)
    pred = 1e4 / (3.0 * 0.12 * math.sqrt(6.0) - 1.0)
    assert abs(lam - pred) < 1e-8 * abs(pred)
    tts = 1.0 / (3.0 * math.sqrt(6.0))
    with pytest.raises(DegenerateMStar):
        cr.lambda2c_small_tau(sk0, tts, 0.01)
    rep = cr.criterion_report(sk0, 0.01)
    assert abs(rep.tau_tilde_star - tts) < 1e-8
    assert rep.m_star == pytest.approx(
        cr.f_star(sk0) * cr.i_slow(sk0) + 0.12 * cr.g_star(sk0) * cr.i_fast(sk0), rel=1e-12)


def test_sign_rule_from_independent_quadratures():
    cases = [("bcde", None), ("fhn", {"mu1": 4.0, "mu2": 1.0, "mu3": 0.0}),
             ("fhn", {"mu1": 4.0, "mu2": -1.0, "mu3": 0.0})]
    for name, params in cases:
        m = make_model(name, params)
        sk = geo.build_front(m, eps=0.02)[0]
        xs, us, ps = sk.fast.samples.T
        fv = np.array([eval_jacobian(m, u, sk.jump.v_star)[1] for u in us])
        sign_f = np.sign(np.trapezoid(fv * ps * np.exp(sk.fast.c_times_tau * xs), xs))
        gl = eval_reaction(m, us[0], sk.jump.v_star)[1]
        gr = eval_reaction(m, us[-1], sk.jump.v_star)[1]
        sign_g = np.sign(gr - gl)
        assert np.sign(cr.lambda2c(sk, 0.02)) == -sign_f * sign_g, (name, params)


def test_orientation_exchange_leaves_verdict(bcde_front):
    sk = bcde_front
    mk = _mirror(sk)
    assert abs(cr.f_star(mk) + cr.f_star(sk)) < 1e-9 * abs(cr.f_star(sk))
    assert cr.g_star(mk) == -cr.g_star(sk)
    assert abs(cr.i_fast(mk) - cr.i_fast(sk)) < 1e-8 * cr.i_fast(sk)
    assert abs(cr.i_slow(mk) - cr.i_slow(sk)) < 1e-10 * cr.i_slow(sk)
    assert abs(cr.lambda2c(mk, 0.02) - cr.lambda2c(sk, 0.02)) < 1e-8 * abs(cr.lambda2c(sk, 0.02))
    assert cr.criterion_report(mk, 0.02).verdict is cr.criterion_report(sk, 0.02).verdict


def test_zero_jump_sensitivity_is_degenerate():
    # constant fast roots make the fast reaction independent of v
    m = make_model("fhn", {"mu1": 3.0, "mu2": 0.0, "mu3": 0.0})
    sk = geo.build_front(m, eps=0.01)[0]
    assert cr.f_star(sk) == 0.0
    assert cr.criterion_report(sk, 0.01).verdict is cr.Verdict.Degenerate


def test_degenerate_slow_jump_guard(fhn_stationary):
    sk = fhn_stationary
    jp = geo.JumpPoint(sk.jump.v_star, sk.jump.q_star,
                       sk.jump.u_star_plus, sk.jump.u_star_plus)
    doctored = geo.FrontSkeleton(sk.model, jp, sk.fast, sk.slow_minus,
                                 sk.slow_plus, sk.speed, sk.eps)
    with pytest.raises(DegenerateGStar):
        cr.lambda2c(doctored, 0.01)
    assert cr.criterion_report(doctored, 0.01).verdict is cr.Verdict.Degenerate


def test_large_relaxation_limit_agrees_across_regimes():
    mu = {"mu1": 4.0, "mu2": 1.0, "mu3": 2.0}
    sk_small = geo.build_front(
        make_model("fhn", mu, TauRegime.order_eps(1000.0)), eps=0.01)[0]
    sk_one = geo.build_front(make_model("fhn", mu), eps=0.01)[0]
    assert np.sign(cr.lambda2c_small_tau(sk_small, 1000.0, 0.01)) == np.sign(
        cr.lambda2c(sk_one, 0.01))


def test_regime_mismatch_rejected(fhn_stationary, cylindrical_front):
    with pytest.raises(ValidationError):
        cr.lambda2c(cylindrical_front, 0.01)
    with pytest.raises(ValidationError):
        cr.m_star(fhn_stationary, 1.0)
    with pytest.raises(ValidationError):
        cr.lambda2c_small_tau(fhn_stationary, 1.0, 0.01)
    with pytest.raises(ValidationError):
        cr.lambda2c(fhn_stationary, 0.0)


def test_moment_table_known_values():
    assert abs(cr.k_integral(0, 2) - 2.0) < 1e-12
    assert abs(cr.k_integral(0, 1) - math.pi) < 1e-12
    for j in range(1, 6):
        assert cr.k_integral(1, j) == 0.0
    assert cr.k_integral(3, 2) == 0.0
    with pytest.raises(ValidationError):
        cr.k_integral(-1, 2)
    with pytest.raises(ValidationError):
        cr.k_integral(0, 0)


def test_moment_table_against_simpson():
    for i, j in ((2, 4), (2, 2), (4, 3)):
        s = np.linspace(0.0, 40.0, 400001)
        y = s**i / np.cosh(s) ** j
        h = s[1] - s[0]
        simpson = 2.0 * (h / 3.0) * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-2:2].sum())
        assert abs(cr.k_integral(i, j) - simpson) < 1e-10


def test_bifurcating_wave_report_closed_forms():
    rep = cr.fhn_bifurcating_wave_report(4.0, 1.0, 2.0, 1.0, 0.05, 0.01)
    cc = rep.cross_check
    k24 = cr.k_integral(2, 4)
    d2 = 0.05 ** 2
    assert cc["m_star"] == pytest.approx((8.0 / 3.0) * math.sqrt(2.0) * d2, rel=1e-14)
    assert cc["g_star"] == 2.0
    assert cc["lambda2c"] == pytest.approx(
        1.0 / (2.0 * 0.01**2 * d2 * 3.0 * math.sqrt(6.0)), rel=1e-14)
    assert cc["i_fast"] == pytest.approx(
        (2.0 / 3.0) * math.sqrt(2.0) + 4.0 * k24 / math.sqrt(3.0) * d2, rel=1e-14)
    # numerics track the expansion at this delta
    assert rep.m_star == pytest.approx(cc["m_star"], rel=5e-2)
    assert rep.i_fast == pytest.approx(cc["i_fast"], rel=1e-3)
    assert rep.i_slow == pytest.approx(cc["i_slow"], rel=2e-2)
    assert rep.f_star == pytest.approx(cc["f_star"], rel=1e-3)
    assert rep.verdict is cr.Verdict.TransversallyUnstable
    assert rep.lambda2c > 0.0
    assert abs(rep.tau_tilde_star - 1.0 / (3.0 * math.sqrt(6.0))) < 1e-12


def test_bifurcating_wave_denominator_convergence():
    target = (8.0 / 3.0) * math.sqrt(2.0)
    errs = []
    for d in (0.1, 0.05, 0.025):
        rep = cr.fhn_bifurcating_wave_report(4.0, 1.0, 2.0, 1.0, d, 0.01)
        errs.append(abs(rep.m_star / d**2 - target))
    assert math.log2(errs[0] / errs[1]) >= 1.0
    assert math.log2(errs[1] / errs[2]) >= 1.0


def test_bifurcating_wave_rejects_bad_window():
    with pytest.raises(ValidationError):
        cr.fhn_bifurcating_wave_report(4.0, 1.0, 0.5, 1.0, 0.05, 0.01)
    with pytest.raises(ValidationError):
        cr.fhn_bifurcating_wave_report(4.0, 1.0, 2.0, 1e4, 0.1, 0.01)


def test_report_serialization(fhn_stationary):
    rep = cr.criterion_report(fhn_stationary, 0.001)
    text = cr.report_text(rep)
    assert "f_star = " in text and "verdict = LongWaveStable" in text
    header = cr.report_csv_header().split(",")
    row = cr.report_csv_row(rep).split(",")
    assert len(header) == len(row) == len(cr.REPORT_COLUMNS)
    named = dict(zip(header, row))
    assert float(named["f_star"]) == rep.f_star
    assert named["m_star"] == ""  # absent outside the small-tau regime
    assert named["verdict"] == "LongWaveStable"
