"""Long-wavelength transversal (in)stability quantities of front skeletons.

Every operation consumes a FrontSkeleton and evaluates weighted integrals of
its fast and slow profiles.  The weight rates are read off the skeleton: the
fast weight is e^{g xi} with g the recorded speed product, the slow weight is
e^{c X} with c the front speed in the slow scaling (zero in the order-one
regime, where the speed contributes only at higher order).

Quadrature strategy: closed-form fast profiles are integrated directly over a
window chosen so the weighted integrand has decayed by e^{-50}; sampled
profiles are integrated through a cubic spline on the stored samples, plus
analytic tail terms from the linearization rates at the adjacent equilibria.
The net tail decay rate is checked before use; a front profile always decays
faster than the weight grows, so a failure here signals a corrupt skeleton.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import (
    DegenerateGStar,
    DegenerateMStar,
    NumericalError,
    QuadratureNotConverged,
    ValidationError,
)
from .geometry import FrontSkeleton, build_front, slow_g_prime, slow_saddle
from .models import TauRegime, eval_jacobian, eval_reaction, make_model

__all__ = [
    "Verdict",
    "CriterionReport",
    "REPORT_COLUMNS",
    "f_star",
    "g_star",
    "i_fast",
    "i_slow",
    "lambda2c",
    "m_star",
    "lambda2c_small_tau",
    "k_integral",
    "criterion_report",
    "fhn_bifurcating_wave_report",
    "report_text",
    "report_csv_header",
    "report_csv_row",
]

_QUAD_KW = dict(epsabs=1e-13, epsrel=1e-12, limit=400)
_DEGENERACY_RTOL = 1e-8


class Verdict(Enum):
    TransversallyUnstable = "TransversallyUnstable"
    LongWaveStable = "LongWaveStable"
    Degenerate = "Degenerate"


@dataclass(frozen=True)
class CriterionReport:
    """Stability quantities of one front, with the verdict they imply.

    lambda2c is the full leading-order curvature of the critical spectral
    branch, including the 1/(eps*tau) or 1/eps^2 prefactor; lambda2c_ratio is
    the same number with the prefactor stripped, so results can be compared
    across eps.  m_star and tau_tilde_star are populated only in the small-tau
    regime.  cross_check, when present, holds closed-form values of the same
    quantities for side-by-side comparison.
    """

    f_star: float
    g_star: float
    i_fast: float
    i_slow: float
    lambda2c: float
    lambda2c_ratio: float
    eps: float
    verdict: Verdict
    m_star: float | None = None
    tau_tilde_star: float | None = None
    cross_check: dict[str, float] | None = None


REPORT_COLUMNS = (
    "f_star",
    "g_star",
    "i_fast",
    "i_slow",
    "m_star",
    "tau_tilde_star",
    "lambda2c_ratio",
    "lambda2c",
    "eps",
    "verdict",
)


def _quad_checked(fn, a, b, what, points=None):
    # roundoff warnings on spline integrands are benign while the error
    # estimate stays small, so gate on the estimate rather than the message
    res = quad(fn, a, b, points=points, full_output=1, **_QUAD_KW)
    value, abserr = res[0], res[1]
    if not math.isfinite(value):
        raise QuadratureNotConverged(f"{what}: {res[3] if len(res) > 3 else value}")
    if abserr > max(1e-7 * abs(value), 1e-9):
        detail = f": {res[3]}" if len(res) > 3 else ""
        raise QuadratureNotConverged(f"{what}: error estimate {abserr:g}{detail}")
    return value


def _fast_end_states(skeleton: FrontSkeleton) -> tuple[float, float]:
    # resolve which recorded branch value sits at which end of the jump, so
    # mirrored (descending) profiles are handled the same as ascending ones
    u0 = skeleton.fast.samples[0, 1]
    um, up = skeleton.jump.u_star_minus, skeleton.jump.u_star_plus
    if abs(um - u0) <= abs(up - u0):
        return um, up
    return up, um


def _fast_tail_rates(skeleton, gamma):
    """Net decay rates of p*e^{g xi} beyond the first / last fast sample."""
    v = skeleton.jump.v_star
    u_left, u_right = _fast_end_states(skeleton)
    fu_l = eval_jacobian(skeleton.model, u_left, v)[0]
    fu_r = eval_jacobian(skeleton.model, u_right, v)[0]
    if fu_l >= 0.0 or fu_r >= 0.0:
        raise QuadratureNotConverged("fast end state is not attracting along the profile")
    disc_l = math.sqrt(gamma * gamma - 4.0 * fu_l)
    disc_r = math.sqrt(gamma * gamma - 4.0 * fu_r)
    # left: p ~ e^{nu_u xi}, nu_u = (-g+disc)/2; weighted rate nu_u + g > 0
    # right: p ~ e^{nu_s xi}, nu_s = (-g-disc)/2; weighted rate -(nu_s + g) > 0
    return u_left, u_right, 0.5 * (gamma + disc_l), 0.5 * (disc_r - gamma), disc_l, disc_r


def _weighted_fast_integral(skeleton: FrontSkeleton, kind: str) -> float:
    """Integrate F_v(u,v*)*p or p^2 against e^{g xi} over the fast jump."""
    model = skeleton.model
    v = skeleton.jump.v_star
    gamma = skeleton.fast.c_times_tau
    if skeleton.fast.closed_form is not None:
        k, _alpha, bm, _bc, bp = skeleton.fast.closed_form
        r, mid = 0.5 * (bp - bm), 0.5 * (bp + bm)
        kr = k * r
        decay = (2.0 if kind == "f" else 4.0) * kr
        if decay <= abs(gamma):
            raise QuadratureNotConverged("fast weight overwhelms profile decay")

        def h(xi):
            # exponents are combined before exp: near the existence edge
            # |gamma| -> decay the window stretches to where cosh or the
            # weight alone would overflow although the product stays tiny
            q = math.exp(-2.0 * kr * abs(xi))
            if kind == "f":
                p_w = 4.0 * kr * r * math.exp(gamma * xi - 2.0 * kr * abs(xi)) / (1.0 + q) ** 2
                u = mid + r * math.tanh(kr * xi)
                return eval_jacobian(model, u, v)[1] * p_w
            return 16.0 * (kr * r) ** 2 * math.exp(gamma * xi - 4.0 * kr * abs(xi)) / (1.0 + q) ** 4

        lo = -50.0 / (decay + gamma)
        hi = 50.0 / (decay - gamma)
        return _quad_checked(h, lo, hi, f"{kind}-integral", points=(0.0,))

    samples = skeleton.fast.samples
    xi = samples[:, 0]
    spl_u = CubicSpline(xi, samples[:, 1])
    spl_p = CubicSpline(xi, samples[:, 2])

    def h(x):
        p = float(spl_p(x))
        w = math.exp(gamma * x)
        if kind == "f":
            return eval_jacobian(model, float(spl_u(x)), v)[1] * p * w
        return p * p * w

    peak = float(xi[np.argmax(np.abs(samples[:, 2]))])
    core = _quad_checked(h, float(xi[0]), float(xi[-1]), f"{kind}-integral", points=(peak,))
    u_left, u_right, rate_l, rate_r, disc_l, disc_r = _fast_tail_rates(skeleton, gamma)
    p0, pn = samples[0, 2], samples[-1, 2]
    w0, wn = math.exp(gamma * xi[0]), math.exp(gamma * xi[-1])
    if kind == "f":
        fv_l = eval_jacobian(model, u_left, v)[1]
        fv_r = eval_jacobian(model, u_right, v)[1]
        tails = fv_l * p0 * w0 / rate_l + fv_r * pn * wn / rate_r
    else:
        tails = p0 * p0 * w0 / disc_l + pn * pn * wn / disc_r
    return core + tails


def f_star(skeleton: FrontSkeleton) -> float:
    """Weighted jump sensitivity int F_v(u*, v*) u*_xi e^{g xi} dxi."""
    return _weighted_fast_integral(skeleton, "f")


def i_fast(skeleton: FrontSkeleton) -> float:
    """Weighted fast dissipation int (u*_xi)^2 e^{g xi} dxi."""
    return _weighted_fast_integral(skeleton, "i")


def g_star(skeleton: FrontSkeleton) -> float:
    """Jump of the slow reaction across the interface, right end minus left."""
    v = skeleton.jump.v_star
    u_left, u_right = _fast_end_states(skeleton)
    return eval_reaction(skeleton.model, u_right, v)[1] - eval_reaction(skeleton.model, u_left, v)[1]


def _slow_weight_rate(skeleton: FrontSkeleton) -> float:
    if skeleton.model.tau_regime.kind == "order_eps":
        return skeleton.speed
    return 0.0


def _slow_arc_integral(skeleton, orbit, c_tilde, tail_at_start):
    samples = orbit.samples
    x = samples[:, 0]
    spl_q = CubicSpline(x, samples[:, 2])
    core = _quad_checked(
        lambda s: float(spl_q(s)) ** 2 * math.exp(c_tilde * s),
        float(x[0]), float(x[-1]), "slow dissipation",
    )
    vbar = slow_saddle(skeleton.model, orbit.side).v_bar
    gp = slow_g_prime(skeleton.model, orbit.side, vbar)
    net = c_tilde * c_tilde - 4.0 * gp
    if net <= 0.0:
        raise QuadratureNotConverged("slow weight overwhelms saddle decay")
    idx = 0 if tail_at_start else -1
    tail = samples[idx, 2] ** 2 * math.exp(c_tilde * samples[idx, 0]) / math.sqrt(net)
    return core + tail


def i_slow(skeleton: FrontSkeleton) -> float:
    """Weighted slow dissipation int (v_X)^2 e^{c X} dX over both arcs."""
    c = _slow_weight_rate(skeleton)
    left = _slow_arc_integral(skeleton, skeleton.slow_minus, c, tail_at_start=True)
    right = _slow_arc_integral(skeleton, skeleton.slow_plus, c, tail_at_start=False)
    return left + right


def _g_scale(skeleton: FrontSkeleton) -> float:
    v = skeleton.jump.v_star
    u_left, u_right = _fast_end_states(skeleton)
    gl = eval_reaction(skeleton.model, u_left, v)[1]
    gr = eval_reaction(skeleton.model, u_right, v)[1]
    return max(1.0, abs(gl), abs(gr))


def _ratio_order_one(fs, gs, i_f, i_s, g_scale):
    if abs(gs) < _DEGENERACY_RTOL * g_scale:
        raise DegenerateGStar(f"slow reaction jump {gs:g} below tolerance")
    return -(fs / gs) * (i_s / i_f)


def _ratio_small_tau(fs, gs, i_f, i_s, tau_tilde):
    numerator = fs * i_s
    denominator = numerator + tau_tilde * gs * i_f
    scale = abs(numerator) + abs(tau_tilde * gs * i_f)
    if abs(denominator) < _DEGENERACY_RTOL * max(scale, 1e-30):
        raise DegenerateMStar(f"denominator {denominator:g} below tolerance near the pole")
    return -numerator / denominator, denominator


def lambda2c(skeleton: FrontSkeleton, eps: float) -> float:
    """Leading-order curvature of the critical branch, order-one regime."""
    if skeleton.model.tau_regime.kind != "order_one":
        raise ValidationError("lambda2c applies to the order-one time-scale regime")
    if eps <= 0:
        raise ValidationError(f"eps must be positive, got {eps}")
    ratio = _ratio_order_one(
        f_star(skeleton), g_star(skeleton), i_fast(skeleton), i_slow(skeleton),
        _g_scale(skeleton),
    )
    return ratio / (eps * skeleton.model.tau_regime.value)


def m_star(skeleton: FrontSkeleton, tau_tilde: float) -> float:
    """Denominator F*I_s + tau~ G*I_f whose zero marks the speed bifurcation."""
    if skeleton.model.tau_regime.kind != "order_eps":
        raise ValidationError("m_star applies to the small-tau regime")
    if tau_tilde < 0:
        raise ValidationError(f"tau_tilde must be nonnegative, got {tau_tilde}")
    return f_star(skeleton) * i_slow(skeleton) + tau_tilde * g_star(skeleton) * i_fast(skeleton)


def lambda2c_small_tau(skeleton: FrontSkeleton, tau_tilde: float, eps: float) -> float:
    """Leading-order curvature of the critical branch, small-tau regime."""
    if skeleton.model.tau_regime.kind != "order_eps":
        raise ValidationError("lambda2c_small_tau applies to the small-tau regime")
    if eps <= 0:
        raise ValidationError(f"eps must be positive, got {eps}")
    ratio, _ = _ratio_small_tau(
        f_star(skeleton), g_star(skeleton), i_fast(skeleton), i_slow(skeleton), tau_tilde,
    )
    return ratio / (eps * eps)


def k_integral(i: int, j: int) -> float:
    """Moment int s^i / cosh^j s ds; odd moments vanish by symmetry.

    Even moments are integrated adaptively on [0, 40] and doubled; beyond
    s = 40 the integrand is below s^i e^{-40}, negligible at the working
    tolerances.
    """
    if i < 0 or j < 1:
        raise ValidationError(f"moment indices need i >= 0, j >= 1, got ({i}, {j})")
    if i % 2 == 1:
        return 0.0
    return 2.0 * _quad_checked(
        lambda s: s**i / math.cosh(s) ** j, 0.0, 40.0, f"moment ({i},{j})",
    )


def _verdict_of(ratio_signed: float) -> Verdict:
    if ratio_signed > 0.0:
        return Verdict.TransversallyUnstable
    if ratio_signed < 0.0:
        return Verdict.LongWaveStable
    return Verdict.Degenerate


def criterion_report(
    skeleton: FrontSkeleton, eps: float, tau_tilde: float | None = None,
) -> CriterionReport:
    """Evaluate all quantities for one skeleton and classify the front."""
    if eps <= 0:
        raise ValidationError(f"eps must be positive, got {eps}")
    regime = skeleton.model.tau_regime
    fs = f_star(skeleton)
    gs = g_star(skeleton)
    i_f = i_fast(skeleton)
    i_s = i_slow(skeleton)
    if regime.kind == "order_one":
        try:
            ratio = _ratio_order_one(fs, gs, i_f, i_s, _g_scale(skeleton))
            lam = ratio / (eps * regime.value)
            verdict = _verdict_of(lam)
        except DegenerateGStar:
            ratio, lam, verdict = math.nan, math.nan, Verdict.Degenerate
        return CriterionReport(fs, gs, i_f, i_s, lam, ratio, eps, verdict)

    tt = regime.value if tau_tilde is None else tau_tilde
    mst = fs * i_s + tt * gs * i_f
    pole = -fs * i_s / (gs * i_f) if abs(gs * i_f) > 1e-30 else None
    try:
        ratio, _ = _ratio_small_tau(fs, gs, i_f, i_s, tt)
        lam = ratio / (eps * eps)
        verdict = _verdict_of(lam)
    except DegenerateMStar:
        ratio, lam, verdict = math.nan, math.nan, Verdict.Degenerate
    return CriterionReport(
        fs, gs, i_f, i_s, lam, ratio, eps, verdict,
        m_star=mst, tau_tilde_star=pole,
    )


def fhn_bifurcating_wave_report(
    mu1: float, mu2: float, mu3: float, tau_hat: float, delta: float, eps: float,
) -> CriterionReport:
    """Classify the traveling front born at the speed bifurcation.

    The relaxation rate is placed a distance delta^2*tau_hat below the
    bifurcation value; the report carries the numerically evaluated
    quantities on the true skeleton, with the delta-expansion closed forms
    in cross_check for comparison.
    """
    if mu1 <= mu2 or mu3 <= mu2:
        raise ValidationError("need mu1 > mu2 and mu3 > mu2 for a bifurcating wave")
    if tau_hat <= 0 or not 0 < delta < 1:
        raise ValidationError("need tau_hat > 0 and 0 < delta < 1")
    m = mu1 - mu2
    d = mu3 - mu2
    tts = d / (m * math.sqrt(2.0 * m))
    tt = tts - delta * delta * tau_hat
    if tt <= 0:
        raise ValidationError(f"delta^2*tau_hat = {delta*delta*tau_hat:g} exceeds the bifurcation value {tts:g}")

    k24 = k_integral(2, 4)
    d2 = delta * delta
    closed = {
        "f_star": -(4.0 / 3.0) * d - 4.0 * math.sqrt(2.0) * d * d * k24 * tau_hat / math.sqrt(m) * d2,
        "g_star": 2.0,
        "i_fast": (2.0 / 3.0) * math.sqrt(2.0) + 4.0 * d * k24 * tau_hat / math.sqrt(m) * d2,
        "i_slow": m**-1.5 - 3.0 * math.sqrt(2.0) * tau_hat / d * d2,
        "m_star": (8.0 / 3.0) * math.sqrt(2.0) * tau_hat * d2,
        "lambda2c": d / (2.0 * eps * eps * d2 * tau_hat * m * math.sqrt(2.0 * m)),
    }

    model = make_model("fhn", {"mu1": mu1, "mu2": mu2, "mu3": mu3}, TauRegime.order_eps(tt))
    fronts = build_front(model, eps)
    sk = max(fronts, key=lambda s: s.speed)
    if sk.speed <= 0.0:
        raise NumericalError("traveling branch not found below the bifurcation value")
    base = criterion_report(sk, eps)
    return CriterionReport(
        base.f_star, base.g_star, base.i_fast, base.i_slow,
        base.lambda2c, base.lambda2c_ratio, eps, base.verdict,
        m_star=base.m_star, tau_tilde_star=tts, cross_check=closed,
    )


def _field_repr(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Verdict):
        return value.name
    return repr(float(value))


def report_text(report: CriterionReport) -> str:
    """Flat key = value block, one line per column."""
    lines = [f"{name} = {_field_repr(getattr(report, name))}" for name in REPORT_COLUMNS]
    if report.cross_check is not None:
        lines += [f"closed_{k} = {_field_repr(v)}" for k, v in sorted(report.cross_check.items())]
    return "\n".join(lines) + "\n"


def report_csv_header() -> str:
    return ",".join(REPORT_COLUMNS)


def report_csv_row(report: CriterionReport) -> str:
    return ",".join(_field_repr(getattr(report, name)) for name in REPORT_COLUMNS)
