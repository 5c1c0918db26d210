"""Front skeleton construction for two-scale reaction-diffusion fronts.

In the sharp-interface limit a planar front decomposes into a slow orbit on
each attracting branch of {F = 0} and a fast interface connecting the
branches at a frozen slow level.  This module locates the jump point where
the two slow manifolds meet, resolves the interface speed, and glues the
pieces into a skeleton consumed by the criteria and spectral modules.

Slow dynamics on a branch (X is the slow coordinate, q = v_X):

    v_X = q,    q_X = -G(f(v), v) - c_tilde * q

with c_tilde = 0 in the order-one time-scale regime, where the flow is
Hamiltonian.  Fast dynamics at level v0 (xi the fast coordinate, p = u_xi):

    u_xi = p,   p_xi = -gamma * p - F(u, v0)

where gamma is the friction product (c*tau, or c_tilde*tau_tilde).
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, simpson, solve_ivp
from scipy.optimize import brentq

from .errors import (
    BisectionBracketFailed,
    DegenerateDenominator,
    EscapeWithoutEvent,
    HiddenConditionViolated,
    NoIntersection,
    NoSolution,
    NotSaddle,
    NumericalError,
    OrderViolated,
    OutOfWindow,
    SaddleMissing,
    ValidationError,
)
from .models import (
    HomogeneousState,
    ModelSpec,
    Side,
    branch_solve,
    branch_window,
    eval_jacobian,
    eval_reaction,
    homogeneous_states,
)

__all__ = [
    "SlowOrbit",
    "JumpPoint",
    "FastJump",
    "FrontSkeleton",
    "TWBifurcation",
    "slow_g",
    "slow_g_prime",
    "slow_saddle",
    "slow_hamiltonian",
    "saddle_manifold_orbit",
    "find_jump_point",
    "fast_speed_shoot",
    "cubic_heteroclinic",
    "build_front",
    "stationary_residuals",
    "tw_bifurcation",
    "write_skeleton_bundle",
    "read_csv_table",
]

# launch offset along the unit eigenvector; halving it moves fronts by
# less than integration tolerance (checked in tests)
_DELTA0 = 1e-7
_IVP_TOL = 1e-10
_QUAD_KW = dict(epsabs=1e-13, epsrel=1e-12, limit=400)


@dataclass(frozen=True)
class SlowOrbit:
    """Sampled slow-manifold arc; samples columns are (X, v, q), X ascending."""

    side: Side
    samples: np.ndarray
    c_tilde: float


@dataclass(frozen=True)
class JumpPoint:
    v_star: float
    q_star: float
    u_star_minus: float
    u_star_plus: float


@dataclass(frozen=True)
class FastJump:
    """Fast interface at a frozen slow level; samples columns are (xi, u, p).

    c_times_tau is the friction product at which the connection exists.
    closed_form, when the reaction is cubic in u, is (K, alpha, beta_minus,
    beta_c, beta_plus) of the explicit tanh profile.
    """

    c_times_tau: float
    samples: np.ndarray
    closed_form: tuple[float, float, float, float, float] | None = None


@dataclass(frozen=True)
class FrontSkeleton:
    model: ModelSpec
    jump: JumpPoint
    fast: FastJump
    slow_minus: SlowOrbit
    slow_plus: SlowOrbit
    speed: float
    eps: float


@dataclass(frozen=True)
class TWBifurcation:
    """Onset data for drift of a stationary front as tau_tilde decreases.

    branch_slope_data holds the ratio v_hat_1 / c_hat obtained from the fast
    energy balance and from the slow one; they agree at tau_tilde_star.
    """

    tau_tilde_star: float
    v_star_stationary: float
    branch_slope_data: tuple[float, float]


def slow_g(model: ModelSpec, side: Side, v: float) -> float:
    """G restricted to the branch: G(f^side(v), v)."""
    u = branch_solve(model, side, v)
    return eval_reaction(model, u, v)[1]


def slow_g_prime(model: ModelSpec, side: Side, v: float) -> float:
    """d/dv of G(f^side(v), v) via implicit differentiation of F = 0."""
    u = branch_solve(model, side, v)
    fu, fv, gu, gv = eval_jacobian(model, u, v)
    return gv - gu * fv / fu


def slow_saddle(model: ModelSpec, side: Side) -> HomogeneousState:
    """The saddle of the slow flow on one branch (the front's end state)."""
    hits = [
        s
        for s in homogeneous_states(model)
        if s.branch_label == side and slow_g_prime(model, side, s.v_bar) < 0.0
    ]
    if not hits:
        raise SaddleMissing(f"no slow-flow saddle on the {side} branch of {model.name!r}")
    if len(hits) > 1:
        stable = [s for s in hits if s.stable]
        if len(stable) != 1:
            raise SaddleMissing(f"ambiguous slow-flow saddle on the {side} branch")
        return stable[0]
    return hits[0]


def slow_hamiltonian(model: ModelSpec, side: Side, v: float, q: float) -> float:
    """Conserved energy of the c_tilde = 0 slow flow, zero at the saddle."""
    lo, hi = branch_window(model, side)
    if not lo < v < hi:
        raise OutOfWindow(f"v = {v!r} outside the {side} branch window ({lo!r}, {hi!r})")
    v_bar = slow_saddle(model, side).v_bar
    w, _ = quad(lambda s: slow_g(model, side, s), v_bar, v, **_QUAD_KW)
    return 0.5 * q * q + w


def _other_side(side: Side) -> Side:
    return "plus" if side == "minus" else "minus"


class _ManifoldArc:
    """Monotone-in-v arc of a saddle manifold with dense evaluation.

    Integrated in forward X for the unstable manifold and in reversed X for
    the stable one, so t >= 0 always runs from the saddle outward.
    """

    def __init__(self, model: ModelSpec, side: Side, which: str, c_tilde: float):
        if which not in ("unstable_of_minus", "stable_of_plus"):
            raise ValidationError(f"unknown manifold selector {which!r}")
        if (which == "unstable_of_minus") != (side == "minus"):
            raise ValidationError(f"manifold {which!r} does not live on the {side} branch")
        self.model = model
        self.side = side
        self.c_tilde = c_tilde
        self.saddle = slow_saddle(model, side)
        self.other = slow_saddle(model, _other_side(side))
        gp = slow_g_prime(model, side, self.saddle.v_bar)
        disc = math.sqrt(c_tilde * c_tilde - 4.0 * gp)
        unstable = which == "unstable_of_minus"
        self.lam = 0.5 * (-c_tilde + disc) if unstable else 0.5 * (-c_tilde - disc)
        # time orientation: dv/dt = tsgn * q
        self.tsgn = 1.0 if unstable else -1.0
        self.direction = 1.0 if self.other.v_bar >= self.saddle.v_bar else -1.0
        span = abs(self.other.v_bar - self.saddle.v_bar)
        norm = math.hypot(1.0, self.lam)
        y0 = [
            self.saddle.v_bar + _DELTA0 * self.direction / norm,
            _DELTA0 * self.direction * self.lam / norm,
        ]

        tsgn, direction = self.tsgn, self.direction
        ct = c_tilde
        wlo, whi = branch_window(model, side)
        # event localization may probe slightly past the window edge; clamp
        # those trial evaluations (the terminal event lands on the edge itself)
        clo = wlo + 1e-12 * (1.0 + abs(wlo)) if math.isfinite(wlo) else wlo
        chi = whi - 1e-12 * (1.0 + abs(whi)) if math.isfinite(whi) else whi

        def rhs(t, y):
            v, q = y
            g = slow_g(model, side, min(max(v, clo), chi))
            return (tsgn * q, tsgn * (-g - ct * q))

        v_far = self.other.v_bar + 0.25 * direction * span
        rate = abs(self.lam)
        q_cap = 40.0 * (1.0 + span) * (1.0 + rate)
        t_cap = 3.0 * (math.log((span + 1.0) / _DELTA0) + 40.0) / max(rate, 1e-6)

        def ev_far(t, y):
            return y[0] - v_far

        def ev_turn(t, y):
            return y[1]

        def ev_qcap(t, y):
            return abs(y[1]) - q_cap

        events = [ev_far, ev_turn, ev_qcap]
        edge = whi if direction > 0 else wlo
        if math.isfinite(edge):
            def ev_edge(t, y):
                return y[0] - edge

            events.append(ev_edge)
        for ev in events:
            ev.terminal = True
            ev.direction = 0
        sol = solve_ivp(
            rhs, (0.0, t_cap), y0, method="RK45", rtol=_IVP_TOL, atol=_IVP_TOL,
            dense_output=True, events=events,
        )
        if sol.status < 0:
            raise NumericalError(f"slow-manifold integration failed: {sol.message}")
        if sol.status == 0:
            raise EscapeWithoutEvent(
                f"slow-manifold orbit on the {side} branch hit the time cap"
            )
        self.sol = sol.sol
        self.t_end = float(sol.t[-1])
        self.v_start = float(y0[0])
        end = self.sol(self.t_end)
        self.v_end = float(end[0])
        # dense lookup tables, v monotone in t until the terminating event
        ts = np.linspace(0.0, self.t_end, 4097)
        ys = self.sol(ts)
        self._tab_t = ts
        self._tab_v = ys[0]
        self._tab_q = ys[1]

    def v_range(self) -> tuple[float, float]:
        a, b = self.v_start, self.v_end
        return (a, b) if a <= b else (b, a)

    def t_of_v(self, v: float) -> float:
        lo, hi = self.v_range()
        if not lo <= v <= hi:
            raise ValueError(f"v = {v!r} not covered by the arc [{lo!r}, {hi!r}]")
        xs = self._tab_v if self.direction > 0 else self._tab_v[::-1]
        ts = self._tab_t if self.direction > 0 else self._tab_t[::-1]
        t = float(np.interp(v, xs, ts))
        scale = max(1.0, abs(v))
        for _ in range(60):
            y = self.sol(t)
            err = float(y[0]) - v
            if abs(err) < 1e-14 * scale:
                break
            dv = self.tsgn * float(y[1])
            if dv == 0.0:
                break
            t = min(max(t - err / dv, 0.0), self.t_end)
        return t

    def q_at(self, v: float) -> float:
        return float(self.sol(self.t_of_v(v))[1])

    def orbit(self, n_samples: int = 1600) -> SlowOrbit:
        ts = np.linspace(0.0, self.t_end, n_samples)
        ys = self.sol(ts)
        xs = self.tsgn * ts
        samples = np.column_stack([xs, ys[0], ys[1]])
        if self.tsgn < 0:
            samples = samples[::-1]
        return SlowOrbit(side=self.side, samples=samples, c_tilde=self.c_tilde)

    def trimmed_orbit(self, v_stop: float, n_samples: int = 1600) -> SlowOrbit:
        """Arc from the saddle to v_stop, X shifted so the stop sits at X=0."""
        t_star = self.t_of_v(v_stop)
        ts = np.linspace(0.0, t_star, n_samples)
        ys = self.sol(ts)
        if self.tsgn > 0:
            xs = ts - t_star
            samples = np.column_stack([xs, ys[0], ys[1]])
        else:
            xs = t_star - ts
            samples = np.column_stack([xs, ys[0], ys[1]])[::-1]
        return SlowOrbit(side=self.side, samples=samples, c_tilde=self.c_tilde)

    def weighted_energy(self, v_stop: float) -> float:
        """integral of q^2 e^{c_tilde X} dX from the saddle to v_stop, X=0 there.

        Includes the analytic tail beyond the launch offset.  The weighted
        tail always converges: its net rate is 2*lam + c_tilde =
        +-sqrt(c_tilde^2 - 4 g') in the two cases, positive toward the saddle.
        """
        t_star = self.t_of_v(v_stop)
        ct = self.c_tilde

        def w(t):
            y = self.sol(t)
            # X = tsgn * t - tsgn * t_star  (jump at X = 0)
            x = self.tsgn * (t - t_star)
            return float(y[1]) ** 2 * math.exp(ct * x)

        val, _ = quad(w, 0.0, t_star, **_QUAD_KW)
        y0 = self.sol(0.0)
        q0 = float(y0[1])
        x0 = self.tsgn * (0.0 - t_star)
        net = math.sqrt(ct * ct - 4.0 * slow_g_prime(self.model, self.side, self.saddle.v_bar))
        tail = q0 * q0 * math.exp(ct * x0) / net
        return val + tail


def saddle_manifold_orbit(
    model: ModelSpec, side: Side, which: str, c_tilde: float, n_samples: int = 1600
) -> SlowOrbit:
    """Sampled saddle-manifold arc, integrated until a stopping event."""
    return _ManifoldArc(model, side, which, c_tilde).orbit(n_samples)


def find_jump_point(model: ModelSpec, c_tilde: float) -> list[JumpPoint]:
    """All transversal intersections of the two projected slow manifolds.

    Both arcs are parameterized by v; roots of q_unstable(v) - q_stable(v)
    are bracketed on a common grid and refined on the dense solutions.  At
    c_tilde = 0 the root is polished on the energy mismatch, whose zeros
    are the same level-set matches.
    """
    arc_u = _ManifoldArc(model, "minus", "unstable_of_minus", c_tilde)
    arc_s = _ManifoldArc(model, "plus", "stable_of_plus", c_tilde)
    ulo, uhi = arc_u.v_range()
    slo, shi = arc_s.v_range()
    lo, hi = max(ulo, slo), min(uhi, shi)
    if not lo < hi:
        raise HiddenConditionViolated(
            f"slow-manifold arcs cover disjoint v ranges ({ulo!r},{uhi!r}) and ({slo!r},{shi!r})"
        )
    pad = 1e-9 * (hi - lo)
    grid = np.linspace(lo + pad, hi - pad, 1201)
    qu = _interp_q(arc_u, grid)
    qs = _interp_q(arc_s, grid)
    gap = qu - qs

    def gap_at(v):
        return arc_u.q_at(v) - arc_s.q_at(v)

    crossings: list[float] = []
    for i in range(len(grid) - 1):
        a, b = gap[i], gap[i + 1]
        if a == 0.0:
            crossings.append(grid[i])
        elif a * b < 0.0:
            # re-check the bracket on the dense solutions: near a tangency the
            # table interpolation can fabricate a sign change
            ga, gb = gap_at(grid[i]), gap_at(grid[i + 1])
            if ga == 0.0:
                crossings.append(grid[i])
            elif ga * gb < 0.0:
                crossings.append(
                    brentq(gap_at, grid[i], grid[i + 1], xtol=1e-13, rtol=8.9e-16)
                )
    if gap[-1] == 0.0:
        crossings.append(grid[-1])
    # dedupe nearly-identical roots from adjacent panels
    roots: list[float] = []
    for v in sorted(crossings):
        if not roots or v - roots[-1] > 1e-9 * (hi - lo):
            roots.append(v)
    if not roots:
        qscale = max(np.max(np.abs(qu)), np.max(np.abs(qs)), 1e-300)
        k = int(np.argmin(np.abs(gap)))
        tangent = 0 < k < len(grid) - 1 and abs(gap[k]) < 1e-3 * qscale
        raise NoIntersection(
            f"slow manifolds of {model.name!r} do not intersect at c_tilde = {c_tilde!r}",
            tangency=tangent,
        )
    out: list[JumpPoint] = []
    for v in roots:
        if c_tilde == 0.0:
            v = _polish_energy_match(model, arc_u, arc_s, v, hi - lo)
            w_minus = _potential(model, "minus", arc_u.saddle.v_bar, v)
            q_star = arc_u.direction * math.sqrt(max(0.0, -2.0 * w_minus))
        else:
            q_star = 0.5 * (arc_u.q_at(v) + arc_s.q_at(v))
        try:
            um = branch_solve(model, "minus", v)
            up = branch_solve(model, "plus", v)
        except OutOfWindow as exc:
            raise HiddenConditionViolated(str(exc)) from exc
        out.append(JumpPoint(v_star=v, q_star=q_star, u_star_minus=um, u_star_plus=up))
    return out


def _interp_q(arc: _ManifoldArc, grid: np.ndarray) -> np.ndarray:
    vs, qs, ts = arc._tab_v, arc._tab_q, arc._tab_t
    if arc.direction < 0:
        vs, qs = vs[::-1], qs[::-1]
    return np.interp(grid, vs, qs)


def _potential(model: ModelSpec, side: Side, v_bar: float, v: float) -> float:
    val, _ = quad(lambda s: slow_g(model, side, s), v_bar, v, **_QUAD_KW)
    return val


def _polish_energy_match(model, arc_u, arc_s, v0: float, span: float) -> float:
    def phi(v):
        return _potential(model, "minus", arc_u.saddle.v_bar, v) - _potential(
            model, "plus", arc_s.saddle.v_bar, v
        )

    w = 1e-6 * span
    lo, hi = arc_u.v_range()
    slo, shi = arc_s.v_range()
    lo, hi = max(lo, slo), min(hi, shi)
    for _ in range(10):
        a, b = max(v0 - w, lo), min(v0 + w, hi)
        fa, fb = phi(a), phi(b)
        if fa == 0.0:
            return a
        if fb == 0.0:
            return b
        if fa * fb < 0.0:
            return brentq(phi, a, b, xtol=1e-15, rtol=8.9e-16)
        w *= 4.0
    return v0


def _fast_saddles(model: ModelSpec, v0: float) -> tuple[float, float]:
    try:
        um = branch_solve(model, "minus", v0)
        up = branch_solve(model, "plus", v0)
    except OutOfWindow as exc:
        raise NotSaddle(f"branch fold reached at v = {v0!r}: {exc}") from exc
    fum = eval_jacobian(model, um, v0)[0]
    fup = eval_jacobian(model, up, v0)[0]
    if fum >= 0.0 or fup >= 0.0:
        raise NotSaddle(f"rest state of the fast flow at v = {v0!r} is not a saddle")
    if up - um <= 1e-10 * max(1.0, abs(um), abs(up)):
        raise NotSaddle(f"fast rest states merge at v = {v0!r}")
    return um, up


def _shoot_half(model, v0, gamma, start, section, forward):
    """Integrate one fast separatrix to the section; returns (p, t) there.

    p is 0 when the separatrix turns around before reaching the section.
    forward=True follows the unstable manifold of the left saddle; otherwise
    the stable manifold of the right saddle is traced in reversed xi.
    """
    fu = eval_jacobian(model, start, v0)[0]
    disc = math.sqrt(gamma * gamma - 4.0 * fu)
    nu = 0.5 * (-gamma + disc) if forward else 0.5 * (-gamma - disc)
    norm = math.hypot(1.0, nu)
    sgn = 1.0 if forward else -1.0
    u0 = start + sgn * _DELTA0 / norm
    p0 = sgn * _DELTA0 * nu / norm  # > 0 both ways: u increases along the connection

    def rhs(t, y):
        u, p = y
        f = eval_reaction(model, u, v0)[0]
        return (sgn * p, sgn * (-gamma * p - f))

    def ev_sec(t, y):
        return y[0] - section

    ev_sec.terminal = True
    ev_sec.direction = sgn

    def ev_turn(t, y):
        return y[1]

    ev_turn.terminal = True
    ev_turn.direction = -1

    span = abs(section - start)
    t_cap = 6.0 * (math.log((span + 1.0) / _DELTA0) + 40.0) / max(abs(nu), 1e-6)
    sol = solve_ivp(
        rhs, (0.0, t_cap), [u0, p0], method="RK45", rtol=_IVP_TOL, atol=_IVP_TOL,
        dense_output=True, events=[ev_sec, ev_turn],
    )
    if sol.status < 0:
        raise NumericalError(f"fast shooting failed: {sol.message}")
    if sol.status == 0:
        # an overdamped trial friction turns the middle rest state into a
        # node that swallows the separatrix: p decays to 0 without ever
        # crossing it, so neither event can fire.  The section is then
        # unreachable at this friction, which scores like a turnaround.
        u_f, p_f = float(sol.y[0, -1]), float(sol.y[1, -1])
        p_max = float(np.max(np.abs(sol.y[1])))
        if sgn * (section - u_f) > 0.0 and abs(p_f) <= 1e-3 * p_max:
            return 0.0, sol
        raise EscapeWithoutEvent("fast separatrix reached the time cap before the section")
    if len(sol.t_events[0]):
        return float(sol.y_events[0][0][1]), sol
    return 0.0, sol


def _shoot_score(model, v0, gamma, um, up):
    mid = 0.5 * (um + up)
    p_u, _ = _shoot_half(model, v0, gamma, um, mid, forward=True)
    p_s, _ = _shoot_half(model, v0, gamma, up, mid, forward=False)
    return p_u - p_s


def _shoot_speed(model: ModelSpec, v0: float) -> tuple[float, float, float]:
    um, up = _fast_saddles(model, v0)
    fum = eval_jacobian(model, um, v0)[0]
    fup = eval_jacobian(model, up, v0)[0]
    g0 = math.sqrt(2.0 * max(-fum, -fup))
    lo, hi = -g0, g0
    d_lo = _shoot_score(model, v0, lo, um, up)
    tries = 0
    while d_lo <= 0.0:
        lo *= 2.0
        d_lo = _shoot_score(model, v0, lo, um, up)
        tries += 1
        if tries > 40:
            raise BisectionBracketFailed("no friction bracket below the connection")
    d_hi = _shoot_score(model, v0, hi, um, up)
    tries = 0
    while d_hi >= 0.0:
        hi *= 2.0
        d_hi = _shoot_score(model, v0, hi, um, up)
        tries += 1
        if tries > 40:
            raise BisectionBracketFailed("no friction bracket above the connection")
    gamma = brentq(
        lambda g: _shoot_score(model, v0, g, um, up), lo, hi, xtol=1e-13, rtol=8.9e-16,
        maxiter=300,
    )
    return gamma, um, up


def fast_speed_shoot(model: ModelSpec, v0: float, n_samples: int = 1600) -> FastJump:
    """Fast connection at level v0 by shooting on the friction coefficient.

    The two separatrices are matched on the section u = (u-* + u+*)/2; the
    returned samples are the two halves glued there, with xi = 0 at the
    section crossing.
    """
    gamma, um, up = _shoot_speed(model, v0)
    mid = 0.5 * (um + up)
    p_u, sol_f = _shoot_half(model, v0, gamma, um, mid, forward=True)
    p_s, sol_b = _shoot_half(model, v0, gamma, up, mid, forward=False)
    if p_u == 0.0 or p_s == 0.0:
        raise NumericalError("fast connection lost at the matched friction value")
    t_f = float(sol_f.t_events[0][0])
    t_b = float(sol_b.t_events[0][0])
    n_half = max(n_samples // 2, 8)
    ts_f = np.linspace(0.0, t_f, n_half)
    ys_f = sol_f.sol(ts_f)
    left = np.column_stack([ts_f - t_f, ys_f[0], ys_f[1]])
    ts_b = np.linspace(0.0, t_b, n_half)
    ys_b = sol_b.sol(ts_b)
    right = np.column_stack([t_b - ts_b, ys_b[0], ys_b[1]])[::-1]
    samples = np.vstack([left, right[1:]])
    return FastJump(c_times_tau=gamma, samples=samples, closed_form=None)


def cubic_heteroclinic(
    alpha: float, beta_minus: float, beta_c: float, beta_plus: float,
    n_samples: int = 1601,
) -> FastJump:
    """Explicit fast connection for F = -alpha (u-b-)(u-bc)(u-b+).

    The profile is u(xi) = m + r tanh(K r xi) with m, r the midpoint and
    half-gap of the outer roots and K = sqrt(2 alpha)/2; the friction
    product is sqrt(2 alpha) (bc - m).
    """
    if alpha <= 0.0:
        raise ValidationError(f"alpha must be positive, got {alpha!r}")
    if not beta_minus < beta_c < beta_plus:
        raise OrderViolated(
            f"cubic roots must satisfy beta_minus < beta_c < beta_plus, got "
            f"({beta_minus!r}, {beta_c!r}, {beta_plus!r})"
        )
    k = 0.5 * math.sqrt(2.0 * alpha)
    r = 0.5 * (beta_plus - beta_minus)
    m = 0.5 * (beta_plus + beta_minus)
    ct = math.sqrt(2.0 * alpha) * (beta_c - m)
    kr = k * r
    half = 12.0 / kr
    xs = np.linspace(-half, half, n_samples)
    us = m + r * np.tanh(kr * xs)
    ps = kr * r / np.cosh(kr * xs) ** 2
    samples = np.column_stack([xs, us, ps])
    return FastJump(
        c_times_tau=ct, samples=samples,
        closed_form=(k, alpha, beta_minus, beta_c, beta_plus),
    )


def _fast_jump_at(model: ModelSpec, v_star: float) -> FastJump:
    if model.fast_cubic is not None:
        try:
            alpha, bm, bc, bp = model.fast_cubic(v_star)
        except OutOfWindow as exc:
            raise NotSaddle(str(exc)) from exc
        return cubic_heteroclinic(alpha, bm, bc, bp)
    return fast_speed_shoot(model, v_star)


def _fast_product(model: ModelSpec, v_star: float) -> float:
    """Friction product of the fast connection, without sampling a profile."""
    if model.fast_cubic is not None:
        try:
            alpha, bm, bc, bp = model.fast_cubic(v_star)
        except OutOfWindow as exc:
            raise NotSaddle(str(exc)) from exc
        return math.sqrt(2.0 * alpha) * (bc - 0.5 * (bm + bp))
    return _shoot_speed(model, v_star)[0]


def _assemble(model, jump, fast, c_tilde, speed, eps, n_samples=1600) -> FrontSkeleton:
    arc_u = _ManifoldArc(model, "minus", "unstable_of_minus", c_tilde)
    arc_s = _ManifoldArc(model, "plus", "stable_of_plus", c_tilde)
    sm = arc_u.trimmed_orbit(jump.v_star, n_samples)
    sp = arc_s.trimmed_orbit(jump.v_star, n_samples)
    return FrontSkeleton(
        model=model, jump=jump, fast=fast, slow_minus=sm, slow_plus=sp,
        speed=speed, eps=eps,
    )


def _scan_bound(model: ModelSpec) -> float:
    rates = []
    for side in ("minus", "plus"):
        st = slow_saddle(model, side)
        rates.append(math.sqrt(-slow_g_prime(model, side, st.v_bar)))
    return 4.0 * sum(rates)


def build_front(model: ModelSpec, eps: float, n_samples: int = 1600) -> list[FrontSkeleton]:
    """All front skeletons of the model, one per admissible jump point.

    Order-one time-scale regime: the jump level does not depend on the
    speed, so it is found at c_tilde = 0 and the speed follows from the
    fast connection.  Small time-scale regime: the jump level and the
    speed are coupled; the scalar condition c_tilde*tau_tilde = C(V(c_tilde))
    is scanned on a speed grid and each sign change is solved by damped
    fixed-point iteration with bisection fallback.
    """
    if eps <= 0.0:
        raise ValidationError(f"eps must be positive, got {eps!r}")
    if model.tau_regime.kind == "order_one":
        tau = model.tau_regime.value
        out = []
        for jp in find_jump_point(model, 0.0):
            fast = _fast_jump_at(model, jp.v_star)
            speed = fast.c_times_tau / tau
            out.append(_assemble(model, jp, fast, 0.0, speed, eps, n_samples))
        return out

    tau_tilde = model.tau_regime.value
    c_max = _scan_bound(model)
    nodes = np.linspace(-c_max, c_max, 64)

    def residuals(c: float) -> list[tuple[float, float]] | None:
        """(psi, v_star) per jump point at speed c, or None when no jump."""
        try:
            jumps = find_jump_point(model, c)
        except (NoIntersection, HiddenConditionViolated):
            return None
        vals = []
        for jp in jumps:
            try:
                gamma = _fast_product(model, jp.v_star)
            except NotSaddle:
                continue
            vals.append((c * tau_tilde - gamma, jp.v_star))
        return vals or None

    table = [residuals(c) for c in nodes]
    roots: list[float] = []
    for i in range(len(nodes) - 1):
        va, vb = table[i], table[i + 1]
        if va is None or vb is None or len(va) != len(vb):
            continue
        for j in range(len(va)):
            pa, pb = va[j][0], vb[j][0]
            if pa == 0.0:
                roots.append(float(nodes[i]))
                continue
            if pa * pb >= 0.0:
                continue
            roots.append(_solve_speed_branch(residuals, float(nodes[i]), float(nodes[i + 1]), j, tau_tilde))
    if table[-1] is not None and any(p == 0.0 for p, _ in table[-1]):
        roots.append(float(nodes[-1]))
    if not roots:
        raise NoSolution(
            f"no self-consistent front speed for {model.name!r} on |c_tilde| <= {c_max!r}"
        )
    uniq: list[float] = []
    for c in sorted(roots):
        if not uniq or c - uniq[-1] > 1e-8 * max(1.0, c_max):
            uniq.append(c)
    out = []
    for c in uniq:
        jumps = find_jump_point(model, c)
        best = min(jumps, key=lambda jp: abs(c * tau_tilde - _fast_product(model, jp.v_star)))
        fast = _fast_jump_at(model, best.v_star)
        out.append(_assemble(model, best, fast, c, c, eps, n_samples))
    return out


def _solve_speed_branch(residuals, a, b, j, tau_tilde) -> float:
    """Root of psi_j on the bracket [a, b] by damped iteration with fallback.

    A damped step is accepted only while it halves the residual; otherwise
    the bracket midpoint is taken, so the bracket shrinks geometrically.
    """

    def psi_at(c):
        vals = residuals(c)
        if vals is None or len(vals) <= j:
            return None
        return vals[j][0]

    pa = psi_at(a)
    c = 0.5 * (a + b)
    prev = math.inf
    for _ in range(200):
        psi = psi_at(c)
        if psi is None:
            b = c
            c = 0.5 * (a + b)
            prev = math.inf
            continue
        if abs(psi) < 1e-12 * max(1.0, tau_tilde) or b - a < 1e-13 * max(1.0, abs(a), abs(b)):
            return c
        if (psi > 0.0) == (pa > 0.0):
            a = c
        else:
            b = c
        gamma = c * tau_tilde - psi
        c_next = c + 0.5 * (gamma / tau_tilde - c)
        if not a < c_next < b or abs(psi) > 0.5 * abs(prev):
            c_next = 0.5 * (a + b)
        prev = psi
        c = c_next
    return c


def stationary_residuals(model: ModelSpec) -> tuple[float, float]:
    """Obstructions to a standing front: fast and slow energy mismatches.

    fast: integral of F(u, v_star) between the jump's rest states.
    slow: potential difference of the two slow flows at v_star.
    Both vanish exactly when a stationary front exists.
    """
    jp = find_jump_point(model, 0.0)[0]
    fast, _ = quad(
        lambda u: eval_reaction(model, u, jp.v_star)[0],
        jp.u_star_minus, jp.u_star_plus, **_QUAD_KW,
    )
    vbm = slow_saddle(model, "minus").v_bar
    vbp = slow_saddle(model, "plus").v_bar
    slow = _potential(model, "minus", vbm, jp.v_star) - _potential(
        model, "plus", vbp, jp.v_star
    )
    return fast, slow


def tw_bifurcation(model: ModelSpec) -> TWBifurcation:
    """Drift onset of a stationary front in the small time-scale regime.

    Balancing the energy gained along the fast interface against the energy
    dissipated on the slow arcs gives two expressions for the slope of the
    bifurcating branch; tau_tilde_star equates them.
    """
    fast_res, slow_res = stationary_residuals(model)
    if abs(fast_res) > 1e-7 or abs(slow_res) > 1e-7:
        raise NoSolution(
            f"front of {model.name!r} is not stationary: residuals "
            f"({fast_res!r}, {slow_res!r})"
        )
    jp = find_jump_point(model, 0.0)[0]
    f_st = _stationary_f_star(model, jp)
    g_st = (
        eval_reaction(model, jp.u_star_plus, jp.v_star)[1]
        - eval_reaction(model, jp.u_star_minus, jp.v_star)[1]
    )
    i_f = _stationary_i_fast(model, jp)
    i_s = _stationary_i_slow(model, jp)
    denom = g_st * i_f
    scale = abs(f_st * i_s) + abs(denom)
    if abs(denom) <= 1e-12 * max(scale, 1e-300):
        raise DegenerateDenominator(
            f"fast energy-balance denominator vanishes: G* I_f = {denom!r}"
        )
    tau_star = -f_st * i_s / denom
    check = f_st * i_s + tau_star * denom
    if not abs(check) <= 1e-8 * max(1.0, scale):
        raise NumericalError(f"energy-balance closure failed: {check!r}")
    slopes = (-tau_star * i_f / f_st, i_s / g_st)
    return TWBifurcation(
        tau_tilde_star=tau_star, v_star_stationary=jp.v_star, branch_slope_data=slopes
    )


def _stationary_f_star(model: ModelSpec, jp: JumpPoint) -> float:
    # with unit weight the profile integrates out: integral of F_v du
    val, _ = quad(
        lambda u: eval_jacobian(model, u, jp.v_star)[1],
        jp.u_star_minus, jp.u_star_plus, **_QUAD_KW,
    )
    return val


def _stationary_i_fast(model: ModelSpec, jp: JumpPoint) -> float:
    fast = _fast_jump_at(model, jp.v_star)
    if fast.closed_form is not None:
        k, alpha, bm, bc, bp = fast.closed_form
        r = 0.5 * (bp - bm)
        return (4.0 / 3.0) * k * r ** 3
    xs, ps = fast.samples[:, 0], fast.samples[:, 2]
    return float(simpson(ps * ps, x=xs))


def _stationary_i_slow(model: ModelSpec, jp: JumpPoint) -> float:
    arc_u = _ManifoldArc(model, "minus", "unstable_of_minus", 0.0)
    arc_s = _ManifoldArc(model, "plus", "stable_of_plus", 0.0)
    return arc_u.weighted_energy(jp.v_star) + arc_s.weighted_energy(jp.v_star)


def write_skeleton_bundle(skeleton: FrontSkeleton, directory: str) -> list[str]:
    """Write the three skeleton components as CSV files; returns the paths."""
    os.makedirs(directory, exist_ok=True)
    jobs = [
        ("slow_minus.csv", ("X", "v", "q"), skeleton.slow_minus.samples),
        ("fast.csv", ("xi", "u", "p"), skeleton.fast.samples),
        ("slow_plus.csv", ("X", "v", "q"), skeleton.slow_plus.samples),
    ]
    paths = []
    for name, header, rows in jobs:
        path = os.path.join(directory, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(repr(float(x)) for x in row) + "\n")
        paths.append(path)
    return paths


def read_csv_table(path: str) -> tuple[tuple[str, ...], np.ndarray]:
    """Read back a CSV written by write_skeleton_bundle, bit-exact."""
    with open(path, "r", encoding="utf-8") as fh:
        header = tuple(fh.readline().strip().split(","))
        rows = [[float(tok) for tok in line.strip().split(",")] for line in fh if line.strip()]
    return header, np.array(rows, dtype=float)
