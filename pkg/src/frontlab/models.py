"""Model catalog: reaction pairs, branch solvers, and homogeneous states.

A model is the pair of reaction terms (F, G) of

    tau*U_t = Lap(U) + F(U, V),    V_t = (1/eps^2)*Lap(V) + G(U, V),

together with the branch structure of the nullcline set {F(u, v) = 0}. Each
branch is a graph u = f(v) on a v-window on which F_u < 0 (normal
hyperbolicity), except the "center" branch which is kept for root bookkeeping
only. The catalog ships:

    "bcde"        F = -mu1*U + U^2*(1 - mu2*U)*V,  G = mu3 - V - U^2*V
    "fotm"        F = -U + U*(1 + mu1*U)^2*(1 - U)*V,
                  G = mu2 - mu3*V/(1 + mu4*U) - mu5*U*(1 + mu1*U)^2*V
    "fhn"         F = -(u - f-)(u - fc)(u - f+),  G = U - mu1*V,
                  f+-(v) = +-1 + mu2*v, fc(v) = mu3*v
    "cylindrical" F = U^2*(1 - U) - U*V,  G = mu1*U*V + mu2*V - mu3*V^2
    "user-cubic"  F = -alpha(v)*(u - b-(v))*(u - bc(v))*(u - b+(v)) with
                  polynomial coefficient functions, G a polynomial in (u, v)

Every catalog entry records, per branch: the analytic solver, the normal
hyperbolicity window (possibly unbounded), and a finite scan interval that
provably contains every root of G(f(v), v) (used by homogeneous_states).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Mapping, Sequence

import numpy as np

from .errors import OutOfWindow, RootFindingFailed, ValidationError

__all__ = [
    "TauRegime",
    "BranchDef",
    "ModelSpec",
    "HomogeneousState",
    "make_model",
    "catalog_names",
    "eval_reaction",
    "eval_jacobian",
    "branch_solve",
    "branch_window",
    "homogeneous_states",
    "homogeneous_stability",
    "stability_conditions",
]

Side = Literal["minus", "plus", "center"]

_SUBDIVISIONS = 256


@dataclass(frozen=True)
class TauRegime:
    """Time-scale regime of the U equation.

    kind "order_one" holds tau itself; kind "order_eps" holds tau_tilde with
    tau = eps*tau_tilde (and front speeds reported as c_tilde = eps*c).
    """

    kind: Literal["order_one", "order_eps"]
    value: float

    def __post_init__(self):
        if self.value <= 0:
            raise ValidationError(f"tau regime value must be positive, got {self.value}")

    @classmethod
    def order_one(cls, tau: float = 1.0) -> "TauRegime":
        return cls("order_one", tau)

    @classmethod
    def order_eps(cls, tau_tilde: float) -> "TauRegime":
        return cls("order_eps", tau_tilde)


@dataclass(frozen=True)
class BranchDef:
    """One branch u = f(v) of {F = 0}.

    window: open interval where the branch is defined and, for minus/plus,
        normally hyperbolic (F_u < 0). Ends may be +-inf.
    scan: finite closed sub-interval guaranteed to contain every root of
        G(f(v), v); homogeneous_states brackets only inside it.
    """

    label: Side
    window: tuple[float, float]
    scan: tuple[float, float]
    solve: Callable[[float], float]

    def contains(self, v: float) -> bool:
        return self.window[0] < v < self.window[1]


@dataclass(frozen=True)
class ModelSpec:
    """Immutable model record; all operations on it are pure."""

    name: str
    params: tuple[tuple[str, float], ...]
    tau_regime: TauRegime
    reaction: Callable[[float, float], tuple[float, float]]
    jacobian: Callable[[float, float], tuple[float, float, float, float]]
    roots_of_f: Callable[[float], tuple[float, ...]]
    branch_defs: Mapping[Side, BranchDef]
    # (alpha, beta_minus, beta_c, beta_plus) of the fast cubic at level v,
    # or None when F is not cubic in u (fotm)
    fast_cubic: Callable[[float], tuple[float, float, float, float]] | None = None

    @property
    def params_dict(self) -> dict[str, float]:
        return dict(self.params)

    def param(self, key: str) -> float:
        return self.params_dict[key]


@dataclass(frozen=True)
class HomogeneousState:
    u_bar: float
    v_bar: float
    branch_label: Side | Literal["other"]
    stable: bool


def eval_reaction(model: ModelSpec, u: float, v: float) -> tuple[float, float]:
    """F(u, v; mu) and G(u, v; mu), exactly as the catalog entry defines them."""
    return model.reaction(u, v)


def eval_jacobian(model: ModelSpec, u: float, v: float) -> tuple[float, float, float, float]:
    """(F_u, F_v, G_u, G_v) at (u, v), analytic."""
    return model.jacobian(u, v)


def branch_window(model: ModelSpec, side: Side) -> tuple[float, float]:
    if side not in model.branch_defs:
        raise OutOfWindow(f"model {model.name!r} has no {side!r} branch")
    return model.branch_defs[side].window


def branch_solve(model: ModelSpec, side: Side, v: float) -> float:
    """u = f^side(v) for v inside the branch window."""
    if side not in model.branch_defs:
        raise OutOfWindow(f"model {model.name!r} has no {side!r} branch")
    branch = model.branch_defs[side]
    if not branch.contains(v):
        raise OutOfWindow(
            f"v={v!r} outside {side} branch window {branch.window} of model {model.name!r}"
        )
    return branch.solve(v)


# ---------------------------------------------------------------------------
# homogeneous states and their stability
# ---------------------------------------------------------------------------

def _bracketed_roots(g: Callable[[float], float], lo: float, hi: float) -> list[float]:
    """Roots of g on [lo, hi] by sign-change bracketing over _SUBDIVISIONS
    panels, refined with brentq. A panel endpoint sitting exactly on a root is
    accepted directly. Raises RootFindingFailed if a near-zero panel refuses
    to refine (tangency), reporting the roots found so far."""
    from scipy.optimize import brentq

    vs = np.linspace(lo, hi, _SUBDIVISIONS + 1)
    gs = np.array([g(v) for v in vs])
    scale = max(1e-300, float(np.max(np.abs(gs))))
    roots: list[float] = []
    for i in range(_SUBDIVISIONS):
        a, b, ga, gb = vs[i], vs[i + 1], gs[i], gs[i + 1]
        if ga == 0.0:
            roots.append(float(a))
        elif gb != 0.0 and ga * gb < 0.0:
            roots.append(float(brentq(g, a, b, xtol=1e-14, rtol=8.9e-16)))
    if gs[-1] == 0.0:
        roots.append(float(vs[-1]))
    # tangency sweep: a node dipping to ~0 between same-signed neighbours is a
    # root no subdivision depth can bracket
    h = (hi - lo) / _SUBDIVISIONS
    for i in range(1, _SUBDIVISIONS):
        if gs[i - 1] * gs[i + 1] > 0.0 and abs(gs[i]) < 1e-11 * scale:
            if all(abs(vs[i] - r) > h for r in roots):
                raise RootFindingFailed(
                    f"tangent root near v={vs[i]:.6g} cannot be bracketed", partial=roots
                )
    return roots


def stability_conditions(model: ModelSpec, u_bar: float, v_bar: float) -> bool:
    """The eps-independent stability conditions at a homogeneous state:

        F_u + tau*G_v < 0,   F_u*G_v - F_v*G_u > 0,   F_u < 0.

    In the small-tau regime tau -> 0 and the first condition follows from the
    third, leaving the pair that makes (V_bar, 0) a saddle of the slow flow.
    """
    fu, fv, gu, gv = model.jacobian(u_bar, v_bar)
    det = fu * gv - fv * gu
    if model.tau_regime.kind == "order_one":
        tau = model.tau_regime.value
        return fu + tau * gv < 0 and det > 0 and fu < 0
    return det > 0 and fu < 0


def homogeneous_stability(
    state: HomogeneousState, model: ModelSpec, eps: float, k: float, l: float
) -> tuple[complex, complex]:
    """Both roots of the dispersion quadratic at wavenumbers (k, l):

        tau*lam^2 - [(F_u + tau*G_v) - (tau + eps^2)*K2/eps^2]*lam
            + [(F_u*G_v - F_v*G_u) - (F_u + eps^2*G_v)*K2/eps^2 + K2^2/eps^2] = 0

    with K2 = k^2 + l^2 and tau = eps*tau_tilde in the small-tau regime.
    """
    if eps <= 0:
        raise ValidationError("eps must be positive")
    fu, fv, gu, gv = model.jacobian(state.u_bar, state.v_bar)
    if model.tau_regime.kind == "order_one":
        tau = model.tau_regime.value
    else:
        tau = eps * model.tau_regime.value
    k2 = k * k + l * l
    b = (fu + tau * gv) - (tau + eps * eps) * k2 / (eps * eps)
    c = (fu * gv - fv * gu) - (fu + eps * eps * gv) * k2 / (eps * eps) + k2 * k2 / (eps * eps)
    disc = complex(b * b - 4.0 * tau * c) ** 0.5
    lam1 = (b + disc) / (2.0 * tau)
    lam2 = (b - disc) / (2.0 * tau)
    return lam1, lam2


def homogeneous_states(model: ModelSpec) -> list[HomogeneousState]:
    """All simultaneous roots of F = G = 0 found per branch.

    Each branch's G(f(v), v) is root-bracketed on its finite scan interval
    (analytic root bounds stored per catalog entry). States on the center
    branch, and any state violating normal hyperbolicity, are labelled
    "other"; stability uses the eps-independent conditions.
    """
    states: list[HomogeneousState] = []
    partial_error: RootFindingFailed | None = None
    for label, branch in model.branch_defs.items():
        lo, hi = branch.scan

        def g(v: float, _b=branch) -> float:
            return model.reaction(_b.solve(v), v)[1]

        try:
            roots = _bracketed_roots(g, lo, hi)
        except RootFindingFailed as err:
            partial_error = err
            roots = list(err.partial or [])
        for v_bar in roots:
            u_bar = branch.solve(v_bar)
            fu = model.jacobian(u_bar, v_bar)[0]
            out_label: Side | Literal["other"] = label if (label != "center" and fu < 0) else "other"
            if any(
                abs(s.u_bar - u_bar) < 1e-9 and abs(s.v_bar - v_bar) < 1e-9 for s in states
            ):
                continue
            states.append(
                HomogeneousState(
                    u_bar=float(u_bar),
                    v_bar=float(v_bar),
                    branch_label=out_label,
                    stable=stability_conditions(model, u_bar, v_bar),
                )
            )
    if partial_error is not None:
        raise RootFindingFailed(str(partial_error), partial=states)
    return states


# ---------------------------------------------------------------------------
# catalog entries
# ---------------------------------------------------------------------------

def _merge_params(
    defaults: Sequence[tuple[str, float]], supplied: Mapping[str, float] | None
) -> tuple[tuple[str, float], ...]:
    merged = dict(defaults)
    for key, value in (supplied or {}).items():
        if key not in merged:
            raise ValidationError(f"unknown parameter {key!r}; expected one of {list(merged)}")
        merged[key] = float(value)
    return tuple(merged.items())


def _make_bcde(params, tau_regime) -> ModelSpec:
    p = _merge_params((("mu1", 1.2), ("mu2", 1.0), ("mu3", 6.2)), params)
    mu1, mu2, mu3 = (dict(p)[k] for k in ("mu1", "mu2", "mu3"))
    if mu1 <= 0 or mu2 <= 0:
        raise ValidationError("bcde requires mu1 > 0 and mu2 > 0")
    fold = 4.0 * mu1 * mu2

    def reaction(u, v):
        return (-mu1 * u + u * u * (1.0 - mu2 * u) * v, mu3 - v - u * u * v)

    def jacobian(u, v):
        return (
            -mu1 + 2.0 * u * v - 3.0 * mu2 * u * u * v,
            u * u * (1.0 - mu2 * u),
            -2.0 * u * v,
            -1.0 - u * u,
        )

    def u_pm(v, sign):
        return (1.0 + sign * math.sqrt(1.0 - fold / v)) / (2.0 * mu2)

    def roots_of_f(v):
        if v > fold:
            return tuple(sorted((0.0, u_pm(v, -1.0), u_pm(v, 1.0))))
        if v == fold:
            return (0.0, 1.0 / (2.0 * mu2))
        return (0.0,)

    def fast_cubic(v):
        if v <= fold:
            raise OutOfWindow(f"fast cubic needs v > 4*mu1*mu2 = {fold!r}, got {v!r}")
        return (mu2 * v, 0.0, u_pm(v, -1.0), u_pm(v, 1.0))

    scan_hi = mu3 + 1.0  # any root of G on any branch satisfies v*(1+u^2) = mu3
    scan_lo = fold + max(1e-12 * fold, 1e-15)
    branch_defs = {
        "minus": BranchDef("minus", (-math.inf, math.inf), (0.0, scan_hi), lambda v: 0.0),
        "plus": BranchDef(
            "plus", (fold, math.inf), (scan_lo, scan_hi), lambda v: u_pm(v, 1.0)
        ),
        "center": BranchDef(
            "center", (fold, math.inf), (scan_lo, scan_hi), lambda v: u_pm(v, -1.0)
        ),
    }
    return ModelSpec("bcde", p, tau_regime, reaction, jacobian, roots_of_f, branch_defs, fast_cubic)


def _make_fotm(params, tau_regime) -> ModelSpec:
    p = _merge_params(
        (("mu1", 3.5), ("mu2", 1.1), ("mu3", 3.2), ("mu4", 1.0), ("mu5", 0.4)), params
    )
    mu1, mu2, mu3, mu4, mu5 = (dict(p)[k] for k in ("mu1", "mu2", "mu3", "mu4", "mu5"))
    if mu1 <= 0.5:
        raise ValidationError("fotm requires mu1 > 1/2 so the fold sits at positive u")
    u_m = (2.0 * mu1 - 1.0) / (3.0 * mu1)
    v_m = 27.0 * mu1 / (4.0 * (1.0 + mu1) ** 3)

    def phi(u):  # u*(1+mu1*u)^2*(1-u)
        w = 1.0 + mu1 * u
        return u * w * w * (1.0 - u)

    def phi_prime(u):
        w = 1.0 + mu1 * u
        return w * (w * (1.0 - u) + 2.0 * mu1 * u * (1.0 - u) - u * w)

    def psi(u):  # u*(1+mu1*u)^2
        w = 1.0 + mu1 * u
        return u * w * w

    def psi_prime(u):
        w = 1.0 + mu1 * u
        return w * (w + 2.0 * mu1 * u)

    def reaction(u, v):
        return (-u + phi(u) * v, mu2 - mu3 * v / (1.0 + mu4 * u) - mu5 * psi(u) * v)

    def jacobian(u, v):
        d = 1.0 + mu4 * u
        return (
            -1.0 + v * phi_prime(u),
            phi(u),
            mu3 * mu4 * v / (d * d) - mu5 * v * psi_prime(u),
            -mu3 / d - mu5 * psi(u),
        )

    def v_of_u(u):  # branch curve v = 1/((1-u)*(1+mu1*u)^2)
        return 1.0 / ((1.0 - u) * (1.0 + mu1 * u) ** 2)

    def _branch_u(v, u_lo, u_hi):
        from scipy.optimize import brentq

        return float(brentq(lambda u: v_of_u(u) - v, u_lo, u_hi, xtol=1e-15, rtol=8.9e-16))

    def solve_plus(v):
        # v_of_u increases from v_m to ~1/(eps*(1+mu1)^2) on (u_m, 1)
        u_hi = 1.0 - 1e-13
        if v >= v_of_u(u_hi):
            raise OutOfWindow(f"v={v!r} beyond resolvable plus branch")
        return _branch_u(v, u_m, u_hi)

    def solve_center(v):
        return _branch_u(v, 1e-14, u_m)

    def roots_of_f(v):
        roots = [0.0]
        # F/u = -1 + (1+mu1*u)^2*(1-u)*v: a cubic in u
        w2 = mu1 * mu1
        coeffs = [v - 1.0, v * (2.0 * mu1 - 1.0), v * (w2 - 2.0 * mu1), -v * w2]
        rr = np.roots(coeffs[::-1]) if abs(v) > 0 else []
        for r in rr:
            if abs(r.imag) < 1e-10:
                roots.append(float(r.real))
        return tuple(sorted(roots))

    scan_hi = mu2 * (1.0 + mu4) / mu3 + 0.5  # G=0 forces v <= mu2*(1+mu4*u)/mu3 <= this
    branch_defs = {
        "minus": BranchDef("minus", (-math.inf, 1.0), (0.0, 1.0 - 1e-12), lambda v: 0.0),
        "plus": BranchDef("plus", (v_m, math.inf), (v_m * (1.0 + 1e-12), scan_hi), solve_plus),
        "center": BranchDef(
            "center", (v_m, 1.0), (v_m * (1.0 + 1e-12), 1.0 - 1e-12), solve_center
        ),
    }
    return ModelSpec("fotm", p, tau_regime, reaction, jacobian, roots_of_f, branch_defs, None)


def _make_fhn(params, tau_regime) -> ModelSpec:
    p = _merge_params((("mu1", 4.0), ("mu2", 1.0), ("mu3", 0.0)), params)
    mu1, mu2, mu3 = (dict(p)[k] for k in ("mu1", "mu2", "mu3"))
    if mu1 <= mu2:
        raise ValidationError("fhn requires mu1 > mu2 (slow saddles need m = mu1 - mu2 > 0)")
    d = mu2 - mu3  # f+ - fc = 1 + d*v, fc - f- = 1 - d*v

    def f_minus(v):
        return -1.0 + mu2 * v

    def f_center(v):
        return mu3 * v

    def f_plus(v):
        return 1.0 + mu2 * v

    def reaction(u, v):
        return (-(u - f_minus(v)) * (u - f_center(v)) * (u - f_plus(v)), u - mu1 * v)

    def jacobian(u, v):
        am, ac, ap = u - f_minus(v), u - f_center(v), u - f_plus(v)
        return (
            -(ac * ap + am * ap + am * ac),
            mu2 * ac * ap + mu3 * am * ap + mu2 * am * ac,
            1.0,
            -mu1,
        )

    def roots_of_f(v):
        return tuple(sorted((f_minus(v), f_center(v), f_plus(v))))

    def fast_cubic(v):
        return (1.0, f_minus(v), f_center(v), f_plus(v))

    def half_line(positive_side: bool) -> tuple[float, float]:
        # {v : 1 + d*v > 0} for plus, {v : 1 - d*v > 0} for minus
        s = 1.0 if positive_side else -1.0
        if d * s > 0:
            return (-1.0 / (d * s), math.inf)
        if d * s < 0:
            return (-math.inf, -1.0 / (d * s))
        return (-math.inf, math.inf)

    w_plus = half_line(True)
    w_minus = half_line(False)
    w_center = (max(w_plus[0], w_minus[0]), min(w_plus[1], w_minus[1]))
    m = mu1 - mu2
    box = 1.0 / m + 1.0  # G on f+- is +-1 - m*v: roots at +-1/m

    def clip(w):
        return (max(w[0], -box), min(w[1], box))

    branch_defs = {
        "minus": BranchDef("minus", w_minus, clip(w_minus), f_minus),
        "plus": BranchDef("plus", w_plus, clip(w_plus), f_plus),
        "center": BranchDef("center", w_center, clip(w_center), f_center),
    }
    return ModelSpec("fhn", p, tau_regime, reaction, jacobian, roots_of_f, branch_defs, fast_cubic)


def _make_cylindrical(params, tau_regime) -> ModelSpec:
    p = _merge_params((("mu1", 1.0), ("mu2", 5.0), ("mu3", 23.966669525396)), params)
    mu1, mu2, mu3 = (dict(p)[k] for k in ("mu1", "mu2", "mu3"))
    if mu2 <= 0 or mu1 + mu2 <= 0:
        raise ValidationError("cylindrical requires mu2 > 0 and mu1 + mu2 > 0")

    def u_pm(v, sign):
        return 0.5 + sign * 0.5 * math.sqrt(1.0 - 4.0 * v)

    def reaction(u, v):
        return (u * u * (1.0 - u) - u * v, mu1 * u * v + mu2 * v - mu3 * v * v)

    def jacobian(u, v):
        return (2.0 * u - 3.0 * u * u - v, -u, mu1 * v, mu1 * u + mu2 - 2.0 * mu3 * v)

    def roots_of_f(v):
        if v < 0.25:
            return tuple(sorted((0.0, u_pm(v, -1.0), u_pm(v, 1.0))))
        if v == 0.25:
            return (0.0, 0.5)
        return (0.0,)

    def fast_cubic(v):
        if not 0.0 < v < 0.25:
            raise OutOfWindow(f"fast cubic needs 0 < v < 1/4, got {v!r}")
        return (1.0, 0.0, u_pm(v, -1.0), u_pm(v, 1.0))

    branch_defs = {
        # roots of G on u=0 are 0 and mu2/mu3; on u+ they are 0 and Vbar+ < 1/4
        "minus": BranchDef("minus", (0.0, math.inf), (0.0, mu2 / mu3 + 1.0), lambda v: 0.0),
        "plus": BranchDef(
            "plus", (-math.inf, 0.25), (-1.0, 0.25 - 1e-12), lambda v: u_pm(v, 1.0)
        ),
        "center": BranchDef(
            "center", (0.0, 0.25), (1e-12, 0.25 - 1e-12), lambda v: u_pm(v, -1.0)
        ),
    }
    return ModelSpec(
        "cylindrical", p, tau_regime, reaction, jacobian, roots_of_f, branch_defs, fast_cubic
    )


def _poly_eval(coeffs: Sequence[float], v: float) -> float:
    out = 0.0
    for c in reversed(coeffs):
        out = out * v + c
    return out


def _poly_deriv(coeffs: Sequence[float]) -> tuple[float, ...]:
    return tuple(k * c for k, c in enumerate(coeffs))[1:] or (0.0,)


def _make_user_cubic(params, tau_regime) -> ModelSpec:
    """User-defined cubic-in-u model.

    params keys:
        alpha, beta_minus, beta_c, beta_plus: polynomial coefficients in v,
            ascending order (tuples);
        G: mapping (i, j) -> coefficient of u^i v^j;
        window_minus, window_plus: (lo, hi) v-intervals (user-supplied, per
            the branch-window contract).
    """
    params = dict(params or {})
    try:
        alpha = tuple(float(c) for c in params.pop("alpha", (1.0,)))
        betas = {
            key: tuple(float(c) for c in params.pop(key))
            for key in ("beta_minus", "beta_c", "beta_plus")
        }
        g_terms = {
            (int(i), int(j)): float(c) for (i, j), c in dict(params.pop("G")).items()
        }
        w_minus = tuple(float(x) for x in params.pop("window_minus"))
        w_plus = tuple(float(x) for x in params.pop("window_plus"))
    except KeyError as err:
        raise ValidationError(f"user-cubic model missing parameter {err.args[0]!r}") from None
    if params:
        raise ValidationError(f"unknown user-cubic parameters {sorted(params)}")

    dalpha = _poly_deriv(alpha)
    dbetas = {k: _poly_deriv(c) for k, c in betas.items()}

    def reaction(u, v):
        a = _poly_eval(alpha, v)
        bm, bc, bp = (_poly_eval(betas[k], v) for k in ("beta_minus", "beta_c", "beta_plus"))
        F = -a * (u - bm) * (u - bc) * (u - bp)
        G = 0.0
        for (i, j), c in g_terms.items():
            G += c * u**i * v**j
        return (F, G)

    def jacobian(u, v):
        a = _poly_eval(alpha, v)
        da = _poly_eval(dalpha, v)
        bm, bc, bp = (_poly_eval(betas[k], v) for k in ("beta_minus", "beta_c", "beta_plus"))
        dbm, dbc, dbp = (
            _poly_eval(dbetas[k], v) for k in ("beta_minus", "beta_c", "beta_plus")
        )
        pm, pc, pp = u - bm, u - bc, u - bp
        fu = -a * (pc * pp + pm * pp + pm * pc)
        fv = -da * pm * pc * pp + a * (dbm * pc * pp + dbc * pm * pp + dbp * pm * pc)
        gu = 0.0
        gv = 0.0
        for (i, j), c in g_terms.items():
            if i > 0:
                gu += c * i * u ** (i - 1) * v**j
            if j > 0:
                gv += c * u**i * j * v ** (j - 1)
        return (fu, fv, gu, gv)

    def roots_of_f(v):
        return tuple(
            sorted(_poly_eval(betas[k], v) for k in ("beta_minus", "beta_c", "beta_plus"))
        )

    def fast_cubic(v):
        return (
            _poly_eval(alpha, v),
            _poly_eval(betas["beta_minus"], v),
            _poly_eval(betas["beta_c"], v),
            _poly_eval(betas["beta_plus"], v),
        )

    def _compose_g_with(branch_coeffs: Sequence[float]) -> np.polynomial.Polynomial:
        f = np.polynomial.Polynomial(branch_coeffs)
        v = np.polynomial.Polynomial((0.0, 1.0))
        total = np.polynomial.Polynomial((0.0,))
        for (i, j), c in g_terms.items():
            total = total + c * f**i * v**j
        return total

    def _scan(window, branch_coeffs):
        # Cauchy root bound of G(f(v), v) keeps the scan finite and rigorous
        coef = np.trim_zeros(_compose_g_with(branch_coeffs).coef, "b")
        if len(coef) <= 1:
            bound = abs(window[0]) + abs(window[1]) if all(map(math.isfinite, window)) else 1.0
        else:
            bound = 1.0 + float(np.max(np.abs(coef[:-1]))) / abs(coef[-1])
        lo = max(window[0], -bound)
        hi = min(window[1], bound)
        if not lo < hi:
            lo, hi = window[0], window[0]  # empty scan, no roots inside window
        return (lo, hi)

    branch_defs = {
        "minus": BranchDef(
            "minus", w_minus, _scan(w_minus, betas["beta_minus"]),
            lambda v: _poly_eval(betas["beta_minus"], v),
        ),
        "plus": BranchDef(
            "plus", w_plus, _scan(w_plus, betas["beta_plus"]),
            lambda v: _poly_eval(betas["beta_plus"], v),
        ),
        "center": BranchDef(
            "center",
            (max(w_minus[0], w_plus[0]), min(w_minus[1], w_plus[1])),
            _scan((max(w_minus[0], w_plus[0]), min(w_minus[1], w_plus[1])), betas["beta_c"]),
            lambda v: _poly_eval(betas["beta_c"], v),
        ),
    }
    # params field wants (name, float) pairs; store a flattened readable form
    flat: list[tuple[str, float]] = []
    for key, coeffs in [("alpha", alpha)] + [(k, betas[k]) for k in betas]:
        for idx, c in enumerate(coeffs):
            flat.append((f"{key}.{idx}", c))
    for (i, j), c in sorted(g_terms.items()):
        flat.append((f"G.{i}.{j}", c))
    flat += [
        ("window_minus.0", w_minus[0]),
        ("window_minus.1", w_minus[1]),
        ("window_plus.0", w_plus[0]),
        ("window_plus.1", w_plus[1]),
    ]
    return ModelSpec(
        "user-cubic", tuple(flat), tau_regime, reaction, jacobian, roots_of_f, branch_defs,
        fast_cubic,
    )


_MAKERS = {
    "bcde": _make_bcde,
    "fotm": _make_fotm,
    "fhn": _make_fhn,
    "cylindrical": _make_cylindrical,
    "user-cubic": _make_user_cubic,
}


def catalog_names() -> tuple[str, ...]:
    return tuple(_MAKERS)


def make_model(
    name: str,
    params: Mapping[str, object] | None = None,
    tau_regime: TauRegime | None = None,
) -> ModelSpec:
    """Construct a catalog model by name with optional parameter overrides."""
    if name not in _MAKERS:
        raise ValidationError(f"unknown model {name!r}; catalog has {sorted(_MAKERS)}")
    regime = tau_regime if tau_regime is not None else TauRegime.order_one(1.0)
    return _MAKERS[name](params, regime)
