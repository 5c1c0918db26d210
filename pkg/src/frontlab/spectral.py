"""Discrete validation of the long-wavelength asymptotics.

Assembles the linearization of the traveling-frame equations about a front
profile on a uniform cell-centered grid, finds the critical eigenvalue branch
through the translation eigenvalue by shift-inverted power iteration with a
sparse LU factorization, and fits the curvature of lambda_c(ell) in ell^2.

The transversal wavenumber enters only through -ell^2 times the mass weights
(1/tau, 1/eps^2), so one profile and one set of coefficient arrays serve a
whole curve.  Grid nodes sit at cell centers; ghost values -w (wall zero) or
+w (zero flux) give second-order boundary rows for either condition.

The coefficient profile is the skeleton composed with a smooth blend between
the fast jump and the slow arcs across |xi| ~ eps^{-1/2}; this carries an
O(sqrt(eps)) modeling error.  grid_spec.refine runs a bordered Newton solve
of the discrete steady equations (front value and speed unknowns, with a
phase condition pinning translation) to replace the composed profile by the
true discrete front when higher accuracy is wanted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import CubicSpline
from scipy.sparse.linalg import splu

from .errors import (
    BranchJump,
    GridTooCoarse,
    NoConvergence,
    ValidationError,
)
from .geometry import FrontSkeleton, slow_g_prime, slow_saddle
from .models import branch_solve, eval_jacobian, eval_reaction

__all__ = [
    "GridSpec",
    "OperatorAssembly",
    "SpectralCurve",
    "assemble",
    "critical_eigenvalue",
    "eigenvalue_curve",
    "write_curve_bundle",
    "read_curve_csv",
]

_MAX_POINTS = 200_000


@dataclass(frozen=True)
class GridSpec:
    """Discretization request: spacing, optional half-length override,
    boundary condition for the perturbations, and profile refinement."""

    h: float = 0.02
    L: float | None = None
    boundary: str = "dirichlet"
    refine: bool = False

    def __post_init__(self):
        if self.h <= 0:
            raise ValidationError(f"grid spacing must be positive, got {self.h}")
        if self.boundary not in ("dirichlet", "neumann"):
            raise ValidationError(f"unknown boundary condition {self.boundary!r}")
        if self.L is not None and self.L <= 0:
            raise ValidationError(f"half-length must be positive, got {self.L}")


@dataclass(frozen=True)
class OperatorAssembly:
    grid: np.ndarray
    h: float
    L: float
    matrix: sp.csc_matrix
    boundary: str
    profile_u: np.ndarray
    profile_v: np.ndarray
    eps: float
    tau: float
    speed: float
    ell: float


@dataclass(frozen=True)
class SpectralCurve:
    points: list[tuple[float, complex]]
    fitted_lambda2: float
    fit_window: tuple[float, float]


def frame_parameters(skeleton: FrontSkeleton) -> tuple[float, float]:
    """(tau, c) in the fast variables, for either time-scale regime."""
    regime = skeleton.model.tau_regime
    if regime.kind == "order_one":
        return regime.value, skeleton.speed
    return skeleton.eps * regime.value, skeleton.speed / skeleton.eps


def _slow_decay_rates(skeleton: FrontSkeleton) -> tuple[float, float]:
    """Approach rates (in X) of the two slow arcs at their saddles."""
    model = skeleton.model
    ct = skeleton.speed if model.tau_regime.kind == "order_eps" else 0.0
    rates = []
    for side in ("minus", "plus"):
        gp = slow_g_prime(model, side, slow_saddle(model, side).v_bar)
        disc = math.sqrt(ct * ct - 4.0 * gp)
        rate = 0.5 * (disc - ct) if side == "minus" else 0.5 * (disc + ct)
        rates.append(rate)
    return rates[0], rates[1]


def fast_width(skeleton: FrontSkeleton) -> float:
    if skeleton.fast.closed_form is not None:
        k, _a, bm, _bc, bp = skeleton.fast.closed_form
        return 1.0 / (k * 0.5 * (bp - bm))
    xi = skeleton.fast.samples[:, 0]
    p = np.abs(skeleton.fast.samples[:, 2])
    above = xi[p > 0.5 * p.max()]
    return float(above[-1] - above[0])


def _default_half_length(skeleton: FrontSkeleton, h: float) -> float:
    kappa = min(_slow_decay_rates(skeleton))
    L = 8.0 / (skeleton.eps * kappa)
    if 2.0 * L / h > _MAX_POINTS:
        L = 0.5 * h * _MAX_POINTS
    return L


def _smoothstep(s: np.ndarray) -> np.ndarray:
    s = np.clip(s, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


def composed_profile(skeleton: FrontSkeleton, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Skeleton profiles blended across the fast/slow matching scale."""
    model = skeleton.model
    eps = skeleton.eps
    jp = skeleton.jump

    if skeleton.fast.closed_form is not None:
        k, _alpha, bm, _bc, bp = skeleton.fast.closed_form
        r, mid = 0.5 * (bp - bm), 0.5 * (bp + bm)
        u_fast = mid + r * np.tanh(k * r * xi)
    else:
        fs = skeleton.fast.samples
        spl = CubicSpline(fs[:, 0], fs[:, 1])
        u_fast = np.where(
            xi < fs[0, 0], fs[0, 1],
            np.where(xi > fs[-1, 0], fs[-1, 1], spl(np.clip(xi, fs[0, 0], fs[-1, 0]))),
        )

    def slow_fields(orbit, side, endstate_u):
        s = orbit.samples
        spl_v = CubicSpline(s[:, 0], s[:, 1])
        x_grid = eps * xi
        v_vals = np.asarray(spl_v(np.clip(x_grid, s[0, 0], s[-1, 0])))
        vbar = slow_saddle(model, side).v_bar
        v_vals = np.where((x_grid < s[0, 0]) | (x_grid > s[-1, 0]), vbar, v_vals)
        u_vals = np.array([branch_solve(model, side, v) for v in v_vals])
        return u_vals, v_vals, endstate_u

    u_minus, v_minus, _ = slow_fields(skeleton.slow_minus, skeleton.slow_minus.side, jp.u_star_minus)
    u_plus, v_plus, _ = slow_fields(skeleton.slow_plus, skeleton.slow_plus.side, jp.u_star_plus)
    u_slow = np.where(xi < 0.0, u_minus, u_plus)
    v_slow = np.where(xi < 0.0, v_minus, v_plus)

    w = eps**-0.5
    chi = _smoothstep((np.abs(xi) - 0.5 * w) / w)  # 0 in the fast core, 1 past 1.5w
    u_h = (1.0 - chi) * u_fast + chi * u_slow
    v_h = (1.0 - chi) * jp.v_star + chi * v_slow
    return u_h, v_h


def _corner_sign(boundary: str) -> float:
    # ghost value = sign * first interior value, second order at cell centers
    return -1.0 if boundary == "dirichlet" else 1.0


def steady_endstates(skeleton: FrontSkeleton) -> tuple[tuple[float, float], tuple[float, float]]:
    model = skeleton.model
    out = []
    for orbit in (skeleton.slow_minus, skeleton.slow_plus):
        vbar = slow_saddle(model, orbit.side).v_bar
        out.append((branch_solve(model, orbit.side, vbar), vbar))
    return out[0], out[1]


def _steady_residual_and_jacobian(skeleton, xi, h, boundary, u, v, c, tau, eps, want_jacobian):
    """Discrete traveling-frame steady equations with profile boundary ghosts."""
    model = skeleton.model
    n = xi.size
    (ul, vl), (ur, vr) = steady_endstates(skeleton)
    if boundary == "dirichlet":
        u_lo, u_hi = 2.0 * ul - u[0], 2.0 * ur - u[-1]
        v_lo, v_hi = 2.0 * vl - v[0], 2.0 * vr - v[-1]
        corner = -1.0
    else:
        u_lo, u_hi = u[0], u[-1]
        v_lo, v_hi = v[0], v[-1]
        corner = 1.0
    ue = np.concatenate([[u_lo], u, [u_hi]])
    ve = np.concatenate([[v_lo], v, [v_hi]])
    d2u = (ue[2:] - 2.0 * u + ue[:-2]) / h**2
    d1u = (ue[2:] - ue[:-2]) / (2.0 * h)
    d2v = (ve[2:] - 2.0 * v + ve[:-2]) / h**2
    d1v = (ve[2:] - ve[:-2]) / (2.0 * h)
    fg = np.array([eval_reaction(model, ui, vi) for ui, vi in zip(u, v)])
    r_u = d2u + c * tau * d1u + fg[:, 0]
    r_v = d2v / eps**2 + c * d1v + fg[:, 1]
    residual = np.empty(2 * n)
    residual[0::2] = r_u
    residual[1::2] = r_v
    if not want_jacobian:
        return residual, None, None

    jac = np.array([eval_jacobian(model, ui, vi) for ui, vi in zip(u, v)])
    inv_h2 = 1.0 / h**2
    adv_u, adv_v = c * tau / (2.0 * h), c / (2.0 * h)
    main = np.empty(2 * n)
    main[0::2] = -2.0 * inv_h2 + jac[:, 0]
    main[1::2] = -2.0 * inv_h2 / eps**2 + jac[:, 3]
    main[0] += corner * (inv_h2 - adv_u)
    main[1] += corner * (inv_h2 / eps**2 - adv_v)
    main[-2] += corner * (inv_h2 + adv_u)
    main[-1] += corner * (inv_h2 / eps**2 + adv_v)
    upper1 = np.zeros(2 * n - 1)
    upper1[0::2] = jac[:, 1]
    lower1 = np.zeros(2 * n - 1)
    lower1[0::2] = jac[:, 2]
    upper2 = np.empty(2 * n - 2)
    upper2[0::2] = inv_h2 + adv_u
    upper2[1::2] = inv_h2 / eps**2 + adv_v
    lower2 = np.empty(2 * n - 2)
    lower2[0::2] = inv_h2 - adv_u
    lower2[1::2] = inv_h2 / eps**2 - adv_v
    matrix = sp.diags(
        [lower2, lower1, main, upper1, upper2], [-2, -1, 0, 1, 2], format="csc")
    dres_dc = np.empty(2 * n)
    dres_dc[0::2] = tau * d1u
    dres_dc[1::2] = d1v
    return residual, matrix, dres_dc


def _refine_profile(skeleton, xi, h, boundary, u0, v0, c0, tau, eps):
    """Bordered Newton for the discrete front and its speed.

    Translation is pinned by requiring the update to stay orthogonal to the
    discrete profile derivative, with the speed as the matching unknown.
    """
    n = xi.size
    w = np.empty(2 * n)
    w[0::2], w[1::2] = u0, v0
    c = c0
    phase = np.empty(2 * n)  # profile derivative; pins the translation shift
    phase[0::2] = np.gradient(u0, h)
    phase[1::2] = np.gradient(v0, h)
    scale = max(1.0, float(np.max(np.abs(w))))
    for _ in range(30):
        residual, jac, dres_dc = _steady_residual_and_jacobian(
            skeleton, xi, h, boundary, w[0::2], w[1::2], c, tau, eps, True)
        lu = splu(jac)
        a = lu.solve(residual)
        b = lu.solve(dres_dc)
        denom = phase @ b
        if abs(denom) < 1e-30:
            raise NoConvergence("phase condition degenerate in profile refinement")
        dc = (phase @ a) / denom
        dw = a - b * dc
        w -= dw
        c -= dc
        if np.max(np.abs(dw)) < 1e-12 * scale and abs(dc) < 1e-12 * (1.0 + abs(c)):
            break
    else:
        raise NoConvergence("steady-profile Newton did not settle in 30 steps")
    return w[0::2], w[1::2], c


def _assembly_context(skeleton: FrontSkeleton, grid_spec: GridSpec, freeze_at=None):
    tau, c = frame_parameters(skeleton)
    eps = skeleton.eps
    h = grid_spec.h
    width = fast_width(skeleton)
    if h > min(0.2, width / 20.0):
        raise GridTooCoarse(
            f"spacing {h:g} exceeds min(0.2, fast width {width:g}/20)")
    L = grid_spec.L if grid_spec.L is not None else _default_half_length(skeleton, h)
    n = int(round(2.0 * L / h))
    if n > _MAX_POINTS:
        raise ValidationError(f"{n} grid points exceed the {_MAX_POINTS} cap")
    xi = -L + (np.arange(n) + 0.5) * h
    if freeze_at is not None:
        u_h = np.full(n, float(freeze_at[0]))
        v_h = np.full(n, float(freeze_at[1]))
    else:
        u_h, v_h = composed_profile(skeleton, xi)
        if grid_spec.refine:
            u_h, v_h, c = _refine_profile(
                skeleton, xi, h, grid_spec.boundary, u_h, v_h, c, tau, eps)
    jac = np.array([eval_jacobian(skeleton.model, u, v) for u, v in zip(u_h, v_h)])
    return {
        "grid": xi, "h": h, "L": L, "boundary": grid_spec.boundary,
        "u_h": u_h, "v_h": v_h, "jac": jac,
        "eps": eps, "tau": tau, "speed": c,
    }


def _matrix_at(ctx, ell: float) -> sp.csc_matrix:
    xi, h = ctx["grid"], ctx["h"]
    n = xi.size
    eps, tau, c = ctx["eps"], ctx["tau"], ctx["speed"]
    jac = ctx["jac"]
    corner = _corner_sign(ctx["boundary"])
    inv_h2 = 1.0 / h**2
    adv_u, adv_v = c * tau / (2.0 * h), c / (2.0 * h)

    main = np.empty(2 * n)
    main[0::2] = (-2.0 * inv_h2 + jac[:, 0] - ell * ell) / tau
    main[1::2] = (-2.0 * inv_h2 - ell * ell) / eps**2 + jac[:, 3]
    main[0] += corner * (inv_h2 - adv_u) / tau
    main[1] += corner * (inv_h2 / eps**2 - adv_v)
    main[-2] += corner * (inv_h2 + adv_u) / tau
    main[-1] += corner * (inv_h2 / eps**2 + adv_v)
    upper1 = np.zeros(2 * n - 1)
    upper1[0::2] = jac[:, 1] / tau
    lower1 = np.zeros(2 * n - 1)
    lower1[0::2] = jac[:, 2]
    upper2 = np.empty(2 * n - 2)
    upper2[0::2] = (inv_h2 + adv_u) / tau
    upper2[1::2] = inv_h2 / eps**2 + adv_v
    lower2 = np.empty(2 * n - 2)
    lower2[0::2] = (inv_h2 - adv_u) / tau
    lower2[1::2] = inv_h2 / eps**2 - adv_v
    return sp.diags(
        [lower2, lower1, main, upper1, upper2], [-2, -1, 0, 1, 2], format="csc")


def assemble(
    skeleton: FrontSkeleton, ell: float, grid_spec: GridSpec | None = None,
    *, freeze_at: tuple[float, float] | None = None,
) -> OperatorAssembly:
    """Discretize the linearized traveling-frame operator at wavenumber ell.

    freeze_at pins the coefficient profile to one homogeneous state, which
    turns the operator into its constant-coefficient limit for validation.
    """
    spec = grid_spec if grid_spec is not None else GridSpec()
    ctx = _assembly_context(skeleton, spec, freeze_at=freeze_at)
    return OperatorAssembly(
        grid=ctx["grid"], h=ctx["h"], L=ctx["L"], matrix=_matrix_at(ctx, ell),
        boundary=ctx["boundary"], profile_u=ctx["u_h"], profile_v=ctx["v_h"],
        eps=ctx["eps"], tau=ctx["tau"], speed=ctx["speed"], ell=ell,
    )


def _shift_invert(matrix: sp.csc_matrix, shift: complex):
    n = matrix.shape[0]
    work = (matrix - shift * sp.identity(n, format="csc")).astype(complex)
    try:
        lu = splu(work)
    except RuntimeError as exc:  # exactly singular shift
        raise NoConvergence(f"factorization at shift {shift} failed: {exc}") from None
    # row sums bound the roundoff floor of the residual; the stiff v rows
    # scale like 1/(eps^2 h^2), far above the eigenvalues of interest
    row_norm = float(np.max(np.abs(matrix).sum(axis=1)))
    rng = np.random.default_rng(1729)
    x = rng.standard_normal(n) + 0j
    y = rng.standard_normal(n) + 0j
    lam = shift
    for _ in range(200):
        x = lu.solve(x)
        x /= np.linalg.norm(x)
        y = lu.solve(y, trans="H")
        y /= np.linalg.norm(y)
        mx = matrix @ x
        pair = np.vdot(y, x)
        if abs(pair) < 1e-14:
            continue
        lam = np.vdot(y, mx) / pair
        tol = max(1e-10 * (1.0 + abs(lam)), 8.0 * np.finfo(float).eps * row_norm)
        if np.linalg.norm(mx - lam * x) <= tol:
            return complex(lam), x, y
    raise NoConvergence(
        f"shift-invert stalled near {lam}; residual above tolerance after 200 steps")


def critical_eigenvalue(assembly: OperatorAssembly, shift_guess: complex):
    """Eigenvalue nearest the shift, with right and left eigenvectors."""
    return _shift_invert(assembly.matrix, complex(shift_guess))


def _fit_quadratic(points, s_max):
    s = np.array([ell * ell for ell, _ in points])
    lam = np.array([val.real for _, val in points])
    keep = s <= s_max + 1e-15
    if keep.sum() < 4:
        keep = np.ones_like(s, dtype=bool)
    design = np.column_stack([np.ones(keep.sum()), s[keep], s[keep] ** 2])
    coef, *_ = np.linalg.lstsq(design, lam[keep], rcond=None)
    return coef, float(s[keep].max())


def eigenvalue_curve(
    skeleton: FrontSkeleton, ell_values, grid_spec: GridSpec | None = None,
) -> SpectralCurve:
    """Continue the translation branch over the given wavenumbers and fit.

    The quartic term of the fit estimates where it contributes 5%; the
    quadratic coefficient is refitted inside that window.
    """
    ells = [float(e) for e in ell_values]
    if len(ells) < 4:
        raise ValidationError("need at least four wavenumbers for the quartic fit")
    if any(b <= a for a, b in zip(ells, ells[1:])) or abs(ells[0]) > 1e-12:
        raise ValidationError("wavenumbers must ascend from 0")
    spec = grid_spec if grid_spec is not None else GridSpec()
    ctx = _assembly_context(skeleton, spec)

    points: list[tuple[float, complex]] = []
    shift = 0.0 + 0.0j
    for i, ell in enumerate(ells):
        lam, _x, _y = _shift_invert(_matrix_at(ctx, ell), shift)
        if i >= 2:
            trend = abs(points[-1][1] - points[-2][1])
            if abs(lam - points[-1][1]) > 10.0 * max(trend, 1e-12 * (1.0 + abs(lam))):
                raise BranchJump(
                    f"eigenvalue moved {abs(lam - points[-1][1]):g} at ell={ell:g}, "
                    f"local trend {trend:g}")
        points.append((ell, lam))
        shift = lam
    coef, _ = _fit_quadratic(points, math.inf)
    s_cap = math.inf
    if abs(coef[2]) > 0.0:
        s_cap = 0.05 * abs(coef[1]) / abs(coef[2])
    coef, s_used = _fit_quadratic(points, s_cap)
    return SpectralCurve(
        points=points, fitted_lambda2=float(coef[1]),
        fit_window=(0.0, math.sqrt(s_used)),
    )


def write_curve_bundle(curve: SpectralCurve, meta: dict, directory: str) -> tuple[str, str]:
    """curve.csv (ell, Re lambda, Im lambda) plus a flat key-value sidecar."""
    import os

    csv_path = os.path.join(directory, "curve.csv")
    with open(csv_path, "w") as fh:
        fh.write("ell,re_lambda,im_lambda\n")
        for ell, lam in curve.points:
            fh.write(f"{float(ell)!r},{float(lam.real)!r},{float(lam.imag)!r}\n")
    meta_path = os.path.join(directory, "curve_meta.txt")
    with open(meta_path, "w") as fh:
        for key, value in meta.items():
            if hasattr(value, "item"):  # numpy scalar: repr must stay parseable
                value = value.item()
            fh.write(f"{key} = {value!r}\n")
        fh.write(f"fitted_lambda2 = {float(curve.fitted_lambda2)!r}\n")
        fh.write(f"fit_window_hi = {float(curve.fit_window[1])!r}\n")
    return csv_path, meta_path


def read_curve_csv(path: str) -> np.ndarray:
    rows = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != ["ell", "re_lambda", "im_lambda"]:
            raise ValidationError(f"unexpected curve header {header}")
        for line in fh:
            rows.append([float(part) for part in line.split(",")])
    return np.array(rows)
