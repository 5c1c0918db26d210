"""Direct 2D simulation of the two-component front on a rectangle.

The fields live on a cell-centered grid, x in (0, Lx) with Neumann walls
and y in (0, Ly) periodic.  Time stepping is a symmetric Strang
arrangement

    Dx(dt/2) -> Dy(dt/2) -> R(dt) -> Dy(dt/2) -> Dx(dt/2)

where each directional diffusion sub-flow is applied exactly in
transform space (cosine modes diagonalize the mirror-ghost Neumann
Laplacian, Fourier modes the periodic one) and the reaction sub-flow is
an explicit midpoint step.  Exact sub-flows matter here: the V
diffusion carries the stiff 1/eps^2 coefficient, and an A-stable solve
like Crank-Nicolson leaves interface-scale content almost undamped
(amplification -> -1 instead of ~0), which measurably corrupts the
slow transversal growth rates this module exists to expose.  With the
diffusion exact, the only time-stepping error is the Strang
reaction-diffusion commutator, governed by the mild reaction Jacobian,
so rates converge cleanly at O(dt^2) + O(dx^2).

Comoving runs do not add an advection term.  Instead `run` shifts the
window by whole cells whenever the mean interface drifts a cell off
center, filling the vacated edge with the boundary column; `x_offset`
on the state keeps interface positions in fixed lab coordinates.

The interface is the per-row first crossing of u_mid = (u*- + u*+)/2
scanning left to right, linearly interpolated.  Mode amplitudes are the
discrete Fourier coefficients of that curve: the logged ell=0 entry is
the plain y-average of the position (its fitted rate measures drift of
the mean front, which is the translation mode for a front that is
stationary in the logging frame), nonzero entries are the complex
amplitudes a_n e^{i phi_n} of a_n cos(ell_n y + phi_n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.fft import dct, idct, irfft, rfft

from .errors import (
    BlowUp,
    GridTooCoarse,
    NoCrossing,
    Nonlinear,
    ValidationError,
    WindowTooShort,
)
from .geometry import FrontSkeleton, build_front
from .models import ModelSpec, eval_jacobian, eval_reaction
from .spectral import composed_profile, fast_width, steady_endstates

__all__ = [
    "ModeSeed",
    "SimConfig",
    "SimState",
    "ModeLog",
    "InterfaceLog",
    "init_front_state",
    "step",
    "run",
    "interface_position",
    "growth_rates",
    "write_snapshot",
    "read_snapshot",
    "write_mode_log",
    "write_interface_log",
]

_MAG_BOUND = 1e6  # blow-up threshold on |U|, |V|
_LINEAR_FRACTION = 0.05  # of the fast width: linear-regime amplitude bound
_MIN_FIT_SAMPLES = 4


@dataclass(frozen=True)
class ModeSeed:
    """Transversal interface perturbation, sum of a_n cos(ell_n y + phi_n).

    Each entry is (ell, amplitude, phase); ell must be 2*pi*n/Ly for an
    integer n.  amplitude None means the default 1e-3 * fast width.
    """

    modes: tuple[tuple[float, float | None, float], ...] = ()


@dataclass(frozen=True)
class SimConfig:
    model: ModelSpec
    eps: float
    domain: tuple[float, float] = (40.0, 20.0)
    grid: tuple[int, int] = (512, 256)
    dt: float = 0.01
    t_end: float = 1.0
    initial: ModeSeed | str | Path = ModeSeed()
    comoving: bool = False
    snapshot_every: float = 0.0
    log_every: int = 1
    skeleton: FrontSkeleton | None = None  # reuse a prebuilt front; else build_front


@dataclass
class SimState:
    t: float
    U: np.ndarray  # (Ny, Nx)
    V: np.ndarray
    dx: float
    dy: float
    u_mid: float
    x_offset: float = 0.0  # lab x of the window's left wall
    interface: np.ndarray | None = None  # lab coords, NaN where no crossing
    mode_log: ModeLog | None = None


@dataclass
class ModeLog:
    ells: tuple[float, ...]
    fast_width: float
    times: list[float] = field(default_factory=list)
    amplitudes: list[np.ndarray] = field(default_factory=list)  # complex, per ell


@dataclass
class InterfaceLog:
    times: list[float] = field(default_factory=list)
    positions: list[np.ndarray] = field(default_factory=list)  # lab coords


# ---------------------------------------------------------------------------
# stepping plan: everything precomputable from (model, eps, grid, dt)


@dataclass
class _Plan:
    model: ModelSpec
    tau: float
    dt: float
    dx: float
    dy: float
    ex_u: np.ndarray  # exp(kappa * dt/2 * lambda_k) per transform mode
    ex_v: np.ndarray
    ey_u: np.ndarray
    ey_v: np.ndarray


def _effective_tau(model: ModelSpec, eps: float) -> float:
    regime = model.tau_regime
    return regime.value if regime.kind == "order_one" else eps * regime.value


def _make_plan(config: SimConfig) -> _Plan:
    lx, ly = config.domain
    nx, ny = config.grid
    if nx < 3:
        raise ValidationError(f"Nx must be at least 3, got {nx}")
    if ny < 1:
        raise ValidationError(f"Ny must be at least 1, got {ny}")
    if lx <= 0.0 or ly <= 0.0:
        raise ValidationError(f"domain sides must be positive, got {config.domain!r}")
    if config.dt <= 0.0:
        raise ValidationError(f"dt must be positive, got {config.dt!r}")
    if config.eps <= 0.0:
        raise ValidationError(f"eps must be positive, got {config.eps!r}")
    if config.log_every < 1:
        raise ValidationError(f"log_every must be a positive step count, got {config.log_every!r}")
    dx, dy = lx / nx, ly / ny
    tau = _effective_tau(config.model, config.eps)
    kappa_u, kappa_v = 1.0 / tau, 1.0 / config.eps**2
    # Eigenvalues of the discrete 3-point Laplacians: the mirror-ghost
    # Neumann operator under DCT-II, the periodic one under the DFT.
    lam_x = -(2.0 / (dx * dx)) * (1.0 - np.cos(np.pi * np.arange(nx) / nx))
    lam_y = -(2.0 / (dy * dy)) * (1.0 - np.cos(2.0 * np.pi * np.arange(ny // 2 + 1) / ny))
    half = 0.5 * config.dt
    return _Plan(
        model=config.model,
        tau=tau,
        dt=config.dt,
        dx=dx,
        dy=dy,
        ex_u=np.exp(half * kappa_u * lam_x),
        ex_v=np.exp(half * kappa_v * lam_x),
        ey_u=np.exp(half * kappa_u * lam_y)[:, None],
        ey_v=np.exp(half * kappa_v * lam_y)[:, None],
    )


def _sweep_x(w: np.ndarray, fac: np.ndarray) -> np.ndarray:
    return idct(dct(w, axis=1) * fac, axis=1)


def _sweep_y(w: np.ndarray, fac: np.ndarray) -> np.ndarray:
    return irfft(rfft(w, axis=0) * fac, n=w.shape[0], axis=0)


def _reaction_rhs(plan: _Plan, u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    f, g = eval_reaction(plan.model, u, v)
    return f / plan.tau, g


def _check_reaction_cfl(plan: _Plan, u: np.ndarray, v: np.ndarray) -> None:
    fu, fv, gu, gv = eval_jacobian(plan.model, u, v)
    row_u = np.max(np.abs(fu) + np.abs(fv)) / plan.tau
    row_v = np.max(np.abs(gu) + np.abs(gv))
    bound = max(float(row_u), float(row_v))
    if plan.dt * bound > 0.25:
        raise ValidationError(
            f"dt = {plan.dt!r} exceeds the reaction stability bound "
            f"0.25/|J| = {0.25 / bound!r} at t-slice extremes"
        )


def _check_magnitude(t: float, u: np.ndarray, v: np.ndarray) -> None:
    for name, w in (("U", u), ("V", v)):
        m = np.abs(w)
        peak = float(np.max(m))
        if not math.isfinite(peak) or peak > _MAG_BOUND:
            j, i = np.unravel_index(int(np.argmax(np.where(np.isfinite(m), m, np.inf))), w.shape)
            raise BlowUp(f"{name} reached |{name}| = {peak!r} at cell (row {j}, col {i})", t=t, where=(int(j), int(i)))


def step(state: SimState, config: SimConfig, _plan: _Plan | None = None) -> SimState:
    """One IMEX Strang step; returns a new state with a fresh interface."""
    plan = _plan if _plan is not None else _make_plan(config)
    _check_reaction_cfl(plan, state.U, state.V)
    u = _sweep_x(state.U, plan.ex_u)
    v = _sweep_x(state.V, plan.ex_v)
    u = _sweep_y(u, plan.ey_u)
    v = _sweep_y(v, plan.ey_v)
    fu, fv = _reaction_rhs(plan, u, v)
    fmu, fmv = _reaction_rhs(plan, u + 0.5 * plan.dt * fu, v + 0.5 * plan.dt * fv)
    u = u + plan.dt * fmu
    v = v + plan.dt * fmv
    u = _sweep_y(u, plan.ey_u)
    v = _sweep_y(v, plan.ey_v)
    u = _sweep_x(u, plan.ex_u)
    v = _sweep_x(v, plan.ex_v)
    t = state.t + plan.dt
    _check_magnitude(t, u, v)
    out = replace(state, t=t, U=u, V=v)
    try:
        out.interface = interface_position(out)
    except NoCrossing:  # frontless states (homogeneous runs) are legal
        out.interface = np.full(u.shape[0], np.nan)
    return out


# ---------------------------------------------------------------------------
# initial state


def _resolve_skeleton(config: SimConfig) -> FrontSkeleton:
    if config.skeleton is not None:
        return config.skeleton
    return build_front(config.model, config.eps)[0]


def _seed_shifts(seed: ModeSeed, y: np.ndarray, ly: float, width: float) -> np.ndarray:
    shift = np.zeros_like(y)
    total = 0.0
    for ell, amp, phase in seed.modes:
        n = ell * ly / (2.0 * math.pi)
        if abs(n - round(n)) > 1e-8 * (1.0 + abs(n)):
            raise ValidationError(f"mode ell = {ell!r} is not 2*pi*n/Ly for integer n (n = {n!r})")
        a = 1e-3 * width if amp is None else float(amp)
        total += abs(a)
        shift += a * np.cos(ell * y + phase)
    if total > 0.5 * width:
        raise ValidationError(
            f"seed amplitudes sum to {total!r}, above half the fast width {width!r}: not a linear perturbation"
        )
    return shift


def _log_ells(seed: ModeSeed) -> tuple[float, ...]:
    return (0.0,) + tuple(m[0] for m in seed.modes)


def _mode_amplitudes(interface: np.ndarray, ells: tuple[float, ...], ly: float) -> np.ndarray:
    ny = interface.size
    coeffs = np.fft.rfft(interface) / ny
    out = np.empty(len(ells), dtype=complex)
    for j, ell in enumerate(ells):
        n = int(round(ell * ly / (2.0 * math.pi)))
        out[j] = coeffs[n] if n == 0 else 2.0 * coeffs[n]
    return out


def init_front_state(config: SimConfig, _skeleton: FrontSkeleton | None = None) -> SimState:
    """Composed front profile at mid-window, optionally mode-perturbed.

    With a ModeSeed initial, U(x, y, 0) = u_h(x - x0 + sum a_n cos(ell_n y
    + phi_n)) with x0 = Lx/2 and u_h the blended skeleton profile; a path
    initial loads an FLB1 snapshot on the same grid instead.
    """
    plan = _make_plan(config)  # runs the config validations
    lx, ly = config.domain
    nx, ny = config.grid
    dx, dy = plan.dx, plan.dy
    skeleton = _skeleton if _skeleton is not None else _resolve_skeleton(config)
    (ul, vl), (ur, vr) = steady_endstates(skeleton)
    u_mid = 0.5 * (ul + ur)
    width = fast_width(skeleton)

    if isinstance(config.initial, (str, Path)):
        t0, sx, sy, u0, v0 = read_snapshot(config.initial)
        if u0.shape != (ny, nx):
            raise ValidationError(f"snapshot grid {u0.shape[::-1]} does not match config grid {(nx, ny)}")
        if abs(sx - dx) > 1e-9 * dx or abs(sy - dy) > 1e-9 * dy:
            raise ValidationError(f"snapshot spacing ({sx!r}, {sy!r}) does not match config ({dx!r}, {dy!r})")
        mode_log = ModeLog(ells=(0.0,), fast_width=width)
        state = SimState(t=t0, U=u0, V=v0, dx=dx, dy=dy, u_mid=u_mid, mode_log=mode_log)
        state.interface = interface_position(state)
        return state

    if width / dx < 10.0:
        raise GridTooCoarse(f"dx = {dx!r} puts {width / dx:.1f} points across the fast width {width!r}; need >= 10")
    seed = config.initial
    if seed.modes:
        ell_max = max(m[0] for m in seed.modes)
        if ell_max > 0.0 and 2.0 * math.pi / ell_max < 8.0 * dy:
            raise GridTooCoarse(
                f"dy = {dy!r} puts under 8 points across the shortest seeded wavelength "
                f"{2.0 * math.pi / ell_max!r}"
            )

    x = (np.arange(nx) + 0.5) * dx
    y = (np.arange(ny) + 0.5) * dy
    shifts = _seed_shifts(seed, y, ly, width)
    xi = (x[None, :] - 0.5 * lx) + shifts[:, None]
    u0, v0 = composed_profile(skeleton, xi.ravel())
    state = SimState(
        t=0.0,
        U=u0.reshape(ny, nx),
        V=v0.reshape(ny, nx),
        dx=dx,
        dy=dy,
        u_mid=u_mid,
        mode_log=ModeLog(ells=_log_ells(seed), fast_width=width),
    )
    state.interface = interface_position(state)
    state.mode_log.times.append(0.0)
    state.mode_log.amplitudes.append(_mode_amplitudes(state.interface, state.mode_log.ells, ly))
    return state


# ---------------------------------------------------------------------------
# diagnostics


def interface_position(state: SimState) -> np.ndarray:
    """Lab-frame x of the first u_mid crossing in each row, NaN if none.

    Scans left to right and interpolates linearly; raises NoCrossing only
    when every row misses (single rows are reported as NaN by convention).
    """
    d = state.U - state.u_mid
    prod = d[:, :-1] * d[:, 1:]
    crossing = (prod <= 0.0) & ((d[:, :-1] != 0.0) | (d[:, 1:] != 0.0))
    has = crossing.any(axis=1)
    if not has.any():
        raise NoCrossing(f"no row of U brackets the mid level {state.u_mid!r}")
    first = np.argmax(crossing, axis=1)
    rows = np.arange(d.shape[0])
    d0 = d[rows, first]
    d1 = d[rows, first + 1]
    frac = np.where(d0 == d1, 0.5, d0 / np.where(d0 == d1, 1.0, d0 - d1))
    pos = state.x_offset + (first + 0.5 + frac) * state.dx
    return np.where(has, pos, np.nan)


def growth_rates(mode_log: ModeLog, window: tuple[float, float]) -> list[tuple[float, float]]:
    """Per-mode exponential rates: least-squares slope of log|amplitude|.

    The linear-regime bound (amplitudes below 5% of the fast width inside
    the window) applies to the nonzero modes; the ell=0 entry is a mean
    position, not a perturbation amplitude, and is fitted as-is.
    """
    t0, t1 = window
    times = np.asarray(mode_log.times)
    sel = (times >= t0) & (times <= t1)
    if int(sel.sum()) < _MIN_FIT_SAMPLES:
        raise WindowTooShort(
            f"window ({t0!r}, {t1!r}) holds {int(sel.sum())} samples; need >= {_MIN_FIT_SAMPLES}"
        )
    t_sel = times[sel]
    amps = np.abs(np.asarray(mode_log.amplitudes))[sel, :]
    bound = _LINEAR_FRACTION * mode_log.fast_width
    out = []
    for j, ell in enumerate(mode_log.ells):
        a = amps[:, j]
        if ell != 0.0 and float(a.max()) > bound:
            raise Nonlinear(
                f"mode ell = {ell!r} reached amplitude {float(a.max())!r} inside the window, "
                f"above the linear bound {bound!r}"
            )
        sigma = float(np.polyfit(t_sel, np.log(a), 1)[0])
        out.append((ell, sigma))
    return out


def _shift_window(w: np.ndarray, cells: int) -> np.ndarray:
    # window moves right for cells > 0; vacated edge copies the wall column
    out = np.empty_like(w)
    if cells > 0:
        out[:, :-cells] = w[:, cells:]
        out[:, -cells:] = w[:, [-1]]
    else:
        out[:, -cells:] = w[:, :cells]
        out[:, : -cells] = w[:, [0]]
    return out


def run(config: SimConfig) -> tuple[list[SimState], ModeLog, InterfaceLog]:
    """Integrate to t_end; returns (snapshots, mode_log, interface_log).

    Snapshots are taken at t = 0, then every snapshot_every (if positive),
    and always at the final time.  Interface and mode amplitudes are
    logged every log_every steps.  t_end is rounded to a whole number of
    steps.
    """
    skeleton = _resolve_skeleton(config)
    state = init_front_state(config, _skeleton=skeleton)
    plan = _make_plan(config)
    mode_log = state.mode_log
    lx, ly = config.domain
    n_steps = max(1, int(round(config.t_end / config.dt)))

    interface_log = InterfaceLog()
    interface_log.times.append(state.t)
    interface_log.positions.append(state.interface.copy())

    def snap(s: SimState) -> SimState:
        return replace(s, U=s.U.copy(), V=s.V.copy(), interface=s.interface.copy())

    snapshots = [snap(state)]
    next_snap = config.snapshot_every if config.snapshot_every > 0.0 else math.inf

    for k in range(1, n_steps + 1):
        state = step(state, config, _plan=plan)
        if k % config.log_every == 0 or k == n_steps:
            interface_log.times.append(state.t)
            interface_log.positions.append(state.interface.copy())
            if mode_log is not None and mode_log.ells:
                mode_log.times.append(state.t)
                mode_log.amplitudes.append(_mode_amplitudes(state.interface, mode_log.ells, ly))
        if state.t >= next_snap - 1e-9 * config.dt:
            snapshots.append(snap(state))
            next_snap += config.snapshot_every
        if config.comoving and np.isfinite(state.interface).any():
            mean_local = float(np.nanmean(state.interface)) - state.x_offset
            cells = int(round((mean_local - 0.5 * lx) / state.dx))
            if cells != 0:
                state.U = _shift_window(state.U, cells)
                state.V = _shift_window(state.V, cells)
                state.x_offset += cells * state.dx
                state.interface = interface_position(state)

    if snapshots[-1].t != state.t:
        snapshots.append(snap(state))
    return snapshots, mode_log, interface_log


# ---------------------------------------------------------------------------
# serialization


def write_snapshot(state: SimState, path: str | Path) -> Path:
    """FLB1: ASCII header, then U and V as little-endian float64 rows."""
    ny, nx = state.U.shape
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(f"FLB1 {nx} {ny} {state.dx!r} {state.dy!r} {state.t!r}\n".encode("ascii"))
        fh.write(np.ascontiguousarray(state.U, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(state.V, dtype="<f8").tobytes())
    return path


def read_snapshot(path: str | Path) -> tuple[float, float, float, np.ndarray, np.ndarray]:
    """Inverse of write_snapshot: (t, dx, dy, U, V)."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if len(header) != 6 or header[0] != "FLB1":
            raise ValidationError(f"{path}: not an FLB1 snapshot (header {header!r})")
        nx, ny = int(header[1]), int(header[2])
        dx, dy, t = float(header[3]), float(header[4]), float(header[5])
        payload = fh.read()
    need = 2 * nx * ny * 8
    if len(payload) != need:
        raise ValidationError(f"{path}: payload holds {len(payload)} bytes, expected {need}")
    flat = np.frombuffer(payload, dtype="<f8")
    u = flat[: nx * ny].reshape(ny, nx).copy()
    v = flat[nx * ny :].reshape(ny, nx).copy()
    return t, dx, dy, u, v


def write_mode_log(mode_log: ModeLog, path: str | Path) -> Path:
    path = Path(path)
    lines = ["t,ell,re_amplitude,im_amplitude"]
    for t, amps in zip(mode_log.times, mode_log.amplitudes):
        for ell, a in zip(mode_log.ells, amps):
            lines.append(f"{t!r},{ell!r},{float(a.real)!r},{float(a.imag)!r}")
    path.write_text("\n".join(lines) + "\n")
    return path


def write_interface_log(log: InterfaceLog, path: str | Path) -> Path:
    path = Path(path)
    ny = log.positions[0].size if log.positions else 0
    header = "t," + ",".join(f"x{j}" for j in range(ny))
    lines = [header]
    for t, pos in zip(log.times, log.positions):
        lines.append(f"{t!r}," + ",".join(repr(float(p)) for p in pos))
    path.write_text("\n".join(lines) + "\n")
    return path
