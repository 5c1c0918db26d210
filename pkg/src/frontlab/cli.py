"""Config-driven command line around the library.

Configs are flat ``key = value`` lines with ``#`` comments and bracketed
section headers; a key's full name is ``section.key``.  `parse_config`
checks everything visible at the text level (grammar, known keys, value
types, simple ranges) and reports offending line numbers; anything that
needs real computation is validated by the library calls during
dispatch and surfaces as the usual typed errors.

Commands: construct | criterion | spectrum | simulate | bifurcate |
sweep, each writing its artifacts into the --out directory.  Exit
codes: 0 ok, 2 config parse, 3 validation, 4 numerical failure,
5 requested object does not exist.  Outputs contain no timestamps and
floats are written with repr, so identical configs (and seed) produce
byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import sim2d
from .criteria import (
    REPORT_COLUMNS,
    criterion_report,
    report_csv_header,
    report_csv_row,
    report_text,
)
from .errors import (
    FrontlabError,
    NoSolutionError,
    NumericalError,
    OutOfWindow,
    ParseError,
    ValidationError,
)
from .geometry import build_front, tw_bifurcation, write_skeleton_bundle
from .models import TauRegime, make_model
from .spectral import GridSpec, eigenvalue_curve, write_curve_bundle

__all__ = ["RunConfig", "parse_config", "dispatch", "main"]

COMMANDS = ("construct", "criterion", "spectrum", "simulate", "bifurcate", "sweep")

_SECTION_RE = re.compile(r"^\[([a-z][a-z0-9_]*)\]$")
_KEY_RE = re.compile(r"^[a-z][a-z0-9_]*$")


@dataclass(frozen=True)
class RunConfig:
    """A fully validated run request; `model` is already constructed."""

    command: str
    model_name: str
    params: tuple[tuple[str, float], ...]
    regime: TauRegime
    eps: float
    seed: int
    options: dict
    model: object
    out_dir: str = "."


# ---------------------------------------------------------------------------
# grammar: lines -> {full_key: (raw_value, line_number)}


def _scan(text: str) -> dict[str, tuple[str, int]]:
    table: dict[str, tuple[str, int]] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            m = _SECTION_RE.match(line)
            if not m:
                raise ParseError(f"malformed section header {line!r}", line=lineno)
            section = m.group(1)
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", line=lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not _KEY_RE.match(key):
            raise ParseError(f"malformed key {key!r}", line=lineno)
        if not value:
            raise ParseError(f"empty value for key {key!r}", line=lineno)
        full = f"{section}.{key}" if section else key
        if full in table:
            raise ParseError(
                f"duplicate key {full!r} (first set on line {table[full][1]})", line=lineno
            )
        table[full] = (value, lineno)
    return table


# ---------------------------------------------------------------------------
# value parsers


def _as_float(key, value, line):
    try:
        return float(value)
    except ValueError:
        raise ValidationError(f"{key} expects a number, got {value!r}", line=line) from None


def _as_int(key, value, line):
    try:
        return int(value)
    except ValueError:
        raise ValidationError(f"{key} expects an integer, got {value!r}", line=line) from None


def _as_bool(key, value, line):
    low = value.lower()
    if low in ("true", "false"):
        return low == "true"
    raise ValidationError(f"{key} expects true or false, got {value!r}", line=line)


def _as_str(key, value, line):
    return value


def _choice(*allowed):
    def parse(key, value, line):
        if value not in allowed:
            raise ValidationError(f"{key} must be one of {allowed}, got {value!r}", line=line)
        return value

    return parse


def _as_modes(key, value, line):
    # comma-separated ell[:amplitude[:phase]]; amplitude "auto" (or omitted)
    # means the default seeding amplitude
    modes = []
    for part in value.split(","):
        bits = [b.strip() for b in part.strip().split(":")]
        if not 1 <= len(bits) <= 3 or not bits[0]:
            raise ValidationError(f"{key}: malformed mode {part.strip()!r}", line=line)
        ell = _as_float(key, bits[0], line)
        amp = None
        if len(bits) > 1 and bits[1] not in ("", "auto"):
            amp = _as_float(key, bits[1], line)
        phase = _as_float(key, bits[2], line) if len(bits) > 2 else 0.0
        modes.append((ell, amp, phase))
    return tuple(modes)


# full key -> (parser, default); None default means "absent unless given"
_KEYS = {
    "command": (_choice(*COMMANDS), "construct"),
    "model": (_as_str, None),
    "eps": (_as_float, None),
    "seed": (_as_int, 0),
    "n_samples": (_as_int, 1600),
    "which": (_as_int, 0),
    "regime.kind": (_choice("order_one", "order_eps"), "order_one"),
    "regime.value": (_as_float, 1.0),
    "criterion.tau_tilde": (_as_float, None),
    "spectrum.h": (_as_float, 0.02),
    "spectrum.l": (_as_float, None),
    "spectrum.boundary": (_choice("dirichlet", "neumann"), "dirichlet"),
    "spectrum.refine": (_as_bool, True),
    "spectrum.ell_max": (_as_float, 0.2),
    "spectrum.n_ell": (_as_int, 21),
    "simulate.lx": (_as_float, 40.0),
    "simulate.ly": (_as_float, 20.0),
    "simulate.nx": (_as_int, 512),
    "simulate.ny": (_as_int, 256),
    "simulate.dt": (_as_float, 0.01),
    "simulate.t_end": (_as_float, 1.0),
    "simulate.comoving": (_as_bool, False),
    "simulate.snapshot_every": (_as_float, 0.0),
    "simulate.log_every": (_as_int, 1),
    "simulate.modes": (_as_modes, ()),
    "simulate.initial": (_as_str, None),
    "simulate.noise_modes": (_as_int, 0),
    "simulate.noise_amplitude": (_as_float, 0.0),
    "bifurcate.span": (_as_float, 0.4),
    "bifurcate.count": (_as_int, 9),
    "sweep.parameter": (_as_str, None),
    "sweep.start": (_as_float, None),
    "sweep.stop": (_as_float, None),
    "sweep.count": (_as_int, None),
    "sweep.workers": (_as_int, 1),
}


def _require(options, table, key, command):
    if options[key] is None:
        raise ValidationError(f"command {command!r} requires key {key!r}")
    return options[key]


def parse_config(text: str) -> RunConfig:
    """Parse and validate a config; raises ParseError / ValidationError
    with the offending line number where one exists."""
    table = _scan(text)

    options: dict = {}
    param_items: list[tuple[str, float, int]] = []
    for full, (value, line) in table.items():
        if full.startswith("params."):
            param_items.append((full[len("params."):], _as_float(full, value, line), line))
            continue
        if full not in _KEYS:
            raise ValidationError(f"unknown key {full!r}", line=line)
    for full, (parser, default) in _KEYS.items():
        if full in table:
            value, line = table[full]
            options[full] = parser(full, value, line)
        else:
            options[full] = default

    command = options["command"]
    if options["model"] is None:
        raise ValidationError("missing required key 'model'")
    if options["eps"] is None:
        raise ValidationError("missing required key 'eps'")
    if options["eps"] <= 0:
        raise ValidationError(
            f"eps must be positive, got {options['eps']!r}", line=table["eps"][1]
        )

    model_name = options["model"]
    regime = (
        TauRegime.order_one(options["regime.value"])
        if options["regime.kind"] == "order_one"
        else TauRegime.order_eps(options["regime.value"])
    )

    # validate parameter names one by one so the error can carry a line
    known = [k for k, _ in make_model(model_name).params]
    for name, _, line in param_items:
        if name not in known:
            raise ValidationError(
                f"unknown parameter params.{name!r}; {model_name} has {known}", line=line
            )
    params = tuple((name, value) for name, value, _ in param_items)
    model = make_model(model_name, dict(params), regime)

    if command == "sweep":
        pname = _require(options, table, "sweep.parameter", command)
        if pname not in known:
            raise ValidationError(
                f"sweep.parameter {pname!r} is not a parameter of {model_name} ({known})",
                line=table["sweep.parameter"][1],
            )
        _require(options, table, "sweep.start", command)
        _require(options, table, "sweep.stop", command)
        count = _require(options, table, "sweep.count", command)
        if count < 2:
            raise ValidationError(
                f"sweep.count must be at least 2, got {count}", line=table["sweep.count"][1]
            )
        if options["sweep.workers"] < 1:
            raise ValidationError("sweep.workers must be at least 1")
    if command == "spectrum" and options["spectrum.n_ell"] < 4:
        raise ValidationError(
            f"spectrum.n_ell must be at least 4, got {options['spectrum.n_ell']}",
            line=table["spectrum.n_ell"][1] if "spectrum.n_ell" in table else None,
        )
    if command == "bifurcate" and not 0.0 < options["bifurcate.span"] < 1.0:
        raise ValidationError(
            f"bifurcate.span must lie in (0, 1), got {options['bifurcate.span']!r}"
        )
    if options["simulate.initial"] is not None:
        if options["simulate.modes"]:
            raise ValidationError(
                "simulate.initial and simulate.modes are mutually exclusive",
                line=table["simulate.initial"][1],
            )
        if not Path(options["simulate.initial"]).is_file():
            raise ValidationError(
                f"simulate.initial file {options['simulate.initial']!r} does not exist",
                line=table["simulate.initial"][1],
            )
    if options["simulate.noise_modes"] < 0 or options["simulate.noise_amplitude"] < 0:
        raise ValidationError("noise_modes and noise_amplitude must be nonnegative")

    return RunConfig(
        command=command,
        model_name=model_name,
        params=params,
        regime=regime,
        eps=options["eps"],
        seed=options["seed"],
        options=options,
        model=model,
    )


# ---------------------------------------------------------------------------
# commands


def _skeleton_for(config: RunConfig):
    fronts = build_front(config.model, config.eps, n_samples=config.options["n_samples"])
    which = config.options["which"]
    if not 0 <= which < len(fronts):
        raise ValidationError(f"which = {which} but the model has {len(fronts)} front(s)")
    return fronts, fronts[which]


def _write_text(path: str, text: str) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def _fmt(value) -> str:
    # numpy scalars repr as np.float64(...); emit the plain number so the
    # artifact files stay parseable by float()
    if hasattr(value, "item"):
        value = value.item()
    return repr(value)


def _cmd_construct(config: RunConfig, progress) -> list[str]:
    fronts, chosen = _skeleton_for(config)
    progress(f"built {len(fronts)} front(s); writing #{config.options['which']}")
    paths = write_skeleton_bundle(chosen, config.out_dir)
    lines = [f"n_fronts = {len(fronts)}", f"which = {config.options['which']}"]
    for i, fr in enumerate(fronts):
        lines.append(f"speed_{i} = {_fmt(fr.speed)}")
    lines.append(f"v_star = {_fmt(chosen.jump.v_star)}")
    summary = _write_text(os.path.join(config.out_dir, "summary.txt"), "\n".join(lines) + "\n")
    return list(paths) + [summary]


def _cmd_criterion(config: RunConfig, progress) -> list[str]:
    _, skeleton = _skeleton_for(config)
    report = criterion_report(skeleton, config.eps, tau_tilde=config.options["criterion.tau_tilde"])
    progress(f"verdict: {report.verdict.value}")
    txt = _write_text(os.path.join(config.out_dir, "report.txt"), report_text(report))
    csv = _write_text(
        os.path.join(config.out_dir, "report.csv"),
        report_csv_header() + "\n" + report_csv_row(report) + "\n",
    )
    return [txt, csv]


def _cmd_spectrum(config: RunConfig, progress) -> list[str]:
    _, skeleton = _skeleton_for(config)
    report = criterion_report(skeleton, config.eps, tau_tilde=config.options["criterion.tau_tilde"])
    opts = config.options
    spec = GridSpec(
        h=opts["spectrum.h"],
        L=opts["spectrum.l"],
        boundary=opts["spectrum.boundary"],
        refine=opts["spectrum.refine"],
    )
    ells = np.linspace(0.0, opts["spectrum.ell_max"], opts["spectrum.n_ell"])
    progress(f"eigenvalue curve over {len(ells)} wavenumbers up to {opts['spectrum.ell_max']}")
    curve = eigenvalue_curve(skeleton, ells, spec)
    meta = {
        "model": config.model_name,
        "eps": config.eps,
        "speed": skeleton.speed,
        "lambda2c": report.lambda2c,
        "verdict": report.verdict.value,
    }
    csv_path, meta_path = write_curve_bundle(curve, meta, config.out_dir)
    return [csv_path, meta_path]


def _cmd_simulate(config: RunConfig, progress) -> list[str]:
    opts = config.options
    modes = list(opts["simulate.modes"])
    if opts["simulate.noise_modes"] > 0 and opts["simulate.noise_amplitude"] > 0.0:
        # reproducible roughness: random phases on the first few harmonics
        rng = np.random.default_rng(config.seed)
        base = 2.0 * math.pi / opts["simulate.ly"]
        for n in range(1, opts["simulate.noise_modes"] + 1):
            modes.append((n * base, opts["simulate.noise_amplitude"], float(rng.uniform(0.0, 2.0 * math.pi))))
    initial = opts["simulate.initial"]
    sim_cfg = sim2d.SimConfig(
        model=config.model,
        eps=config.eps,
        domain=(opts["simulate.lx"], opts["simulate.ly"]),
        grid=(opts["simulate.nx"], opts["simulate.ny"]),
        dt=opts["simulate.dt"],
        t_end=opts["simulate.t_end"],
        initial=initial if initial is not None else sim2d.ModeSeed(tuple(modes)),
        comoving=opts["simulate.comoving"],
        snapshot_every=opts["simulate.snapshot_every"],
        log_every=opts["simulate.log_every"],
    )
    progress(f"integrating to t = {sim_cfg.t_end} on a {sim_cfg.grid} grid")
    snapshots, mode_log, interface_log = sim2d.run(sim_cfg)
    paths = []
    for i, snap in enumerate(snapshots):
        paths.append(os.path.join(config.out_dir, f"snap_{i:04d}.flb"))
        sim2d.write_snapshot(snap, paths[-1])
    paths.append(os.path.join(config.out_dir, "mode_log.csv"))
    sim2d.write_mode_log(mode_log, paths[-1])
    paths.append(os.path.join(config.out_dir, "interface.csv"))
    sim2d.write_interface_log(interface_log, paths[-1])
    final = snapshots[-1]
    meta = [
        f"model = {config.model_name}",
        f"eps = {config.eps!r}",
        f"lx = {opts['simulate.lx']!r}",
        f"ly = {opts['simulate.ly']!r}",
        f"nx = {opts['simulate.nx']}",
        f"ny = {opts['simulate.ny']}",
        f"dt = {opts['simulate.dt']!r}",
        f"t_final = {_fmt(final.t)}",
        f"u_mid = {_fmt(final.u_mid)}",
        f"fast_width = {_fmt(mode_log.fast_width)}",
        f"x_offset_final = {_fmt(final.x_offset)}",
    ]
    paths.append(_write_text(os.path.join(config.out_dir, "run_meta.txt"), "\n".join(meta) + "\n"))
    return paths


def _cmd_bifurcate(config: RunConfig, progress) -> list[str]:
    onset = tw_bifurcation(config.model)
    progress(f"tau_tilde_star = {onset.tau_tilde_star!r}")
    lines = [
        f"tau_tilde_star = {_fmt(onset.tau_tilde_star)}",
        f"v_star_stationary = {_fmt(onset.v_star_stationary)}",
        f"branch_slope_fast = {_fmt(onset.branch_slope_data[0])}",
        f"branch_slope_slow = {_fmt(onset.branch_slope_data[1])}",
    ]
    txt = _write_text(os.path.join(config.out_dir, "bifurcate.txt"), "\n".join(lines) + "\n")

    span, count = config.options["bifurcate.span"], config.options["bifurcate.count"]
    rows = ["tau_tilde,branch,speed"]
    for tau_tilde in np.linspace((1.0 - span) * onset.tau_tilde_star, (1.0 + span) * onset.tau_tilde_star, count):
        model_t = make_model(config.model_name, dict(config.params), TauRegime.order_eps(float(tau_tilde)))
        for branch, front in enumerate(build_front(model_t, config.eps, n_samples=config.options["n_samples"])):
            rows.append(f"{_fmt(tau_tilde)},{branch},{_fmt(front.speed)}")
        progress(f"tau_tilde = {tau_tilde:.6g}: {branch + 1} front(s)")
    csv = _write_text(os.path.join(config.out_dir, "branch.csv"), "\n".join(rows) + "\n")
    return [txt, csv]


def _sweep_point(model_name, params, regime_kind, regime_value, eps, n_samples, pname, value):
    # executed in worker processes: rebuild everything from primitives
    regime = (
        TauRegime.order_one(regime_value)
        if regime_kind == "order_one"
        else TauRegime.order_eps(regime_value)
    )
    merged = dict(params)
    merged[pname] = value
    try:
        model = make_model(model_name, merged, regime)
        front = build_front(model, eps, n_samples=n_samples)[0]
        report = criterion_report(front, eps)
        return report_csv_row(report)
    except FrontlabError as err:
        nan = repr(float("nan"))
        cells = {name: nan for name in REPORT_COLUMNS}
        cells["eps"] = repr(eps)
        cells["verdict"] = type(err).__name__
        return ",".join(cells[name] for name in REPORT_COLUMNS)


def _cmd_sweep(config: RunConfig, progress) -> list[str]:
    opts = config.options
    pname = opts["sweep.parameter"]
    values = np.linspace(opts["sweep.start"], opts["sweep.stop"], opts["sweep.count"])
    args = [
        (
            config.model_name,
            config.params,
            config.regime.kind,
            config.regime.value,
            config.eps,
            opts["n_samples"],
            pname,
            float(v),
        )
        for v in values
    ]
    if opts["sweep.workers"] > 1:
        with ProcessPoolExecutor(max_workers=opts["sweep.workers"]) as pool:
            rows = list(pool.map(_sweep_point, *zip(*args)))
    else:
        rows = [_sweep_point(*a) for a in args]
    lines = [f"{pname},{report_csv_header()}"]
    for v, row in zip(values, rows):  # written in input order regardless of pool
        progress(f"{pname} = {v:.6g}")
        lines.append(f"{float(v)!r},{row}")
    csv = _write_text(os.path.join(config.out_dir, "sweep.csv"), "\n".join(lines) + "\n")
    return [csv]


_DISPATCH = {
    "construct": _cmd_construct,
    "criterion": _cmd_criterion,
    "spectrum": _cmd_spectrum,
    "simulate": _cmd_simulate,
    "bifurcate": _cmd_bifurcate,
    "sweep": _cmd_sweep,
}


def dispatch(config: RunConfig, verbose: bool = False) -> list[str]:
    """Run the command; returns the artifact paths it wrote."""

    def progress(msg: str) -> None:
        if verbose:
            print(f"frontlab: {msg}", file=sys.stderr)

    os.makedirs(config.out_dir, exist_ok=True)
    return _DISPATCH[config.command](config, progress)


# ---------------------------------------------------------------------------
# entry point


def _exit_code(err: FrontlabError) -> int:
    if isinstance(err, ParseError):
        return 2
    if isinstance(err, ValidationError):
        return 3
    if isinstance(err, (NoSolutionError, OutOfWindow)):
        return 5
    return 4  # numerical failures and runtime front diagnostics


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="frontlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=".")
        p.add_argument("--verbose", action="store_true")
    ns = parser.parse_args(argv)

    try:
        try:
            text = Path(ns.config).read_text(encoding="utf-8")
        except OSError as err:
            raise ValidationError(f"cannot read config {ns.config!r}: {err}") from None
        config = parse_config(text)
        if "command" in _scan(text) and config.command != ns.command:
            raise ValidationError(
                f"config says command = {config.command!r} but the "
                f"command line asked for {ns.command!r}"
            )
        config = RunConfig(
            command=ns.command,
            model_name=config.model_name,
            params=config.params,
            regime=config.regime,
            eps=config.eps,
            seed=config.seed,
            options=config.options,
            model=config.model,
            out_dir=ns.out,
        )
        for path in dispatch(config, verbose=ns.verbose):
            print(path)
    except FrontlabError as err:
        line = getattr(err, "line", None)
        where = f" (line {line})" if line else ""
        print(f"frontlab {ns.command}: {type(err).__name__}{where}: {err}", file=sys.stderr)
        return _exit_code(err)
    return 0


if __name__ == "__main__":
    sys.exit(main())
