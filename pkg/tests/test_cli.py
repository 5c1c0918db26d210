import math
import os

import numpy as np
import pytest

from frontlab import cli
from frontlab.criteria import REPORT_COLUMNS
from frontlab.errors import (
    BlowUp,
    EscapeWithoutEvent,
    GridTooCoarse,
    OutOfWindow,
    ParseError,
    SaddleMissing,
    ValidationError,
)


def _parse(text):
    return cli.parse_config(text)


# ---------------------------------------------------------------------------
# grammar and validation


def test_minimal_config_fills_defaults():
    cfg = _parse("model = fhn\neps = 0.01\n")
    assert cfg.command == "construct"
    assert cfg.model_name == "fhn"
    assert cfg.eps == 0.01
    assert cfg.seed == 0
    assert cfg.params == ()
    assert cfg.regime.kind == "order_one" and cfg.regime.value == 1.0
    assert cfg.options["n_samples"] == 1600
    assert cfg.model.name == "fhn"


def test_sections_comments_and_spacing():
    cfg = _parse(
        """
        # transversal dispersion of the published stable front
        command = spectrum
        model = fhn
        eps = 0.01

        [params]
        mu1 = 4.0
        mu2 = 1.0
        mu3 = 0.0

        [regime]
        kind = order_one
        value = 1.0   # tau

        [spectrum]
        ell_max = 0.03
        n_ell = 13
        """
    )
    assert cfg.command == "spectrum"
    assert dict(cfg.params) == {"mu1": 4.0, "mu2": 1.0, "mu3": 0.0}
    assert cfg.options["spectrum.ell_max"] == 0.03
    assert cfg.options["spectrum.n_ell"] == 13
    assert cfg.model.param("mu2") == 1.0


def test_unknown_key_names_key_and_line():
    with pytest.raises(ValidationError) as exc:
        _parse("model = fhn\neps = 0.01\nbogus = 3\n")
    assert "bogus" in str(exc.value)
    assert exc.value.line == 3


def test_unknown_section_key_uses_full_name():
    with pytest.raises(ValidationError) as exc:
        _parse("model = fhn\neps = 0.01\n[spectrum]\nwidth = 2\n")
    assert "spectrum.width" in str(exc.value)
    assert exc.value.line == 4


def test_duplicate_key_reports_both_lines():
    with pytest.raises(ParseError) as exc:
        _parse("model = fhn\neps = 0.01\neps = 0.02\n")
    assert exc.value.line == 3
    assert "line 2" in str(exc.value)


def test_missing_equals_is_parse_error():
    with pytest.raises(ParseError) as exc:
        _parse("model fhn\n")
    assert exc.value.line == 1


def test_malformed_section_header():
    with pytest.raises(ParseError) as exc:
        _parse("model = fhn\n[Not A Section\neps = 0.01\n")
    assert exc.value.line == 2


def test_empty_value_is_parse_error():
    with pytest.raises(ParseError):
        _parse("model =\neps = 0.01\n")


def test_non_numeric_eps_reports_line():
    with pytest.raises(ValidationError) as exc:
        _parse("model = fhn\neps = tiny\n")
    assert exc.value.line == 2


def test_model_and_eps_are_required():
    with pytest.raises(ValidationError, match="model"):
        _parse("eps = 0.01\n")
    with pytest.raises(ValidationError, match="eps"):
        _parse("model = fhn\n")


def test_unknown_model_parameter_names_line():
    with pytest.raises(ValidationError) as exc:
        _parse("model = bcde\neps = 0.02\n[params]\nzeta = 1.0\n")
    assert "params.'zeta'" in str(exc.value) or "zeta" in str(exc.value)
    assert exc.value.line == 4


def test_command_must_be_known():
    with pytest.raises(ValidationError, match="command"):
        _parse("command = explode\nmodel = fhn\neps = 0.01\n")


def test_boundary_choice_is_checked():
    with pytest.raises(ValidationError, match="boundary"):
        _parse("model = fhn\neps = 0.01\n[spectrum]\nboundary = robin\n")


def test_mode_list_syntax():
    cfg = _parse(
        "command = simulate\nmodel = fhn\neps = 0.1\n"
        "[simulate]\nmodes = 0.1, 0.2:0.05, 0.3:auto:1.5\n"
    )
    assert cfg.options["simulate.modes"] == (
        (0.1, None, 0.0), (0.2, 0.05, 0.0), (0.3, None, 1.5))
    with pytest.raises(ValidationError, match="mode"):
        _parse("command = simulate\nmodel = fhn\neps = 0.1\n[simulate]\nmodes = 0.1:x\n")


def test_sweep_requires_range_keys():
    base = "command = sweep\nmodel = fhn\neps = 0.05\n[sweep]\nparameter = mu2\n"
    with pytest.raises(ValidationError, match="sweep.start"):
        _parse(base)
    with pytest.raises(ValidationError, match="not a parameter"):
        _parse(
            "command = sweep\nmodel = fhn\neps = 0.05\n"
            "[sweep]\nparameter = zeta\nstart = 0\nstop = 1\ncount = 3\n"
        )


def test_spectrum_needs_enough_wavenumbers():
    with pytest.raises(ValidationError, match="n_ell"):
        _parse("command = spectrum\nmodel = fhn\neps = 0.01\n[spectrum]\nn_ell = 3\n")


def test_initial_and_modes_clash():
    with pytest.raises(ValidationError, match="mutually exclusive"):
        _parse(
            "command = simulate\nmodel = fhn\neps = 0.1\n"
            "[simulate]\nmodes = 0.1\ninitial = somewhere.flb\n"
        )


def test_initial_file_must_exist(tmp_path):
    with pytest.raises(ValidationError, match="does not exist"):
        _parse(
            "command = simulate\nmodel = fhn\neps = 0.1\n"
            f"[simulate]\ninitial = {tmp_path / 'missing.flb'}\n"
        )


# ---------------------------------------------------------------------------
# commands (each into a tmp dir; configs kept tiny)


def _run(text, out_dir, command=None):
    cfg = cli.parse_config(text)
    cfg = cli.RunConfig(
        command=command or cfg.command, model_name=cfg.model_name, params=cfg.params,
        regime=cfg.regime, eps=cfg.eps, seed=cfg.seed, options=cfg.options,
        model=cfg.model, out_dir=str(out_dir),
    )
    return cli.dispatch(cfg)


def test_construct_writes_skeleton_bundle(tmp_path):
    paths = _run("model = bcde\neps = 0.02\nn_samples = 400\n", tmp_path)
    names = {os.path.basename(p) for p in paths}
    assert {"slow_minus.csv", "fast.csv", "slow_plus.csv", "summary.txt"} <= names
    summary = (tmp_path / "summary.txt").read_text()
    assert "n_fronts = 1" in summary
    v_star = float(summary.split("v_star = ")[1].splitlines()[0])
    assert v_star > 0.0
    fast = (tmp_path / "fast.csv").read_text().splitlines()
    assert fast[0] == "xi,u,p"
    assert len(fast) > 100
    assert all(len(line.split(",")) == 3 for line in fast[1:])


def test_criterion_reports_instability_verdict(tmp_path):
    _run("command = criterion\nmodel = bcde\neps = 0.02\nn_samples = 400\n", tmp_path)
    text = (tmp_path / "report.txt").read_text()
    assert "verdict = TransversallyUnstable" in text
    header, row = (tmp_path / "report.csv").read_text().splitlines()
    assert header == ",".join(REPORT_COLUMNS)
    cells = dict(zip(header.split(","), row.split(",")))
    assert cells["verdict"] == "TransversallyUnstable"
    assert float(cells["lambda2c"]) > 0.0
    assert float(cells["f_star"]) > 0.0 and float(cells["g_star"]) < 0.0


def test_spectrum_writes_curve_and_sidecar(tmp_path):
    _run(
        "command = spectrum\nmodel = fhn\neps = 0.1\nn_samples = 400\n"
        "[spectrum]\nell_max = 0.005\nn_ell = 7\n",
        tmp_path,
    )
    rows = (tmp_path / "curve.csv").read_text().splitlines()
    assert rows[0] == "ell,re_lambda,im_lambda"
    assert len(rows) == 8
    meta = dict(
        line.split(" = ", 1) for line in (tmp_path / "curve_meta.txt").read_text().splitlines()
    )
    assert meta["model"] == "'fhn'"
    assert meta["verdict"] == "'LongWaveStable'"
    fitted = float(meta["fitted_lambda2"])
    assert float(meta["lambda2c"]) < 0.0
    assert fitted < 0.0


def test_bifurcate_locates_onset(tmp_path):
    _run(
        "command = bifurcate\nmodel = fhn\neps = 0.01\nn_samples = 400\n"
        "[params]\nmu1 = 4\nmu2 = 1\nmu3 = 2\n"
        "[regime]\nkind = order_eps\nvalue = 0.05\n"
        "[bifurcate]\nspan = 0.5\ncount = 3\n",
        tmp_path,
    )
    text = (tmp_path / "bifurcate.txt").read_text()
    star = float(text.split("tau_tilde_star = ")[1].splitlines()[0])
    assert abs(star - 1.0 / (3.0 * math.sqrt(6.0))) < 1e-8
    rows = (tmp_path / "branch.csv").read_text().splitlines()
    assert rows[0] == "tau_tilde,branch,speed"
    taus = sorted({float(r.split(",")[0]) for r in rows[1:]})
    assert len(taus) == 3
    below = [r for r in rows[1:] if float(r.split(",")[0]) < star]
    assert any(abs(float(r.split(",")[2])) > 1e-6 for r in below)


def test_sweep_tracks_sign_change(tmp_path):
    text = (
        "command = sweep\nmodel = fhn\neps = 0.05\nn_samples = 400\n"
        "[sweep]\nparameter = mu2\nstart = -1\nstop = 1\ncount = 4\n"
    )
    _run(text, tmp_path)
    rows = (tmp_path / "sweep.csv").read_text().splitlines()
    assert rows[0] == "mu2," + ",".join(REPORT_COLUMNS)
    assert len(rows) == 5
    lam_col = rows[0].split(",").index("lambda2c")
    lams = [float(r.split(",")[lam_col]) for r in rows[1:]]
    assert lams[0] > 0.0 and lams[1] > 0.0  # mu2 < 0: (f+)' - (fc)' < 0
    assert lams[2] < 0.0 and lams[3] < 0.0
    verdicts = [r.split(",")[rows[0].split(",").index("verdict")] for r in rows[1:]]
    assert verdicts[0] == "TransversallyUnstable" and verdicts[-1] == "LongWaveStable"


def test_sweep_worker_pool_matches_serial(tmp_path):
    text = (
        "command = sweep\nmodel = fhn\neps = 0.05\nn_samples = 400\n"
        "[sweep]\nparameter = mu2\nstart = 0.5\nstop = 1\ncount = 2\nworkers = {w}\n"
    )
    _run(text.format(w=1), tmp_path / "serial")
    _run(text.format(w=2), tmp_path / "pool")
    assert (tmp_path / "serial/sweep.csv").read_bytes() == (tmp_path / "pool/sweep.csv").read_bytes()


def test_sweep_degenerate_point_becomes_error_row(tmp_path):
    # mu2 = 0 makes the long-wave prefactor vanish: the run must keep going
    # and mark the row rather than die
    _run(
        "command = sweep\nmodel = fhn\neps = 0.05\nn_samples = 400\n"
        "[sweep]\nparameter = mu2\nstart = -0.5\nstop = 0.5\ncount = 3\n",
        tmp_path,
    )
    rows = (tmp_path / "sweep.csv").read_text().splitlines()
    assert len(rows) == 4
    mid = dict(zip(rows[0].split(","), rows[2].split(",")))
    assert mid["mu2"] == "0.0"
    assert mid["verdict"] not in ("TransversallyUnstable", "LongWaveStable")


def _simulate_text(**extra):
    lines = [
        "command = simulate", "model = fhn", "eps = 0.1", "seed = 7",
        "[simulate]", "lx = 20", "ly = 10", "nx = 160", "ny = 16",
        "dt = 0.01", "t_end = 0.05", "log_every = 1",
    ]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    return "\n".join(lines) + "\n"


def test_simulate_writes_run_artifacts(tmp_path):
    ell1 = 2.0 * math.pi / 10.0
    paths = _run(_simulate_text(modes=f"{ell1!r}"), tmp_path)
    names = [os.path.basename(p) for p in paths]
    assert names[0] == "snap_0000.flb"
    assert {"mode_log.csv", "interface.csv", "run_meta.txt"} <= set(names)
    meta = dict(
        line.split(" = ", 1) for line in (tmp_path / "run_meta.txt").read_text().splitlines()
    )
    assert meta["nx"] == "160" and float(meta["t_final"]) == 0.05
    assert float(meta["fast_width"]) > 0.0
    log = (tmp_path / "mode_log.csv").read_text().splitlines()
    assert log[0] == "t,ell,re_amplitude,im_amplitude"
    ells = {float(r.split(",")[1]) for r in log[1:]}
    assert ells == {0.0, ell1}


def test_simulate_noise_seed_is_reproducible(tmp_path):
    text = _simulate_text(noise_modes="2", noise_amplitude="1e-3")
    _run(text, tmp_path / "a")
    _run(text, tmp_path / "b")
    for name in ("mode_log.csv", "interface.csv", "snap_0000.flb", "run_meta.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


# ---------------------------------------------------------------------------
# entry point: exit codes and stream discipline


def test_exit_code_mapping():
    assert cli._exit_code(ParseError("x")) == 2
    assert cli._exit_code(ValidationError("x")) == 3
    assert cli._exit_code(SaddleMissing("x")) == 5
    assert cli._exit_code(OutOfWindow("x")) == 5
    assert cli._exit_code(BlowUp("x", t=1.0, where=(0, 0))) == 4
    assert cli._exit_code(EscapeWithoutEvent("x")) == 4
    assert cli._exit_code(GridTooCoarse("x")) == 4


def _main(tmp_path, text, command, capsys):
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text(text)
    out = tmp_path / "out"
    code = cli.main([command, "--config", str(cfg_path), "--out", str(out)])
    captured = capsys.readouterr()
    return code, captured, out


def test_main_success_prints_artifacts(tmp_path, capsys):
    code, captured, out = _main(
        tmp_path, "model = bcde\neps = 0.02\nn_samples = 400\n", "construct", capsys)
    assert code == 0
    printed = captured.out.strip().splitlines()
    assert str(out / "fast.csv") in printed
    assert all(os.path.exists(p) for p in printed)
    assert captured.err == ""


def test_main_parse_failure_exits_2(tmp_path, capsys):
    code, captured, _ = _main(tmp_path, "model fhn\n", "construct", capsys)
    assert code == 2
    assert "line 1" in captured.err
    assert captured.out == ""


def test_main_validation_failure_exits_3(tmp_path, capsys):
    code, captured, _ = _main(
        tmp_path, "model = fhn\neps = 0.01\nbogus = 1\n", "construct", capsys)
    assert code == 3
    assert "bogus" in captured.err


def test_main_command_mismatch_exits_3(tmp_path, capsys):
    code, captured, _ = _main(
        tmp_path, "command = criterion\nmodel = bcde\neps = 0.02\n", "construct", capsys)
    assert code == 3
    assert "criterion" in captured.err


def test_main_no_solution_exits_5(tmp_path, capsys):
    # the default bcde front travels, so there is no onset to report
    code, captured, _ = _main(
        tmp_path, "model = bcde\neps = 0.02\nn_samples = 400\n", "bifurcate", capsys)
    assert code == 5


def test_main_numerical_failure_exits_4(tmp_path, capsys):
    # 64 cells across 20 units leaves the fast layer under-resolved
    code, captured, _ = _main(
        tmp_path,
        "command = simulate\nmodel = fhn\neps = 0.1\n[simulate]\n"
        "lx = 20\nly = 10\nnx = 64\nny = 16\ndt = 0.01\nt_end = 0.02\n",
        "simulate",
        capsys,
    )
    assert code == 4
    assert "fast width" in captured.err


def test_main_verbose_progress_on_stderr(tmp_path, capsys):
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text("model = bcde\neps = 0.02\nn_samples = 400\n")
    out = tmp_path / "out"
    code = cli.main(
        ["construct", "--config", str(cfg_path), "--out", str(out), "--verbose"])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.err.startswith("frontlab:")


def test_main_missing_config_file_exits_3(tmp_path, capsys):
    code = cli.main(["construct", "--config", str(tmp_path / "nope.cfg")])
    captured = capsys.readouterr()
    assert code == 3
    assert "cannot read config" in captured.err
