"""render() over all three figure kinds, against the committed fixtures."""

import pytest

from frontplot import FigureRecipe, InputError, render

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _written(path):
    return path.is_file() and path.read_bytes()[:8] == PNG_MAGIC


def test_snapshot_row_renders_one_panel_per_file(tmp_path, snaps):
    out = tmp_path / "row.png"
    got = render(FigureRecipe(kind="field_snapshot_row", inputs=tuple(snaps)), out)
    assert got == out and _written(out)


def test_snapshot_row_draws_the_slow_field_too(tmp_path, snaps):
    out = tmp_path / "row_v.png"
    recipe = FigureRecipe(
        kind="field_snapshot_row", inputs=tuple(snaps), field="v", cmap="magma")
    assert _written(render(recipe, out))


def test_spectral_comparison_overlays_curve_and_parabola(tmp_path, fixtures):
    out = tmp_path / "overlay.png"
    recipe = FigureRecipe(
        kind="spectral_comparison",
        inputs=(fixtures / "curve.csv", fixtures / "curve_meta.txt"),
    )
    assert _written(render(recipe, out))


def test_sweep_heatmap_renders_fixture_column(tmp_path, fixtures):
    out = tmp_path / "heat.png"
    recipe = FigureRecipe(kind="sweep_heatmap", inputs=(fixtures / "sweep.csv",))
    assert _written(render(recipe, out))


def test_header_only_sweep_renders_without_crashing(tmp_path, fixtures):
    out = tmp_path / "heat_empty.png"
    recipe = FigureRecipe(kind="sweep_heatmap", inputs=(fixtures / "sweep_empty.csv",))
    assert _written(render(recipe, out))


def test_render_creates_missing_output_directories(tmp_path, snaps):
    out = tmp_path / "deep" / "down" / "row.png"
    render(FigureRecipe(kind="field_snapshot_row", inputs=(snaps[0],)), out)
    assert _written(out)


def test_missing_input_is_reported_with_its_path(tmp_path):
    ghost = tmp_path / "ghost.flb"
    recipe = FigureRecipe(kind="field_snapshot_row", inputs=(ghost,))
    with pytest.raises(InputError) as err:
        render(recipe, tmp_path / "x.png")
    assert str(ghost) in str(err.value)


def test_unknown_kind_is_rejected(tmp_path):
    with pytest.raises(InputError, match="unknown figure kind"):
        render(FigureRecipe(kind="pie_chart"), tmp_path / "x.png")


def test_recipe_without_inputs_is_rejected(tmp_path):
    with pytest.raises(InputError, match="no input files"):
        render(FigureRecipe(kind="sweep_heatmap"), tmp_path / "x.png")


def test_bad_field_is_rejected(tmp_path, snaps):
    recipe = FigureRecipe(kind="field_snapshot_row", inputs=(snaps[0],), field="w")
    with pytest.raises(InputError, match="field"):
        render(recipe, tmp_path / "x.png")


def test_unknown_sweep_column_is_rejected(tmp_path, fixtures):
    recipe = FigureRecipe(
        kind="sweep_heatmap", inputs=(fixtures / "sweep.csv",), column="speed")
    with pytest.raises(InputError, match="no column"):
        render(recipe, tmp_path / "x.png")


def test_spectral_comparison_needs_curve_and_sidecar(tmp_path, fixtures):
    recipe = FigureRecipe(
        kind="spectral_comparison", inputs=(fixtures / "curve.csv",))
    with pytest.raises(InputError, match="exactly"):
        render(recipe, tmp_path / "x.png")
