from pathlib import Path

import numpy as np
import pytest

from rabifigs import PanelError, PanelSpec, load_csv, render_panel
from rabifigs.panels import Curve

DATA = Path(__file__).parent / "data"


def _spec(tmp_path, curves, x="t_over_tau", name="panel"):
    return PanelSpec(
        name=name, x=x, curves=curves, out=str(tmp_path / f"{name}.png")
    )


def test_render_single_curve(tmp_path):
    spec = _spec(tmp_path, [Curve("fig1d_adce.csv", "W_over_homega")])
    fig, out = render_panel(spec, csv_root=DATA)
    assert out.exists() and out.stat().st_size > 0
    (line,) = fig.axes[0].lines
    table = load_csv(DATA / "fig1d_adce.csv")["columns"]
    # no resampling: the artist carries the CSV values verbatim
    assert np.array_equal(line.get_xdata(), table["t_over_tau"])
    assert np.array_equal(line.get_ydata(), table["W_over_homega"])


def test_render_overlay_labels(tmp_path):
    spec = _spec(
        tmp_path,
        [
            Curve("fig3a_lz.csv", "W_over_homega", "unitary"),
            Curve("fig3b_lz_dissipative.csv", "W_over_homega", "dissipative"),
        ],
    )
    fig, _ = render_panel(spec, csv_root=DATA)
    labels = [ln.get_label() for ln in fig.axes[0].lines]
    assert labels == ["unitary", "dissipative"]
    assert fig.axes[0].get_legend() is not None


def test_missing_column_is_named(tmp_path):
    spec = _spec(tmp_path, [Curve("fig1d_adce.csv", "entropy")])
    with pytest.raises(PanelError, match="entropy"):
        render_panel(spec, csv_root=DATA)


def test_empty_csv_no_samples(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("t_over_tau,W_over_homega\n")
    spec = _spec(tmp_path, [Curve("empty.csv", "W_over_homega")])
    with pytest.raises(PanelError, match="no samples"):
        render_panel(spec, csv_root=tmp_path)


def test_svg_render_deterministic(tmp_path):
    spec = PanelSpec(
        name="det",
        x="t_over_tau",
        curves=[Curve("fig1a_dce.csv", "N", "run")],
        out=str(tmp_path / "a.svg"),
        title="determinism probe",
    )
    _, first = render_panel(spec, csv_root=DATA)
    _, second = render_panel(spec, csv_root=DATA, out=tmp_path / "b.svg")
    assert first.read_bytes() == second.read_bytes()


def test_axis_limits_applied(tmp_path):
    spec = PanelSpec(
        name="lim",
        x="t_over_tau",
        curves=[Curve("fig1a_dce.csv", "N")],
        out=str(tmp_path / "lim.png"),
        xlim=(0.0, 0.4),
    )
    fig, _ = render_panel(spec, csv_root=DATA)
    assert fig.axes[0].get_xlim() == (0.0, 0.4)
