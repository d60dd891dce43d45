"""Headless rendering of panel specs to image files.

Curves are drawn exactly as stored in the CSV: no resampling, smoothing or
decimation, so plotted extrema equal the data extrema by construction.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .panels import PanelSpec, resolve_columns

_STYLE = resources.files("rabifigs") / "style" / "default.mplstyle"


def render_panel(spec: PanelSpec, csv_root=".", out=None):
    """Render one panel; returns (figure, output path).

    Deterministic for fixed inputs: SVG output carries no date metadata.
    """
    curves = resolve_columns(spec, csv_root)
    with plt.style.context(str(_STYLE)):
        fig, ax = plt.subplots()
        for curve, x, y in curves:
            ax.plot(x, y, label=curve.label)
        if spec.title:
            ax.set_title(spec.title)
        ax.set_xlabel(spec.xlabel or spec.x)
        if spec.ylabel:
            ax.set_ylabel(spec.ylabel)
        if spec.xlim:
            ax.set_xlim(*spec.xlim)
        if spec.ylim:
            ax.set_ylim(*spec.ylim)
        if any(c.label for c, _, _ in curves):
            ax.legend()
        out_path = Path(out if out is not None else spec.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        metadata = {"Date": None} if out_path.suffix == ".svg" else None
        fig.savefig(out_path, metadata=metadata)
    return fig, out_path
