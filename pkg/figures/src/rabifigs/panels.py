"""Panel specifications and CSV loading for the trajectory plots."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np


class PanelError(Exception):
    """Bad panel spec or CSV input."""


@dataclass
class Curve:
    csv: str
    y: str
    label: Optional[str] = None


@dataclass
class PanelSpec:
    """One rendered panel: a set of curves sharing an x column."""

    name: str
    x: str
    curves: list
    out: str
    title: Optional[str] = None
    xlabel: Optional[str] = None
    ylabel: Optional[str] = None
    xlim: Optional[tuple] = None
    ylim: Optional[tuple] = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, path) -> "PanelSpec":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise PanelError(f"{path}: not valid JSON: {exc}") from exc
        for key in ("x", "curves", "out"):
            if key not in raw:
                raise PanelError(f"{path}: missing field {key!r}")
        curves = []
        for i, c in enumerate(raw["curves"]):
            if "csv" not in c or "y" not in c:
                raise PanelError(f"{path}: curves[{i}] needs csv and y")
            curves.append(Curve(c["csv"], c["y"], c.get("label")))
        return cls(
            name=raw.get("name", path.stem),
            x=raw["x"],
            curves=curves,
            out=raw["out"],
            title=raw.get("title"),
            xlabel=raw.get("xlabel"),
            ylabel=raw.get("ylabel"),
            xlim=tuple(raw["xlim"]) if "xlim" in raw else None,
            ylim=tuple(raw["ylim"]) if "ylim" in raw else None,
        )


def load_csv(path) -> dict:
    """Read one trajectory CSV: '#' metadata lines, then a header row."""
    path = Path(path)
    if not path.exists():
        raise PanelError(f"CSV not found: {path}")
    meta = {}
    rows = []
    header = None
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if ":" in line:
                    key, _, value = line.lstrip("# ").partition(":")
                    meta[key.strip()] = value.strip()
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    if header is None:
        raise PanelError(f"{path}: no header row")
    if not rows:
        raise PanelError(f"{path}: no samples")
    data = np.asarray(rows, dtype=float)
    columns = {name: data[:, i] for i, name in enumerate(header)}
    return {"columns": columns, "meta": meta}


def resolve_columns(spec: PanelSpec, csv_root) -> list:
    """Load every curve's data, checking the referenced columns exist."""
    csv_root = Path(csv_root)
    out = []
    cache = {}
    for curve in spec.curves:
        path = csv_root / curve.csv
        if path not in cache:
            cache[path] = load_csv(path)
        table = cache[path]["columns"]
        for col in (spec.x, curve.y):
            if col not in table:
                raise PanelError(
                    f"{path}: column {col!r} not in header ({', '.join(table)})"
                )
        out.append((curve, table[spec.x], table[curve.y]))
    return out
