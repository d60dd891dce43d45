"""Panel renderer for rabiwork trajectory CSV files."""

__version__ = "0.1.0"

from .panels import Curve, PanelError, PanelSpec, load_csv
from .render import render_panel

__all__ = ["Curve", "PanelError", "PanelSpec", "load_csv", "render_panel"]
