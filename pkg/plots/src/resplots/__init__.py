"""Log-log figures from sweep result CSV files."""

from .render import FIGURES, PlotSpec, load_series, render

__all__ = ["FIGURES", "PlotSpec", "load_series", "render"]
