"""Render sweep results as log-log scatter figures.

The only input contract is the sweep CSV schema: a header row naming at
least ``srf``, ``status`` and the value columns of the requested figure
kind, one trial per data row, empty cells for values a sweep does not
produce.  Three figure kinds cover the three sweep families:

    sigma       sigma_min vs srf, one series
    rayleigh    sigma_min and upper_cert vs srf, overlaid
    esprit      E_xi, E_a, E_b, E_total vs srf, four series

Each figure scatters the per-trial values of status="ok" rows, draws a
dashed reference line with a caller-chosen exponent anchored at the data
median, and annotates the least-squares log-log slope of the headline
series.  Rendering is deterministic: fixed style, fixed DPI, no
timestamps in the outputs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

FIGURES = {
    "sigma": {
        "series": ("sigma_min",),
        "headline": "sigma_min",
        "ylabel": "smallest singular value",
    },
    "rayleigh": {
        "series": ("sigma_min", "upper_cert"),
        "headline": "upper_cert",
        "ylabel": "sigma_min and Rayleigh quotient",
    },
    "esprit": {
        "series": ("E_xi", "E_a", "E_b", "E_total"),
        "headline": "E_total",
        "ylabel": "recovery error",
    },
}

DPI = 150

_STYLE = {
    "sigma_min": {"color": "#1f77b4", "marker": "o"},
    "upper_cert": {"color": "#d62728", "marker": "^"},
    "E_xi": {"color": "#1f77b4", "marker": "o"},
    "E_a": {"color": "#2ca02c", "marker": "s"},
    "E_b": {"color": "#ff7f0e", "marker": "^"},
    "E_total": {"color": "#d62728", "marker": "x"},
}


@dataclass(frozen=True)
class PlotSpec:
    """One figure request: which CSV, which figure family, which
    reference exponent, where to write."""

    input_csv: Path
    figure: str
    reference_exponent: float
    output: Path
    title: str = ""

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(
                f"unknown figure kind {self.figure!r}; expected one of "
                f"{', '.join(sorted(FIGURES))}"
            )
        object.__setattr__(self, "input_csv", Path(self.input_csv))
        object.__setattr__(self, "output", Path(self.output))
        object.__setattr__(self, "reference_exponent",
                           float(self.reference_exponent))


def load_series(path, figure: str) -> dict:
    """Columns needed by ``figure`` from the CSV at ``path``, filtered to
    plottable rows (status ok, all needed values present and positive).

    Raises ValueError when the header lacks required columns (naming
    them) or when no row survives the filter.
    """
    needed = ("srf",) + FIGURES[figure]["series"]
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in needed + ("status",) if c not in header]
        if missing:
            raise ValueError(
                f"{path}: missing required columns for figure "
                f"{figure!r}: {', '.join(missing)}"
            )
        rows = list(reader)

    out: dict = {c: [] for c in needed}
    for row in rows:
        if row["status"] != "ok":
            continue
        try:
            values = {c: float(row[c]) for c in needed}
        except ValueError:
            continue  # empty cell: the sweep did not produce this value
        if any(not math.isfinite(v) or v <= 0.0 for v in values.values()):
            continue  # log axes cannot carry it
        for c in needed:
            out[c].append(values[c])
    if not out["srf"]:
        raise ValueError(
            f"{path}: no plottable rows for figure {figure!r} (empty file "
            f"or no status=ok rows with positive values)"
        )
    return {c: np.asarray(v, dtype=np.float64) for c, v in out.items()}


def loglog_slope(x, y) -> float:
    lx, ly = np.log(x), np.log(y)
    return float(np.polyfit(lx, ly, 1)[0])


def render(spec: PlotSpec) -> dict:
    """Write the figure as PNG and SVG next to ``spec.output``.

    Returns {"png", "svg", "slope", "points"}; slope is the fitted
    log-log slope of the figure's headline series.
    """
    kind = FIGURES[spec.figure]
    data = load_series(spec.input_csv, spec.figure)
    srf = data["srf"]
    slope = loglog_slope(srf, data[kind["headline"]])

    with plt.rc_context({"svg.hashsalt": "resplots", "figure.dpi": DPI}):
        fig, ax = plt.subplots(figsize=(6.4, 4.8))
        for name in kind["series"]:
            ax.loglog(srf, data[name], linestyle="none",
                      markersize=5, label=name, **_STYLE[name])

        anchor_x = float(np.median(srf))
        anchor_y = float(np.median(data[kind["headline"]]))
        ref_x = np.geomspace(srf.min(), srf.max(), 64)
        ref_y = anchor_y * (ref_x / anchor_x) ** spec.reference_exponent
        ax.loglog(ref_x, ref_y, "k--", linewidth=1.2,
                  label=f"reference slope {spec.reference_exponent:g}")

        ax.set_xlabel("SRF")
        ax.set_ylabel(kind["ylabel"])
        if spec.title:
            ax.set_title(spec.title)
        ax.legend(loc="best")
        ax.text(0.02, 0.02,
                f"fitted slope of {kind['headline']}: {slope:+.6f}",
                transform=ax.transAxes, fontsize=9,
                bbox={"boxstyle": "round", "facecolor": "white",
                      "alpha": 0.8})
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()

        spec.output.parent.mkdir(parents=True, exist_ok=True)
        png = spec.output.with_suffix(".png")
        svg = spec.output.with_suffix(".svg")
        fig.savefig(png, dpi=DPI)
        fig.savefig(svg, metadata={"Date": None})
        plt.close(fig)

    return {"png": png, "svg": svg, "slope": slope,
            "points": int(srf.size)}
