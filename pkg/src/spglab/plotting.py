"""Convergence figures from trace CSVs.

One curve per solver entry, the median over that entry's seeds taken
pointwise (seeds of one entry share the iteration grid; a diverged seed
only contributes its prefix).  Entries running in the finite-sum setting
are dashed, online ones solid; the deterministic full-gradient method
counts as finite-sum.  Rendering is pinned down (fixed hash salt, no
date metadata, text kept as text) so identical inputs give identical
files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import SpecError, read_trace_csv

__all__ = ["render_plot", "PLOT_FLOOR"]

PLOT_FLOOR = 1e-16

matplotlib.rcParams["svg.fonttype"] = "none"
matplotlib.rcParams["svg.hashsalt"] = "spglab"

_AXIS_LABEL = {
    "grad_evals": "gradient evaluations",
    "t": "iteration",
    "F": "objective value",
    "exact_residual": "exact stationarity residual",
}


def _dashed(label):
    return label == "pgd" or label.endswith("finite_sum")


def _series(rows, x_axis, y_axis):
    """run_id -> (label, x array, y array), skipping unmeasured points."""
    runs = {}
    for row in rows:
        y = row["F"] if y_axis == "F" else row["exact_residual"]
        if y is None:
            continue
        rec = runs.setdefault(row["run_id"], (row["algorithm"], [], []))
        rec[1].append(row[x_axis])
        rec[2].append(y)
    return runs


def render_plot(csv_path, out_path, x_axis="grad_evals", y_axis="F", log_y=True):
    """Render the figure; the output format follows the file extension."""
    if x_axis not in ("grad_evals", "t"):
        raise SpecError(f"x_axis must be grad_evals or t, got {x_axis!r}")
    if y_axis not in ("F", "exact_residual"):
        raise SpecError(f"y_axis must be F or exact_residual, got {y_axis!r}")
    rows = read_trace_csv(csv_path)
    runs = _series(rows, x_axis, y_axis)
    groups = {}  # label -> list of (x, y), first-appearance order
    for label, xs, ys in runs.values():
        groups.setdefault(label, []).append((np.asarray(xs, float), np.asarray(ys, float)))
    if not groups:
        raise SpecError(f"{csv_path}: no measured {y_axis} values to plot")

    clamped = False
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, series in groups.items():
        n = min(len(x) for x, _ in series)
        x = series[0][0][:n]
        y = np.median(np.stack([s[1][:n] for s in series]), axis=0)
        if log_y:
            if np.any(y < PLOT_FLOOR):
                clamped = True
            y = np.maximum(y, PLOT_FLOOR)
        ax.plot(x, y, linestyle="--" if _dashed(label) else "-", linewidth=1.4, label=label)
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(_AXIS_LABEL[x_axis])
    ax.set_ylabel(_AXIS_LABEL[y_axis] + (" (log scale)" if log_y else ""))
    ax.legend(frameon=False, fontsize=9 if len(groups) > 6 else 10)
    ax.grid(True, which="both", alpha=0.25, linewidth=0.5)
    if clamped:
        fig.text(0.01, 0.005, f"values below {PLOT_FLOOR:g} clamped for the log scale", fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path, metadata={"Date": None} if str(out_path).endswith(".svg") else None)
    plt.close(fig)
    return {"groups": len(groups), "clamped": clamped, "out": str(out_path)}
