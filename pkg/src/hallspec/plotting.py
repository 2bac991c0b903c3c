"""Static SVG figures for sweep reports."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from hallspec.sweep import SweepReport  # noqa: E402

PLOTS = ("energy_vs_T", "energy_vs_t", "distortion_vs_T")

STYLE = {
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.labelsize": 11,
    "axes.titlesize": 11,
    "legend.fontsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.6,
    # fixed salt and no timestamp keep repeated renders byte-identical
    "svg.hashsalt": "hallspec",
    "svg.fonttype": "path",
    "path.simplify": False,
}


def _figure(width: float = 6.0):
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    return plt.subplots(figsize=(width, width * golden))


def emit_svg(report: SweepReport, path: str | Path, plot: str = "energy_vs_T") -> Path:
    """Mean-over-pairs curve with min-max band and dashed Rayleigh-Ritz bound lines."""
    if plot not in PLOTS:
        raise ValueError(f"plot must be one of {PLOTS}")
    if not report.rows:
        raise ValueError("cannot plot an empty report")
    path = Path(path)
    column = "d_sem_closed" if plot == "distortion_vs_T" else "e_hall_rayleigh"
    ts, temps, mean, lo, hi = report.mean_curve(column)
    x = ts if plot == "energy_vs_t" else temps
    order = np.argsort(x, kind="stable")
    x, mean, lo, hi = x[order], mean[order], lo[order], hi[order]

    with plt.rc_context(STYLE):
        fig, ax = _figure()
        ax.fill_between(x, lo, hi, color="tab:blue", alpha=0.2, linewidth=0, label="min-max over pairs")
        ax.plot(x, mean, color="tab:blue", marker="o", markersize=3, label="mean over pairs")
        if column == "e_hall_rayleigh":
            lower = float(report.column("bound_lower").min())
            upper = float(report.column("bound_upper").max())
            ax.axhline(lower, color="tab:red", linestyle="--", linewidth=1.2, label=f"lower bound {lower:.3g}")
            ax.axhline(upper, color="black", linestyle="--", linewidth=1.2, label=f"upper bound {upper:.3g}")
            ax.set_ylabel("hallucination energy")
        else:
            ax.set_ylabel("semantic distortion")
        ax.set_xlabel("time t" if plot == "energy_vs_t" else "temperature T")
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": "hallspec"})
        plt.close(fig)
    return path
