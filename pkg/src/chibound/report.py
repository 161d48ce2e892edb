"""Figures for experiment sweeps, rendered to files with the Agg backend."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiment import ExperimentRow  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.fontsize": 8,
    "legend.frameon": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def _ok(rows: Sequence[ExperimentRow]) -> list[ExperimentRow]:
    return [r for r in rows if r.status == "ok" and r.omega is not None and r.colors is not None]


def colors_vs_omega(rows: Sequence[ExperimentRow], path: Path) -> Path:
    good = _ok(rows)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.2, 3.2))
        ax.scatter([r.omega for r in good], [r.colors for r in good], s=14, alpha=0.6, label="engine")
        ax.scatter([r.omega for r in good], [r.greedy_colors for r in good], s=14, marker="x",
                   alpha=0.6, label="first fit")
        top = max([r.omega for r in good], default=1)
        xs = list(range(1, top + 1))
        ax.plot(xs, xs, color="0.5", lw=0.8, ls="--", label="colours = clique number")
        ax.set_xlabel("clique number")
        ax.set_ylabel("colours used")
        ax.legend()
        fig.savefig(path)
        plt.close(fig)
    return path


def plan_depths(rows: Sequence[ExperimentRow], path: Path) -> Path:
    good = [r for r in rows if r.plan_depth is not None]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.2, 3.2))
        ax.scatter([r.n for r in good], [r.plan_depth for r in good], s=14, alpha=0.6)
        ax.set_xlabel("vertices")
        ax.set_ylabel("plan depth")
        fig.savefig(path)
        plt.close(fig)
    return path


def write_figures(rows: Sequence[ExperimentRow], outdir: str | Path) -> list[Path]:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    return [colors_vs_omega(rows, out / "colors_vs_omega.png"),
            plan_depths(rows, out / "plan_depth.png")]
