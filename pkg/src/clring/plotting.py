"""Figures for the bench report."""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import CATEGORIES  # noqa: E402

_LABELS = {
    "pairings": "pairings",
    "g1_scalar_muls": "G1 scalar mults",
    "gt_exps": "GT exponentiations",
    "map_to_point_hashes": "MapToPoint hashes",
}


def plot_counts(rows, path: str) -> str:
    """One panel per operation kind: measured markers over the formula lines."""
    fig, axes = plt.subplots(1, len(CATEGORIES), figsize=(14, 3.4), sharex=True)
    for k, (cat, ax) in enumerate(zip(CATEGORIES, axes)):
        for phase, colour in (("sign", "C0"), ("verify", "C1"), ("total", "C2")):
            sel = [r for r in rows if r.phase == phase]
            ns = [r.n for r in sel]
            ax.plot(ns, [r.expected[k] for r in sel], "-", color=colour, alpha=0.5,
                    label="%s (table)" % phase)
            ax.plot(ns, [r.counts.as_tuple()[k] for r in sel], "o", color=colour,
                    label="%s (measured)" % phase)
        ax.set_title(_LABELS[cat])
        ax.set_xlabel("ring size n")
    axes[0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_times(rows, path: str) -> str:
    fig, ax = plt.subplots(figsize=(5, 3.4))
    for phase in ("sign", "verify", "total"):
        sel = [r for r in rows if r.phase == phase]
        ax.plot([r.n for r in sel], [r.seconds * 1e3 for r in sel], "o-", label=phase)
    ax.set_xlabel("ring size n")
    ax.set_ylabel("wall time (ms)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_figures(rows, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    return [plot_counts(rows, os.path.join(out_dir, "bench_counts.png")),
            plot_times(rows, os.path.join(out_dir, "bench_times.png"))]
