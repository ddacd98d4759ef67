"""Figures for the ``bench`` report."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams.update({
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
})


def bench_figure(rows: list[dict], path: str | Path, title: str = "") -> Path:
    """Loop unfoldings and total steps against min(|m|, |n|) (or |x| for sign)."""
    path = Path(path)
    if rows and "n" in rows[0]:
        xs = [min(abs(r["m"]), abs(r["n"])) for r in rows]
        xlabel = "min(|m|, |n|)"
    else:
        xs = [abs(r["x"]) for r in rows]
        xlabel = "|x|"
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(7.0, 2.8))
    ax1.scatter(xs, [r["loopUnfoldings"] for r in rows], s=4, alpha=0.5)
    ax1.set_xlabel(xlabel)
    ax1.set_ylabel("loop unfoldings")
    ax2.scatter(xs, [r["total"] for r in rows], s=4, alpha=0.5, color="tab:orange")
    ax2.set_xlabel(xlabel)
    ax2.set_ylabel("total steps")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
