"""Figure rendering for recorded runs.

Two PNGs per run, written next to the delimited output: the utility level
along the trajectory, and per-move diagnostics (estimated expense against
the acceptance threshold, over-estimate vs cost, cumulative estimate).
Rendering works entirely from saved moves plus the summary, so figures can
be regenerated later without touching the model.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

UTILITY_FIGURE = "utility_trajectory.png"
DIAGNOSTIC_FIGURE = "move_diagnostics.png"

_DPI = 150


def _empty_figure(path, message):
    fig, ax = plt.subplots(figsize=(6.0, 3.0))
    ax.text(0.5, 0.5, message, ha="center", va="center")
    ax.set_axis_off()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_run_figures(moves, summary: dict, out_dir) -> list[Path]:
    """Render both figures into out_dir; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    upath = out / UTILITY_FIGURE
    dpath = out / DIAGNOSTIC_FIGURE
    termination = summary.get("termination", "?")
    if not moves:
        for path in (upath, dpath):
            _empty_figure(path, f"no accepted moves ({termination})")
        return [upath, dpath]

    k = np.array([m.step_index for m in moves])
    u = np.array([moves[0].u_from] + [m.u_to for m in moves])
    f = np.array([m.f_value for m in moves])
    b = np.array([m.b_value for m in moves])
    c = np.array([m.c_value for m in moves])
    delta = np.array([m.threshold_at_move for m in moves])

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(np.arange(len(u)), u, marker=".", lw=1.2)
    ax.set_xlabel("accepted move")
    ax.set_ylabel("utility u")
    ax.set_title(f"utility along the run ({termination}, "
                 f"{len(moves)} moves)")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(upath, dpi=_DPI)
    plt.close(fig)

    fig, axes = plt.subplots(3, 1, figsize=(7.0, 8.0), sharex=True)
    axes[0].plot(k, f, marker=".", lw=1.0, label="f (estimate)")
    axes[0].step(k, -delta, where="mid", color="crimson", lw=1.0,
                 label="-delta")
    axes[0].axhline(0.0, color="gray", lw=0.8)
    axes[0].set_ylabel("estimated expense")
    axes[0].legend(loc="best", fontsize=8)
    axes[0].grid(alpha=0.3)

    axes[1].plot(k, b, marker=".", lw=1.0, label="b (over-estimate)")
    axes[1].plot(k, c, marker=".", lw=1.0, label="c (move cost)")
    axes[1].plot(k, np.maximum(b - c, 0.0), lw=1.0, ls="--",
                 label="[b - c]+")
    axes[1].set_ylabel("per move")
    axes[1].legend(loc="best", fontsize=8)
    axes[1].grid(alpha=0.3)

    axes[2].plot(k, np.cumsum(f), marker=".", lw=1.0)
    axes[2].axhline(0.0, color="gray", lw=0.8)
    axes[2].set_ylabel("cumulative f")
    axes[2].set_xlabel("accepted move")
    axes[2].grid(alpha=0.3)

    fig.suptitle("move diagnostics", y=0.995)
    fig.tight_layout()
    fig.savefig(dpath, dpi=_DPI)
    plt.close(fig)
    return [upath, dpath]
