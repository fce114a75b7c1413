"""Optional figures rendered next to an experiment's CSV.

Only used when a run is started with ``--figures``; the CSV stays the
primary output.  Uses the non-interactive Agg backend.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _loglog(ax, x, y, xlabel, ylabel):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0)
    ax.loglog(x[keep], y[keep], "o-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)


def _draw(ax, experiment, rows, summary):
    if experiment in ("counting", "decay"):
        _loglog(ax, [r["N"] for r in rows], [r["abs_error"] for r in rows], "N", "|error|")
        if "slope" in summary:
            ax.set_title(f"fitted slope {summary['slope']:.3f}")
    elif experiment == "vdc":
        for xi in sorted({r["xi"] for r in rows}):
            sub = [r for r in rows if r["xi"] == xi]
            ax.semilogx([r["N"] for r in sub], [r["normalized"] for r in sub], label=f"xi={xi}")
        ax.set_xlabel("N")
        ax.set_ylabel("|W| (N|xi|)^(1/d)")
        ax.legend(fontsize="x-small", ncol=2)
    elif experiment == "fractal":
        sub = [r for r in rows if r["quantity"] == "lp_ratio"]
        ax.plot([r["index"] for r in sub], [r["value"] for r in sub], "o-")
        ax.set_xlabel("j")
        ax.set_ylabel("LP growth ratio")
    elif experiment == "nu":
        ax.semilogx([r["M"] for r in rows], [r["value_re"] for r in rows], "o-")
        ax.set_xlabel("M")
        ax.set_ylabel("Re <nu_M, g>")
    elif experiment == "progression":
        ax.plot([r["y_mid"] for r in rows], [r["x_lo"] for r in rows], ".", ms=2)
        ax.set_xlabel("y")
        ax.set_ylabel("x")
    elif experiment == "ergodic":
        _loglog(ax, [r["N"] for r in rows], [r["max_dev"] for r in rows], "N", "max deviation")
    elif experiment == "deviation":
        ax.plot([r["l0"] for r in rows], [r["measure"] for r in rows], "o-")
        ax.set_xlabel("l0")
        ax.set_ylabel("measure of deviation set")
    elif experiment == "norms":
        labels = [f"{r['function']}:{r['quantity']}" for r in rows]
        ax.bar(range(len(rows)), [r["value"] for r in rows])
        ax.set_xticks(range(len(rows)), labels, rotation=90, fontsize="x-small")
    ax.grid(True, alpha=0.3)


def render_figure(experiment, rows, summary, csv_path):
    """Write ``<csv stem>.png`` and return its path."""
    path = os.path.splitext(csv_path)[0] + ".png"
    fig, ax = plt.subplots(figsize=(6, 4))
    if rows:
        _draw(ax, experiment, rows, summary)
    ax.set_title(ax.get_title() or experiment)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
