"""Figure rendering for CLI reports.

Writes static matplotlib figures next to the delimited output; the Agg
backend is forced so this works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_resolvent_sweep", "plot_growth_sweep"]


def plot_resolvent_sweep(rows, path: str, title: str = "") -> None:
    """Log-log resolvent norm vs energy, one curve per h, with the harmonic
    baseline dotted."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    hs = sorted({r.h for r in rows}, reverse=True)
    for h in hs:
        sub = [r for r in rows if r.h == h and r.m > 0]
        e = np.array([r.energy for r in sub])
        v = np.array([r.resolvent_norm for r in sub])
        ax.loglog(e, v, label=f"h = {h:g}")
        if sub and sub[0].baseline_norm is not None:
            b = np.array([r.baseline_norm for r in sub])
            ax.loglog(e, b, ls=":", color=ax.lines[-1].get_color(), lw=1.0)
    ax.set_xlabel("energy  m h")
    ax.set_ylabel("restricted resolvent norm")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_growth_sweep(ts, gs, path: str, title: str = "") -> None:
    """Growth rate along beta = (1-t, t)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.plot(ts, gs, marker="o", ms=3)
    ax.set_xlabel("t   (beta = (1-t, t))")
    ax.set_ylabel("growth rate g")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
