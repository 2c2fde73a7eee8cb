"""
Matplotlib renderings of the ratio surface and the decomposition sweep.

matplotlib is an optional dependency (``pip install artifact[plot]``) and is
imported only when a figure is requested. The Agg backend is forced so
figures can be written on headless machines.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .baselines import RatioRow
from .optimizer import SweepCurve


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _defaults(plt):
    plt.rcParams.update(
        {
            "font.size": 11,
            "axes.labelsize": 12,
            "savefig.dpi": 150,
            "savefig.bbox": "tight",
        }
    )


def plot_ratio_grid(rows: Sequence[RatioRow], path: str | Path, title: str | None = None) -> Path:
    """Filled contour of the ratio over ``(t, alpha)``.

    ``rows`` must be in the grid order produced by ``ratio_grid``.
    """
    plt = _pyplot()
    _defaults(plt)
    t = np.unique([r.t for r in rows])
    alpha = np.unique([r.alpha for r in rows])
    z = np.array([r.ratio for r in rows]).reshape(t.size, alpha.size)

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    cs = ax.contourf(t, alpha, z.T, levels=20, cmap="viridis")
    cbar = fig.colorbar(cs, ax=ax)
    cbar.set_label(r"$P_{WM}/P_{EW}$")
    ax.set_xlabel(r"$t$")
    ax.set_ylabel(r"$\alpha$")
    if title:
        ax.set_title(title)
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_sweep(curve: SweepCurve, path: str | Path, maxima: Sequence[float] = ()) -> Path:
    plt = _pyplot()
    _defaults(plt)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(curve.deltas, curve.values, lw=2, color="C0")
    if maxima:
        best = float(curve.values.max())
        ax.plot(list(maxima), [best] * len(maxima), "o", color="C3", label="maxima")
        ax.legend(frameon=False)
    top = curve.deltas[-1]
    ticks = np.arange(0.0, top + 1e-9, math.pi / 2)
    ax.set_xticks(ticks)
    ax.set_xticklabels([_pi_label(k) for k in range(ticks.size)])
    ax.set_xlabel(r"$\delta$ (rad)")
    ax.set_ylabel(r"$P_{EW}$")
    ax.set_title(rf"$\gamma = {curve.gamma:g}$")
    ax.set_ylim(bottom=0.0)
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def _pi_label(k: int) -> str:
    if k == 0:
        return "0"
    if k % 2 == 0:
        n = k // 2
        return r"$\pi$" if n == 1 else rf"${n}\pi$"
    return r"$\pi/2$" if k == 1 else rf"${k}\pi/2$"
