"""Static figures for sweeps and indicator images (Agg backend, PNG)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .geometry import BoundaryCurve  # noqa: E402
from .imaging import IndicatorGrid  # noqa: E402
from .spectral_probe import EigenvalueEstimate, SweepResult  # noqa: E402

FIGSIZE = (6.0, 3.6)


def plot_sweeps(results: list[SweepResult], peaks: list[EigenvalueEstimate], path,
                reference: list[float] | None = None) -> Path:
    """Picard norm against wavenumber, log scale, detected peaks marked."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for res in results:
        ax.semilogy(res.k_grid, res.values, lw=1.0, label=f"z = ({res.z[0]:g}, {res.z[1]:g})")
    if reference:
        for k in reference:
            ax.axvline(k, color="0.7", lw=0.6, ls=":")
    top = max(float(np.max(r.values)) for r in results)
    for p in peaks:
        ax.plot([p.k], [top], "v", color="k", ms=4)
    ax.set_xlabel("k")
    ax.set_ylabel(r"$\|g_z\|$")
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    if len(results) > 1:
        ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_indicator(indicator: IndicatorGrid, path, curve: BoundaryCurve | None = None,
                   title: str | None = None) -> Path:
    """Indicator image with the true boundary overlaid when known."""
    g = indicator.grid
    fig, ax = plt.subplots(figsize=(4.6, 4.2))
    im = ax.imshow(indicator.values.T, origin="lower", cmap="viridis",
                   extent=(g.x_range[0], g.x_range[1], g.y_range[0], g.y_range[1]))
    if curve is not None:
        t = np.linspace(0, 2 * np.pi, 400)
        p = curve(t)
        ax.plot(p[:, 0], p[:, 1], "w--", lw=0.8)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title, fontsize=9)
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
