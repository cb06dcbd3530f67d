"""Matplotlib rendering of report outputs to image files.

Report commands write these figures next to their CSV output; everything
here is presentation only and never feeds back into the numerics.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .states import HusimiField

__all__ = ["save_husimi_figure", "save_convergence_figure", "save_table_figure"]


def save_husimi_figure(field: HusimiField, path, title: str = "") -> None:
    """Heat map of a Husimi density with equal axes and a colorbar."""
    g = field.grid
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    half = 0.5 * g.dx
    extent = (g.origin.x1 - half, g.x1_max + half, g.origin.x2 - half, g.x2_max + half)
    im = ax.imshow(field.values.T, origin="lower", extent=extent, cmap="viridis", aspect="equal")
    fig.colorbar(im, ax=ax, label="H")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_convergence_figure(rows, path, title: str = "") -> None:
    """Log-log absolute error against grid step for a convergence study.

    rows: sequence of dicts with at least 'dx' and 'abs_error' entries.
    """
    dxs = [r["dx"] for r in rows]
    errs = [max(r["abs_error"], 1e-18) for r in rows]
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    ax.loglog(dxs, errs, "o-", label="measured")
    ref = errs[0] * (np.asarray(dxs) / dxs[0])
    ax.loglog(dxs, ref, "--", color="gray", label="first order")
    ax.set_xlabel("dx")
    ax.set_ylabel("absolute error")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_table_figure(rows, path, title: str = "") -> None:
    """Horizontal bars comparing analytic values with their numeric checks.

    rows: sequence of dicts with 'label', 'analytic' and optional 'numeric'.
    """
    labels = [r["label"] for r in rows]
    analytic = [r["analytic"] for r in rows]
    numeric = [r.get("numeric") for r in rows]
    y = np.arange(len(rows))
    fig, ax = plt.subplots(figsize=(7.2, 0.55 * len(rows) + 1.6))
    ax.barh(y + 0.18, analytic, height=0.34, label="closed form", color="#32618d")
    have = [k for k, v in enumerate(numeric) if v is not None]
    if have:
        ax.barh(
            [y[k] - 0.18 for k in have],
            [numeric[k] for k in have],
            height=0.34,
            label="numeric",
            color="#d08b2c",
        )
    ax.set_yticks(y)
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("distance")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
