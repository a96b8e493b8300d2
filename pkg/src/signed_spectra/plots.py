"""Figure rendering for the report paths of the CLI.

Each helper takes ready-made data and writes one PNG next to the delimited
output. Rendering is headless (Agg).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "spectrum_figure",
    "embedding_figure",
    "decay_figure",
    "rotation_figure",
]

DPI = 150


def spectrum_figure(values, path, radius=None):
    """Eigenvalues on the complex plane with the spectral-radius circle."""
    values = np.asarray(values, dtype=np.complex128)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(values.real, values.imag, s=22, color="#1f5fa8", zorder=3)
    if radius is None and values.size:
        radius = float(np.abs(values).max())
    if radius:
        theta = np.linspace(0, 2 * np.pi, 256)
        ax.plot(radius * np.cos(theta), radius * np.sin(theta),
                color="#aaaaaa", lw=0.8, ls="--", zorder=1)
    ax.axhline(0, color="#cccccc", lw=0.6)
    ax.axvline(0, color="#cccccc", lw=0.6)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title("eigenvalues by modulus")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def embedding_figure(coords, labels, path):
    """Scatter of the first two embedding coordinates colored by cluster."""
    coords = np.asarray(coords)
    labels = np.asarray(labels)
    fig, ax = plt.subplots(figsize=(5.5, 5))
    if coords.shape[1] == 1:
        xs = coords[:, 0]
        ys = np.zeros_like(xs)
    else:
        xs, ys = coords[:, 0], coords[:, 1]
    for c in np.unique(labels):
        pick = labels == c
        ax.scatter(xs[pick], ys[pick], s=10, label=f"cluster {c}", alpha=0.7)
    ax.set_xlabel("coordinate 1")
    ax.set_ylabel("coordinate 2")
    ax.set_title("spectral embedding")
    if len(np.unique(labels)) <= 10:
        ax.legend(fontsize=8, loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def decay_figure(eps, residuals, path):
    """Log-log residual ladder with a quadratic guide line."""
    eps = np.asarray(eps, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(eps, residuals, "o-", color="#1f5fa8", label="residual")
    if residuals[0] > 0:
        guide = residuals[0] * (eps / eps[0]) ** 2
        ax.loglog(eps, guide, "--", color="#aaaaaa", label="slope 2")
    ax.set_xlabel("perturbation scale")
    ax.set_ylabel("approximation residual")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def rotation_figure(before, after, cluster_of, path, highlight=()):
    """Before/after spectral coordinates in the two-block plane."""
    before = np.asarray(before)
    after = np.asarray(after)
    cluster_of = np.asarray(cluster_of)
    fig, ax = plt.subplots(figsize=(5.5, 5))
    markers = ["^", "x", "o", "s"]
    for c in np.unique(cluster_of):
        pick = cluster_of == c
        ax.scatter(before[pick, 0], before[pick, 1], s=18, alpha=0.4,
                   marker=markers[c % len(markers)], label=f"block {c} before")
        ax.scatter(after[pick, 0], after[pick, 1], s=18, alpha=0.9,
                   marker=markers[c % len(markers)], label=f"block {c} after")
    for node in highlight:
        ax.annotate("", xy=after[node], xytext=before[node],
                    arrowprops=dict(arrowstyle="->", color="#c03030", lw=1.2))
    ax.axhline(0, color="#cccccc", lw=0.6)
    ax.axvline(0, color="#cccccc", lw=0.6)
    ax.set_xlabel("first block axis")
    ax.set_ylabel("second block axis")
    ax.set_title("coordinates before/after the injected edge")
    ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
