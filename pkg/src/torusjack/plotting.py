"""Figure rendering for report outputs.

Each function writes a PNG next to the delimited report it illustrates and
returns the path.  Rendering is optional everywhere; the numerical reports
never depend on it.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def gram_heatmap(gram: np.ndarray, path: str, title: str = "") -> str:
    """Log-magnitude heatmap of a Gram matrix."""
    mag = np.abs(gram)
    floor = mag[mag > 0].min() if np.any(mag > 0) else 1e-16
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(np.log10(np.maximum(mag, floor)), cmap="viridis")
    fig.colorbar(im, ax=ax, label="log10 |entry|")
    ax.set_xlabel("label index")
    ax.set_ylabel("label index")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def series_decay(norms: list[float], bounds: list[float], path: str,
                 title: str = "") -> str:
    """Coefficient norms of a face series against their proven bounds."""
    n = np.arange(len(norms))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(n, np.maximum(norms, 1e-20), "o-", label="||alpha_n||")
    ax.semilogy(n[:len(bounds)], np.maximum(bounds, 1e-20), "s--",
                label="bound t_n")
    ax.set_xlabel("n")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def boundary_slope_plot(z_abs: list[float], norms: list[float],
                        slope: float, expected: float, path: str) -> str:
    """Log-log plot of the sigma-odd part of K approaching a face."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(z_abs, norms, "o-",
              label=f"measured slope {slope:.3f}")
    anchor = norms[0] / z_abs[0] ** expected
    ax.loglog(z_abs, [anchor * z ** expected for z in z_abs], "--",
              label=f"expected slope {expected:.3f}")
    ax.set_xlabel("|z|")
    ax.set_ylabel("||K - sigma K sigma||")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
