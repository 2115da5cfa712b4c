"""Report figures rendered next to the CSV outputs.

Each `*_figure` function takes already-computed rows and writes a PNG; no
figure function computes new results, so the plots always match the
delimited data they sit next to.
"""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from fractalscan.render import FAMILY_COLORS, _FALLBACK_COLOR

_DPI = 120


def _color(family: str) -> str:
    return FAMILY_COLORS.get(family, _FALLBACK_COLOR)


def study_figure(results, path) -> None:
    """Mean max-error per family against sample fraction, one line style
    per smoothness exponent; error bars span one standard deviation."""
    groups = defaultdict(list)
    for r in results:
        groups[(r.family, r.alpha, r.fraction)].append(r.max_err)
    alphas = sorted({a for (_, a, _) in groups})
    families = sorted({f for (f, _, _) in groups})
    styles = ["-", "--", ":", "-."]

    fig, ax = plt.subplots(figsize=(7, 5))
    for family in families:
        for i, alpha in enumerate(alphas):
            fracs = sorted({fr for (f, a, fr) in groups if f == family and a == alpha})
            if not fracs:
                continue
            means = [np.mean(groups[(family, alpha, fr)]) for fr in fracs]
            stds = [np.std(groups[(family, alpha, fr)]) for fr in fracs]
            label = family if len(alphas) == 1 else f"{family} (alpha={alpha:g})"
            ax.errorbar(fracs, means, yerr=stds, color=_color(family),
                        linestyle=styles[i % len(styles)], marker="o",
                        capsize=3, label=label)
    ax.set_xscale("log")
    ax.set_xlabel("sample fraction")
    ax.set_ylabel("max reconstruction error")
    ax.set_title("Nearest-neighbor error vs scan-prefix fraction")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def boxdim_figure(scales, counts, fit, path, label: str = "") -> None:
    """Log-log box counts with the fitted slope overlaid."""
    scales = np.asarray(scales, dtype=float)
    counts = np.asarray(counts, dtype=float)
    x = np.log(1.0 / scales)
    y = np.log(counts)

    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(x, y, "o", color="#d7301f", label=label or "box counts")
    if np.isfinite(fit.slope):
        coeffs = np.polyfit(x, y, 1)
        xs = np.linspace(x.min(), x.max(), 50)
        ax.plot(xs, coeffs[0] * xs + coeffs[1], "-", color="#555555",
                label=f"slope {fit.slope:.4f}, r^2 {fit.r2:.4f}")
    ax.set_xlabel("log(1/s)")
    ax.set_ylabel("log N(s)")
    ax.set_title("Box-counting fit")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def bench_figure(results, path) -> None:
    """Horizontal bars of median seconds per benchmark case."""
    rows = [r for r in results if np.isfinite(r.median_s)]
    labels = [f"{r.case} {r.family} {r.height}x{r.width}" for r in rows]
    values = [r.median_s for r in rows]
    colors = [_color(r.family) for r in rows]

    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.35 * len(rows) + 1)))
    ax.barh(range(len(rows)), values, color=colors)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("median seconds")
    ax.set_title("Timing (median over repetitions)")
    ax.grid(True, axis="x", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def field_figure(field, reconstruction, path, title: str = "") -> None:
    """Side-by-side truth / reconstruction heatmaps."""
    fig, axes = plt.subplots(1, 2, figsize=(9, 4.2))
    vmin = min(np.min(field), np.min(reconstruction))
    vmax = max(np.max(field), np.max(reconstruction))
    for ax, grid, name in zip(axes, (field, reconstruction), ("input", "output")):
        im = ax.imshow(grid, vmin=vmin, vmax=vmax, cmap="viridis")
        ax.set_title(name, fontsize=10)
        ax.set_xticks([]), ax.set_yticks([])
    fig.colorbar(im, ax=list(axes), shrink=0.85)
    if title:
        fig.suptitle(title, fontsize=11)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
