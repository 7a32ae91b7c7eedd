"""SVG figures for evaluation reports, drawn with matplotlib's Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# A fixed hash salt keeps SVG element ids stable, so equal inputs give equal files.
plt.rcParams["svg.hashsalt"] = "tsemlab"
plt.rcParams["svg.fonttype"] = "none"

CAUSALITY_LIMIT = 10.0


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return path


def ad_ai_scatter(faithfulness: dict[str, dict], path) -> Path:
    """Average Drop on x (lower is better) against Average Increase on y, one point per method."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for method, row in sorted(faithfulness.items()):
        ax.scatter(row["average_drop"], row["average_increase"], s=36)
        ax.annotate(method, (row["average_drop"], row["average_increase"]), fontsize=7, xytext=(3, 3), textcoords="offset points")
    ax.set_xlabel("Average Drop (%)")
    ax.set_ylabel("Average Increase (%)")
    ax.set_xlim(left=0)
    ax.set_ylim(bottom=0)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def curves(fractions, per_method: dict[str, np.ndarray], path, title: str) -> Path:
    """Mean probability curves (deletion or insertion) for several methods."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for method, probs in sorted(per_method.items()):
        ax.plot(fractions, probs, label=method, linewidth=1.2)
    ax.set_xlabel("fraction of cells")
    ax.set_ylabel("class probability")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_title(title)
    ax.legend(fontsize=6, ncol=2)
    return _save(fig, path)


def causality_bars(proportions: dict[str, dict], path) -> Path:
    """Grouped bars of non-causal proportions (percent) per method with the 10% pass line."""
    methods = sorted(proportions)
    x = np.arange(len(methods))
    feat = [100.0 * proportions[m]["feature_proportion"] for m in methods]
    time = [100.0 * proportions[m]["time_proportion"] for m in methods]
    fig, ax = plt.subplots(figsize=(max(5, 0.8 * len(methods) + 2), 4))
    ax.bar(x - 0.2, feat, width=0.4, label="feature axis")
    ax.bar(x + 0.2, time, width=0.4, label="time axis")
    ax.axhline(CAUSALITY_LIMIT, color="red", linestyle="--", linewidth=1, label="10% limit")
    ax.set_xticks(x, methods, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("non-causal proportion (%)")
    ax.set_ylim(0, 100)
    ax.legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, path)


def critical_difference_diagram(names, avg_ranks, cd: float, groups, path) -> Path:
    """Average ranks on a reversed axis with a CD scale bar and bars joining grouped methods."""
    ranks = np.asarray(avg_ranks, dtype=np.float64)
    k = len(ranks)
    order = np.argsort(ranks, kind="stable")
    fig, ax = plt.subplots(figsize=(7, 1.2 + 0.25 * k))
    lo, hi = 1, max(k, int(np.ceil(ranks.max())))
    ax.set_xlim(hi + 0.2, lo - 0.2)
    ax.set_ylim(-(k + 1) * 0.3 - 0.3, 0.8)
    ax.hlines(0, lo, hi, color="black", linewidth=1)
    for r in range(lo, hi + 1):
        ax.vlines(r, 0, 0.1, color="black", linewidth=1)
        ax.text(r, 0.2, str(r), ha="center", fontsize=7)
    ax.plot([lo, lo + cd], [0.6, 0.6], color="black", linewidth=1.5)
    ax.text(lo + cd / 2, 0.65, f"CD = {cd:.3f}", ha="center", fontsize=7)
    for pos, idx in enumerate(order):
        y = -(pos + 1) * 0.3
        ax.plot([ranks[idx], ranks[idx]], [0, y], color="gray", linewidth=0.7)
        ax.text(ranks[idx], y, f" {names[idx]} ({ranks[idx]:.2f})", fontsize=7, va="center")
    index = {n: i for i, n in enumerate(names)}
    for g, group in enumerate(groups):
        r = [ranks[index[n]] for n in group]
        ax.plot([min(r), max(r)], [-0.1 - 0.08 * g] * 2, color="black", linewidth=3)
    ax.axis("off")
    return _save(fig, path)


def overlay(instance: np.ndarray, saliency: np.ndarray, path, title: str = "") -> Path:
    """Each channel's trace drawn over a heat strip of its saliency."""
    x = np.asarray(instance, dtype=np.float64)
    s = np.asarray(saliency, dtype=np.float64)
    D, T = x.shape
    fig, axes = plt.subplots(D, 1, figsize=(7, 1.3 * D + 0.4), sharex=True, squeeze=False)
    top = s.max() if s.max() > 0 else 1.0
    lo, hi = float(x.min()), float(x.max())
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    for d, ax in enumerate(axes[:, 0]):
        ax.imshow(s[d : d + 1], aspect="auto", cmap="Reds", vmin=0, vmax=top, extent=(-0.5, T - 0.5, lo, hi))
        ax.plot(np.arange(T), x[d], color="black", linewidth=0.8)
        ax.set_ylabel(f"ch {d}", fontsize=7)
    axes[0, 0].set_title(title, fontsize=8)
    axes[-1, 0].set_xlabel("time")
    return _save(fig, path)
