"""Static SVG rendering of already-computed sweep rows. No computation lives here."""
from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# stable element ids so identical data gives identical SVG bytes
matplotlib.rcParams["svg.hashsalt"] = "targeting"

_SVG_META = {"Date": None, "Creator": None}


def mtor_lines(rows: list[dict], path) -> None:
    panels = defaultdict(lambda: defaultdict(list))
    for r in rows:
        panel = (r["guards_per_client"], r["bridge_prob"]) if r["bridge_prob"] == 0.5 else (
            r["guards_per_client"], "p_b sweep")
        panels[panel][(r["middle_fraction"], r["bridge_prob"])].append(
            (r["meeting"], r["mean_identified"]))
    keys = sorted(panels, key=str)
    fig, axes = plt.subplots(1, len(keys), figsize=(4.5 * len(keys), 3.5), squeeze=False)
    for ax, key in zip(axes[0], keys):
        for (B, pb), pts in sorted(panels[key].items()):
            xs, ys = zip(*pts)
            ax.plot(xs, ys, label=f"B={B:g}, p_b={pb:g}")
        ax.set_title(f"{key[0]} guard(s), {key[1]}")
        ax.set_xlabel("meetings")
        ax.set_ylabel("mean identified")
        ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)


def capture_violins(samples: list[tuple[str, str, list[float]]], path, target: float | None = None) -> None:
    """``samples`` holds (panel, label, estimates) triples, one violin each."""
    by_panel = defaultdict(list)
    for panel, label, est in samples:
        by_panel[panel].append((label, est))
    panels = list(by_panel)
    fig, axes = plt.subplots(len(panels), 1, figsize=(8, 2.8 * len(panels)), squeeze=False)
    for ax, panel in zip(axes[:, 0], panels):
        labels, data = zip(*by_panel[panel])
        ax.violinplot(data, showmedians=True)
        ax.set_xticks(range(1, len(labels) + 1), labels, fontsize=7)
        ax.set_title(panel)
        ax.set_ylabel("Chapman estimate")
        if target is not None:
            ax.axhline(target, ls=":", c="k")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
