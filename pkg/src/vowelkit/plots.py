"""Scatter plot rendering for pipeline reports.

Figures are rendered with matplotlib's Agg backend and written as
standalone SVG files (no embedded date metadata, so reruns are diffable).
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "vowelkit"  # content-hashed SVG ids
matplotlib.rcParams["svg.fonttype"] = "none"  # keep legend labels as text
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_MARKERS = ("o", "s", "^", "D", "v", "P", "X")
_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red",
           "tab:purple", "tab:brown", "tab:pink")


def scatter_by_label(points: list, xlabel: str, ylabel: str, title: str,
                     path: str) -> str:
    """Render (x, y, label) triples, one marker shape and color per label."""
    by_label: dict[str, list] = {}
    for x, y, label in points:
        by_label.setdefault(label, []).append((x, y))

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for i, label in enumerate(sorted(by_label)):
        xs = [p[0] for p in by_label[label]]
        ys = [p[1] for p in by_label[label]]
        ax.scatter(xs, ys, marker=_MARKERS[i % len(_MARKERS)],
                   color=_COLORS[i % len(_COLORS)], s=18, alpha=0.75, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(title="phoneme")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def render_experiment_plot(experiment: dict, out_dir: str) -> str | None:
    """Render the scatter for one experiment record; returns the relative path."""
    if experiment.get("status") != "ok" or not experiment.get("points"):
        return None
    name = experiment["name"]
    if experiment["feature_kind"] == "formants":
        filename = f"{name}.svg"
        scatter_by_label(experiment["points"], "F1 (Hz)", "F2 (Hz)",
                         "First two formants", os.path.join(out_dir, filename))
    else:
        filename = f"pca_{name}.svg"
        scatter_by_label(experiment["points"], "PC1", "PC2",
                         f"PCA of the MFCC ({' '.join(experiment['labels'])})",
                         os.path.join(out_dir, filename))
    return filename


def render_report_plots(report: dict, out_dir: str) -> list[str]:
    """Render every experiment scatter under out_dir/plots."""
    plot_dir = os.path.join(out_dir, "plots")
    os.makedirs(plot_dir, exist_ok=True)
    paths = []
    for exp in report["experiments"]:
        filename = render_experiment_plot(exp, plot_dir)
        if filename:
            rel = os.path.join("plots", filename)
            exp["plot"] = rel
            paths.append(rel)
    return paths
