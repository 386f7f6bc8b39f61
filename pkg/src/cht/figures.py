"""Figure rendering for the report path of each CLI subcommand.

Everything uses the object-oriented matplotlib API (no pyplot, no global
state), so rendering is deterministic and safe to call from library code.
Each function returns a Figure; save_figure writes it to a file.
"""

from __future__ import annotations

import numpy as np
from matplotlib.figure import Figure

_COLORS = {
    "cht": "#1f6f8b",
    "all_pairs": "#c65146",
    "screen_strong": "#8c7851",
    "screen_weak": "#5b8c5a",
}


def _axes(fig: Figure, title: str, xlabel: str, ylabel: str):
    ax = fig.subplots()
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3, linewidth=0.5)
    return ax


def _color(method: str) -> str:
    return _COLORS.get(method, "#444444")


def save_figure(fig: Figure, path) -> None:
    fig.savefig(path, dpi=150, bbox_inches="tight")


def effect_statistic_figure(stats, contrasts) -> Figure:
    """Entry-point statistic against raw contrast size for every effect."""
    fig = Figure(figsize=(6.0, 4.5))
    ax = _axes(fig, "Effect statistics", "|contrast|", "statistic")
    p = stats.p
    iu = np.triu_indices(p, k=1)
    ax.scatter(
        np.abs(contrasts.z[iu]),
        stats.lambda_pair[iu],
        s=12,
        alpha=0.6,
        color=_color("all_pairs"),
        label="interactions",
    )
    ax.scatter(
        np.abs(contrasts.w),
        stats.lambda_main,
        s=24,
        marker="s",
        color=_color("cht"),
        label="main effects",
    )
    lim = max(float(ax.get_xlim()[1]), float(ax.get_ylim()[1]))
    ax.plot([0, lim], [0, lim], linewidth=0.8, color="#999999", linestyle="--")
    ax.legend(frameon=False)
    return fig


def fdr_curve_figure(curve) -> Figure:
    fig = Figure(figsize=(6.0, 4.5))
    ax = _axes(fig, "Permutation FDR estimate", "penalty", "estimated FDR")
    ax.step(curve.lambda_grid, curve.fdr_hat, where="post", color=_color("cht"))
    ax.set_ylim(-0.02, 1.02)
    return fig


def fdp_rank_figure(curves: dict) -> Figure:
    fig = Figure(figsize=(6.0, 4.5))
    ax = _axes(fig, "False discovery proportion by rank", "rank", "mean FDP")
    for method, values in curves.items():
        ranks = np.arange(1, len(values) + 1)
        ax.plot(ranks, values, label=method, color=_color(method))
    ax.set_ylim(-0.02, 1.02)
    ax.legend(frameon=False)
    return fig


def power_figure(results: dict, n_values, effect_sizes, methods) -> Figure:
    fig = Figure(figsize=(6.0, 4.5))
    ax = _axes(fig, "True discoveries under an FDP budget", "n", "mean true positives")
    styles = ["-", "--", ":", "-."]
    for method in methods:
        for i, delta in enumerate(effect_sizes):
            values = [results[(method, n, float(delta))] for n in n_values]
            label = method if len(effect_sizes) == 1 else f"{method}, effect {delta:g}"
            ax.plot(
                n_values,
                values,
                styles[i % len(styles)],
                marker="o",
                markersize=4,
                label=label,
                color=_color(method),
            )
    ax.legend(frameon=False)
    return fig


def shrinkage_figure(z_grid, curves: dict) -> Figure:
    fig = Figure(figsize=(6.0, 4.5))
    ax = _axes(fig, "Shrinkage of one interaction", "z", "statistic")
    z_grid = np.asarray(z_grid, dtype=np.float64)
    ax.plot(z_grid, z_grid, linewidth=0.8, color="#999999", linestyle="--", label="no shrinkage")
    ax.plot(z_grid, 0.5 * z_grid, linewidth=0.8, color="#bbbbbb", linestyle=":", label="half")
    for label, values in curves.items():
        ax.plot(z_grid, values, label=label)
    ax.legend(frameon=False)
    return fig


def path_figure(lambdas, beta, theta, partner_names) -> Figure:
    fig = Figure(figsize=(6.0, 4.5))
    ax = _axes(fig, "Row coefficient path", "penalty", "coefficient")
    lambdas = np.asarray(lambdas, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    for k, name in enumerate(partner_names):
        ax.plot(lambdas, theta[:, k], linewidth=0.9, alpha=0.8)
    ax.plot(lambdas, np.asarray(beta, dtype=np.float64), linewidth=2.0,
            color="#111111", label="main effect")
    ax.invert_xaxis()
    ax.legend(frameon=False)
    return fig


def overlap_figure(overlaps: np.ndarray) -> Figure:
    fig = Figure(figsize=(6.0, 4.5))
    ax = _axes(fig, "Split-half top-k overlap", "k", "mean overlap")
    ks = np.arange(1, len(overlaps) + 1)
    ax.plot(ks, overlaps, marker="o", markersize=4, color=_color("cht"))
    ax.set_ylim(-0.02, 1.02)
    return fig


def frequency_figure(frequencies: dict, names, top_n: int = 20) -> Figure:
    fig = Figure(figsize=(6.0, 4.5))
    ax = _axes(fig, "Bootstrap top-k frequency", "frequency", "")
    items = sorted(frequencies.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
    labels = [f"{names[j]}:{names[k]}" for (j, k), _ in items][::-1]
    values = [freq for _, freq in items][::-1]
    ax.barh(np.arange(len(values)), values, color=_color("cht"))
    ax.set_yticks(np.arange(len(values)))
    ax.set_yticklabels(labels, fontsize=7)
    ax.set_xlim(0, 1.02)
    return fig
