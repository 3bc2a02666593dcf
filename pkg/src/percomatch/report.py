"""Figure rendering for sweep outputs.

Each sweep CSV gets a companion PNG next to it: matched-node curves over
the seed count (one line per parameter series), error-ratio curves, or the
filter-factor trade-off panel, depending on the scenario. CSV stays the
contract; the figures are a convenience for eyeballing runs.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .experiments import point_key  # noqa: E402

__all__ = ["render_sweep_figure", "render_table_figure"]


def _series_label(point: dict) -> str:
    parts = [f"{k}={point[k]}" for k in sorted(point) if k != "a0"]
    return ", ".join(parts) if parts else "series"


def _group_series(aggregates: list) -> dict:
    series: dict = {}
    for row in aggregates:
        pt = dict(row["point"])
        pt.pop("a0", None)
        label = _series_label(pt)
        series.setdefault(label, []).append(row)
    for rows in series.values():
        rows.sort(key=lambda r: r["a0"])
    return series


def render_sweep_figure(aggregates: list, scenario: str, out_png: str) -> str:
    """Render the panel matching the scenario; returns the PNG path."""
    if scenario == "fig2_error_vs_K":
        _figure_error_vs_k(aggregates, out_png)
    elif scenario == "fig4_filter_sweep":
        _figure_filter_tradeoff(aggregates, out_png)
    else:
        _figure_matches_vs_seeds(aggregates, out_png)
    return out_png


def _figure_matches_vs_seeds(aggregates, out_png):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, rows in _group_series(aggregates).items():
        x = [r["a0"] for r in rows]
        ax.plot(x, [r["mean_good"] for r in rows], marker="o", label=label)
        if any(r["mean_bad"] > 0 for r in rows):
            ax.plot(x, [r["mean_bad"] for r in rows], marker=".",
                    linestyle="--", linewidth=0.8,
                    label=label + " (bad)")
    ax.set_xlabel("seeds")
    ax.set_ylabel("mean matched pairs")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_png, dpi=130)
    plt.close(fig)


def _figure_error_vs_k(aggregates, out_png):
    series: dict = {}
    for row in aggregates:
        pt = dict(row["point"])
        beta = pt.get("beta", "?")
        series.setdefault(beta, []).append(row)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for beta, rows in sorted(series.items(), key=lambda kv: str(kv[0])):
        rows.sort(key=lambda r: r["point"].get("K", 0))
        x = [r["point"].get("K") for r in rows]
        y = [_err(r) for r in rows]
        ax.plot(x, y, marker="o", label=f"beta={beta}")
    ax.set_xlabel("K")
    ax.set_ylabel("mean error ratio")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_png, dpi=130)
    plt.close(fig)


def _figure_filter_tradeoff(aggregates, out_png):
    series: dict = {}
    for row in aggregates:
        series.setdefault(row["a0"], []).append(row)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    for a0, rows in sorted(series.items()):
        rows.sort(key=lambda r: r["point"].get("f", 0))
        x = [r["point"].get("f") for r in rows]
        ax1.plot(x, [_err(r) for r in rows], marker="o", label=f"a0={a0}")
        ax2.plot(x, [r["percolation_prob"] for r in rows], marker="o",
                 label=f"a0={a0}")
    ax1.set_xlabel("filter factor")
    ax1.set_ylabel("mean error ratio")
    ax2.set_xlabel("filter factor")
    ax2.set_ylabel("percolation probability")
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=130)
    plt.close(fig)


def render_table_figure(rows: list, out_png: str) -> str:
    """Seed minimum vs average degree (inverse-search output)."""
    usable = [r for r in rows if r.get("a0") is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    if usable:
        ax.plot([r["degree"] for r in usable], [r["a0"] for r in usable],
                marker="s")
        for r in usable:
            ax.annotate(f"f={r['f']}", (r["degree"], r["a0"]),
                        textcoords="offset points", xytext=(4, 4), fontsize=8)
    ax.set_xlabel("average node degree")
    ax.set_ylabel("minimal seeds")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_png, dpi=130)
    plt.close(fig)
    return out_png


def _err(row: dict) -> float:
    val = row.get("mean_error_percolated")
    if val is None or (isinstance(val, float) and math.isnan(val)):
        return row["mean_error_ratio"]
    return val
