"""Figure rendering for cloud tables and battery reports.

The cloud style follows the usual presentation of offspring statistics
binned by parent fitness: a shaded min/max border around the support,
the mean curve with one-standard-deviation bars, the identity diagonal,
and optional overlays (predicted curve, raw sample scatter, bottleneck
markers).  All drawing is read-only over the parsed inputs, so rendering
the same files twice yields identical plotted series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import DataError, ParameterError
from .reading import (
    AnalyticCurve,
    BetaReport,
    CloudTable,
    read_analytic_csv,
    read_beta_report,
    read_cloud_csv,
    read_raw_points_csv,
)

MAX_SCATTER_POINTS = 1_000_000

MEAN_LABEL = "mean"
BORDER_LABEL = "min/max border"
DIAGONAL_LABEL = "identity"
PREDICTED_LABEL = "predicted"
SCATTER_LABEL = "samples"

# Published single-instance reference values for the default N=20, K=15
# battery; fresh random instances land near, but not exactly on, them.
TABLE1_REFERENCE = {
    "mHC": ("0.645", "0.667"),
    "SA (T=0.10)": ("0.524", "0.559"),
    "SA (T=0.05)": ("0.548", "0.590"),
    "SA (T=0.01)": ("[0.604, 0.792]", "0.656"),
    "SA (generation 50)": ("-", "0.560"),
    "SA (generation 1000)": ("-", "0.613"),
    "SA (generation 1900)": ("-", "0.682"),
    "SA (generation 2450)": ("-", "0.701"),
    "nHC": ("[0.686, 0.792]", "0.746"),
}
TABLE1_REFERENCE_MAX_FITNESS = 0.792


@dataclass(frozen=True)
class PlotSpec:
    """One cloud figure: input files, labeling, and the output image."""

    cloud: Path
    output: Path
    beta: Path | None = None
    analytic: Path | None = None
    raw_points: Path | None = None
    title: str | None = None
    ylabel: str = "offspring fitness"
    axis_range: tuple[tuple[float, float], tuple[float, float]] = (
        (0.0, 1.0), (0.0, 1.0))


def downsample(parent: np.ndarray, offspring: np.ndarray,
               limit: int = MAX_SCATTER_POINTS):
    """Thin a scatter to at most ``limit`` points with a fixed stride, so
    repeated renders of the same file plot the same subset."""
    if parent.size <= limit:
        return parent, offspring
    step = math.ceil(parent.size / limit)
    return parent[::step], offspring[::step]


def draw_cloud(ax, table: CloudTable, *, beta: BetaReport | None = None,
               analytic: AnalyticCurve | None = None,
               raw: tuple[np.ndarray, np.ndarray] | None = None,
               title: str | None = None,
               ylabel: str = "offspring fitness",
               axis_range=((0.0, 1.0), (0.0, 1.0))) -> None:
    """Draw one cloud onto ``ax``; every series comes from the inputs."""
    (x_lo, x_hi), (y_lo, y_hi) = axis_range
    if raw is not None:
        pts = downsample(*raw)
        ax.scatter(pts[0], pts[1], s=1.0, alpha=0.15, color="0.55",
                   linewidths=0, rasterized=True, label=SCATTER_LABEL,
                   zorder=1)
    ax.plot([x_lo, x_hi], [x_lo, x_hi], linestyle=":", color="0.4",
            linewidth=1.0, label=DIAGONAL_LABEL, zorder=2)
    ax.fill_between(table.center, table.f_min, table.f_max,
                    color="tab:blue", alpha=0.12, linewidth=0, zorder=3)
    ax.plot(table.center, table.f_min, color="tab:blue", linewidth=0.8,
            label=BORDER_LABEL, zorder=4)
    ax.plot(table.center, table.f_max, color="tab:blue", linewidth=0.8,
            zorder=4)
    # The bars and the curve are separate artists: errorbar attaches its
    # label to a container, and the mean series must stay addressable as a
    # labeled line on the axes.
    ax.errorbar(table.center, table.f_mean, yerr=table.f_std,
                fmt="none", ecolor="tab:orange", elinewidth=0.6,
                capsize=1.5, label="_nolegend_", zorder=5)
    ax.plot(table.center, table.f_mean, "o-", color="tab:orange",
            markersize=2.0, linewidth=1.2, label=MEAN_LABEL, zorder=6)

    predicted = None
    if analytic is not None:
        predicted = (analytic.f, analytic.predicted)
    elif table.predicted is not None and not np.isnan(table.predicted).all():
        keep = ~np.isnan(table.predicted)
        predicted = (table.center[keep], table.predicted[keep])
    if predicted is not None:
        ax.plot(predicted[0], predicted[1], linestyle="--",
                color="tab:green", linewidth=1.2, label=PREDICTED_LABEL,
                zorder=7)

    if beta is not None:
        if isinstance(beta.beta, tuple):
            ax.axvspan(beta.beta[0], beta.beta[1], color="tab:red",
                       alpha=0.08,
                       label=f"beta [{beta.beta[0]:.3f}, {beta.beta[1]:.3f}]")
        elif beta.beta is not None:
            ax.axvline(beta.beta, color="tab:red", linestyle="-.",
                       linewidth=1.0, label=f"beta = {beta.beta:.3f}")
        if beta.beta_star is not None:
            ax.axhline(beta.beta_star, color="tab:purple", linestyle="--",
                       linewidth=1.0,
                       label=f"beta* = {beta.beta_star:.3f}")

    ax.set_xlim(x_lo, x_hi)
    ax.set_ylim(y_lo, y_hi)
    ax.set_xlabel("parent fitness")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(alpha=0.2, linewidth=0.5)
    ax.legend(loc="upper left", fontsize=7, framealpha=0.9)


def render_cloud(spec: PlotSpec) -> Path:
    """Render one cloud figure to ``spec.output`` and return that path."""
    table = read_cloud_csv(spec.cloud)
    beta = read_beta_report(spec.beta) if spec.beta else None
    analytic = read_analytic_csv(spec.analytic) if spec.analytic else None
    raw = read_raw_points_csv(spec.raw_points) if spec.raw_points else None
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    try:
        draw_cloud(ax, table, beta=beta, analytic=analytic, raw=raw,
                   title=spec.title or Path(spec.cloud).stem,
                   ylabel=spec.ylabel, axis_range=spec.axis_range)
        fig.savefig(spec.output, dpi=150, bbox_inches="tight")
    finally:
        plt.close(fig)
    return Path(spec.output)


def render_snapshot_grid(panels: list[tuple[str, Path, Path | None]],
                         output, *, title: str | None = None,
                         ylabel: str = "limit fitness") -> Path:
    """Render several clouds side by side, one panel per snapshot.

    ``panels`` holds (label, cloud CSV, optional beta report) triples;
    the grid grows two panels wide, matching the usual four-snapshot
    presentation of a cooling run.
    """
    if not panels:
        raise ParameterError("at least one panel is required")
    cols = min(2, len(panels))
    rows = math.ceil(len(panels) / cols)
    fig, axes = plt.subplots(rows, cols, figsize=(5.0 * cols, 5.0 * rows),
                             squeeze=False)
    try:
        for ax, (label, cloud_path, beta_path) in zip(axes.flat, panels):
            table = read_cloud_csv(cloud_path)
            beta = read_beta_report(beta_path) if beta_path else None
            draw_cloud(ax, table, beta=beta, title=label, ylabel=ylabel)
        for ax in axes.flat[len(panels):]:
            ax.axis("off")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(output, dpi=150, bbox_inches="tight")
    finally:
        plt.close(fig)
    return Path(output)


def format_beta(value) -> str:
    """Render a bottleneck value: point, [lo, hi] interval, or '-'."""
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return f"[{value[0]:.3f}, {value[1]:.3f}]"
    return f"{value:.3f}"


def _table1_cells(report: dict) -> tuple[list[str], list[list[str]]]:
    with_reference = (report.get("n") == 20 and report.get("k") == 15
                      and all(r["label"] in TABLE1_REFERENCE
                              for r in report["rows"]))
    header = ["heuristic", "beta", "beta*"]
    if with_reference:
        header += ["beta (reference)", "beta* (reference)"]
    body = []
    for row in report["rows"]:
        cells = [row["label"], format_beta(row["beta"]),
                 format_beta(row["beta_star"])]
        if with_reference:
            cells += list(TABLE1_REFERENCE[row["label"]])
        body.append(cells)
    return header, body


def table1_markdown(report: dict) -> str:
    """Format a battery report as a Markdown comparison table."""
    header, body = _table1_cells(report)
    lines = [
        f"Battery at N={report['n']}, K={report['k']}, "
        f"seeds {', '.join(str(s) for s in report['seeds'])}",
        "",
        "| " + " | ".join(header) + " |",
        "|" + "|".join(" --- " for _ in header) + "|",
    ]
    lines += ["| " + " | ".join(cells) + " |" for cells in body]
    mean_max = report["max_fitness"].get("mean")
    if mean_max is not None:
        note = f"Max fitness (mean over seeds): {mean_max:.3f}"
        if len(header) > 3:
            note += f"; reference instance: {TABLE1_REFERENCE_MAX_FITNESS}"
        lines += ["", note]
    return "\n".join(lines) + "\n"


def render_table1(report: dict, image_out, markdown_out=None) -> Path:
    """Render a battery report as an image table, optionally Markdown too."""
    header, body = _table1_cells(report)
    if markdown_out is not None:
        Path(markdown_out).write_text(table1_markdown(report),
                                      encoding="utf-8")
    fig, ax = plt.subplots(figsize=(2.1 * len(header), 0.45 * (len(body) + 3)))
    try:
        ax.axis("off")
        table = ax.table(cellText=body, colLabels=header, loc="center",
                         cellLoc="center")
        table.auto_set_font_size(False)
        table.set_fontsize(8)
        table.scale(1.0, 1.3)
        ax.set_title(f"Bottleneck estimates at N={report['n']}, "
                     f"K={report['k']}", fontsize=10)
        mean_max = report["max_fitness"].get("mean")
        if mean_max is not None:
            fig.text(0.5, 0.02,
                     f"max fitness (mean over seeds): {mean_max:.3f}",
                     ha="center", fontsize=8)
        fig.savefig(image_out, dpi=150, bbox_inches="tight")
    finally:
        plt.close(fig)
    return Path(image_out)
