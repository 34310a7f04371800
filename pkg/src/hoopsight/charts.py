"""Matplotlib figure rendering for the CLI report paths.

Charts are written next to the delimited outputs: a court map colored by
per-region EPV for the epvmap command, and an AP-by-stage figure for the
evaluate command.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .ability import EpvMap, RegionPartition
from .ingest import COURT_WIDTH
from .tracking import IOU_THRESHOLDS, EvaluationReport


def render_epv_chart(epv_map: EpvMap, partition: RegionPartition,
                     out_path: str | Path, cells_per_foot: float = 2.0) -> Path:
    """Half-court map shaded by region EPV (darker = higher)."""
    x_max = 47.0
    nx = int(x_max * cells_per_foot)
    ny = int(COURT_WIDTH * cells_per_foot)
    xs = (np.arange(nx) + 0.5) / cells_per_foot
    ys = (np.arange(ny) + 0.5) / cells_per_foot
    grid = np.zeros((ny, nx))
    region_cache: dict[str, float] = {
        region: stats.epv for region, stats in epv_map.regions.items()}
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            region = partition.region_of(float(x), float(y))
            grid[j, i] = region_cache.get(region, 0.0)

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    im = ax.imshow(grid, origin="lower", extent=(0, x_max, 0, COURT_WIDTH),
                   cmap="YlGnBu", vmin=0.0, vmax=3.0, aspect="equal")
    ax.set_title(f"Expected point value by region: {epv_map.player}")
    ax.set_xlabel("feet from baseline")
    ax.set_ylabel("feet from sideline")
    fig.colorbar(im, ax=ax, label="EPV (points)")
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return out_path


def render_evaluation_chart(reports: Mapping[str, EvaluationReport],
                            out_path: str | Path) -> Path:
    """Grouped bars of AP50:95 / AP50 / AP75 per pipeline stage."""
    stages = list(reports)
    metrics = [("AP 50:95", lambda r: r.ap_50_95),
               ("AP 50", lambda r: r.ap_50),
               ("AP 75", lambda r: r.ap_75)]

    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(10.0, 4.0))
    width = 0.8 / len(stages)
    xs = np.arange(len(metrics))
    for i, stage in enumerate(stages):
        values = [100.0 * get(reports[stage]) for _, get in metrics]
        ax.bar(xs + i * width, values, width, label=stage)
    ax.set_xticks(xs + width * (len(stages) - 1) / 2)
    ax.set_xticklabels([name for name, _ in metrics])
    ax.set_ylabel("AP (%)")
    ax.set_ylim(0, 105)
    ax.legend()
    ax.set_title("Average precision by stage")

    for stage in stages:
        r = reports[stage]
        ax2.plot(IOU_THRESHOLDS, [100.0 * r.mean_ap(t) for t in IOU_THRESHOLDS],
                 marker="o", label=stage)
    ax2.set_xlabel("IoU threshold")
    ax2.set_ylabel("AP (%)")
    ax2.set_ylim(0, 105)
    ax2.legend()
    ax2.set_title("AP across IoU thresholds")

    out_path = Path(out_path)
    fig.savefig(out_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return out_path
