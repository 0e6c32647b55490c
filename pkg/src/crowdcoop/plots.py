"""Figures rendered next to the CSV reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .core import Rect, Trajectory  # noqa: E402
from .report import ReportBundle  # noqa: E402

# keep PNG bytes reproducible
_SAVE = dict(dpi=120, metadata={"Software": None})

plt.rcParams.update({
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.bbox": "tight",
})


def duration_histogram(bundle: ReportBundle, path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.2))
    if bundle.durations:
        lo = int(min(bundle.durations))
        hi = int(max(bundle.durations)) + 2
        ax.hist(bundle.durations, bins=range(lo, hi), color="#4c72b0", edgecolor="white")
    ax.set_xlabel("duration in waiting area [s]")
    ax.set_ylabel("runs")
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return Path(path)


def speed_boxplot(bundle: ReportBundle, path) -> Path:
    inside = [m.inside_speed for m in bundle.runs if m.inside_speed is not None]
    outside = [m.outside_speed for m in bundle.runs if m.outside_speed is not None]
    fig, ax = plt.subplots(figsize=(4, 3.2))
    data, labels = [], []
    for values, label in ((inside, "inside"), (outside, "outside")):
        if values:
            data.append(values)
            labels.append(label)
    if data:
        ax.boxplot(data)
        ax.set_xticks(range(1, len(labels) + 1), labels)
    ax.set_ylabel("mean speed [m/s]")
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return Path(path)


def walker_trajectories(walkers: list[Trajectory], area: Rect, path, margin: float = 0.4) -> Path:
    fig, ax = plt.subplots(figsize=(4, 4.4))
    ax.add_patch(Rectangle((area.x_min, area.y_min), area.width, area.height,
                           fill=False, edgecolor="red", lw=1.5))
    for t in walkers:
        ax.plot(t.xy[:, 0], t.xy[:, 1], lw=0.8, alpha=0.7)
    ax.set_xlim(area.x_min - margin, area.x_max + margin)
    ax.set_ylim(area.y_min - margin, area.y_max + margin)
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return Path(path)


def render_all(bundle: ReportBundle, walkers: list[Trajectory], area: Rect, out_dir) -> list[Path]:
    out = Path(out_dir)
    return [
        duration_histogram(bundle, out / "durations_hist.png"),
        speed_boxplot(bundle, out / "speeds_boxplot.png"),
        walker_trajectories(walkers[:25], area, out / "walker_trajectories.png"),
    ]
