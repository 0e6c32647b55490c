"""Trajectory metrics and statistics.

Works the same on engine output and on externally tracked trajectories.
Standard deviations use the N-1 divisor and quartiles are linear
interpolation between order statistics (Hyndman-Fan type 7).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .core import InsufficientDataError, Rect, Trajectory

SIGNIFICANCE = 0.05


class DegenerateSampleError(ValueError):
    """The sample has zero variance, so the t statistic is undefined."""


@dataclass(frozen=True)
class SpeedSeries:
    agent_id: int
    values: np.ndarray
    dt: float

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SummaryStats:
    sample_size: int
    mean: float
    std: float
    min: float
    q25: float
    q50: float
    q75: float
    max: float
    std_defined: bool = True

    def as_row(self) -> list[float]:
        return [self.sample_size, self.mean, self.std, self.min, self.q25, self.q50,
                self.q75, self.max]


@dataclass(frozen=True)
class TTestResult:
    statistic: float
    n: int
    mean: float
    std: float
    df: int
    critical: float
    reject_h0: bool


def instantaneous_speeds(traj: Trajectory, dt: float) -> SpeedSeries:
    if len(traj) < 2:
        raise InsufficientDataError(f"trajectory {traj.agent_id}: need at least 2 frames")
    step = np.diff(traj.xy, axis=0)
    return SpeedSeries(traj.agent_id, np.hypot(step[:, 0], step[:, 1]) / dt, dt)


def mean_speed(series: SpeedSeries, mask) -> float:
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != series.values.shape:
        raise ValueError(f"mask length {mask.size} != series length {series.values.size}")
    if not mask.any():
        raise InsufficientDataError("mask selects no speed samples")
    return float(series.values[mask].mean())


def in_area(traj: Trajectory, area: Rect) -> np.ndarray:
    x, y = traj.xy[:, 0], traj.xy[:, 1]
    return (area.x_min <= x) & (x <= area.x_max) & (area.y_min <= y) & (y <= area.y_max)


def inside_outside_split(traj: Trajectory, area: Rect) -> tuple[np.ndarray, np.ndarray]:
    """Masks over speed samples 1..N.

    Sample t is inside when frame t lies in the area, outside when frame t
    precedes the first frame in the area.  Outside-area frames after the first
    entry belong to neither.
    """
    frame_in = in_area(traj, area)
    hits = np.flatnonzero(frame_in)
    first = hits[0] if hits.size else len(frame_in)
    t = np.arange(1, len(frame_in))
    return frame_in[1:].copy(), t < first


def paired_t_statistic(deltas: Sequence[float]) -> TTestResult:
    d = np.asarray(deltas, dtype=float)
    n = d.size
    if n < 2:
        raise InsufficientDataError("paired t statistic needs at least 2 differences")
    sd = float(d.std(ddof=1))
    mean = float(d.mean())
    if sd == 0.0:
        raise DegenerateSampleError("differences have zero variance")
    t_stat = math.sqrt(n) * mean / sd
    critical = float(stats.t.ppf(SIGNIFICANCE, n - 1))
    return TTestResult(t_stat, n, mean, sd, n - 1, critical, t_stat < critical)


def metric_start_end(traj: Trajectory) -> float:
    if len(traj) < 1:
        raise InsufficientDataError("empty trajectory")
    d = traj.xy[-1] - traj.xy[0]
    return float(math.hypot(d[0], d[1]))


def metric_max_displacement(traj: Trajectory) -> float:
    if len(traj) < 1:
        raise InsufficientDataError("empty trajectory")
    d = traj.xy - traj.xy[0]
    return float(np.hypot(d[:, 0], d[:, 1]).max())


def duration_in_area(traj: Trajectory, area: Rect, dt: float) -> float:
    """Seconds spent inside ``area``: inside frame count times the frame interval."""
    return float(np.count_nonzero(in_area(traj, area)) * dt)


def pairwise_trajectory_error(trajs: Sequence[Trajectory]) -> float:
    if len(trajs) < 2:
        raise InsufficientDataError("need at least two trajectories")
    k = len(trajs[0])
    if k < 1 or any(len(t) != k for t in trajs):
        raise ValueError("trajectories must share the same non-zero frame count")
    pair_means = []
    for a, b in combinations(trajs, 2):
        diff = a.xy - b.xy
        pair_means.append(np.hypot(diff[:, 0], diff[:, 1]).mean())
    return float(np.mean(pair_means))


def ks_statistic(samples: Sequence[float], cdf: Callable[[float], float]) -> float:
    """One-sample Kolmogorov-Smirnov distance between the sample and ``cdf``."""
    xs = sorted(float(s) for s in samples)
    n = len(xs)
    if n == 0:
        raise InsufficientDataError("KS statistic needs at least one sample")
    d = 0.0
    for i, x in enumerate(xs, start=1):
        f = float(cdf(x))
        d = max(d, abs(i / n - f), abs(f - (i - 1) / n))
    return d


def _quantile(sorted_vals: np.ndarray, q: float) -> float:
    h = (len(sorted_vals) - 1) * q
    lo = math.floor(h)
    hi = min(lo + 1, len(sorted_vals) - 1)
    return float(sorted_vals[lo] + (h - lo) * (sorted_vals[hi] - sorted_vals[lo]))


def summarize(samples: Sequence[float]) -> SummaryStats:
    vals = np.sort(np.asarray(samples, dtype=float))
    n = vals.size
    if n == 0:
        raise InsufficientDataError("cannot summarise an empty sample")
    std = float(vals.std(ddof=1)) if n > 1 else 0.0
    return SummaryStats(
        sample_size=n,
        mean=float(vals.mean()),
        std=std,
        min=float(vals[0]),
        q25=_quantile(vals, 0.25),
        q50=_quantile(vals, 0.50),
        q75=_quantile(vals, 0.75),
        max=float(vals[-1]),
        std_defined=n > 1,
    )


def x_reversals(traj: Trajectory, mask, tol: float = 1e-3) -> bool:
    """True if x both increases and decreases by more than ``tol`` over the masked frames."""
    x = traj.xy[np.asarray(mask, dtype=bool), 0]
    if x.size < 3:
        return False
    dx = np.diff(x)
    dx = dx[np.abs(dx) > tol]
    return bool((dx > 0).any() and (dx < 0).any())
