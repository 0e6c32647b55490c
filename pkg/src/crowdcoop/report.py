"""Per-run and aggregate metrics for batches of trajectory files."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis as an
from .core import Rect, Trajectory
from .engine import Event, EventKind
from .io import read_events, read_trajectories

QUARTILE_METHOD = "linear interpolation between order statistics (type 7)"


class InputError(ValueError):
    """Input directory or file set cannot be analysed."""


@dataclass
class RunInput:
    name: str
    trajectories: dict[int, Trajectory]
    area: Rect
    dt: float
    walker_id: Optional[int] = None
    events: Optional[list[Event]] = None


@dataclass(frozen=True)
class RunMetrics:
    run: str
    walker_id: int
    walker_reached_target: bool
    entered_area: bool
    inside_speed: Optional[float]
    outside_speed: Optional[float]
    duration: float
    swaps: int
    swaps_inside: int
    x_nonmonotone: bool

    @property
    def delta(self) -> Optional[float]:
        if self.inside_speed is None or self.outside_speed is None:
            return None
        return self.inside_speed - self.outside_speed


@dataclass(frozen=True)
class CrowdMetrics:
    run: str
    agent_id: int
    start_end: float
    max_displacement: float


@dataclass
class ReportBundle:
    runs: list[RunMetrics]
    crowd: list[CrowdMetrics]
    inside: Optional[an.SummaryStats]
    outside: Optional[an.SummaryStats]
    duration: Optional[an.SummaryStats]
    crowd_start_end: Optional[an.SummaryStats]
    crowd_max_displacement: Optional[an.SummaryStats]
    success_rate: float
    swap_inside_fraction: float
    zigzag_fraction: float
    ttest: Optional[an.TTestResult]
    durations: list[float] = field(default_factory=list)
    files: list[str] = field(default_factory=list)


def detect_walker(trajs: dict[int, Trajectory], area: Rect) -> int:
    """The agent that starts outside the area and travels farthest."""
    best = None
    for aid, t in trajs.items():
        if an.in_area(t, area)[0]:
            continue
        path = float(np.hypot(*np.diff(t.xy, axis=0).T).sum()) if len(t) > 1 else 0.0
        if best is None or path > best[0]:
            best = (path, aid)
    if best is None:
        raise InputError("cannot identify the walking agent; pass --walker-id")
    return best[1]


def _frame_at(traj: Trajectory, time: float, dt: float) -> Optional[np.ndarray]:
    k = int(round(time / dt))
    idx = np.searchsorted(traj.steps, k)
    if idx < len(traj) and traj.steps[idx] == k:
        return traj.xy[idx]
    return None


def analyze_run(inp: RunInput) -> tuple[RunMetrics, list[CrowdMetrics]]:
    area, dt = inp.area, inp.dt
    wid = inp.walker_id if inp.walker_id is not None else detect_walker(inp.trajectories, area)
    if wid not in inp.trajectories:
        raise InputError(f"{inp.name}: walker id {wid} not present")
    walker = inp.trajectories[wid]
    frame_in = an.in_area(walker, area)
    entered = bool(frame_in.any())
    v_in = v_out = None
    if len(walker) >= 2:
        series = an.instantaneous_speeds(walker, dt)
        inside, outside = an.inside_outside_split(walker, area)
        if inside.any():
            v_in = an.mean_speed(series, inside)
        if outside.any():
            v_out = an.mean_speed(series, outside)
    duration = an.duration_in_area(walker, area, dt)

    swaps = swaps_inside = 0
    if inp.events is not None:
        reached = any(e.kind is EventKind.TARGET_REACHED and e.agent_a == wid for e in inp.events)
        for e in inp.events:
            if e.kind is not EventKind.SWAP or wid not in (e.agent_a, e.agent_b):
                continue
            swaps += 1
            for aid in (e.agent_a, e.agent_b):
                p = _frame_at(inp.trajectories[aid], e.time, dt) if aid in inp.trajectories else None
                if p is not None and area.contains_xy(p[0], p[1]):
                    swaps_inside += 1
                    break
    else:
        reached = entered and not frame_in[-1]
    metrics = RunMetrics(inp.name, wid, reached, entered, v_in, v_out, duration, swaps,
                         swaps_inside, an.x_reversals(walker, frame_in))
    crowd = [CrowdMetrics(inp.name, aid, an.metric_start_end(t), an.metric_max_displacement(t))
             for aid, t in inp.trajectories.items() if aid != wid]
    return metrics, crowd


def _summary(values) -> Optional[an.SummaryStats]:
    values = [v for v in values if v is not None]
    return an.summarize(values) if values else None


def build_report(inputs: list[RunInput]) -> ReportBundle:
    if not inputs:
        raise InputError("no trajectory files to analyse")
    runs, crowd = [], []
    for inp in inputs:
        m, c = analyze_run(inp)
        runs.append(m)
        crowd.extend(c)
    deltas = [m.delta for m in runs if m.delta is not None]
    try:
        ttest = an.paired_t_statistic(deltas) if len(deltas) >= 2 else None
    except an.DegenerateSampleError:
        ttest = None
    successes = [m for m in runs if m.walker_reached_target]
    durations = [m.duration for m in runs if m.entered_area]
    n_ok = len(successes)
    return ReportBundle(
        runs=runs,
        crowd=crowd,
        inside=_summary(m.inside_speed for m in runs),
        outside=_summary(m.outside_speed for m in runs),
        duration=_summary(durations),
        crowd_start_end=_summary(c.start_end for c in crowd),
        crowd_max_displacement=_summary(c.max_displacement for c in crowd),
        success_rate=n_ok / len(runs),
        swap_inside_fraction=(sum(m.swaps_inside > 0 for m in successes) / n_ok) if n_ok else 0.0,
        zigzag_fraction=(sum(m.x_nonmonotone for m in successes) / n_ok) if n_ok else 0.0,
        ttest=ttest,
        durations=durations,
    )


# -- loading --------------------------------------------------------------------

def _parse_area(text: str) -> Rect:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 4:
        raise InputError(f"--area expects x_min,y_min,x_max,y_max, got {text!r}")
    return Rect(*parts)


def load_inputs(paths, dt: Optional[float] = None, area: Optional[Rect] = None,
                walker_id: Optional[int] = None) -> list[RunInput]:
    inputs = []
    for p in map(Path, paths):
        if p.is_dir():
            inputs.extend(_load_dir(p, dt, area, walker_id))
        elif p.is_file():
            if area is None:
                raise InputError(f"{p}: waiting area unknown; pass --area")
            trajs = read_trajectories(p, dt)
            inputs.append(RunInput(p.stem, trajs, area, dt or _infer_dt(trajs), walker_id))
        else:
            raise InputError(f"{p}: no such file or directory")
    if not inputs:
        raise InputError("no trajectory files found")
    return inputs


def _infer_dt(trajs: dict[int, Trajectory]) -> float:
    for t in trajs.values():
        if len(t) > 1:
            return float(round((t.times[-1] - t.times[0]) / (t.steps[-1] - t.steps[0]), 6))
    return 0.04


def _load_dir(d: Path, dt, area, walker_id) -> list[RunInput]:
    manifest_path = d / "manifest.json"
    if manifest_path.exists():
        try:
            manifest = json.loads(manifest_path.read_text())
            wa = manifest["scenario"]["topography"]["waiting_area"]
            m_area = Rect(wa["x_min_m"], wa["y_min_m"], wa["x_max_m"], wa["y_max_m"])
            m_dt = manifest["scenario"]["frame_interval_s"]
            run_files = [(r["trajectory_file"], r["event_file"]) for r in manifest["runs"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{manifest_path}: malformed manifest ({exc!r})") from exc
        wid = walker_id if walker_id is not None else manifest.get("walker_id")
        out = []
        for traj_file, event_file in run_files:
            trajs = read_trajectories(d / traj_file)
            events = read_events(d / event_file)
            out.append(RunInput(Path(traj_file).stem, trajs, area or m_area,
                                dt or m_dt, wid, events))
        return out
    files = sorted(f for f in d.glob("*.csv") if not f.name.startswith("events_"))
    if area is None and files:
        raise InputError(f"{d}: no manifest.json; pass --area")
    out = []
    for f in files:
        trajs = read_trajectories(f, dt)
        ev_path = d / f.name.replace("traj_", "events_", 1)
        events = read_events(ev_path) if f.name.startswith("traj_") and ev_path.exists() else None
        out.append(RunInput(f.stem, trajs, area, dt or _infer_dt(trajs), walker_id, events))
    return out


# -- writing --------------------------------------------------------------------

def _fmt(v, digits: int = 4) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) and math.isnan(v):
        return ""
    return f"{v:.{digits}f}"


def duration_histogram(durations, bin_width: float = 1.0) -> list[tuple[float, float, int]]:
    if not durations:
        return []
    top = max(bin_width, math.ceil(max(durations) / bin_width) * bin_width)
    edges = np.arange(0.0, top + bin_width / 2, bin_width)
    if edges[-1] <= max(durations):
        edges = np.append(edges, edges[-1] + bin_width)
    counts, _ = np.histogram(durations, bins=edges)
    return [(float(a), float(b), int(c)) for a, b, c in zip(edges[:-1], edges[1:], counts)]


SUMMARY_ROWS = [("sample size", "sample_size"), ("mean", "mean"), ("std", "std"), ("min", "min"),
                ("25%", "q25"), ("50%", "q50"), ("75%", "q75"), ("max", "max")]


def summary_columns(b: ReportBundle) -> list[tuple[str, Optional[an.SummaryStats], int]]:
    return [("inside_speed_mps", b.inside, 4), ("outside_speed_mps", b.outside, 4),
            ("duration_s", b.duration, 3), ("crowd_start_end_m", b.crowd_start_end, 4),
            ("crowd_max_displacement_m", b.crowd_max_displacement, 4)]


def aggregate_rows(b: ReportBundle) -> list[tuple[str, str]]:
    successes = sum(m.walker_reached_target for m in b.runs)
    slowdown = (b.outside.mean / b.inside.mean) if b.inside and b.outside and b.inside.mean > 0 else None
    t = b.ttest
    return [
        ("runs", _fmt(len(b.runs))),
        ("successes", _fmt(successes)),
        ("success_rate", _fmt(b.success_rate)),
        ("swap_inside_fraction", _fmt(b.swap_inside_fraction)),
        ("zigzag_fraction", _fmt(b.zigzag_fraction)),
        ("slowdown_factor", _fmt(slowdown)),
        ("t_sample_size", _fmt(t.n if t else None)),
        ("t_mean_delta_mps", _fmt(t.mean if t else None)),
        ("t_std_delta_mps", _fmt(t.std if t else None)),
        ("t_statistic", _fmt(t.statistic if t else None)),
        ("t_df", _fmt(t.df if t else None)),
        ("t_critical_0.05", _fmt(t.critical if t else None)),
        ("reject_h0", _fmt(t.reject_h0 if t else None)),
        ("std_divisor", "N-1"),
        ("quartile_method", QUARTILE_METHOD),
    ]


def write_report(b: ReportBundle, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name, header, rows):
        path = out / name
        with open(path, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for r in rows:
                fh.write(",".join(r) + "\n")
        written.append(path)

    emit("runs.csv",
         ["run", "walker_id", "walker_reached_target", "entered_area", "inside_speed_mps",
          "outside_speed_mps", "delta_speed_mps", "duration_s", "swaps", "swaps_inside",
          "x_nonmonotone"],
         [[m.run, _fmt(m.walker_id), _fmt(m.walker_reached_target), _fmt(m.entered_area),
           _fmt(m.inside_speed), _fmt(m.outside_speed), _fmt(m.delta), _fmt(m.duration, 3),
           _fmt(m.swaps), _fmt(m.swaps_inside), _fmt(m.x_nonmonotone)] for m in b.runs])
    emit("crowd.csv", ["run", "agent_id", "start_end_m", "max_displacement_m"],
         [[c.run, _fmt(c.agent_id), _fmt(c.start_end), _fmt(c.max_displacement)] for c in b.crowd])
    cols = summary_columns(b)
    emit("summary.csv", ["statistic"] + [c[0] for c in cols],
         [[label] + [(_fmt(getattr(s, attr), digits) if attr != "sample_size"
                      else _fmt(s.sample_size)) if s else "" for _, s, digits in cols]
          for label, attr in SUMMARY_ROWS])
    emit("aggregate.csv", ["key", "value"], [list(r) for r in aggregate_rows(b)])
    emit("durations_hist.csv", ["bin_left_s", "bin_right_s", "count"],
         [[_fmt(a, 3), _fmt(c, 3), str(n)] for a, c, n in duration_histogram(b.durations)])
    b.files = [str(p) for p in written]
    return written


def format_summary(b: ReportBundle) -> str:
    cols = summary_columns(b)
    lines = ["{:<12}".format("") + "".join(f"{c[0]:>26}" for c in cols)]
    for label, attr in SUMMARY_ROWS:
        cells = []
        for _, s, digits in cols:
            cells.append(f"{getattr(s, attr):>26.{0 if attr == 'sample_size' else digits}f}"
                         if s else f"{'-':>26}")
        lines.append(f"{label:<12}" + "".join(cells))
    lines.append("")
    lines.extend(f"{k:<24}{v}" for k, v in aggregate_rows(b))
    return "\n".join(lines)
