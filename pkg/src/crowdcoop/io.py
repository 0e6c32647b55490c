"""Scenario configs (JSON) and trajectory / event CSV files."""

from __future__ import annotations

import csv
import json
from dataclasses import fields
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .core import (ModelParams, Rect, Scenario, SelfCategory, Topography, Trajectory,
                   ValidationError, Vec2, SAMPLE_FROM_SOURCE)
from .engine import Event, EventKind, RunResult

TRAJECTORY_HEADER = ["step", "time", "agent_id", "x", "y", "self_category"]
EVENT_HEADER = ["time", "kind", "agent_a", "agent_b"]
EXTERNAL_HEADER = ["frame", "agent_id", "x", "y"]

# python field -> config key (units in the key name)
PARAM_KEYS = {
    "n_history": "n_history_steps",
    "v_threshold": "v_threshold_mps",
    "search_radius": "search_radius_m",
    "stride_factor": "stride_factor",
    "candidate_count": "candidate_count",
    "candidate_rings": "candidate_rings",
    "agent_repulsion": "agent_repulsion_strength",
    "agent_repulsion_decay": "agent_repulsion_decay_m",
    "obstacle_repulsion": "obstacle_repulsion_strength",
    "obstacle_repulsion_decay": "obstacle_repulsion_decay_m",
    "torso_radius": "torso_radius_m",
    "step_interval": "step_interval_s",
    "walker_speed_mean": "walker_speed_mean_mps",
    "walker_speed_std": "walker_speed_std_mps",
    "walker_speed_min": "walker_speed_min_mps",
    "walker_speed_max": "walker_speed_max_mps",
    "waiting_free_flow_speed": "waiting_free_flow_speed_mps",
    "cognition": "cognition_enabled",
}


class ConfigError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


class TrajectoryFormatError(ValueError):
    def __init__(self, path, row: int, message: str):
        super().__init__(f"{path}, row {row}: {message}")
        self.path = path
        self.row = row


# -- scenario -----------------------------------------------------------------

def rect_to_dict(r: Rect) -> dict:
    return {"x_min_m": r.x_min, "y_min_m": r.y_min, "x_max_m": r.x_max, "y_max_m": r.y_max}


def point_to_dict(p: Vec2) -> dict:
    return {"x_m": p.x, "y_m": p.y}


def scenario_to_dict(s: Scenario) -> dict:
    t = s.topography
    params = {PARAM_KEYS[f.name]: getattr(s.params, f.name) for f in fields(ModelParams)}
    return {
        "topography": {
            "bounds": rect_to_dict(t.bounds),
            "source": rect_to_dict(t.source),
            "target": rect_to_dict(t.target),
            "waiting_area": rect_to_dict(t.waiting_area),
            "waiting_area_width_m": t.waiting_area.width,
            "waiting_area_height_m": t.waiting_area.height,
            "obstacles": [rect_to_dict(o) for o in t.obstacles],
        },
        "waiting_agents": [point_to_dict(p) for p in s.waiting_agents],
        "walker_spawn": s.walker_spawn if isinstance(s.walker_spawn, str)
        else point_to_dict(s.walker_spawn),
        "params": params,
        "seed": s.seed,
        "t_end_s": s.t_end,
        "frame_interval_s": s.frame_interval,
    }


def dumps_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


def _get(d: Any, key: str, where: str, kind=(int, float)):
    if not isinstance(d, dict):
        raise ConfigError(where, "expected an object")
    if key not in d:
        raise ConfigError(f"{where}.{key}", "missing field")
    v = d[key]
    if kind == (int, float) and isinstance(v, bool):
        raise ConfigError(f"{where}.{key}", f"expected a number, got {v!r}")
    if not isinstance(v, kind):
        raise ConfigError(f"{where}.{key}", f"unexpected value {v!r}")
    return v


def _rect(d: Any, where: str) -> Rect:
    try:
        return Rect(*(float(_get(d, k, where)) for k in ("x_min_m", "y_min_m", "x_max_m", "y_max_m")))
    except ValidationError as exc:
        raise ConfigError(where, str(exc)) from None


def _point(d: Any, where: str) -> Vec2:
    try:
        return Vec2(float(_get(d, "x_m", where)), float(_get(d, "y_m", where)))
    except ValidationError as exc:
        raise ConfigError(where, str(exc)) from None


def _params(d: Any) -> ModelParams:
    if not isinstance(d, dict):
        raise ConfigError("params", "expected an object")
    known = {v: k for k, v in PARAM_KEYS.items()}
    unknown = sorted(set(d) - set(known))
    if unknown:
        raise ConfigError(f"params.{unknown[0]}", "unknown field")
    kwargs = {}
    for f in fields(ModelParams):
        key = PARAM_KEYS[f.name]
        if key not in d:
            continue
        if f.type in ("bool", bool):
            kwargs[f.name] = _get(d, key, "params", bool)
        elif f.type in ("int", int):
            v = _get(d, key, "params")
            if isinstance(v, float) and not v.is_integer():
                raise ConfigError(f"params.{key}", f"expected an integer, got {v!r}")
            kwargs[f.name] = int(v)
        else:
            kwargs[f.name] = float(_get(d, key, "params"))
    return ModelParams(**kwargs)


def scenario_from_dict(d: Any) -> Scenario:
    if not isinstance(d, dict):
        raise ConfigError("<root>", "expected an object")
    topo_d = d.get("topography")
    if topo_d is None:
        raise ConfigError("topography", "missing field")
    obstacles = topo_d.get("obstacles", []) if isinstance(topo_d, dict) else None
    if not isinstance(obstacles, list):
        raise ConfigError("topography.obstacles", "expected a list")
    topo = Topography(
        bounds=_rect(topo_d.get("bounds"), "topography.bounds"),
        source=_rect(topo_d.get("source"), "topography.source"),
        target=_rect(topo_d.get("target"), "topography.target"),
        waiting_area=_rect(topo_d.get("waiting_area"), "topography.waiting_area"),
        obstacles=tuple(_rect(o, f"topography.obstacles[{i}]") for i, o in enumerate(obstacles)),
    )
    agents_d = d.get("waiting_agents", [])
    if not isinstance(agents_d, list):
        raise ConfigError("waiting_agents", "expected a list")
    agents = tuple(_point(p, f"waiting_agents[{i}]") for i, p in enumerate(agents_d))
    spawn_d = d.get("walker_spawn", SAMPLE_FROM_SOURCE)
    if isinstance(spawn_d, str):
        if spawn_d != SAMPLE_FROM_SOURCE:
            raise ConfigError("walker_spawn", f"expected a point or {SAMPLE_FROM_SOURCE!r}")
        spawn = spawn_d
    else:
        spawn = _point(spawn_d, "walker_spawn")
    seed = d.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigError("seed", f"expected a 64-bit unsigned integer, got {seed!r}")
    try:
        scenario = Scenario(
            topography=topo,
            waiting_agents=agents,
            walker_spawn=spawn,
            params=_params(d.get("params", {})),
            seed=seed,
            t_end=float(_get(d, "t_end_s", "<root>")) if "t_end_s" in d else 60.0,
            frame_interval=float(_get(d, "frame_interval_s", "<root>")) if "frame_interval_s" in d else 0.04,
        )
        scenario.validate()
    except ValidationError as exc:
        raise ConfigError("scenario", str(exc)) from None
    return scenario


def loads_scenario(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    if isinstance(data, dict) and "scenario" in data and "topography" not in data:
        # run manifest
        data = data["scenario"]
    return scenario_from_dict(data)


def load_scenario(path) -> Scenario:
    return loads_scenario(Path(path).read_text())


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(dumps_scenario(s))


# -- trajectories ---------------------------------------------------------------

def write_trajectories(trajs: Iterable[Trajectory], path) -> None:
    trajs = sorted(trajs, key=lambda t: t.agent_id)
    rows = []
    for t in trajs:
        for k, time, (x, y), c in zip(t.steps, t.times, t.xy, t.categories):
            rows.append((int(k), t.agent_id, f"{k},{time:.3f},{t.agent_id},{x:.4f},{y:.4f},{c.value}\n"))
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", newline="") as fh:
        fh.write(",".join(TRAJECTORY_HEADER) + "\n")
        fh.writelines(r[2] for r in rows)


def write_events(events: Iterable[Event], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(EVENT_HEADER) + "\n")
        for e in events:
            b = "" if e.agent_b is None else str(e.agent_b)
            fh.write(f"{e.time:.3f},{e.kind.value},{e.agent_a},{b}\n")


def read_events(path) -> list[Event]:
    kinds = {k.value: k for k in EventKind}
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != EVENT_HEADER:
            raise TrajectoryFormatError(path, 1, f"expected header {','.join(EVENT_HEADER)}")
        for row_no, row in enumerate(reader, start=2):
            try:
                t, kind, a, b = row
                out.append(Event(float(t), kinds[kind], int(a), int(b) if b else None))
            except (ValueError, KeyError):
                raise TrajectoryFormatError(path, row_no, f"malformed event {row!r}") from None
    return out


def _group(path, rows, dt: float | None, with_category: bool) -> dict[int, Trajectory]:
    per_agent: dict[int, list] = {}
    for row_no, rec in rows:
        per_agent.setdefault(rec[1], []).append((row_no, rec))
    out = {}
    for aid, recs in per_agent.items():
        recs.sort(key=lambda r: r[1][0])
        steps = [r[1][0] for r in recs]
        for (row_no, _), a, b in zip(recs[1:], steps, steps[1:]):
            if b == a:
                raise TrajectoryFormatError(path, row_no, f"duplicate frame {b} for agent {aid}")
        times = [r[1][2] for r in recs] if dt is None else [s * dt for s in steps]
        xy = [(r[1][3], r[1][4]) for r in recs]
        cats = [r[1][5] for r in recs] if with_category else [SelfCategory.WAIT] * len(recs)
        out[aid] = Trajectory(aid, steps, times, xy, cats)
    return dict(sorted(out.items()))


def read_trajectories(path, dt: float | None = None) -> dict[int, Trajectory]:
    """Read an engine trajectory CSV or an external ``frame,agent_id,x,y`` file."""
    cats = {c.value: c for c in SelfCategory}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TrajectoryFormatError(path, 1, "empty file")
        header = [h.strip() for h in header]
        if header == TRAJECTORY_HEADER:
            engine = True
        elif header == EXTERNAL_HEADER:
            engine = False
        else:
            raise TrajectoryFormatError(
                path, 1, f"unrecognised header {','.join(header)!r}")
        rows = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                if engine:
                    step, t, aid, x, y, c = row
                    rec = (int(step), int(aid), float(t), float(x), float(y), cats[c])
                else:
                    frame, aid, x, y = row
                    rec = (int(frame), int(aid), None, float(x), float(y), None)
            except (ValueError, KeyError):
                raise TrajectoryFormatError(path, row_no, f"malformed row {row!r}") from None
            if not (np.isfinite(rec[3]) and np.isfinite(rec[4])):
                raise TrajectoryFormatError(path, row_no, "non-finite coordinate")
            rows.append((row_no, rec))
    if not rows:
        raise TrajectoryFormatError(path, 2, "no data rows")
    if not engine and dt is None:
        dt = 0.04
    return _group(path, rows, None if engine else dt, engine)


def write_run(result: RunResult, out_dir, index: int) -> dict:
    out_dir = Path(out_dir)
    traj_name = f"traj_{index:04d}.csv"
    event_name = f"events_{index:04d}.csv"
    write_trajectories(result.trajectories.values(), out_dir / traj_name)
    write_events(result.events, out_dir / event_name)
    return {
        "run": index,
        "seed": result.seed,
        "trajectory_file": traj_name,
        "event_file": event_name,
        "walker_reached_target": result.walker_reached_target,
        "walker_free_flow_speed_mps": round(result.walker_free_flow_speed, 6),
        "swap_count": len(result.swaps),
    }
