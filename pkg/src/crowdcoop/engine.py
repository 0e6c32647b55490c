"""Simulation loop with psychology layer, trajectory recording and batching."""

from __future__ import annotations

import enum
import math
import time as _time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .core import (Agent, Scenario, SelfCategory, Trajectory, ValidationError, Vec2,
                   euclidean)
from .locomotion import DecisionKind, World, locomotion_update
from .psychology import CognitionModel, CooperativeCognition, FrozenCognition, PerceptionModel, \
    SimplePerception
from .rng import RunRng

WALKER_ID = 0
TARGET_ID = 0
_MAX_SPAWN_TRIES = 10_000


class EventKind(enum.Enum):
    SPAWN = "Spawn"
    CATEGORY_CHANGE = "CategoryChange"
    SWAP = "Swap"
    TARGET_REACHED = "TargetReached"


@dataclass(frozen=True)
class Event:
    time: float
    kind: EventKind
    agent_a: int
    agent_b: Optional[int] = None


@dataclass
class TickLog:
    """Raw per-tick state, before resampling to frames."""

    times: list[float] = field(default_factory=list)
    positions: list[dict[int, Vec2]] = field(default_factory=list)
    # category in effect during [times[k], times[k+1])
    categories: list[dict[int, SelfCategory]] = field(default_factory=list)
    swapped: list[frozenset[int]] = field(default_factory=list)


@dataclass
class RunResult:
    seed: int
    trajectories: dict[int, Trajectory]
    events: list[Event]
    walker_id: int
    walker_reached_target: bool
    walker_free_flow_speed: float
    ticks: TickLog
    wall_clock_s: float = 0.0

    @property
    def swaps(self) -> list[Event]:
        return [e for e in self.events if e.kind is EventKind.SWAP]


def _spawn_point(scenario: Scenario, rng: RunRng) -> Vec2:
    if isinstance(scenario.walker_spawn, Vec2):
        return scenario.walker_spawn
    src = scenario.topography.source
    min_dist = 2.0 * scenario.params.torso_radius
    for _ in range(_MAX_SPAWN_TRIES):
        p = Vec2(rng.spawn.uniform(src.x_min, src.x_max), rng.spawn.uniform(src.y_min, src.y_max))
        if scenario.topography.is_walkable(p) and all(
                euclidean(p, q) >= min_dist for q in scenario.waiting_agents):
            return p
    raise ValidationError("no free spawn position found inside the source")


def initial_agents(scenario: Scenario, rng: RunRng) -> dict[int, Agent]:
    params = scenario.params
    spawn = _spawn_point(scenario, rng)
    speed = rng.speed.truncated_normal(params.walker_speed_mean, params.walker_speed_std,
                                       params.walker_speed_min, params.walker_speed_max)
    agents = {WALKER_ID: Agent(WALKER_ID, spawn, params.torso_radius, speed, target=TARGET_ID,
                               self_category=SelfCategory.TARGET_ORIENTED)}
    for i, p in enumerate(scenario.waiting_agents, start=1):
        agents[i] = Agent(i, p, params.torso_radius, params.waiting_free_flow_speed)
    return dict(sorted(agents.items()))


def run(scenario: Scenario, perception: PerceptionModel | None = None,
        cognition: CognitionModel | None = None) -> RunResult:
    scenario.validate()
    started = _time.perf_counter()
    params = scenario.params
    perception = perception or SimplePerception()
    if cognition is None:
        cognition = CooperativeCognition() if params.cognition else FrozenCognition()
    rng = RunRng(scenario.seed)
    agents = initial_agents(scenario, rng)
    world = World(scenario.topography, agents)
    target = world.targets[TARGET_ID]
    dt = params.step_interval
    n_ticks = math.ceil(scenario.t_end / dt - 1e-9)

    events = [Event(0.0, EventKind.SPAWN, aid) for aid in agents]
    log = TickLog()
    log.times.append(0.0)
    log.positions.append({aid: a.position for aid, a in agents.items()})
    reached = False
    k = 0
    while k < n_ticks and not reached:
        now = k * dt
        world.time = now
        percepts = perception.update(world.agents, params)
        new_cats = cognition.update(world.agents, percepts, params)
        for aid, cat in new_cats.items():
            if cat is not world.agents[aid].self_category:
                events.append(Event(now, EventKind.CATEGORY_CHANGE, aid))
                world.agents[aid] = replace(world.agents[aid], self_category=cat)
        log.categories.append({aid: a.self_category for aid, a in world.agents.items()})

        before = {aid: a.position for aid, a in world.agents.items()}
        decisions = locomotion_update(world, percepts, params, rng)
        jumpers = set()
        for d in decisions:
            if d.kind is DecisionKind.SWAP:
                events.append(Event(now, EventKind.SWAP, d.agent_id, d.partner_id))
                jumpers.update((d.agent_id, d.partner_id))
        log.swapped.append(frozenset(jumpers))

        for aid, a in world.agents.items():
            v = euclidean(before[aid], a.position) / dt
            hist = (a.speed_history + (v,))[-params.n_history:]
            world.agents[aid] = replace(a, speed_history=hist)

        k += 1
        t_next = k * dt
        log.times.append(t_next)
        log.positions.append({aid: a.position for aid, a in world.agents.items()})
        walker = world.agents.get(WALKER_ID)
        if walker is not None and target.contains(walker.position):
            events.append(Event(t_next, EventKind.TARGET_REACHED, WALKER_ID))
            reached = True

    if not log.categories:
        log.categories.append({aid: a.self_category for aid, a in world.agents.items()})
    trajectories = resample(log, scenario.frames_per_step, scenario.frame_interval)
    return RunResult(
        seed=scenario.seed,
        trajectories=trajectories,
        events=events,
        walker_id=WALKER_ID,
        walker_reached_target=reached,
        walker_free_flow_speed=agents[WALKER_ID].free_flow_speed,
        ticks=log,
        wall_clock_s=_time.perf_counter() - started,
    )


def resample(log: TickLog, frames_per_step: int, frame_interval: float) -> dict[int, Trajectory]:
    """Linear interpolation between ticks; swap partners hold and jump at the tick end."""
    m = frames_per_step
    n_ticks = len(log.times) - 1
    n_frames = n_ticks * m + 1
    steps = np.arange(n_frames)
    times = steps * frame_interval
    frac = np.tile(np.arange(m) / m, n_ticks)
    out = {}
    for aid in log.positions[0]:
        pts = np.array([(p[aid].x, p[aid].y) for p in log.positions])
        held = np.array([aid in s for s in log.swapped], dtype=bool)
        f = np.where(np.repeat(held, m), 0.0, frac)[:, None]
        start = np.repeat(pts[:-1], m, axis=0)
        stop = np.repeat(pts[1:], m, axis=0)
        xy = np.vstack([start + f * (stop - start), pts[-1:]])
        cats = [c[aid] for c in log.categories for _ in range(m)]
        cats.append(log.categories[-1][aid])
        out[aid] = Trajectory(aid, steps, times, xy, cats)
    return out


def _run_seeded(args):
    scenario, seed, layout = args
    if layout is not None:
        scenario = replace(scenario, waiting_agents=layout(seed))
    return run(replace(scenario, seed=seed))


def run_batch(scenario_template: Scenario, n_runs: int, base_seed: int, jobs: int = 1,
              layout: Optional[Callable[[int], tuple[Vec2, ...]]] = None) -> list[RunResult]:
    """Run ``n_runs`` copies of the template with seeds ``base_seed + i``.

    ``layout`` optionally maps a run seed to fresh waiting-crowd positions;
    by default the crowd is identical across runs.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    scenario_template.validate()
    tasks = [(scenario_template, base_seed + i, layout) for i in range(n_runs)]
    if jobs <= 1:
        return [_run_seeded(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_seeded, tasks))
