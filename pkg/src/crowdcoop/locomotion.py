"""Behavior dispatch on the locomotion layer.

Target-oriented agents take optimal-steps-style strides: the next position is
the cheapest of a few concentric rings of candidates around the agent (plus staying put) on a
potential made of the distance to the target and exponential repulsion from
other agents and obstacles.  Cooperative agents with a target swap places with
a cooperative neighbor that is closer to that target.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np

from .core import Agent, ModelParams, Rect, SelfCategory, Topography, Vec2, euclidean
from .psychology import Percept
from .rng import RunRng

INFEASIBLE = math.inf


class SwapError(RuntimeError):
    """Swap preconditions violated; indicates an engine bug."""


class DecisionKind(enum.Enum):
    STEP = "step"
    STAY = "stay"
    SWAP = "swap"


@dataclass(frozen=True)
class StepDecision:
    agent_id: int
    kind: DecisionKind
    position: Optional[Vec2] = None
    partner_id: Optional[int] = None


@dataclass
class World:
    topography: Topography
    agents: dict[int, Agent]
    time: float = 0.0
    targets: dict[int, Rect] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.targets:
            self.targets = {0: self.topography.target}

    def target_of(self, agent: Agent) -> Rect:
        return self.targets[agent.target]


def _segment_point_distance(ax, ay, bx, by, px, py) -> float:
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / seg2))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _segment_hits_rect(ax, ay, bx, by, r: Rect) -> bool:
    # Liang-Barsky clip against the closed rectangle
    t0, t1 = 0.0, 1.0
    dx, dy = bx - ax, by - ay
    for p, q in ((-dx, ax - r.x_min), (dx, r.x_max - ax), (-dy, ay - r.y_min), (dy, r.y_max - ay)):
        if p == 0.0:
            if q < 0.0:
                return False
        else:
            t = q / p
            if p < 0.0:
                t0 = max(t0, t)
            else:
                t1 = min(t1, t)
            if t0 > t1:
                return False
    return True


def step_potential(x: Vec2, agent: Agent, world: World, params: ModelParams) -> float:
    px, py = x.x, x.y
    topo = world.topography
    if not topo.bounds.contains(x):
        return INFEASIBLE
    cost = world.target_of(agent).distance_to(px, py) if agent.has_target else 0.0
    for other in world.agents.values():
        if other.id == agent.id:
            continue
        reach = agent.torso_radius + other.torso_radius
        d = math.hypot(other.position.x - px, other.position.y - py)
        if d < reach:
            return INFEASIBLE
        cost += params.agent_repulsion * math.exp(-(d - reach) / params.agent_repulsion_decay)
    for obs in topo.obstacles:
        if obs.contains(x):
            return INFEASIBLE
        d = obs.distance_to(px, py)
        cost += params.obstacle_repulsion * math.exp(-d / params.obstacle_repulsion_decay)
    return cost


def path_clear(agent: Agent, dest: Vec2, world: World) -> bool:
    """True if the straight move to ``dest`` never overlaps an agent or an obstacle."""
    ax, ay = agent.position.x, agent.position.y
    bx, by = dest.x, dest.y
    for other in world.agents.values():
        if other.id == agent.id:
            continue
        reach = agent.torso_radius + other.torso_radius
        if _segment_point_distance(ax, ay, bx, by, other.position.x, other.position.y) < reach:
            return False
    return not any(_segment_hits_rect(ax, ay, bx, by, o) for o in world.topography.obstacles)


def stride_length(agent: Agent, params: ModelParams) -> float:
    return params.stride_factor * agent.free_flow_speed * params.step_interval


def candidate_points(agent: Agent, params: ModelParams, offset: float) -> np.ndarray:
    """Rings of candidates, outermost first, each with ``candidate_count`` points."""
    stride = stride_length(agent, params)
    phi = offset + 2.0 * np.pi * np.arange(params.candidate_count) / params.candidate_count
    radii = stride * np.arange(params.candidate_rings, 0, -1) / params.candidate_rings
    xs = agent.position.x + np.outer(radii, np.cos(phi)).ravel()
    ys = agent.position.y + np.outer(radii, np.sin(phi)).ravel()
    return np.column_stack([xs, ys])


def candidate_costs(points: np.ndarray, agent: Agent, world: World,
                    params: ModelParams) -> np.ndarray:
    """Vectorised ``step_potential`` with the swept-path check folded in."""
    x, y = points[:, 0], points[:, 1]
    topo = world.topography
    b = topo.bounds
    cost = np.zeros(len(points))
    if agent.has_target:
        t = world.target_of(agent)
        dx = np.maximum(np.maximum(t.x_min - x, 0.0), x - t.x_max)
        dy = np.maximum(np.maximum(t.y_min - y, 0.0), y - t.y_max)
        cost += np.hypot(dx, dy)
    ax, ay = agent.position.x, agent.position.y
    infeasible = (x < b.x_min) | (x > b.x_max) | (y < b.y_min) | (y > b.y_max)
    others = [o for o in world.agents.values() if o.id != agent.id]
    if others:
        ox = np.array([o.position.x for o in others])
        oy = np.array([o.position.y for o in others])
        reach = agent.torso_radius + np.array([o.torso_radius for o in others])
        d = np.hypot(x[:, None] - ox[None, :], y[:, None] - oy[None, :])
        cost += (params.agent_repulsion
                 * np.exp(-(d - reach[None, :]) / params.agent_repulsion_decay)).sum(axis=1)
        # closest approach of the straight move to each neighbor
        sx, sy = x - ax, y - ay
        seg2 = sx * sx + sy * sy
        with np.errstate(invalid="ignore", divide="ignore"):
            u = ((ox[None, :] - ax) * sx[:, None] + (oy[None, :] - ay) * sy[:, None]) / seg2[:, None]
        u = np.clip(np.nan_to_num(u), 0.0, 1.0)
        sweep = np.hypot(ox[None, :] - (ax + u * sx[:, None]), oy[None, :] - (ay + u * sy[:, None]))
        infeasible |= ((d < reach[None, :]) | (sweep < reach[None, :])).any(axis=1)
    for obs in topo.obstacles:
        dx = np.maximum(np.maximum(obs.x_min - x, 0.0), x - obs.x_max)
        dy = np.maximum(np.maximum(obs.y_min - y, 0.0), y - obs.y_max)
        cost += params.obstacle_repulsion * np.exp(-np.hypot(dx, dy) / params.obstacle_repulsion_decay)
        inside = (obs.x_min <= x) & (x <= obs.x_max) & (obs.y_min <= y) & (y <= obs.y_max)
        infeasible |= inside
        near = ~infeasible & (obs.distance_to(ax, ay) <= np.hypot(x - ax, y - ay))
        for i in np.flatnonzero(near):
            if _segment_hits_rect(ax, ay, x[i], y[i], obs):
                infeasible[i] = True
    cost[infeasible] = INFEASIBLE
    return cost


def next_step_target_oriented(agent: Agent, world: World, params: ModelParams,
                              rng: RunRng) -> StepDecision:
    offset = rng.offset.uniform(0.0, 2.0 * math.pi / params.candidate_count)
    current = step_potential(agent.position, agent, world, params)
    points = candidate_points(agent, params, offset)
    costs = candidate_costs(points, agent, world, params)
    i = int(np.argmin(costs))
    if not costs[i] < current:
        return StepDecision(agent.id, DecisionKind.STAY)
    return StepDecision(agent.id, DecisionKind.STEP, position=Vec2(float(points[i, 0]), float(points[i, 1])))


def find_swap_candidate(agent: Agent, percept: Percept, world: World) -> Optional[int]:
    target = world.target_of(agent)
    own = target.distance_to(agent.position.x, agent.position.y)
    best = None
    for n in percept.neighbors:
        other = world.agents.get(n.agent_id)
        if other is None or other.self_category is not SelfCategory.COOPERATIVE:
            continue
        if other.locked_until > world.time:
            continue
        if not target.distance_to(other.position.x, other.position.y) < own:
            continue
        key = (euclidean(agent.position, other.position), other.id)
        if best is None or key < best:
            best = key
    return None if best is None else best[1]


def execute_swap(a: Agent, b: Agent, now: float, params: ModelParams) -> tuple[Agent, Agent]:
    if a.id == b.id:
        raise SwapError(f"agent {a.id} cannot swap with itself")
    for ag in (a, b):
        if ag.locked_until > now:
            raise SwapError(f"agent {ag.id} is locked until {ag.locked_until}")
        if ag.self_category is not SelfCategory.COOPERATIVE:
            raise SwapError(f"agent {ag.id} is not cooperative")
    d = euclidean(a.position, b.position)
    until = now + d / min(a.free_flow_speed, b.free_flow_speed)
    return (replace(a, position=b.position, locked_until=until),
            replace(b, position=a.position, locked_until=until))


def decide(agent: Agent, percept: Percept, world: World, params: ModelParams,
           rng: RunRng) -> StepDecision:
    if agent.locked_until > world.time:
        return StepDecision(agent.id, DecisionKind.STAY)
    cat = agent.self_category
    if cat is SelfCategory.TARGET_ORIENTED:
        return next_step_target_oriented(agent, world, params, rng)
    if cat is SelfCategory.COOPERATIVE and agent.has_target:
        partner = find_swap_candidate(agent, percept, world)
        if partner is not None:
            return StepDecision(agent.id, DecisionKind.SWAP, partner_id=partner)
    return StepDecision(agent.id, DecisionKind.STAY)


def locomotion_update(world: World, percepts: Mapping[int, Percept], params: ModelParams,
                      rng: RunRng) -> list[StepDecision]:
    """Decide and apply moves agent by agent in a shuffled order."""
    applied = []
    for aid in rng.order.shuffle(sorted(world.agents)):
        agent = world.agents[aid]
        decision = decide(agent, percepts[aid], world, params, rng)
        if decision.kind is DecisionKind.STEP:
            world.agents[aid] = replace(agent, position=decision.position)
        elif decision.kind is DecisionKind.SWAP:
            a, b = execute_swap(agent, world.agents[decision.partner_id], world.time, params)
            world.agents[a.id], world.agents[b.id] = a, b
        applied.append(decision)
    return applied
