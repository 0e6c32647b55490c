"""Perception and cognition sub-layers.

Perception collects the neighbors inside the search radius; cognition maps an
agent's recent speeds onto a self-category.  Both are strategies so other
models can be swapped in per run.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Protocol

import numpy as np

from .core import Agent, ModelParams, SelfCategory, Vec2

ELAPSED_TIME = "elapsed-time"


@dataclass(frozen=True)
class Neighbor:
    agent_id: int
    distance: float
    position: Vec2


@dataclass(frozen=True)
class Percept:
    agent_id: int
    neighbors: tuple[Neighbor, ...]
    external_stimulus: str = ELAPSED_TIME


class NeighborGrid:
    """Uniform cell hashing for fixed-radius queries."""

    def __init__(self, agents: Iterable[Agent], cell_size: float):
        self.cell_size = cell_size
        self.cells: dict[tuple[int, int], list[Agent]] = defaultdict(list)
        for a in agents:
            self.cells[self._key(a.position.x, a.position.y)].append(a)

    def _key(self, x: float, y: float) -> tuple[int, int]:
        return math.floor(x / self.cell_size), math.floor(y / self.cell_size)

    def query(self, center: Vec2, r: float) -> list[tuple[Agent, float]]:
        span = math.ceil(r / self.cell_size)
        cx, cy = self._key(center.x, center.y)
        hits = []
        for i in range(cx - span, cx + span + 1):
            for j in range(cy - span, cy + span + 1):
                for a in self.cells.get((i, j), ()):
                    d = math.hypot(a.position.x - center.x, a.position.y - center.y)
                    if d <= r:
                        hits.append((a, d))
        return hits


def perceive(agent: Agent, all_agents: Iterable[Agent], r: float,
             grid: NeighborGrid | None = None) -> Percept:
    if grid is None:
        grid = NeighborGrid(all_agents, r)
    hits = [(d, a.id, a.position) for a, d in grid.query(agent.position, r) if a.id != agent.id]
    hits.sort(key=lambda h: (h[0], h[1]))
    return Percept(agent.id, tuple(Neighbor(i, d, p) for d, i, p in hits))


def cognition_update(agent: Agent, percept: Percept, params: ModelParams) -> SelfCategory:
    hist = agent.speed_history
    if len(hist) >= params.n_history:
        window = hist[-params.n_history:]
        if sum(window) / len(window) < params.v_threshold:
            return SelfCategory.COOPERATIVE
    if agent.has_target:
        return SelfCategory.TARGET_ORIENTED
    return SelfCategory.WAIT


class PerceptionModel(Protocol):
    def update(self, agents: Mapping[int, Agent], params: ModelParams) -> dict[int, Percept]: ...


class CognitionModel(Protocol):
    def update(self, agents: Mapping[int, Agent], percepts: Mapping[int, Percept],
               params: ModelParams) -> dict[int, SelfCategory]: ...


class SimplePerception:
    """No external stimuli; only the neighborhood within the search radius."""

    def update(self, agents, params):
        ids = list(agents)
        xy = np.array([(a.position.x, a.position.y) for a in agents.values()])
        d = np.hypot(xy[:, None, 0] - xy[None, :, 0], xy[:, None, 1] - xy[None, :, 1])
        r = params.search_radius
        out = {}
        for i, aid in enumerate(ids):
            # numpy prefilter; exact distances from math.hypot so both perception paths agree
            me = agents[aid].position
            hits = []
            for j in np.flatnonzero(d[i] <= r + 1e-9):
                other = agents[ids[j]].position
                dist = math.hypot(other.x - me.x, other.y - me.y)
                if j != i and dist <= r:
                    hits.append((dist, ids[j], other))
            hits.sort(key=lambda h: (h[0], h[1]))
            out[aid] = Percept(aid, tuple(Neighbor(nid, dist, p) for dist, nid, p in hits))
        return out


class CooperativeCognition:
    """Switch to cooperative once an agent has been (nearly) still for a full window."""

    def update(self, agents, percepts, params):
        return {aid: cognition_update(a, percepts[aid], params) for aid, a in agents.items()}


class FrozenCognition:
    """Identity cognition: categories never change. Used for the deadlock baseline."""

    def update(self, agents, percepts, params):
        return {aid: a.self_category for aid, a in agents.items()}
