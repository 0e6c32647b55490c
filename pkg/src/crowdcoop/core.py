"""Domain types, planar geometry and scenario validation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np


class ValidationError(ValueError):
    """A scenario or parameter set violates a structural constraint."""


class InsufficientDataError(ValueError):
    """Raised when a metric has too few samples to be defined."""


@dataclass(frozen=True, slots=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"non-finite coordinate ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True, slots=True)
class Rect:
    """Closed axis-aligned rectangle."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        vals = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"non-finite rectangle {vals}")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValidationError(f"malformed rectangle {vals}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Vec2:
        return Vec2(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def contains(self, p: Vec2) -> bool:
        return point_in_rect(p, self)

    def contains_xy(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def contains_rect(self, other: "Rect") -> bool:
        return (self.x_min <= other.x_min and other.x_max <= self.x_max
                and self.y_min <= other.y_min and other.y_max <= self.y_max)

    def distance_to(self, x: float, y: float) -> float:
        """Distance from (x, y) to the closest point of the rectangle; 0 inside."""
        dx = max(self.x_min - x, 0.0, x - self.x_max)
        dy = max(self.y_min - y, 0.0, y - self.y_max)
        return math.hypot(dx, dy)


def point_in_rect(p: Vec2, rect: Rect) -> bool:
    return rect.x_min <= p.x <= rect.x_max and rect.y_min <= p.y <= rect.y_max


def euclidean(a: Vec2, b: Vec2) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def crowd_density(count: int, area: float) -> float:
    """Pedestrians per square meter."""
    if not area > 0:
        raise ValueError(f"area must be positive, got {area}")
    return count / area


class SelfCategory(enum.Enum):
    TARGET_ORIENTED = "TARGET_ORIENTED"
    COOPERATIVE = "COOPERATIVE"
    WAIT = "WAIT"


@dataclass(frozen=True)
class ModelParams:
    """Tunable model constants. Defaults reproduce the reenactment."""

    n_history: int = 4
    v_threshold: float = 0.05
    search_radius: float = 1.0
    stride_factor: float = 1.0
    candidate_count: int = 16
    candidate_rings: int = 3
    agent_repulsion: float = 0.1
    agent_repulsion_decay: float = 0.2
    obstacle_repulsion: float = 0.5
    obstacle_repulsion_decay: float = 0.2
    torso_radius: float = 0.195
    step_interval: float = 0.4
    walker_speed_mean: float = 1.34
    walker_speed_std: float = 0.26
    walker_speed_min: float = 0.5
    walker_speed_max: float = 2.2
    waiting_free_flow_speed: float = 1.34
    cognition: bool = True

    def validate(self) -> None:
        positive = {
            "n_history": self.n_history,
            "v_threshold": self.v_threshold,
            "search_radius": self.search_radius,
            "stride_factor": self.stride_factor,
            "candidate_count": self.candidate_count,
            "candidate_rings": self.candidate_rings,
            "agent_repulsion": self.agent_repulsion,
            "agent_repulsion_decay": self.agent_repulsion_decay,
            "obstacle_repulsion": self.obstacle_repulsion,
            "obstacle_repulsion_decay": self.obstacle_repulsion_decay,
            "torso_radius": self.torso_radius,
            "step_interval": self.step_interval,
            "walker_speed_mean": self.walker_speed_mean,
            "walker_speed_std": self.walker_speed_std,
            "walker_speed_min": self.walker_speed_min,
            "walker_speed_max": self.walker_speed_max,
            "waiting_free_flow_speed": self.waiting_free_flow_speed,
        }
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"params.{name} must be strictly positive, got {value}")
        if self.walker_speed_min > self.walker_speed_max:
            raise ValidationError("params.walker_speed_min exceeds walker_speed_max")
        min_speed = min(self.walker_speed_min, self.waiting_free_flow_speed)
        if self.v_threshold >= min_speed:
            raise ValidationError(
                f"params.v_threshold ({self.v_threshold}) must be below the minimum "
                f"free-flow speed ({min_speed})")


@dataclass(frozen=True)
class Agent:
    id: int
    position: Vec2
    torso_radius: float
    free_flow_speed: float
    target: Optional[int] = None
    self_category: SelfCategory = SelfCategory.WAIT
    speed_history: tuple[float, ...] = ()
    locked_until: float = 0.0

    def __post_init__(self) -> None:
        if not self.torso_radius > 0:
            raise ValidationError(f"agent {self.id}: torso_radius must be positive")
        if not self.free_flow_speed > 0:
            raise ValidationError(f"agent {self.id}: free_flow_speed must be positive")
        if self.target is None and self.self_category is SelfCategory.TARGET_ORIENTED:
            raise ValidationError(f"agent {self.id}: target-oriented without a target")

    @property
    def has_target(self) -> bool:
        return self.target is not None


@dataclass(frozen=True)
class Topography:
    bounds: Rect
    source: Rect
    target: Rect
    waiting_area: Rect
    obstacles: tuple[Rect, ...] = ()

    def is_walkable(self, p: Vec2) -> bool:
        return self.bounds.contains(p) and not any(o.contains(p) for o in self.obstacles)

    def validate(self) -> None:
        for name in ("source", "target", "waiting_area"):
            if not self.bounds.contains_rect(getattr(self, name)):
                raise ValidationError(f"topography.{name} lies outside bounds")


SAMPLE_FROM_SOURCE = "sample-from-source"


@dataclass(frozen=True)
class Scenario:
    topography: Topography
    waiting_agents: tuple[Vec2, ...]
    walker_spawn: Union[Vec2, str] = SAMPLE_FROM_SOURCE
    params: ModelParams = field(default_factory=ModelParams)
    seed: int = 0
    t_end: float = 60.0
    frame_interval: float = 0.04

    @property
    def frames_per_step(self) -> int:
        return int(round(self.params.step_interval / self.frame_interval))

    def validate(self) -> None:
        self.topography.validate()
        self.params.validate()
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.t_end > 0:
            raise ValidationError("t_end must be positive")
        if not self.frame_interval > 0:
            raise ValidationError("frame_interval must be positive")
        ratio = self.params.step_interval / self.frame_interval
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValidationError(
                "params.step_interval must be an integer multiple of frame_interval")
        if isinstance(self.walker_spawn, str):
            if self.walker_spawn != SAMPLE_FROM_SOURCE:
                raise ValidationError(f"unknown walker_spawn {self.walker_spawn!r}")
        elif not self.topography.is_walkable(self.walker_spawn):
            raise ValidationError("walker_spawn is not walkable")
        topo = self.topography
        for i, p in enumerate(self.waiting_agents):
            if not topo.is_walkable(p):
                raise ValidationError(f"waiting_agents[{i}] at ({p.x}, {p.y}) is not walkable")
        check_non_overlap(self.waiting_agents, self.params.torso_radius)
        if isinstance(self.walker_spawn, Vec2):
            check_non_overlap((*self.waiting_agents, self.walker_spawn),
                              self.params.torso_radius)


def check_non_overlap(points: Sequence[Vec2], radius: float) -> None:
    min_dist = 2.0 * radius
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = euclidean(points[i], points[j])
            if d < min_dist:
                raise ValidationError(
                    f"agents {i} and {j} overlap: center distance {d:.4f} < {min_dist:.4f}")


@dataclass(frozen=True)
class Frame:
    step: int
    time: float
    position: Vec2
    self_category: SelfCategory


class Trajectory:
    """Positions of one agent over uniformly spaced frames, stored as arrays."""

    def __init__(self, agent_id: int, steps, times, xy, categories: Sequence[SelfCategory]):
        self.agent_id = agent_id
        self.steps = np.asarray(steps, dtype=np.int64)
        self.times = np.asarray(times, dtype=float)
        self.xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        self.categories = tuple(categories)
        n = len(self.steps)
        if not (len(self.times) == n == len(self.xy) == len(self.categories)):
            raise ValidationError(f"trajectory {agent_id}: column lengths differ")
        if n > 1 and np.any(np.diff(self.steps) <= 0):
            raise ValidationError(f"trajectory {agent_id}: step indices not increasing")
        if not np.all(np.isfinite(self.xy)):
            raise ValidationError(f"trajectory {agent_id}: non-finite position")

    def __len__(self) -> int:
        return len(self.steps)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (self.agent_id == other.agent_id and np.array_equal(self.steps, other.steps)
                and np.array_equal(self.times, other.times) and np.array_equal(self.xy, other.xy)
                and self.categories == other.categories)

    def __repr__(self) -> str:
        return f"Trajectory(agent_id={self.agent_id}, frames={len(self)})"

    @property
    def frames(self) -> tuple[Frame, ...]:
        return tuple(Frame(int(k), float(t), Vec2(float(x), float(y)), c)
                     for k, t, (x, y), c in zip(self.steps, self.times, self.xy, self.categories))

    @property
    def positions(self) -> list[Vec2]:
        return [Vec2(float(x), float(y)) for x, y in self.xy]

    @classmethod
    def from_frames(cls, agent_id: int, frames: Sequence[Frame]) -> "Trajectory":
        return cls(agent_id, [f.step for f in frames], [f.time for f in frames],
                   [(f.position.x, f.position.y) for f in frames],
                   [f.self_category for f in frames])

    @classmethod
    def from_points(cls, agent_id: int, points, dt: float = 0.04,
                    category: SelfCategory = SelfCategory.WAIT) -> "Trajectory":
        xy = np.asarray(points, dtype=float).reshape(-1, 2)
        n = len(xy)
        return cls(agent_id, np.arange(n), np.arange(n) * dt, xy, [category] * n)
