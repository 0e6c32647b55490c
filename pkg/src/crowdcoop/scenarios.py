"""Reenactment of the dense-crowd crossing set-up."""

from __future__ import annotations

import random

from .core import ModelParams, Rect, Scenario, Topography, Vec2, SAMPLE_FROM_SOURCE, \
    check_non_overlap

DOMAIN_WIDTH = 6.0
DOMAIN_HEIGHT = 10.0
AREA_WIDTH = 1.55
AREA_HEIGHT = 1.70

# Row layout inside the waiting area as (y offset from the area bottom,
# x offsets from the area's left edge). Rows alternate so that no gap is wide
# enough for a walker to slip through.
CROWD_ROWS = (
    (0.52, (0.10, 0.55, 1.00, 1.45)),
    (0.87, (0.325, 0.775, 1.225)),
    (1.22, (0.10, 0.55, 1.45)),
    (1.57, (0.325, 0.775, 1.225)),
)
JITTER = 0.01


def reenactment_topography() -> Topography:
    cx, cy = DOMAIN_WIDTH / 2, DOMAIN_HEIGHT / 2
    area = Rect(cx - AREA_WIDTH / 2, cy - AREA_HEIGHT / 2, cx + AREA_WIDTH / 2, cy + AREA_HEIGHT / 2)
    tables = (
        Rect(0.0, area.y_min, area.x_min, area.y_max),
        Rect(area.x_max, area.y_min, DOMAIN_WIDTH, area.y_max),
    )
    return Topography(
        bounds=Rect(0.0, 0.0, DOMAIN_WIDTH, DOMAIN_HEIGHT),
        source=Rect(cx - 0.5, 1.0, cx + 0.5, 1.6),
        target=Rect(cx - 1.0, 8.5, cx + 1.0, 9.5),
        waiting_area=area,
        obstacles=tables,
    )


def crowd_layout(area: Rect, seed: int = 0, jitter: float = JITTER,
                 radius: float = 0.195) -> tuple[Vec2, ...]:
    rnd = random.Random(seed)
    pts = []
    for dy, xs in CROWD_ROWS:
        for dx in xs:
            pts.append(Vec2(round(area.x_min + dx + rnd.uniform(-jitter, jitter), 4),
                            round(area.y_min + dy + rnd.uniform(-jitter, jitter), 4)))
    check_non_overlap(pts, radius)
    return tuple(pts)


def generate_reenactment(seed: int = 42, layout_seed: int = 0,
                         params: ModelParams | None = None) -> Scenario:
    params = params or ModelParams()
    topo = reenactment_topography()
    scenario = Scenario(
        topography=topo,
        waiting_agents=crowd_layout(topo.waiting_area, layout_seed, radius=params.torso_radius),
        walker_spawn=SAMPLE_FROM_SOURCE,
        params=params,
        seed=seed,
        t_end=60.0,
        frame_interval=0.04,
    )
    scenario.validate()
    return scenario
