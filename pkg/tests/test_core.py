import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from crowdcoop.core import (Agent, ModelParams, Rect, SelfCategory, Trajectory, ValidationError,
                            Vec2, crowd_density, euclidean, point_in_rect)
from crowdcoop.scenarios import generate_reenactment

coord = st.floats(-100, 100, allow_nan=False, allow_infinity=False)
UNIT = Rect(0, 0, 1, 1)


@pytest.mark.parametrize("p, expected", [((0, 0), True), ((2, 0), False), ((0.5, 0.5), True),
                                         ((1, 1), True), ((1.0000001, 0.5), False)])
def test_point_in_rect(p, expected):
    assert point_in_rect(Vec2(*p), UNIT) is expected


def test_euclidean_examples():
    assert euclidean(Vec2(0, 0), Vec2(3, 4)) == 5.0
    assert euclidean(Vec2(1, 1), Vec2(1, 1)) == 0.0
    assert euclidean(Vec2(0, 0), Vec2(0.03, 0.04)) == pytest.approx(0.05, rel=1e-12)


def test_crowd_density():
    assert crowd_density(14, 2.64) == pytest.approx(5.30, abs=0.01)
    assert crowd_density(0, 2.64) == 0.0
    assert crowd_density(13, 2.64) == pytest.approx(4.92, abs=0.005)
    with pytest.raises(ValueError):
        crowd_density(3, 0.0)


def test_vec2_rejects_non_finite():
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(ValidationError):
            Vec2(bad, 0.0)


def test_rect_rejects_inverted():
    with pytest.raises(ValidationError):
        Rect(1, 0, 0, 1)


def test_rect_distance():
    r = Rect(0, 0, 2, 1)
    assert r.distance_to(1, 0.5) == 0.0
    assert r.distance_to(3, 0.5) == 1.0
    assert r.distance_to(5, 5) == 5.0


@given(coord, coord, coord, coord, coord, coord)
def test_containment_matches_coordinate_comparison(x0, y0, x1, y1, px, py):
    r = Rect(min(x0, x1), min(y0, y1), max(x0, x1), max(y0, y1))
    expected = r.x_min <= px <= r.x_max and r.y_min <= py <= r.y_max
    assert point_in_rect(Vec2(px, py), r) is expected
    assert r.contains_xy(px, py) is expected


@given(*(coord for _ in range(6)))
def test_triangle_inequality(ax, ay, bx, by, cx, cy):
    a, b, c = Vec2(ax, ay), Vec2(bx, by), Vec2(cx, cy)
    assert euclidean(a, c) <= euclidean(a, b) + euclidean(b, c) + 1e-9


def test_params_validation():
    ModelParams().validate()
    with pytest.raises(ValidationError, match="search_radius"):
        replace(ModelParams(), search_radius=0.0).validate()
    with pytest.raises(ValidationError, match="v_threshold"):
        replace(ModelParams(), v_threshold=0.6).validate()


def test_agent_target_oriented_needs_target():
    with pytest.raises(ValidationError):
        Agent(1, Vec2(0, 0), 0.195, 1.34, target=None, self_category=SelfCategory.TARGET_ORIENTED)


def test_reenactment_area_and_validity():
    s = generate_reenactment()
    assert s.topography.waiting_area.area == pytest.approx(2.635, abs=1e-4)
    assert len(s.waiting_agents) == 13
    s.validate()
    assert crowd_density(len(s.waiting_agents) + 1, s.topography.waiting_area.area) == \
        pytest.approx(5.30, abs=0.02)


@given(st.integers(0, 2**64 - 1), st.integers(0, 10_000))
def test_generator_always_validates(seed, layout_seed):
    generate_reenactment(seed=seed, layout_seed=layout_seed).validate()


@given(st.integers(0, 12), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3))
def test_validation_rejects_overlap(i, dx, dy):
    s = generate_reenactment()
    pts = list(s.waiting_agents)
    moved = Vec2(pts[i].x + dx, pts[i].y + dy)
    j = (i + 1) % len(pts)
    pts[j] = Vec2(moved.x + 0.1, moved.y)  # center distance 0.1 < 2R
    pts[i] = moved
    with pytest.raises(ValidationError):
        replace(s, waiting_agents=tuple(pts)).validate()


def test_validation_rejects_bad_seed_and_frame_ratio():
    s = generate_reenactment()
    with pytest.raises(ValidationError):
        replace(s, seed=-1).validate()
    with pytest.raises(ValidationError):
        replace(s, frame_interval=0.03).validate()


def test_validation_rejects_agent_in_obstacle():
    s = generate_reenactment()
    with pytest.raises(ValidationError, match="not walkable"):
        replace(s, waiting_agents=(Vec2(0.5, 5.0),)).validate()


def test_trajectory_round_trip_and_checks():
    t = Trajectory.from_points(3, [(0, 0), (0.1, 0), (0.2, 0.1)], dt=0.04)
    assert len(t) == 3
    assert np.allclose(np.diff(t.times), 0.04)
    assert Trajectory.from_frames(3, t.frames) == t
    with pytest.raises(ValidationError):
        Trajectory(1, [0, 0], [0, 0], [(0, 0), (1, 1)], [SelfCategory.WAIT] * 2)
    with pytest.raises(ValidationError):
        Trajectory(1, [0, 1], [0, 0.04], [(0, 0), (math.nan, 1)], [SelfCategory.WAIT] * 2)
