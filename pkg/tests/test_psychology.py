import math
from dataclasses import replace

from hypothesis import given, settings, strategies as st

from crowdcoop.core import Agent, ModelParams, SelfCategory, Vec2
from crowdcoop.engine import initial_agents
from crowdcoop.psychology import (CooperativeCognition, FrozenCognition, Percept, SimplePerception,
                                  cognition_update, perceive)
from crowdcoop.rng import RunRng
from crowdcoop.scenarios import generate_reenactment

P = ModelParams()


def agent(i, x, y, **kw):
    return Agent(i, Vec2(x, y), 0.195, 1.34, **kw)


def brute_force(a, agents, r):
    hits = []
    for b in agents:
        if b.id == a.id:
            continue
        d = math.hypot(a.position.x - b.position.x, a.position.y - b.position.y)
        if d <= r:
            hits.append((d, b.id))
    return sorted(hits)


def test_single_agent_sees_nothing():
    a = agent(0, 1, 1)
    assert perceive(a, [a], 1.0).neighbors == ()


def test_pair_sees_each_other():
    a, b = agent(0, 0, 0), agent(1, 0.5, 0)
    pa, pb = perceive(a, [a, b], 1.0), perceive(b, [a, b], 1.0)
    assert [(n.agent_id, n.distance) for n in pa.neighbors] == [(1, 0.5)]
    assert [(n.agent_id, n.distance) for n in pb.neighbors] == [(0, 0.5)]
    assert pa.external_stimulus == "elapsed-time"


def test_reenactment_walker_adjacent_matches_brute_force():
    s = generate_reenactment()
    agents = initial_agents(s, RunRng(42))
    area = s.topography.waiting_area
    agents[0] = replace(agents[0], position=Vec2(3.0, area.y_min + 0.1))
    model = SimplePerception().update(agents, P)
    for aid, a in agents.items():
        got = [(n.distance, n.agent_id) for n in model[aid].neighbors]
        assert got == brute_force(a, list(agents.values()), 1.0)
        grid = [(n.distance, n.agent_id) for n in perceive(a, agents.values(), 1.0).neighbors]
        assert grid == got
    assert model[0].neighbors


pts = st.lists(st.tuples(st.floats(0, 5), st.floats(0, 5)), min_size=1, max_size=50)


@settings(max_examples=100, deadline=None)
@given(pts, st.floats(0.05, 3.0))
def test_perception_equals_brute_force(points, r):
    agents = {i: agent(i, x, y) for i, (x, y) in enumerate(points)}
    model = SimplePerception().update(agents, replace(P, search_radius=r))
    for aid, a in agents.items():
        expected = brute_force(a, list(agents.values()), r)
        assert [(n.distance, n.agent_id) for n in model[aid].neighbors] == expected
        assert [(n.distance, n.agent_id) for n in perceive(a, agents.values(), r).neighbors] \
            == expected
        assert all(n.distance <= r for n in model[aid].neighbors)


def empty(aid):
    return Percept(aid, ())


def test_cognition_rule_table():
    a = agent(0, 0, 0, target=0, self_category=SelfCategory.TARGET_ORIENTED,
              speed_history=(0.0, 0.0, 0.0, 0.0))
    assert cognition_update(a, empty(0), P) is SelfCategory.COOPERATIVE
    a = replace(a, speed_history=(1.3,) * 4)
    assert cognition_update(a, empty(0), P) is SelfCategory.TARGET_ORIENTED
    w = agent(1, 0, 0, speed_history=(0.0, 0.0))
    assert cognition_update(w, empty(1), P) is SelfCategory.WAIT
    w = replace(w, speed_history=(0.0,) * 4)
    assert cognition_update(w, empty(1), P) is SelfCategory.COOPERATIVE


def test_cognition_returns_to_target_oriented_after_swap():
    # a single displacement of n * v_threshold * dt in the window lifts the mean over the threshold
    n, dt = P.n_history, P.step_interval
    d = n * P.v_threshold * dt
    hist = (0.0, 0.0, 0.0, 1.01 * d / dt)
    a = agent(0, 0, 0, target=0, self_category=SelfCategory.COOPERATIVE, speed_history=hist)
    assert cognition_update(a, empty(0), P) is SelfCategory.TARGET_ORIENTED


@given(st.lists(st.floats(0, 3), max_size=8), st.booleans())
def test_cognition_is_deterministic(hist, has_target):
    kw = {"target": 0} if has_target else {}
    a = agent(0, 0, 0, speed_history=tuple(hist), **kw)
    assert cognition_update(a, empty(0), P) is cognition_update(a, empty(0), P)


def test_frozen_cognition_is_identity():
    agents = {0: agent(0, 0, 0, target=0, self_category=SelfCategory.TARGET_ORIENTED,
                       speed_history=(0.0,) * 4),
              1: agent(1, 1, 1, speed_history=(0.0,) * 4)}
    percepts = {0: empty(0), 1: empty(1)}
    frozen = FrozenCognition().update(agents, percepts, P)
    assert frozen == {0: SelfCategory.TARGET_ORIENTED, 1: SelfCategory.WAIT}
    live = CooperativeCognition().update(agents, percepts, P)
    assert live == {0: SelfCategory.COOPERATIVE, 1: SelfCategory.COOPERATIVE}
