import json
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from crowdcoop.core import ModelParams, SelfCategory
from crowdcoop.engine import Event, EventKind, run
from crowdcoop.io import (ConfigError, TrajectoryFormatError, dumps_scenario, load_scenario,
                          loads_scenario, read_events, read_trajectories, save_scenario,
                          scenario_to_dict, write_events, write_trajectories)
from crowdcoop.scenarios import generate_reenactment


def test_scenario_round_trip(tmp_path):
    s = generate_reenactment(seed=9)
    path = tmp_path / "s.json"
    save_scenario(s, path)
    assert load_scenario(path) == s
    assert dumps_scenario(load_scenario(path)) == path.read_text()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(0, 1000), st.floats(0.01, 0.4),
       st.integers(1, 10), st.booleans())
def test_scenario_round_trip_property(seed, layout_seed, thr, n, cognition):
    params = replace(ModelParams(), v_threshold=thr, n_history=n, cognition=cognition)
    s = generate_reenactment(seed=seed, layout_seed=layout_seed, params=params)
    assert loads_scenario(dumps_scenario(s)) == s


def test_generate_is_byte_stable():
    assert dumps_scenario(generate_reenactment()) == dumps_scenario(generate_reenactment())


def test_config_has_units_in_keys():
    d = scenario_to_dict(generate_reenactment())
    assert "waiting_area_width_m" in d["topography"] and "t_end_s" in d
    assert d["params"]["v_threshold_mps"] == 0.05


def test_bad_json_reports_position():
    with pytest.raises(ConfigError, match="line 2, column"):
        loads_scenario('{\n  "seed": ,\n}')


def test_missing_field_named():
    d = scenario_to_dict(generate_reenactment())
    del d["topography"]["target"]
    with pytest.raises(ConfigError, match="target"):
        loads_scenario(json.dumps(d))


def test_invalid_parameter_named():
    d = scenario_to_dict(generate_reenactment())
    d["params"]["search_radius_m"] = -1
    with pytest.raises(ConfigError, match="search_radius"):
        loads_scenario(json.dumps(d))


def test_trajectory_csv_round_trip(tmp_path):
    res = run(generate_reenactment(seed=3))
    p = tmp_path / "t.csv"
    write_trajectories(res.trajectories.values(), p)
    back = read_trajectories(p)
    assert set(back) == set(res.trajectories)
    for aid, t in back.items():
        orig = res.trajectories[aid]
        assert (t.steps == orig.steps).all()
        assert abs(t.xy - orig.xy).max() <= 5e-5
        assert t.categories == orig.categories
    header = p.read_text().splitlines()[0]
    assert header == "step,time,agent_id,x,y,self_category"


def test_event_round_trip(tmp_path):
    events = [Event(0.0, EventKind.SPAWN, 0), Event(4.4, EventKind.SWAP, 0, 3),
              Event(9.2, EventKind.TARGET_REACHED, 0)]
    p = tmp_path / "e.csv"
    write_events(events, p)
    assert read_events(p) == events


def test_external_format(tmp_path):
    p = tmp_path / "ext.csv"
    p.write_text("frame,agent_id,x,y\n0,5,1.0,2.0\n1,5,1.1,2.0\n0,6,0,0\n1,6,0,0\n")
    trajs = read_trajectories(p)
    assert set(trajs) == {5, 6}
    assert trajs[5].times.tolist() == pytest.approx([0.0, 0.04])
    assert trajs[5].categories == (SelfCategory.WAIT,) * 2
    assert read_trajectories(p, dt=0.1)[5].times.tolist() == pytest.approx([0.0, 0.1])


@pytest.mark.parametrize("body, row", [
    ("frame,agent_id,x,y\n0,1,1.0,2.0\n1,1,abc,2.0\n", 3),
    ("frame,agent_id,x,y\n0,1,1.0,2.0\n0,1,1.0,2.0\n", 3),
    ("frame,agent_id,x,y\n0,1,1.0\n", 2),
    ("frame,agent_id,x,y\n0,1,nan,1\n", 2),
    ("a,b,c\n", 1),
    ("", 1),
])
def test_malformed_trajectory_names_row(tmp_path, body, row):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(TrajectoryFormatError) as exc:
        read_trajectories(p)
    assert exc.value.row == row
    assert "bad.csv" in str(exc.value)
