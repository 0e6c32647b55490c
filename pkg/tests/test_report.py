import csv

import numpy as np
import pytest

from crowdcoop import analysis as an
from crowdcoop.core import Rect, Trajectory
from crowdcoop.engine import Event, EventKind
from crowdcoop.report import (InputError, RunInput, aggregate_rows, analyze_run, build_report,
                              detect_walker, duration_histogram, load_inputs, write_report)

AREA = Rect(2.225, 4.15, 3.775, 5.85)
DT = 0.04


def crossing(speed_out=1.3, speed_in=0.3, zig=False):
    pts, y, x, i = [], 2.0, 3.0, 0
    while y < 8.0:
        pts.append((x, y))
        inside = AREA.y_min <= y <= AREA.y_max
        y += (speed_in if inside else speed_out) * DT
        if zig and inside:
            x = 3.0 + 0.2 * np.sin(i / 5)
            i += 1
    return Trajectory.from_points(0, pts, DT)


def still(aid, x, y, n):
    return Trajectory.from_points(aid, [(x, y)] * n, DT)


def make_input(name="r", events=None, **kw):
    w = crossing(**kw)
    trajs = {0: w, 1: still(1, 2.5, 5.0, len(w)), 2: still(2, 3.5, 5.5, len(w)),
             3: still(3, 1.0, 1.0, len(w))}
    return RunInput(name, trajs, AREA, DT, None, events)


def test_detect_walker_ignores_crowd():
    assert detect_walker(make_input().trajectories, AREA) == 0


def test_analyze_run_without_events():
    m, crowd = analyze_run(make_input())
    assert m.walker_id == 0 and m.entered_area and m.walker_reached_target
    assert m.outside_speed == pytest.approx(1.3, rel=1e-6)
    assert m.inside_speed == pytest.approx(0.3, rel=0.05)
    # entry and exit frames can land up to one outside stride past the edge
    assert m.duration == pytest.approx(AREA.height / 0.3, abs=1.3 * DT / 0.3 + DT)
    assert m.swaps == 0 and not m.x_nonmonotone
    assert [c.agent_id for c in crowd] == [1, 2, 3]
    assert all(c.start_end == 0.0 for c in crowd)


def test_analyze_run_with_events():
    ev = [Event(0.0, EventKind.SPAWN, 0), Event(2.0, EventKind.SWAP, 0, 1),
          Event(0.4, EventKind.SWAP, 0, 3)]
    m, _ = analyze_run(make_input(events=ev, zig=True))
    assert not m.walker_reached_target
    assert m.swaps == 2 and m.swaps_inside == 1
    assert m.x_nonmonotone


def test_build_report_aggregates_match_rows():
    inputs = [make_input(f"r{i}", speed_out=1.0 + 0.1 * i, speed_in=0.2 + 0.02 * i)
              for i in range(6)]
    b = build_report(inputs)
    assert b.success_rate == 1.0
    deltas = [m.inside_speed - m.outside_speed for m in b.runs]
    t = an.paired_t_statistic(deltas)
    assert b.ttest.statistic == pytest.approx(t.statistic)
    assert b.inside.mean == pytest.approx(np.mean([m.inside_speed for m in b.runs]))
    assert b.duration.mean == pytest.approx(np.mean([m.duration for m in b.runs]))
    assert sum(n for _, _, n in duration_histogram(b.durations)) == len(b.runs)
    rows = dict(aggregate_rows(b))
    assert rows["runs"] == "6" and rows["reject_h0"] == "true"


def test_stationary_only_file(tmp_path):
    p = tmp_path / "still.csv"
    p.write_text("frame,agent_id,x,y\n" + "".join(f"{k},1,0.5,0.5\n" for k in range(10)))
    inputs = load_inputs([p], area=AREA)
    b = build_report(inputs)
    m = b.runs[0]
    assert not m.entered_area and m.duration == 0.0
    assert m.outside_speed == 0.0 and m.inside_speed is None
    assert b.duration is None


def test_report_files(tmp_path):
    b = build_report([make_input(f"r{i}") for i in range(3)])
    written = write_report(b, tmp_path)
    names = sorted(p.name for p in written)
    assert names == ["aggregate.csv", "crowd.csv", "durations_hist.csv", "runs.csv",
                     "summary.csv"]
    with open(tmp_path / "runs.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    # aggregate derivable from per-run rows
    agg = dict(csv.reader(open(tmp_path / "aggregate.csv")))
    ok = sum(r["walker_reached_target"] == "true" for r in rows)
    assert agg["successes"] == str(ok)
    assert float(agg["success_rate"]) == pytest.approx(ok / len(rows))


def test_empty_inputs():
    with pytest.raises(InputError):
        build_report([])


def test_directory_without_manifest_needs_area(tmp_path):
    (tmp_path / "a.csv").write_text("frame,agent_id,x,y\n0,1,0,0\n1,1,0,0\n")
    with pytest.raises(InputError, match="--area"):
        load_inputs([tmp_path])
    assert len(load_inputs([tmp_path], area=AREA)) == 1
