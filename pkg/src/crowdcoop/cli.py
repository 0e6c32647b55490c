"""Command line interface: generate-scenario, run, analyze, compare."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from functools import partial
from pathlib import Path

from . import __version__
from .core import ValidationError
from .engine import WALKER_ID, run_batch
from .io import (ConfigError, TrajectoryFormatError, dumps_scenario, loads_scenario,
                 scenario_to_dict, write_run)
from .report import (InputError, ReportBundle, _parse_area, build_report, format_summary,
                     load_inputs, write_report)
from .scenarios import crowd_layout, generate_reenactment

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_IO = 3


def _fail(code: int, msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_generate(args) -> int:
    scenario = generate_reenactment(seed=args.seed, layout_seed=args.layout_seed)
    text = dumps_scenario(scenario)
    if args.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        Path(args.out).write_text(text)
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    print(f"wrote {args.out}")
    return EXIT_OK


def _load_run_config(path):
    """Scenario plus batch defaults from a config file or a previous run manifest."""
    text = Path(path).read_text()
    scenario = loads_scenario(text)
    defaults = {}
    data = json.loads(text)
    if isinstance(data, dict) and "scenario" in data:
        defaults = {k: data[k] for k in ("base_seed", "n_runs", "vary_layout") if k in data}
    return scenario, defaults


def cmd_run(args) -> int:
    try:
        if args.scenario is None:
            scenario, defaults = generate_reenactment(), {}
        else:
            scenario, defaults = _load_run_config(args.scenario)
    except ConfigError as exc:
        return _fail(EXIT_BAD_INPUT, f"{args.scenario}: {exc}")
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))

    params = scenario.params
    if args.disable_cognition:
        params = replace(params, cognition=False)
    scenario = replace(scenario, params=params)
    if args.dt is not None:
        scenario = replace(scenario, frame_interval=args.dt)
    if args.t_end is not None:
        scenario = replace(scenario, t_end=args.t_end)
    base_seed = args.seed if args.seed is not None else defaults.get("base_seed", scenario.seed)
    n_runs = args.runs if args.runs is not None else defaults.get("n_runs", 1)
    vary = args.vary_layout or defaults.get("vary_layout", False)
    scenario = replace(scenario, seed=base_seed)
    try:
        scenario.validate()
    except ValidationError as exc:
        return _fail(EXIT_BAD_INPUT, str(exc))
    layout = None
    if vary:
        layout = partial(crowd_layout, scenario.topography.waiting_area,
                         radius=scenario.params.torso_radius)

    results = run_batch(scenario, n_runs, base_seed, jobs=args.jobs, layout=layout)

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        runs = [write_run(r, out, i) for i, r in enumerate(results)]
        manifest = {
            "code_version": __version__,
            "base_seed": base_seed,
            "n_runs": n_runs,
            "vary_layout": bool(vary),
            "walker_id": WALKER_ID,
            "scenario": scenario_to_dict(scenario),
            "runs": runs,
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    ok = sum(r.walker_reached_target for r in results)
    print(f"{n_runs} runs written to {out} ({ok}/{n_runs} walkers reached the target)")
    return EXIT_OK


def _bundle(paths, args):
    area = _parse_area(args.area) if getattr(args, "area", None) else None
    inputs = load_inputs(paths, dt=args.dt, area=area, walker_id=args.walker_id)
    return build_report(inputs), inputs


def cmd_analyze(args) -> int:
    try:
        bundle, inputs = _bundle(args.inputs, args)
    except (InputError, TrajectoryFormatError, ValidationError, ValueError) as exc:
        return _fail(EXIT_BAD_INPUT, str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    out = Path(args.out) if args.out else (
        Path(args.inputs[0]) / "report" if Path(args.inputs[0]).is_dir() else Path("report"))
    try:
        written = write_report(bundle, out)
        if not args.no_plots:
            from .plots import render_all
            walkers = [i.trajectories[m.walker_id] for i, m in zip(inputs, bundle.runs)]
            written += render_all(bundle, walkers, inputs[0].area, out)
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    print(format_summary(bundle))
    print(f"\nreport written to {out} ({len(written)} files)")
    return EXIT_OK


COMPARE_ROWS = [
    ("success_rate", lambda b: b.success_rate),
    ("inside_speed_mean_mps", lambda b: b.inside.mean if b.inside else None),
    ("outside_speed_mean_mps", lambda b: b.outside.mean if b.outside else None),
    ("duration_mean_s", lambda b: b.duration.mean if b.duration else None),
    ("swap_inside_fraction", lambda b: b.swap_inside_fraction),
    ("zigzag_fraction", lambda b: b.zigzag_fraction),
    ("t_statistic", lambda b: b.ttest.statistic if b.ttest else None),
]


def compare_rows(a: ReportBundle, b: ReportBundle) -> list[tuple[str, object, object, object]]:
    rows = []
    for name, get in COMPARE_ROWS:
        va, vb = get(a), get(b)
        delta = vb - va if va is not None and vb is not None else None
        rows.append((name, va, vb, delta))
    return rows


def cmd_compare(args) -> int:
    bundles = []
    for d in (args.dir_a, args.dir_b):
        if not Path(d).is_dir():
            return _fail(EXIT_BAD_INPUT, f"{d}: not a directory")
        try:
            bundles.append(_bundle([d], args)[0])
        except (InputError, TrajectoryFormatError, ValidationError, ValueError) as exc:
            return _fail(EXIT_BAD_INPUT, f"{d}: {exc}")
        except OSError as exc:
            return _fail(EXIT_IO, str(exc))
    rows = compare_rows(*bundles)

    def cell(v):
        return "" if v is None else f"{v:.4f}"

    print(f"{'metric':<26}{'A':>12}{'B':>12}{'B - A':>12}")
    for name, va, vb, delta in rows:
        print(f"{name:<26}{cell(va):>12}{cell(vb):>12}{cell(delta):>12}")
    if bundles[0].success_rate != bundles[1].success_rate:
        print(f"\nsuccess rate changes from {bundles[0].success_rate:.2f} "
              f"to {bundles[1].success_rate:.2f}")
    if args.out:
        try:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            with open(out / "compare.csv", "w") as fh:
                fh.write("metric,a,b,delta\n")
                for name, va, vb, delta in rows:
                    fh.write(f"{name},{cell(va)},{cell(vb)},{cell(delta)}\n")
        except OSError as exc:
            return _fail(EXIT_IO, str(exc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crowdcoop", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate-scenario", help="write the reenactment scenario config")
    g.add_argument("--out", help="output path (stdout if omitted)")
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--layout-seed", type=int, default=0, help="seed for the crowd jitter")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run a batch of simulations")
    r.add_argument("--scenario", help="scenario config or run manifest (default: reenactment)")
    r.add_argument("--runs", type=int)
    r.add_argument("--seed", type=int, help="base seed; run i uses seed + i")
    r.add_argument("--out", required=True)
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--disable-cognition", action="store_true",
                   help="freeze self-categories (deadlock baseline)")
    r.add_argument("--dt", type=float, help="frame interval of the written trajectories [s]")
    r.add_argument("--t-end", type=float, help="simulated time limit [s]")
    r.add_argument("--vary-layout", action="store_true",
                   help="re-jitter the waiting crowd per run seed")
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("analyze", help="metrics and statistics for trajectory files")
    a.add_argument("inputs", nargs="+", help="run directories or trajectory CSV files")
    a.add_argument("--out", help="report directory (default: <input>/report)")
    a.add_argument("--dt", type=float, help="frame interval [s] (default from manifest or 0.04)")
    a.add_argument("--area", help="waiting area x_min,y_min,x_max,y_max [m]")
    a.add_argument("--walker-id", type=int)
    a.add_argument("--no-plots", action="store_true")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("compare", help="side-by-side report of two run directories")
    c.add_argument("dir_a")
    c.add_argument("dir_b")
    c.add_argument("--out")
    c.add_argument("--dt", type=float)
    c.add_argument("--area")
    c.add_argument("--walker-id", type=int)
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
