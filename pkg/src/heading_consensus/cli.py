"""Command-line front end.

``run`` simulates a scenario file and writes a trajectory CSV plus a JSON
report; ``reproduce`` runs one of the built-in scenarios and checks its
expected outcome.  Exit codes: 0 success, 1 failed reproduce assertion,
2 scenario validation failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .analysis import AnalysisReport, analyze, pairwise_intersections
from .dynamics import Trajectory, simulate, simulate_local_frame
from .geometry import TAU
from .graph import GraphError
from .presets import DEFAULT_SEED, PRESETS
from .scenario import Scenario, ScenarioError, check_feasibility, scenario_from_dict, scenario_hash

DEFAULT_OUT = "out"
OUT_ENV_VAR = "HEADING_CONSENSUS_OUT"

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_VALIDATION = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heading-consensus",
        description="Simulate planar pointing consensus over a rooted out-branching network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario file")
    run.add_argument("--scenario", required=True, help="path to a scenario JSON file")
    run.add_argument("--dt", type=float, default=1e-3, help="integration step (s)")
    run.add_argument("--t-final", type=float, default=30.0, help="simulated horizon (s)")
    run.add_argument("--record-every", type=int, default=10,
                     help="record every N-th step (default 10)")
    run.add_argument("--seed", type=int, default=None,
                     help="seed for sampled initial headings (overrides the file)")
    run.add_argument("--out", default=None,
                     help=f"output directory (default ${OUT_ENV_VAR} or ./{DEFAULT_OUT})")
    run.add_argument("--frames", default="global",
                     help="global | local-random | local:t1,t2,... (frame angles, rad)")
    run.add_argument("--batch", type=int, default=None, metavar="N",
                     help="run N seeded simulations concurrently (seeds seed..seed+N-1)")

    rep = sub.add_parser("reproduce", help="run a built-in scenario and check its outcome")
    rep.add_argument("which", choices=sorted(PRESETS))
    rep.add_argument("--out", default=None,
                     help=f"output directory (default ${OUT_ENV_VAR} or ./{DEFAULT_OUT})")
    return parser


def _out_dir(flag_value) -> Path:
    if flag_value is not None:
        return Path(flag_value)
    env = os.environ.get(OUT_ENV_VAR)
    return Path(env) if env else Path(DEFAULT_OUT)


def _write_trajectory_csv(path: Path, trajectory: Trajectory) -> None:
    n = trajectory.scenario.n
    cols = ["t"]
    for i in range(1, n + 1):
        cols += [f"b{i}x", f"b{i}y"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for t, row in zip(trajectory.times, trajectory.headings):
            vals = [f"{t:.17g}"] + [f"{v:.17g}" for v in row.ravel()]
            fh.write(",".join(vals) + "\n")


def _report_dict(scenario: Scenario, report: AnalysisReport, *, dt, t_final,
                 record_every, samples, frame_mode, frame_angles,
                 feasible, feasibility_error,
                 final_headings=None) -> dict:
    point = report.intersection_point
    residual = report.intersection_residual
    # where pairs of final heading lines cross, for inspecting the spread of
    # non-consensus outcomes
    pair_points = None
    if final_headings is not None:
        pair_points = {
            f"{a}&{b}": None if pt is None else [float(pt[0]), float(pt[1])]
            for (a, b), pt in sorted(
                pairwise_intersections(scenario.positions, final_headings).items())
        }
    return {
        "scenario": scenario.name,
        "scenario_hash": scenario_hash(scenario),
        "seed": scenario.seed,
        "dt": dt,
        "t_final": t_final,
        "record_every": record_every,
        "samples": samples,
        "frames": {
            "mode": frame_mode,
            "angles": None if frame_angles is None else [float(a) for a in frame_angles],
        },
        "feasible": feasible,
        "feasibility_error": feasibility_error,
        "consensus": report.consensus,
        "angles_satisfied": report.angles_satisfied,
        "forward_ok": report.forward_ok,
        "final_root_error": report.final_root_error,
        "final_edge_errors": {
            f"{j}->{i}": err for (j, i), err in sorted(report.final_edge_errors.items())
        },
        "intersection_point": None if point is None else [float(point[0]), float(point[1])],
        "intersection_residual": None if math.isinf(residual) else residual,
        "pairwise_intersections": pair_points,
    }


def _write_report(path: Path, data: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _parse_frames(value: str, n: int):
    """Return (mode, angles_or_None); angles need an rng for local-random."""
    if value == "global":
        return "global", None
    if value == "local-random":
        return "local-random", None
    if value.startswith("local:"):
        try:
            angles = [float(tok) for tok in value[len("local:"):].split(",")]
        except ValueError as exc:
            raise ScenarioError(f"cannot parse frame angles in {value!r}") from exc
        if len(angles) != n:
            raise ScenarioError(
                f"--frames lists {len(angles)} angles but the scenario has {n} agents"
            )
        return "local", angles
    raise ScenarioError(
        f"unknown --frames mode {value!r}; expected global, local-random, or local:t1,t2,..."
    )


def _simulate_one(data: dict, name: str, seed, args) -> tuple[str, dict]:
    """Build, simulate, analyze and write one run; returns (stem, report dict)."""
    rng = np.random.default_rng(seed) if seed is not None else None
    scenario = scenario_from_dict(data, name=name, seed=seed, rng=rng)
    frame_mode, frame_angles = _parse_frames(args.frames, scenario.n)
    if frame_mode == "local-random":
        if rng is None and scenario.seed is None:
            raise ScenarioError("--frames local-random needs a seed")
        if rng is None:
            # file-provided seed: continue the stream the headings came from
            rng = np.random.default_rng(scenario.seed)
            rng.uniform(0.0, TAU, size=scenario.n)  # skip the heading draws
        frame_angles = rng.uniform(0.0, TAU, size=scenario.n).tolist()

    feasible, feasibility_error = True, None
    try:
        check_feasibility(scenario)
    except ScenarioError as exc:
        feasible, feasibility_error = False, str(exc)

    if frame_angles is None:
        trajectory = simulate(scenario, dt=args.dt, t_final=args.t_final,
                              record_every=args.record_every)
    else:
        trajectory = simulate_local_frame(scenario, frame_angles, dt=args.dt,
                                          t_final=args.t_final,
                                          record_every=args.record_every)
    report = analyze(trajectory)
    rep = _report_dict(
        scenario, report, dt=args.dt, t_final=args.t_final,
        record_every=args.record_every, samples=len(trajectory.times),
        frame_mode=frame_mode, frame_angles=frame_angles,
        feasible=feasible, feasibility_error=feasibility_error,
        final_headings=trajectory.final_headings,
    )

    stem = scenario.name if scenario.seed is None else f"{scenario.name}_seed{scenario.seed}"
    out_dir = _out_dir(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_trajectory_csv(out_dir / f"{stem}.csv", trajectory)
    _write_report(out_dir / f"{stem}.report.json", rep)
    return stem, rep


def _cmd_run(args) -> int:
    path = Path(args.scenario)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        print(f"error: cannot read scenario file: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        print(f"error: scenario file is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.batch is not None:
        if args.batch < 1:
            print("error: --batch must be >= 1", file=sys.stderr)
            return EXIT_VALIDATION
        if "initial_headings" in data:
            print("error: --batch needs seed-sampled headings, but the scenario "
                  "fixes initial_headings", file=sys.stderr)
            return EXIT_VALIDATION
        base = args.seed if args.seed is not None else data.get("seed")
        if base is None:
            print("error: --batch needs a seed (--seed or the file's seed field)",
                  file=sys.stderr)
            return EXIT_VALIDATION
        seeds = [int(base) + k for k in range(args.batch)]
    else:
        seeds = [args.seed]

    def job(seed):
        return _simulate_one(data, path.stem, seed, args)

    try:
        if len(seeds) == 1:
            results = [job(seeds[0])]
        else:
            with ThreadPoolExecutor(max_workers=min(len(seeds), os.cpu_count() or 1)) as pool:
                results = list(pool.map(job, seeds))
    except (ScenarioError, GraphError, ValueError) as exc:
        print(f"error: scenario validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO

    for stem, rep in results:
        print(f"{stem}: consensus={rep['consensus']} "
              f"angles_satisfied={rep['angles_satisfied']} "
              f"residual={rep['intersection_residual']} "
              f"root_error={rep['final_root_error']:.3e}")
    return EXIT_OK


def _reproduce_checks(name: str, report: AnalysisReport) -> list[tuple[str, bool, str, str]]:
    """(label, ok, expected, observed) rows for a built-in scenario's outcome."""
    point = report.intersection_point
    residual = report.intersection_residual
    max_edge = max(report.final_edge_errors.values())
    checks = []
    if name == "hexagon":
        dist = math.inf if point is None else math.hypot(point[0], point[1])
        checks = [
            ("edge errors at t_final", max_edge < 1e-6, "< 1e-6", f"{max_edge:.3e}"),
            ("root error at t_final", report.final_root_error < 1e-6,
             "< 1e-6", f"{report.final_root_error:.3e}"),
            ("intersection near (0, 0)", dist < 1e-4, "< 1e-4 m", f"{dist:.3e} m"),
            ("forward pointing", report.forward_ok, "true", str(report.forward_ok).lower()),
            ("consensus", report.consensus, "true", str(report.consensus).lower()),
        ]
    elif name == "hexagon-misdirected":
        checks = [
            ("edge errors at t_final", max_edge < 1e-6, "< 1e-6", f"{max_edge:.3e}"),
            ("intersection residual", residual > 0.05, "> 0.05 m", f"{residual:.3e} m"),
            ("consensus", not report.consensus, "false", str(report.consensus).lower()),
        ]
    elif name == "torricelli":
        checks = [
            ("intersection residual", residual < 1e-4, "< 1e-4 m", f"{residual:.3e} m"),
            ("consensus", report.consensus, "true", str(report.consensus).lower()),
        ]
    elif name == "torricelli-misdirected":
        checks = [
            ("angle satisfaction implies consensus only with a well-aimed root",
             report.consensus <= report.angles_satisfied, "implication holds",
             f"consensus={report.consensus}, angles_satisfied={report.angles_satisfied}"),
            ("consensus", not report.consensus, "false", str(report.consensus).lower()),
        ]
    return checks


def _cmd_reproduce(args) -> int:
    scenario = PRESETS[args.which](seed=DEFAULT_SEED)
    trajectory = simulate(scenario, dt=1e-3, t_final=30.0, record_every=10)
    report = analyze(trajectory)

    out_dir = _out_dir(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        feasible, feasibility_error = True, None
        try:
            check_feasibility(scenario)
        except ScenarioError as exc:
            feasible, feasibility_error = False, str(exc)
        rep = _report_dict(
            scenario, report, dt=1e-3, t_final=30.0, record_every=10,
            samples=len(trajectory.times), frame_mode="global", frame_angles=None,
            feasible=feasible, feasibility_error=feasibility_error,
            final_headings=trajectory.final_headings,
        )
        _write_trajectory_csv(out_dir / f"{scenario.name}.csv", trajectory)
        _write_report(out_dir / f"{scenario.name}.report.json", rep)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO

    checks = _reproduce_checks(args.which, report)
    ok = all(c[1] for c in checks)
    for label, passed, expected, observed in checks:
        marker = "ok" if passed else "FAILED"
        print(f"{marker:>6}  {label}: expected {expected}, observed {observed}")
    print(f"{args.which}: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_ASSERTION


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_reproduce(args)


if __name__ == "__main__":
    raise SystemExit(main())
