"""Command-line surface: plan, simulate, sweep, compare, evaluate, serve.

Exit codes: 0 for a completed run (a simulated fall is data, not an
error), 1 for I/O, parse or configuration problems, 2 for an infeasible
plan or a model/manifold fingerprint mismatch.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import default_model
from .basis import ManifoldError, ManifoldSpec
from .controller import ControllerState
from .harness import (
    HarnessError,
    SweepConfig,
    compare_smoothness,
    render_success_grid,
    run_sweep,
)
from .model import CoordinationMatrix, ModelError, RobotModel
from .planner import PlannerError, PlannerProblem, SolverSettings, solve_manifold
from .simulator import (
    ForceProfile,
    SimSettings,
    SimulationError,
    run_episode,
)
from .stability import (
    HandWrench,
    StabilityError,
    support_check,
    zmp_static_full,
    zmp_static_simplified,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2

_USER_ERRORS = (
    ModelError, ManifoldError, PlannerError, SimulationError,
    StabilityError, HarnessError, OSError, ValueError, KeyError,
)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    text = Path(path).read_text()
    if path.endswith(".toml"):
        try:
            import tomllib  # py311+
        except ModuleNotFoundError:
            import tomli as tomllib
        return tomllib.loads(text)
    return json.loads(text)


def _load_model(path: str | None) -> RobotModel:
    return default_model() if path is None else RobotModel.load(path)


def _solver_from_config(cfg: dict, seed: int | None) -> SolverSettings:
    fields = {f.name for f in dataclasses.fields(SolverSettings)}
    unknown = set(cfg) - fields
    if unknown:
        raise PlannerError(f"unknown solver settings: {sorted(unknown)}")
    settings = SolverSettings(**cfg)
    if seed is not None:
        settings = dataclasses.replace(settings, seed=seed)
    return settings


def _problem_from_config(model: RobotModel, cfg: dict, seed: int | None) -> PlannerProblem:
    cfg = dict(cfg)
    solver = _solver_from_config(cfg.pop("solver", {}), seed)
    coupling = cfg.pop("C", None)
    kwargs = {
        "model": model,
        "solver": solver,
        "C": CoordinationMatrix(np.asarray(coupling, float)) if coupling else None,
    }
    simple = {
        "degree", "f_max", "D_samples", "force_penalty_samples",
        "hand_displacement_cap", "planning_f_h2",
    }
    for key in list(cfg):
        if key in simple:
            kwargs[key] = cfg.pop(key)
    if "delta_margin" in cfg:
        lo, hi = cfg.pop("delta_margin")
        kwargs["delta_margin"] = (float(lo), float(hi))
    if "anchor_config" in cfg:
        kwargs["anchor_config"] = np.asarray(cfg.pop("anchor_config"), float)
    if cfg:
        raise PlannerError(f"unknown planner config keys: {sorted(cfg)}")
    return PlannerProblem(**kwargs)


def _sim_settings_from_config(cfg: dict) -> SimSettings:
    fields = {f.name for f in dataclasses.fields(SimSettings)}
    unknown = set(cfg) - fields
    if unknown:
        raise SimulationError(f"unknown sim settings: {sorted(unknown)}")
    return SimSettings(**cfg)


def _write_json(path: str, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


# -- subcommands -----------------------------------------------------------


def cmd_plan(args) -> int:
    model = _load_model(args.model)
    problem = _problem_from_config(model, _load_config(args.config), args.seed)
    manifold, report = solve_manifold(problem, args.mode)
    manifold.save(args.out)
    report_path = args.report or str(Path(args.out).with_suffix(".report.json"))
    report.save(report_path)
    print(
        f"{args.mode} plan: converged={report.converged} "
        f"final_cost={report.final_cost:.6g} max_violation={report.max_violation:.3g} "
        f"-> {args.out}"
    )
    return EXIT_OK if report.converged else EXIT_INFEASIBLE


def _profile_from_args(args) -> ForceProfile:
    if args.profile:
        data = json.loads(Path(args.profile).read_text())
        samples = data.get("samples")
        return ForceProfile(
            kind=data.get("kind", "recorded"),
            M=float(data.get("M", 0.0)),
            h=float(data.get("h", 1.0)),
            duration=data.get("duration"),
            samples=np.asarray(samples, float) if samples is not None else None,
        )
    return ForceProfile(kind="sinusoid", M=args.M, h=args.h, duration=args.duration)


def cmd_simulate(args) -> int:
    model = _load_model(args.model)
    manifold = ManifoldSpec.load(args.manifold)
    if manifold.model_fingerprint != model.fingerprint() and not args.force:
        print(
            "error: manifold fingerprint does not match the model "
            "(use --force to run anyway)",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    settings = _sim_settings_from_config(_load_config(args.config).get("sim", {}))
    profile = _profile_from_args(args)
    result = run_episode(
        model, manifold, profile, settings=settings, check_fingerprint=False
    )
    if args.csv:
        result.save_csv(args.csv)
    if args.out:
        _write_json(args.out, result.to_dict())
    print(
        f"episode: success={result.success} reason={result.failure_reason} "
        f"max|zmp|={result.max_abs_zmp:.4f} margin_exceeded={result.margin_exceeded}"
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    model = _load_model(args.model)
    manifolds = {
        "robust": ManifoldSpec.load(args.robust),
        "standard": ManifoldSpec.load(args.standard),
    }
    fp = model.fingerprint()
    for mode, man in manifolds.items():
        if man.model_fingerprint != fp and not args.force:
            print(f"error: {mode} manifold fingerprint mismatch", file=sys.stderr)
            return EXIT_INFEASIBLE
    cfg = _load_config(args.config)
    settings = _sim_settings_from_config(cfg.pop("sim", {}))
    sweep_kwargs = {}
    for key in ("M_values", "h_values", "modes"):
        if key in cfg:
            sweep_kwargs[key] = tuple(cfg.pop(key))
    if "seed" in cfg:
        sweep_kwargs["seed"] = int(cfg.pop("seed"))
    if args.seed is not None:
        sweep_kwargs["seed"] = args.seed
    if cfg:
        raise HarnessError(f"unknown sweep config keys: {sorted(cfg)}")
    config = SweepConfig(**sweep_kwargs)
    result = run_sweep(model, manifolds, config, settings, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result.save_csv(out / "sweep.csv")
    (out / "sweep.svg").write_text(render_success_grid(result))
    counts = {m: result.success_count(m) for m in config.modes}
    print(f"sweep: {len(result.cells)} cells, successes {counts} -> {out}")
    return EXIT_OK


def cmd_compare_smoothness(args) -> int:
    model = _load_model(args.model)
    problem = _problem_from_config(model, _load_config(args.config), args.seed)
    if args.manifold:
        manifold = ManifoldSpec.load(args.manifold)
        if manifold.model_fingerprint != model.fingerprint() and not args.force:
            print("error: manifold fingerprint mismatch", file=sys.stderr)
            return EXIT_INFEASIBLE
    else:
        manifold, report = solve_manifold(problem, "robust")
        if not report.converged:
            print("error: robust plan did not converge", file=sys.stderr)
            return EXIT_INFEASIBLE
    comparison = compare_smoothness(problem, manifold)
    comparison.save_csv(args.out)
    print(
        f"max adjacent jump: manifold={comparison.manifold_max_jump:.4f} rad, "
        f"per-force={comparison.baseline_max_jump:.4f} rad -> {args.out}"
    )
    return EXIT_OK


def cmd_eval_zmp(args) -> int:
    model = _load_model(args.model)
    data = json.loads(Path(args.input).read_text())
    q = np.asarray(data["q"], dtype=float)
    wrench_data = data.get("wrench", {})
    wrench = HandWrench(
        f_h1=float(wrench_data.get("f_h1", 0.0)),
        f_h2=float(wrench_data.get("f_h2", 0.0)),
    )
    margin = data.get("margin", [-0.05, 0.05])
    full = zmp_static_full(model, q, wrench)
    simplified = zmp_static_simplified(model, q, wrench.f_h1)
    res = support_check(full, (float(margin[0]), float(margin[1])), model.foot_extent)
    out = {
        "zmp_full": full,
        "zmp_simplified": simplified,
        "inside_margin": res.inside_margin,
        "inside_support": res.inside_support,
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_serve(args) -> int:
    from .serve import serve_forever

    model = _load_model(args.model)
    manifold = ManifoldSpec.load(args.manifold)
    if manifold.model_fingerprint != model.fingerprint() and not args.force:
        print("error: manifold fingerprint mismatch", file=sys.stderr)
        return EXIT_INFEASIBLE
    settings = _sim_settings_from_config(_load_config(args.config).get("sim", {}))
    try:
        serve_forever(
            model, manifold, settings,
            host=args.host, port=args.port, fast=args.fast, ui_dir=args.ui,
        )
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stancepath",
        description="Plan, simulate and serve force-indexed balance manifolds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("--model", help="robot model JSON (default: packaged model)")
        p.add_argument("--config", help="planner/sim config file (TOML or JSON)")
        p.add_argument("--seed", type=int, default=None, help="solver seed override")

    p = sub.add_parser("plan", help="solve a manifold and write it to disk")
    common(p)
    p.add_argument("--mode", choices=("robust", "standard"), default="robust")
    p.add_argument("--out", required=True, help="output manifold JSON path")
    p.add_argument("--report", help="solve report path (default: <out>.report.json)")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="run one force episode against a manifold")
    common(p)
    p.add_argument("--manifold", required=True)
    p.add_argument("--M", type=float, default=150.0, help="sinusoid peak force N")
    p.add_argument("--h", type=float, default=2.0, help="sinusoid rise time s")
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("--profile", help="force profile JSON overriding --M/--h")
    p.add_argument("--csv", help="write the tick time series here")
    p.add_argument("--out", help="write the episode verdict JSON here")
    p.add_argument("--force", action="store_true", help="ignore fingerprint mismatch")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="episode grid over force peaks and rise times")
    common(p)
    p.add_argument("--robust", required=True, help="robust manifold JSON")
    p.add_argument("--standard", required=True, help="standard manifold JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "compare-smoothness", help="manifold vs independent per-force solutions"
    )
    common(p)
    p.add_argument("--manifold", help="reuse an existing manifold instead of planning")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_compare_smoothness)

    p = sub.add_parser("eval-zmp", help="static balance points for a posed state")
    common(p)
    p.add_argument("--input", required=True, help="JSON with q and wrench")
    p.set_defaults(func=cmd_eval_zmp)

    p = sub.add_parser("serve", help="real-time interaction endpoint (websocket)")
    common(p)
    p.add_argument("--manifold", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--fast", action="store_true", help="lockstep ticks, no wall-clock pacing")
    p.add_argument("--ui", help="serve this directory as the console bundle")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
