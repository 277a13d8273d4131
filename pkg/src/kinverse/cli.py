"""Command-line harness: run experiments from JSON configs and emit artifacts.

Subcommands:

  solve       run one experiment; writes trace.csv, scatter.csv, summary.json
              and rendered figures into the output directory
  compare     run several experiments sharing model/target/budget; writes
              comparison.csv, comparison.png and a JSON summary
  kinematics  evaluate the discipline model directly for debugging, or serve
              one input.json -> output.json protocol exchange (--io-dir)
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import report
from .acquisition import AcquisitionConfig, AcquisitionKind
from .baselines import BaselineConfig, BaselineKind, run_baseline
from .errors import ConfigError, EvaluationBudgetError, KinverseError
from .external import ExternalModel, run_protocol_request
from .gp import DomainBounds, KernelFamily
from .kinematics import (
    AXES,
    DesignVariables,
    HardpointSet,
    SuspensionModel,
    curve_statistics,
    default_travel_grid,
    evaluate_kinematics,
    load_fixture,
)
from .sampling import derive_seed
from .solver import (
    OptimizationTrace,
    SolverSettings,
    TargetSpec,
    TerminationPolicy,
    solve,
)

CONFIG_SCHEMA_VERSION = 1

BASELINE_KINDS = {k.value for k in BaselineKind}


@dataclass
class ExperimentConfig:
    """Validated experiment description, paths resolved."""

    name: str
    path: Path
    base_hardpoints: HardpointSet
    design: DesignVariables
    model_kind: str                 # "builtin" | "external"
    travel_grid: np.ndarray
    track_width: float
    external: dict | None
    target: dict
    optimizer: dict
    policy: TerminationPolicy
    seed: int
    output_dir: Path


def _require(mapping, key, context):
    if key not in mapping:
        raise ConfigError(f"{context}: missing required field {key!r}")
    return mapping[key]


def _parse_design_variables(entries, base: HardpointSet) -> DesignVariables:
    if not isinstance(entries, list) or not entries:
        raise ConfigError("design_variables must be a non-empty list")
    coordinates = []
    lower, upper = [], []
    for entry in entries:
        hardpoint = _require(entry, "hardpoint", "design_variables")
        if "bounds" in entry:
            axis_bounds = entry["bounds"]
            axes = list(axis_bounds)
        else:
            axes = entry.get("axes", [entry["axis"]] if "axis" in entry else None)
            if axes is None:
                raise ConfigError(
                    f"design variable {hardpoint}: give 'axes' (with 'half_range') "
                    f"or explicit 'bounds'"
                )
            axis_bounds = None
        for axis in axes:
            if axis not in AXES:
                raise ConfigError(f"design variable {hardpoint}.{axis}: unknown axis")
            try:
                nominal = float(getattr(base, hardpoint)[AXES.index(axis)])
            except AttributeError:
                raise ConfigError(f"unknown hardpoint {hardpoint!r}") from None
            if axis_bounds is not None:
                lo, hi = (float(v) for v in axis_bounds[axis])
            else:
                half = float(entry.get("half_range", 0.025))
                if half <= 0:
                    raise ConfigError(
                        f"design variable {hardpoint}.{axis}: half_range must be > 0"
                    )
                lo, hi = nominal - half, nominal + half
            if lo >= hi:
                raise ConfigError(
                    f"design variable {hardpoint}.{axis}: lower bound {lo} "
                    f"must be < upper bound {hi}"
                )
            coordinates.append((hardpoint, axis))
            lower.append(lo)
            upper.append(hi)
    try:
        return DesignVariables(tuple(coordinates), DomainBounds(lower, upper))
    except ValueError as exc:
        raise ConfigError(f"design_variables: {exc}") from exc


def load_config(path, seed_override=None, out_override=None) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc

    context = str(path)
    name = str(raw.get("name", path.stem))
    model_block = _require(raw, "model", context)
    kind = model_block.get("kind", "builtin")
    if kind not in ("builtin", "external"):
        raise ConfigError(f"{context}: model.kind must be 'builtin' or 'external'")

    fixture_ref = model_block.get("fixture", "builtin")
    if fixture_ref != "builtin" and not Path(fixture_ref).is_absolute():
        fixture_ref = path.parent / fixture_ref
    if fixture_ref != "builtin" and not Path(fixture_ref).exists():
        raise ConfigError(f"{context}: fixture file does not exist: {fixture_ref}")
    fixture = load_fixture(fixture_ref)
    try:
        base = HardpointSet.from_dict(fixture["hardpoints"])
    except ValueError as exc:
        raise ConfigError(f"{context}: bad fixture geometry: {exc}") from exc

    sweep = dict(fixture.get("sweep", {}))
    sweep.update(model_block.get("sweep", {}))
    try:
        travel_grid = default_travel_grid(
            float(sweep.get("half_range", 0.08)), int(sweep.get("samples", 33))
        )
    except ValueError as exc:
        raise ConfigError(f"{context}: bad sweep: {exc}") from exc
    track_width = float(
        model_block.get("track_width", fixture.get("track_width", 1.6))
    )

    external = None
    if kind == "external":
        command = _require(model_block, "command", f"{context}: external model")
        external = {
            "command": [str(c) for c in command],
            "workdir": model_block.get("workdir", "."),
            "timeout": float(model_block.get("timeout", 600.0)),
            "outputs": model_block.get(
                "outputs", ["bump_steer", "roll_steer", "static_toe"]
            ),
        }

    design = _parse_design_variables(_require(raw, "design_variables", context), base)

    target = dict(_require(raw, "target", context))
    mode = target.get("mode", "explicit" if "values" in target else None)
    if mode not in ("explicit", "self_inverse"):
        raise ConfigError(
            f"{context}: target.mode must be 'explicit' or 'self_inverse'"
        )
    target["mode"] = mode
    if mode == "explicit" and "values" not in target:
        raise ConfigError(f"{context}: explicit target needs 'values'")
    if mode == "self_inverse" and not target.get("names"):
        raise ConfigError(f"{context}: self_inverse target needs 'names'")

    optimizer = dict(raw.get("optimizer", {"kind": "bo"}))
    opt_kind = optimizer.get("kind", "bo")
    if opt_kind != "bo" and opt_kind not in BASELINE_KINDS:
        raise ConfigError(
            f"{context}: optimizer.kind must be 'bo' or one of "
            f"{sorted(BASELINE_KINDS)}"
        )

    term = raw.get("termination", {})
    try:
        policy = TerminationPolicy(
            norm_epsilon=float(term.get("norm_epsilon", 1e-3)),
            acquisition_epsilon=float(term.get("acquisition_epsilon", 1e-3)),
            max_evaluations=int(term.get("max_evaluations", 300)),
            n_init=int(term.get("n_init", 10)),
        )
    except ValueError as exc:
        raise ConfigError(f"{context}: termination: {exc}") from exc

    seed = int(seed_override if seed_override is not None else raw.get("seed", 0))
    if out_override is not None:
        out = Path(out_override)
    elif "output_dir" in raw:
        out = Path(raw["output_dir"])
        if not out.is_absolute():
            out = path.parent / out  # configs stay relocatable
    else:
        out = Path("runs") / name

    return ExperimentConfig(
        name=name,
        path=path,
        base_hardpoints=base,
        design=design,
        model_kind=kind,
        travel_grid=travel_grid,
        track_width=track_width,
        external=external,
        target=target,
        optimizer=optimizer,
        policy=policy,
        seed=seed,
        output_dir=out,
    )


def build_model(config: ExperimentConfig):
    if config.model_kind == "external":
        ext = config.external
        workdir = Path(ext["workdir"])
        if not workdir.is_absolute():
            workdir = config.path.parent / workdir
        half = float(config.travel_grid[-1])
        return ExternalModel(
            ext["command"],
            workdir,
            config.base_hardpoints,
            config.design,
            output_names=ext["outputs"],
            timeout=ext["timeout"],
            sweep_half_range=half,
            sweep_samples=len(config.travel_grid),
            track_width=config.track_width,
        )
    return SuspensionModel(
        config.base_hardpoints,
        config.design,
        travel=config.travel_grid,
        track_width=config.track_width,
    )


def resolve_target(config: ExperimentConfig, model) -> tuple[TargetSpec, dict]:
    """Build the TargetSpec; self-inverse targets are drawn from the model."""
    block = config.target
    weights = block.get("weights", {})
    scales = block.get("scales", {})
    info: dict = {"mode": block["mode"]}
    if block["mode"] == "explicit":
        values = {str(k): float(v) for k, v in block["values"].items()}
    else:
        names = [str(n) for n in block["names"]]
        margin = float(block.get("interior_margin", 0.1))
        if not 0 <= margin < 0.5:
            raise ConfigError("target.interior_margin must lie in [0, 0.5)")
        rng = np.random.default_rng(derive_seed(config.seed, 7))
        unit = margin + (1.0 - 2.0 * margin) * rng.uniform(size=model.bounds.dim)
        y_star = model.bounds.from_unit(unit)
        outputs = model.evaluate(y_star)
        values = {n: float(outputs[n]) for n in names}
        info["y_star"] = {
            n: float(v) for n, v in zip(model.variable_names, y_star)
        }
        info["g_y_star"] = dict(values)
        offsets = block.get("offsets", {})
        for key, off in offsets.items():
            values[key] += float(off) * float(scales.get(key, 1.0))
    info["values"] = dict(values)
    try:
        spec = TargetSpec(values, weights, scales)
        spec.validate_against(model.output_names)
    except ValueError as exc:
        raise ConfigError(f"target: {exc}") from exc
    return spec, info


def _build_bo_parts(config: ExperimentConfig):
    opt = config.optimizer
    acq_block = dict(opt.get("acquisition", {}))
    try:
        acq = AcquisitionConfig(
            kind=AcquisitionKind(acq_block.get("kind", "expected_improvement")),
            xi=float(acq_block.get("xi", 0.01)),
            restarts=int(acq_block.get("restarts", 10)),
            seed=int(acq_block.get("seed", config.seed)),
        )
        settings = SolverSettings(
            kernel_family=KernelFamily(opt.get("kernel", "matern52")),
            hyper_restarts=int(opt.get("hyper_restarts", 5)),
            hyper_refit_every=int(opt.get("hyper_refit_every", 1)),
            hyper_full_every=int(opt.get("hyper_full_every", 10)),
        )
    except ValueError as exc:
        raise ConfigError(f"optimizer: {exc}") from exc
    return acq, settings


def _build_baseline_config(config: ExperimentConfig) -> BaselineConfig:
    opt = config.optimizer
    kwargs = {
        key: opt[key]
        for key in (
            "fd_step", "armijo_c", "initial_step", "backtrack",
            "population", "parents", "sigma0",
        )
        if key in opt
    }
    try:
        return BaselineConfig(
            kind=BaselineKind(opt["kind"]),
            max_evaluations=config.policy.max_evaluations,
            seed=config.seed,
            n_init=config.policy.n_init,
            **kwargs,
        )
    except ValueError as exc:
        raise ConfigError(f"optimizer: {exc}") from exc


def run_experiment(config: ExperimentConfig) -> tuple[OptimizationTrace, dict]:
    """Run one experiment and write all artifacts; returns (trace, summary)."""
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    model = build_model(config)
    target, target_info = resolve_target(config, model)

    started = time.perf_counter()
    partial_error = None
    if config.optimizer.get("kind", "bo") == "bo":
        acq, settings = _build_bo_parts(config)
        try:
            trace = solve(model, target, config.policy, acq,
                          seed=config.seed, settings=settings)
        except EvaluationBudgetError as exc:
            trace, partial_error = exc.trace, str(exc)
    else:
        baseline = _build_baseline_config(config)
        try:
            trace = run_baseline(model, target, baseline,
                                 norm_epsilon=config.policy.norm_epsilon)
        except EvaluationBudgetError as exc:
            trace, partial_error = exc.trace, str(exc)
    wall = time.perf_counter() - started

    report.write_trace_csv(out / "trace.csv", trace)
    report.write_scatter_csv(out / "scatter.csv", trace, model.bounds)
    figures = ["convergence.png", "scatter.png"]
    report.render_convergence_figure(out / "convergence.png", trace,
                                     config.policy.norm_epsilon)
    report.render_scatter_figure(out / "scatter.png", trace, model.bounds)
    if report.render_acquisition_figure(out / "acquisition.png", trace):
        figures.append("acquisition.png")

    summary = {
        "schema_version": CONFIG_SCHEMA_VERSION,
        "name": config.name,
        "method": trace.method,
        "seed": config.seed,
        "termination_reason": trace.reason.value if trace.reason else None,
        "error": partial_error,
        "evaluation_count": trace.n_evaluations,
        "failed_evaluations": trace.n_failures,
        "best": {
            "point": (
                dict(zip(trace.variable_names,
                         map(float, trace.incumbent_point)))
                if trace.incumbent_point is not None else None
            ),
            "outputs": trace.incumbent_outputs,
            "norm_sq": trace.incumbent_value,
        },
        "target": {
            **target_info,
            "weights": dict(target.weights),
            "scales": dict(target.scales),
        },
        "termination_policy": {
            "norm_epsilon": config.policy.norm_epsilon,
            "acquisition_epsilon": config.policy.acquisition_epsilon,
            "max_evaluations": config.policy.max_evaluations,
            "n_init": config.policy.n_init,
        },
        "last_acquisition_max": trace.last_acquisition_max,
        "wall_time_seconds": wall,
        "artifacts": {
            "trace": "trace.csv",
            "scatter": "scatter.csv",
            "figures": figures,
        },
        "schema": {
            "trace.csv": {
                "columns": report.trace_columns(trace),
                "notes": (
                    "one row per discipline evaluation; acquisition_max is "
                    "empty for the initial design and non-BO methods; "
                    "failed evaluations have empty outputs and norm_sq"
                ),
            },
            "scatter.csv": {
                "columns": ["iteration"]
                + [f"{n}_normalized" for n in trace.variable_names],
                "notes": "evaluated points mapped to the unit box",
            },
        },
    }
    report.write_summary_json(out / "summary.json", summary)
    return trace, summary


def _comparison_key(config: ExperimentConfig, target: TargetSpec):
    return (
        config.model_kind,
        config.design.names,
        tuple(np.round(config.design.bounds.lower, 12)),
        tuple(np.round(config.design.bounds.upper, 12)),
        tuple(sorted(target.values.items())),
        tuple(sorted(target.weights.items())),
        tuple(sorted(target.scales.items())),
        config.policy.max_evaluations,
    )


def run_comparison(configs: list[ExperimentConfig], out: Path,
                   parallel: bool = False) -> dict:
    """Run member experiments and write the aligned comparison table."""
    if len(configs) < 2:
        raise ConfigError("compare needs at least two configs")
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ConfigError(f"config names must be unique, got {names}")

    keys = []
    for config in configs:
        model = build_model(config)
        target, _ = resolve_target(config, model)
        keys.append(_comparison_key(config, target))
    if len(set(keys)) != 1:
        raise ConfigError(
            "compare requires identical model, design variables, target and "
            "budget across configs"
        )

    out.mkdir(parents=True, exist_ok=True)
    for config in configs:
        config.output_dir = out / config.name

    if parallel:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(len(configs), 4)) as pool:
            traces = list(pool.map(_run_member, configs))
    else:
        traces = [_run_member(config) for config in configs]

    series = [trace.best_norm_series() for trace in traces]
    report.write_comparison_csv(out / "comparison.csv", names, series)
    report.render_comparison_figure(
        out / "comparison.png", names, series, configs[0].policy.norm_epsilon
    )
    summary = {
        "schema_version": CONFIG_SCHEMA_VERSION,
        "methods": {
            name: {
                "method": trace.method,
                "termination_reason": trace.reason.value if trace.reason else None,
                "evaluation_count": trace.n_evaluations,
                "best_norm_sq": trace.incumbent_value,
                "evaluations_to_threshold": trace.evaluations_to_threshold(
                    configs[0].policy.norm_epsilon
                ),
            }
            for name, trace in zip(names, traces)
        },
        "norm_epsilon": configs[0].policy.norm_epsilon,
        "schema": {
            "comparison.csv": {
                "columns": ["evaluation"] + names,
                "notes": (
                    "best residual norm_sq after each evaluation, one column "
                    "per method; blank once a method has stopped"
                ),
            }
        },
    }
    report.write_summary_json(out / "comparison_summary.json", summary)
    return summary


def _run_member(config: ExperimentConfig) -> OptimizationTrace:
    trace, _ = run_experiment(config)
    return trace


def _parse_sweep_arg(text: str) -> np.ndarray:
    try:
        half, samples = text.split(":")
        return default_travel_grid(float(half), int(samples))
    except ValueError as exc:
        raise ConfigError(
            f"--sweep must look like '0.08:33' (half_range:samples): {exc}"
        ) from exc


def _cmd_solve(args) -> int:
    config = load_config(args.config, args.seed, args.out)
    _, summary = run_experiment(config)
    print(json.dumps({
        "name": summary["name"],
        "termination_reason": summary["termination_reason"],
        "evaluation_count": summary["evaluation_count"],
        "best_norm_sq": summary["best"]["norm_sq"],
        "output_dir": str(config.output_dir),
    }, indent=2))
    return 0 if summary["error"] is None else 1


def _cmd_compare(args) -> int:
    configs = [load_config(p, args.seed, None) for p in args.configs]
    out = Path(args.out) if args.out else Path("runs/comparison")
    summary = run_comparison(configs, out, parallel=args.parallel)
    print(json.dumps(summary["methods"], indent=2))
    return 0


def _cmd_kinematics(args) -> int:
    fixture = load_fixture(args.fixture)
    hardpoints = HardpointSet.from_dict(fixture["hardpoints"])
    track = args.track_width or float(fixture.get("track_width", 1.6))

    if args.io_dir:
        payload = run_protocol_request(args.io_dir, hardpoints, track)
        print(json.dumps(payload, indent=2))
        return 0

    if args.sweep:
        grid = _parse_sweep_arg(args.sweep)
    else:
        sweep = fixture.get("sweep", {})
        grid = default_travel_grid(
            float(sweep.get("half_range", 0.08)), int(sweep.get("samples", 33))
        )
    curve = evaluate_kinematics(hardpoints, grid)
    stats = curve_statistics(curve, track)
    print(json.dumps(stats.as_dict(), indent=2))

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "curve.csv", "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["travel_m", "toe_deg", "camber_deg"])
            for row in zip(curve.travel, curve.toe, curve.camber):
                writer.writerow([repr(float(v)) for v in row])
        report.render_curve_figure(out / "curve.png", curve)
        report.write_summary_json(out / "statistics.json", stats.as_dict())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kinverse",
        description=(
            "Inverse design of suspension hardpoints: find geometry whose "
            "kinematic characteristics match a target, by Bayesian "
            "optimization or baseline optimizers."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one experiment config")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--seed", type=int, default=None,
                         help="override the config seed")
    p_solve.add_argument("--out", default=None,
                         help="override the output directory")
    p_solve.set_defaults(func=_cmd_solve)

    p_cmp = sub.add_parser("compare", help="run and compare several configs")
    p_cmp.add_argument("--configs", nargs="+", required=True)
    p_cmp.add_argument("--seed", type=int, default=None,
                       help="override every config seed")
    p_cmp.add_argument("--out", default=None)
    p_cmp.add_argument("--parallel", action="store_true",
                       help="run member experiments in parallel processes")
    p_cmp.set_defaults(func=_cmd_compare)

    p_kin = sub.add_parser(
        "kinematics", help="evaluate the discipline model directly"
    )
    p_kin.add_argument("--fixture", required=True,
                       help="fixture file path, or 'builtin'")
    p_kin.add_argument("--sweep", default=None,
                       help="travel grid as half_range:samples, e.g. 0.08:33")
    p_kin.add_argument("--track-width", type=float, default=None)
    p_kin.add_argument("--out", default=None,
                       help="write curve.csv, curve.png and statistics.json here")
    p_kin.add_argument("--io-dir", default=None,
                       help="serve one input.json -> output.json exchange")
    p_kin.set_defaults(func=_cmd_kinematics)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KinverseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
