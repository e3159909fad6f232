"""Command-line front end.

Subcommands: distance, flow, color-transfer, density, bench, and rerun (which
replays a previously written run manifest). Machine-readable output goes to
stdout, diagnostics to stderr. Exit codes: 0 ok, 2 argument errors, 3 data
errors, 4 diverged flow.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from statistics import median

import numpy as np

from . import __version__
from .energy import parse_energy
from .errors import (
    DegenerateWeightsError,
    EmptyInputError,
    FlowDivergedError,
    MeasureFormatError,
    MeasureValidationError,
    PpmFormatError,
)
from .estimators import METHODS, EstimatorConfig, estimate
from .flows import FlowConfig, color_transfer, run_flow
from .measures import load_measure, save_measure
from .ppm import read_ppm, write_ppm
from .reference import slicing_density_grid

_DATA_ERRORS = (
    MeasureFormatError,
    MeasureValidationError,
    EmptyInputError,
    PpmFormatError,
    DegenerateWeightsError,
    OSError,
)

EXIT_OK = 0
EXIT_ARGS = 2
EXIT_DATA = 3
EXIT_DIVERGED = 4


def _cli_method(name: str) -> str:
    return name.replace("-", "_")


def _default_threads() -> int:
    env = os.environ.get("EBSW_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _add_estimator_flags(parser: argparse.ArgumentParser, with_method: bool = True) -> None:
    if with_method:
        parser.add_argument(
            "--method",
            required=True,
            choices=[m.replace("_", "-") for m in METHODS],
            help="distance estimator",
        )
    parser.add_argument("--p", type=float, default=2.0, help="order of the distance")
    parser.add_argument(
        "-L",
        "--projections",
        type=int,
        default=100,
        dest="projections",
        help="number of projections / chain length",
    )
    parser.add_argument(
        "--energy", default="e", help="energy spec: 'e' or 'q:<q>[:<eps>]'"
    )
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")
    parser.add_argument("--kappa", type=float, default=10.0, help="random-walk concentration")
    parser.add_argument(
        "-T", "--iters", type=int, default=100, dest="iters", help="ascent iterations"
    )
    parser.add_argument("--eta", type=float, default=0.1, help="ascent step size")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="cap on worker threads (default: EBSW_THREADS or all cores)",
    )


def _add_flow_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--steps", type=int, default=500, help="Euler steps")
    parser.add_argument("--gamma", type=float, default=0.01, help="Euler step size")
    parser.add_argument(
        "--eval-every", type=int, default=None, help="checkpoint interval (default: steps/5)"
    )
    parser.add_argument(
        "--grad-mode",
        choices=["conventional", "parameter-copy"],
        default="conventional",
        help="gradient estimator for the importance-weighted method",
    )
    parser.add_argument(
        "--seed-policy",
        choices=["fresh-per-step", "fixed"],
        default="fresh-per-step",
        help="direction resampling policy across steps",
    )


def _estimator_config(args: argparse.Namespace, method: str | None = None) -> EstimatorConfig:
    return EstimatorConfig(
        method=method or _cli_method(args.method),
        p=args.p,
        num_projections=args.projections,
        energy=parse_energy(args.energy),
        max_sw_iters=args.iters,
        max_sw_step=args.eta,
        rmh_kappa=args.kappa,
        seed=args.seed,
    )


def _flow_config(args: argparse.Namespace, method: str | None = None) -> FlowConfig:
    eval_every = args.eval_every
    if eval_every is None:
        eval_every = max(1, args.steps // 5)
    return FlowConfig(
        steps=args.steps,
        step_size=args.gamma,
        estimator=_estimator_config(args, method),
        gradient_mode=args.grad_mode.replace("-", "_"),
        eval_every=min(eval_every, args.steps),
        seed_policy=args.seed_policy.replace("-", "_"),
    )


def _manifest(command: str, argv: list[str], config: dict, outputs: dict, elapsed_ms: float) -> dict:
    return {
        "command": command,
        "version": __version__,
        "argv": list(argv),
        "config": config,
        "seed": config.get("seed"),
        "elapsed_ms": elapsed_ms,
        "outputs": outputs,
    }


def _write_manifest(path, manifest: dict) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _estimator_config_dict(cfg: EstimatorConfig, threads: int) -> dict:
    return {
        "method": cfg.method.replace("_", "-"),
        "p": cfg.p,
        "projections": cfg.num_projections,
        "energy": cfg.energy.label(),
        "max_sw_iters": cfg.max_sw_iters,
        "max_sw_step": cfg.max_sw_step,
        "rmh_kappa": cfg.rmh_kappa,
        "seed": cfg.seed,
        "threads": threads,
    }


def cmd_distance(args: argparse.Namespace, argv: list[str]) -> int:
    cfg = _estimator_config(args)
    threads = args.threads if args.threads is not None else _default_threads()
    mu = load_measure(args.mu)
    nu = load_measure(args.nu)
    start = time.perf_counter()
    value = estimate(mu, nu, cfg, threads=threads)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    config = _estimator_config_dict(cfg, threads)
    config.update({"mu": str(args.mu), "nu": str(args.nu)})
    manifest = _manifest("distance", argv, config, {"value": value}, elapsed_ms)
    manifest["method"] = config["method"]
    manifest["value"] = value
    print(json.dumps(manifest))
    if args.manifest:
        _write_manifest(args.manifest, manifest)
    return EXIT_OK


def cmd_flow(args: argparse.Namespace, argv: list[str]) -> int:
    cfg = _flow_config(args)
    source = load_measure(args.source)
    target = load_measure(args.target)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    final, trace = run_flow(source, target, cfg)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    trace.write_csv(out_dir / "trace.csv")
    save_measure(final, out_dir / "final.csv")
    config = _estimator_config_dict(cfg.estimator, 1)
    config.update(
        {
            "source": str(args.source),
            "target": str(args.target),
            "steps": cfg.steps,
            "gamma": cfg.step_size,
            "eval_every": cfg.eval_every,
            "grad_mode": cfg.gradient_mode,
            "seed_policy": cfg.seed_policy,
            "out": str(args.out),
        }
    )
    outputs = {
        "trace": str(out_dir / "trace.csv"),
        "final": str(out_dir / "final.csv"),
        "initial_w2": trace.initial_w2(),
        "final_w2": trace.final_w2(),
    }
    manifest = _manifest("flow", argv, config, outputs, elapsed_ms)
    _write_manifest(out_dir / "manifest.json", manifest)
    print(json.dumps(manifest))
    return EXIT_OK


def cmd_color_transfer(args: argparse.Namespace, argv: list[str]) -> int:
    cfg = _flow_config(args)
    source = read_ppm(args.source)
    target = read_ppm(args.target)
    start = time.perf_counter()
    out_img = color_transfer(source, target, cfg)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    write_ppm(args.out, out_img)
    config = _estimator_config_dict(cfg.estimator, 1)
    config.update(
        {
            "source": str(args.source),
            "target": str(args.target),
            "steps": cfg.steps,
            "gamma": cfg.step_size,
            "eval_every": cfg.eval_every,
            "grad_mode": cfg.gradient_mode,
            "seed_policy": cfg.seed_policy,
            "out": str(args.out),
        }
    )
    manifest = _manifest("color-transfer", argv, config, {"image": str(args.out)}, elapsed_ms)
    _write_manifest(str(args.out) + ".manifest.json", manifest)
    print(json.dumps(manifest))
    return EXIT_OK


def cmd_density(args: argparse.Namespace, argv: list[str]) -> int:
    mu = load_measure(args.mu)
    nu = load_measure(args.nu)
    f = parse_energy(args.energy)
    start = time.perf_counter()
    grid = slicing_density_grid(mu, nu, f, args.p, args.grid_size)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    if args.out:
        grid.write_csv(args.out)
    else:
        sys.stdout.write("angle,unnormalized,normalized\n")
        for a, u, s in zip(grid.angles, grid.unnormalized, grid.normalized):
            sys.stdout.write(f"{repr(float(a))},{repr(float(u))},{repr(float(s))}\n")
    if args.manifest:
        config = {
            "mu": str(args.mu),
            "nu": str(args.nu),
            "energy": args.energy,
            "p": args.p,
            "grid_size": args.grid_size,
            "seed": None,
        }
        outputs = {"csv": str(args.out) if args.out else "<stdout>"}
        _write_manifest(args.manifest, _manifest("density", argv, config, outputs, elapsed_ms))
    return EXIT_OK


def run_benchmark(
    n: int,
    d: int,
    projections: int,
    methods: list[str],
    repeats: int,
    seed: int,
    threads: int = 1,
) -> dict:
    """Median wall times per method on a seeded Gaussian fixture pair."""
    from .measures import EmpiricalMeasure

    fixture_rng = np.random.default_rng(seed)
    mu = EmpiricalMeasure(fixture_rng.standard_normal((n, d)))
    nu = EmpiricalMeasure(fixture_rng.standard_normal((n, d)) + 1.0)
    results = {}
    for method in methods:
        cfg = EstimatorConfig(method=method, num_projections=projections, seed=seed)
        times = []
        value = None
        for _ in range(repeats):
            start = time.perf_counter()
            value = estimate(mu, nu, cfg, threads=threads)
            times.append((time.perf_counter() - start) * 1000.0)
        results[method] = {"median_ms": median(times), "value": value}
    report = {"n": n, "d": d, "projections": projections, "repeats": repeats, "results": results}
    if "sw" in results and "is_ebsw" in results:
        report["is_ebsw_over_sw"] = results["is_ebsw"]["median_ms"] / results["sw"]["median_ms"]
    return report


def cmd_bench(args: argparse.Namespace, argv: list[str]) -> int:
    methods = [_cli_method(m) for m in args.methods.split(",") if m]
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    threads = args.threads if args.threads is not None else 1
    start = time.perf_counter()
    report = run_benchmark(
        args.n, args.d, args.projections, methods, args.repeats, args.seed, threads
    )
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    config = {
        "n": args.n,
        "d": args.d,
        "projections": args.projections,
        "methods": args.methods,
        "repeats": args.repeats,
        "seed": args.seed,
        "threads": threads,
    }
    manifest = _manifest("bench", argv, config, {"report": report}, elapsed_ms)
    print(json.dumps(manifest))
    if args.manifest:
        _write_manifest(args.manifest, manifest)
    return EXIT_OK


def cmd_rerun(args: argparse.Namespace, argv: list[str]) -> int:
    with open(args.manifest_path, "r", encoding="ascii") as fh:
        manifest = json.load(fh)
    recorded = manifest.get("argv")
    if not recorded:
        raise ValueError(f"{args.manifest_path}: manifest has no argv to replay")
    return main(recorded)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ebsw",
        description="Sliced Wasserstein distances with energy-weighted slicing distributions",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_dist = sub.add_parser("distance", help="compute a distance between two point clouds")
    _add_estimator_flags(p_dist)
    p_dist.add_argument("--mu", required=True, help="first point-cloud CSV")
    p_dist.add_argument("--nu", required=True, help="second point-cloud CSV")
    p_dist.add_argument("--manifest", default=None, help="also write the run manifest here")
    p_dist.set_defaults(func=cmd_distance)

    p_flow = sub.add_parser("flow", help="run a gradient flow between two point clouds")
    _add_estimator_flags(p_flow)
    _add_flow_flags(p_flow)
    p_flow.add_argument("--source", required=True, help="source point-cloud CSV")
    p_flow.add_argument("--target", required=True, help="target point-cloud CSV")
    p_flow.add_argument("--out", required=True, help="output directory")
    p_flow.set_defaults(func=cmd_flow)

    p_ct = sub.add_parser("color-transfer", help="transfer the color palette of one image onto another")
    _add_estimator_flags(p_ct)
    _add_flow_flags(p_ct)
    p_ct.add_argument("--source", required=True, help="source image (binary PPM)")
    p_ct.add_argument("--target", required=True, help="target image (binary PPM)")
    p_ct.add_argument("--out", required=True, help="output image path (binary PPM)")
    p_ct.set_defaults(func=cmd_color_transfer)

    p_den = sub.add_parser("density", help="export the slicing density on an angular grid (d=2)")
    p_den.add_argument("--mu", required=True)
    p_den.add_argument("--nu", required=True)
    p_den.add_argument("--energy", default="e")
    p_den.add_argument("--p", type=float, default=2.0)
    p_den.add_argument("-K", "--grid-size", type=int, default=360, dest="grid_size")
    p_den.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p_den.add_argument("--manifest", default=None)
    p_den.set_defaults(func=cmd_density)

    p_bench = sub.add_parser("bench", help="time the estimators on a seeded fixture")
    p_bench.add_argument("--n", type=int, default=1000)
    p_bench.add_argument("--d", type=int, default=3)
    p_bench.add_argument("-L", "--projections", type=int, default=100, dest="projections")
    p_bench.add_argument("--methods", default="sw,is-ebsw")
    p_bench.add_argument("--repeats", type=int, default=20)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--threads", type=int, default=None)
    p_bench.add_argument("--manifest", default=None)
    p_bench.set_defaults(func=cmd_bench)

    p_rerun = sub.add_parser("rerun", help="replay a run manifest")
    p_rerun.add_argument("manifest_path")
    p_rerun.set_defaults(func=cmd_rerun)

    return parser


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except FlowDivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
