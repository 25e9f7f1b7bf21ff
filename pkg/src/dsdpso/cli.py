"""Command line interface: batch experiments, single runs, and the function table."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .dispersion import INITIAL_VELOCITIES, RELOCATION_POLICIES, DispersionConfig
from .errors import ConfigError
from .harness import emit_results, load_config, run_experiment
from .objectives import describe_functions
from .optimizers import ALGORITHMS, OptimizerConfig, run_config
from .swarm import DISPERSED_MODES


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsdpso",
                                     description="Benchmark harness for dispersion PSO and baselines")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a batch of experiments from a config file")
    p_run.add_argument("--config", required=True, help="path to the experiment config file")
    p_run.add_argument("--out", default=None, help="output directory (overrides the config)")
    p_run.add_argument("--runs", type=int, default=None, help="runs per experiment (overrides the config)")
    p_run.add_argument("--seed", type=int, default=None, help="master seed (overrides the config)")
    p_run.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p_run.set_defaults(func=_cmd_run)

    p_single = sub.add_parser("single", help="run one algorithm on one function once")
    p_single.add_argument("--algo", required=True, choices=ALGORITHMS)
    p_single.add_argument("--function", required=True)
    p_single.add_argument("--dim", required=True, type=int)
    p_single.add_argument("--pop", type=int, default=20)
    p_single.add_argument("--iters", type=int, default=3000)
    p_single.add_argument("--seed", type=int, default=0)
    p_single.add_argument("--period", type=int, default=30, help="iterations between dispersion events")
    p_single.add_argument("--rate", type=float, default=0.45, help="fraction of the swarm relocated")
    p_single.add_argument("--archive", type=int, default=100, help="external archive capacity")
    p_single.add_argument("--policy", choices=RELOCATION_POLICIES, default="hybrid")
    p_single.add_argument("--init-velocity", choices=INITIAL_VELOCITIES, default="zero")
    p_single.add_argument("--post-regime", choices=DISPERSED_MODES, default="eq4")
    p_single.add_argument("--out", default=None, help="directory for the run's curve file")
    p_single.set_defaults(func=_cmd_single)

    p_list = sub.add_parser("list-functions", help="print the benchmark function table")
    p_list.set_defaults(func=_cmd_list_functions)
    return parser


def _cmd_run(args) -> int:
    spec = load_config(args.config)
    if args.out is not None:
        spec.out_dir = args.out
    if args.runs is not None:
        spec.runs = args.runs
        if spec.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {spec.runs}")
    if args.seed is not None:
        spec.master_seed = args.seed
        if spec.master_seed < 0:
            raise ConfigError(f"seed must be >= 0, got {spec.master_seed}")
    if args.no_plots:
        spec.render_plots = False

    records, stats, failures = run_experiment(spec)
    written = emit_results(records, stats, spec.out_dir, emit_curves=spec.emit_curves)
    metadata = {
        "master_seed": spec.master_seed,
        "runs": spec.runs,
        "experiments": [label for label, _ in spec.experiments],
        "p_value_semantics": ("two-sided rank-sum test of each algorithm's final bests against the "
                              "dsdpso finals on the same function and dimension; 'na' where no "
                              "comparison applies"),
        "failures": [{"experiment": label, "run": r, "error": msg} for label, r, msg in failures],
    }
    meta_path = Path(spec.out_dir) / "metadata.json"
    meta_path.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(meta_path)

    if spec.render_plots and records:
        from .plotting import render_figures  # matplotlib import deferred until needed

        written.extend(render_figures(records, spec.out_dir))

    for row in sorted(stats, key=lambda s: (s.function, s.dim, s.algo)):
        p = "na" if row.p_value is None else f"{row.p_value:.5e}"
        print(f"{row.algo:8s} {row.function:4s} dim={row.dim:<3d} runs={row.n_runs:<3d} "
              f"mean={row.mean:.5e} std={row.std_dev:.5e} p={p}")
    print(f"wrote {len(written)} files under {spec.out_dir}")
    for label, r, msg in failures:
        print(f"FAILED {label} run {r}: {msg}", file=sys.stderr)
    return 1 if failures else 0


def _cmd_single(args) -> int:
    dispersion = DispersionConfig(
        period=args.period,
        rate=args.rate,
        archive_capacity=args.archive,
        policy=args.policy,
        initial_velocity=args.init_velocity,
        post_regime=args.post_regime,
    )
    cfg = OptimizerConfig(
        algo=args.algo,
        function=args.function,
        dim=args.dim,
        m=args.pop,
        max_iter=args.iters,
        seed=args.seed,
        dispersion=dispersion,
    )
    record = run_config(cfg)
    print(f"algo={record.algo} function={record.function} dim={record.dim} seed={record.seed}")
    print(f"final_best={record.final_best:.5e} evals={record.evals_used}")
    if args.out is not None:
        from .harness import compute_stats

        paths = emit_results([record], compute_stats([record]), args.out)
        print(f"wrote {len(paths)} files under {args.out}")
    return 0


def _cmd_list_functions(args) -> int:
    print(f"{'id':4s} {'name':26s} {'interval':22s} optimum")
    for fid, name, (lo, hi), optimum in describe_functions():
        print(f"{fid:4s} {name:26s} [{lo:g}, {hi:g}]{'':6s} {optimum:g}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures: IO, numerical, interrupted runs
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
