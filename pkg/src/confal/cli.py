"""Command-line entry point: ``falsify run | check | bench``.

Exit codes: 0 on completion (whatever the falsification rate), 2 on a
configuration or input error, 3 when a reported falsification fails its
independent re-check.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ConfalError, SoundnessViolation
from .fitness import METHODS
from .harness import ExperimentConfig, aggregate, run_experiment
from .models import builtin_names
from .param import SearchSpace
from .signal import Signal
from .stl import robustness
from .suite import load_formula, run_suite, summary_lines

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOUNDNESS = 3


def _add_run_args(p: argparse.ArgumentParser):
    p.add_argument("--model", required=True, help=f"built-in model: {', '.join(builtin_names())}")
    p.add_argument("--spec", required=True, help="specification phi: .stl file, bundled name, or inline formula")
    p.add_argument("--constraint", help="input constraint psi (same forms as --spec); omitted means true")
    p.add_argument("--method", choices=METHODS, default="lm")
    p.add_argument("--base", type=float, default=10.0)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--rmax-samples", type=int, default=20)
    p.add_argument("--rmax-factor", type=float, default=1.5)
    p.add_argument("--rmax-psi", type=float, help="fix Rmax for the constraint instead of estimating it")
    p.add_argument("--rmax-phi", type=float, help="fix Rmax for the spec instead of estimating it")
    p.add_argument("--optimizer", choices=("cmaes", "random"), default="cmaes")
    p.add_argument("--sigma0-frac", type=float, default=0.3, help="initial CMA-ES step as a fraction of each range")
    p.add_argument("--popsize", type=int, help="override the CMA-ES population size")
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-evals", type=int)
    p.add_argument("--max-sims", type=int, default=300)
    p.add_argument("--timeout-s", type=int)
    p.add_argument("--k", type=int, default=5, help="control points per input channel")
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--horizon", type=float, default=30.0)
    p.add_argument("--space", type=Path, help="search-space file, one 'name, min, max, k' line per input")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent trials")
    p.add_argument("--out", type=Path, help="results CSV; aggregate goes to <stem>.json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="falsify", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="repeated falsification trials for one configuration")
    _add_run_args(run)

    check = sub.add_parser("check", help="print the robustness of a formula on a CSV trace")
    check.add_argument("--signal", required=True, type=Path)
    check.add_argument("--formula", required=True)

    bench = sub.add_parser("bench", help="run the bundled benchmark suite under every method")
    bench.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    bench.add_argument("--reps", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--max-sims", type=int, default=300)
    bench.add_argument("--out", type=Path, help="directory for per-run CSV and JSON files")
    return parser


def _cmd_run(args) -> int:
    space = None
    if args.space is not None:
        space = SearchSpace.from_text(args.space.read_text(), args.horizon, args.step)
    cfg = ExperimentConfig(
        model=args.model,
        spec=load_formula(args.spec),
        constraint=load_formula(args.constraint) if args.constraint else None,
        method=args.method,
        k=args.k,
        horizon=args.horizon,
        step=args.step,
        base=args.base,
        epsilon=args.epsilon,
        rmax_samples=args.rmax_samples,
        rmax_factor=args.rmax_factor,
        rmax_psi=args.rmax_psi,
        rmax_phi=args.rmax_phi,
        optimizer=args.optimizer,
        sigma0_frac=args.sigma0_frac,
        popsize=args.popsize,
        max_evals=args.max_evals,
        max_sims=args.max_sims,
        timeout_s=args.timeout_s,
        reps=args.reps,
        seed=args.seed,
        space=space,
    )
    records = run_experiment(cfg, args.out, jobs=args.jobs)
    agg = aggregate(records)
    print(json.dumps(agg.to_json()))
    return EXIT_OK


def _cmd_check(args) -> int:
    s = Signal.from_csv(args.signal)
    print(repr(robustness(s, load_formula(args.formula))))
    return EXIT_OK


def _cmd_bench(args) -> int:
    results = run_suite(args.methods, reps=args.reps, seed=args.seed,
                        max_sims=args.max_sims, out_dir=args.out)
    for line in summary_lines(results):
        print(line)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "check": _cmd_check, "bench": _cmd_bench}[args.command]
    try:
        return handler(args)
    except SoundnessViolation as exc:
        print(f"falsify: soundness violation: {exc}", file=sys.stderr)
        return EXIT_SOUNDNESS
    except (ConfalError, ValueError, OSError) as exc:
        print(f"falsify: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
