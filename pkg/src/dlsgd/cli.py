"""Command-line entry point.

Subcommands: run, compare, sweep, bounds, spectra. Exit codes: 0 success,
2 config error, 3 divergence, 4 dataset/parse error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .engine import DivergenceError
from .harness import ConfigError, ExperimentConfig, bound_curve_rows, bounds_csv, \
    compare_strategies, load_config, run_experiment, spectra_info, speedup_sweep
from .objectives import ParseError

EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_DATA = 4


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("config", help="experiment config file")
    p.add_argument("--reps", type=int, default=None, help="override run.repetitions")
    p.add_argument("--seed", type=int, default=None, help="override run.base_seed")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--record-every", type=int, default=None, help="override record stride")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dlsgd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("run", help="run one experiment and write trace/summary CSVs"))

    p_cmp = sub.add_parser("compare", help="run several strategies with common random numbers")
    _add_common(p_cmp)
    p_cmp.add_argument("--strategies", nargs="+", required=True)

    p_sweep = sub.add_parser("sweep", help="worker-count sweep with R = 2n varying rounds")
    _add_common(p_sweep)
    p_sweep.add_argument("--n", nargs="+", type=int, required=True)
    p_sweep.add_argument("--rounds-per-worker", type=int, default=2)

    p_bounds = sub.add_parser("bounds", help="emit the theoretical gap-bound curve as CSV")
    p_bounds.add_argument("config")
    p_bounds.add_argument("--out", type=Path, default=None)

    p_spec = sub.add_parser("spectra", help="print rho and gap_factor of the configured topology")
    p_spec.add_argument("config")
    return parser


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    if getattr(args, "reps", None) is not None:
        if args.reps < 1:
            raise ConfigError("--reps must be at least 1")
        updates["repetitions"] = args.reps
    if getattr(args, "seed", None) is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        updates["base_seed"] = args.seed
    if getattr(args, "record_every", None) is not None:
        updates["record_every"] = args.record_every
    if getattr(args, "out", None) is not None:
        updates["out_dir"] = str(args.out)
    return dataclasses.replace(cfg, **updates) if updates else cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "run":
            res = run_experiment(cfg)
            print(f"{cfg.strategy}: R={res.comm_rounds} final_mean_gap={res.final_mean_gap:.6g} "
                  f"final_stderr={res.final_stderr:.3g}")
        elif args.command == "compare":
            results = compare_strategies(cfg, args.strategies)
            for res in results:
                print(f"{res.label}: R={res.comm_rounds} final_mean_gap={res.final_mean_gap:.6g} "
                      f"final_stderr={res.final_stderr:.3g}")
        elif args.command == "sweep":
            results = speedup_sweep(cfg, args.n, rounds_per_worker=args.rounds_per_worker)
            for res in results:
                print(f"n={res.label}: R={res.comm_rounds} gap_factor={res.gap_factor:.4g} "
                      f"final_mean_gap={res.final_mean_gap:.6g}")
        elif args.command == "bounds":
            text = bounds_csv(bound_curve_rows(cfg))
            if args.out is not None:
                args.out.mkdir(parents=True, exist_ok=True)
                (args.out / "bounds.csv").write_text(text)
                print(f"wrote {args.out / 'bounds.csv'}")
            else:
                sys.stdout.write(text)
        elif args.command == "spectra":
            info = spectra_info(cfg)
            for key, val in info.items():
                print(f"{key} = {val:.10g}" if isinstance(val, float) else f"{key} = {val}")
    except ParseError as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
