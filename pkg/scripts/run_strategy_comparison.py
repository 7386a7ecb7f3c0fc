#!/usr/bin/env python3
"""Compare communication strategies at a fixed worker count.

Writes per-strategy aggregate traces and a summary table under --out.
Defaults mirror configs/strategies_n20_er.cfg with five strategies.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dlsgd.harness import compare_strategies, load_config

STRATEGIES = ["every_step", "varying:40", "fixed:50", "fixed:200", "final_only"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=Path(__file__).parents[1] / "configs/strategies_n20_er.cfg")
    ap.add_argument("--strategies", nargs="+", default=STRATEGIES)
    ap.add_argument("--out", type=Path, default=Path("out/strategies"))
    ap.add_argument("--reps", type=int, default=None, help="override run.repetitions")
    args = ap.parse_args()

    cfg = load_config(args.config)
    if args.reps is not None:
        import dataclasses

        cfg = dataclasses.replace(cfg, repetitions=args.reps)
    results = compare_strategies(cfg, args.strategies, out_dir=args.out)
    width = max(len(r.label) for r in results)
    print(f"{'strategy':<{width}}  {'R':>5}  {'final mean gap':>15}  {'stderr':>10}")
    for res in results:
        print(f"{res.label:<{width}}  {res.comm_rounds:>5}  {res.final_mean_gap:>15.6g}  {res.final_stderr:>10.3g}")
    print(f"wrote {args.out}/trace_*.csv and {args.out}/summary.csv")


if __name__ == "__main__":
    main()
