#!/usr/bin/env python3
"""Strategy comparison for l2-regularized logistic regression on a9a.

Requires data/a9a (see scripts/fetch_a9a.py). The first run solves for the
reference minimum with deterministic full-gradient descent and caches it.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dlsgd.harness import compare_strategies, load_config

STRATEGIES = ["every_step", "varying:40", "fixed:25", "fixed:100", "final_only"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=Path(__file__).parents[1] / "configs/logistic_a9a.cfg")
    ap.add_argument("--strategies", nargs="+", default=STRATEGIES)
    ap.add_argument("--out", type=Path, default=Path("out/logistic"))
    args = ap.parse_args()

    cfg = load_config(args.config)
    results = compare_strategies(cfg, args.strategies, out_dir=args.out)
    for res in results:
        print(f"{res.label}: R={res.comm_rounds} final_mean_gap={res.final_mean_gap:.6g} "
              f"stderr={res.final_stderr:.3g}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
