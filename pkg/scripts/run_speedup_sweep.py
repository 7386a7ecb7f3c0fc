#!/usr/bin/env python3
"""Worker-count scaling with R = 2n growing-interval communication rounds."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dlsgd.harness import load_config, speedup_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=Path(__file__).parents[1] / "configs/speedup_path.cfg")
    ap.add_argument("--n", nargs="+", type=int, default=[4, 8, 16])
    ap.add_argument("--out", type=Path, default=Path("out/speedup"))
    ap.add_argument("--reps", type=int, default=None, help="override run.repetitions")
    args = ap.parse_args()

    cfg = load_config(args.config)
    if args.reps is not None:
        import dataclasses

        cfg = dataclasses.replace(cfg, repetitions=args.reps)
    rows = speedup_sweep(cfg, args.n, out_dir=args.out)
    print(f"{'n':>4}  {'R':>4}  {'gap_factor':>10}  {'final mean gap':>15}  {'stderr':>10}")
    for res in rows:
        print(f"{res.label:>4}  {res.comm_rounds:>4}  {res.gap_factor:>10.4g}  "
              f"{res.final_mean_gap:>15.6g}  {res.final_stderr:>10.3g}")
    print(f"wrote {args.out}/summary.csv")


if __name__ == "__main__":
    main()
