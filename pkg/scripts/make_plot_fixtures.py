#!/usr/bin/env python3
"""Regenerate the committed CSV fixtures consumed by the frontend plot tests.

Three fixture sets under frontend/fixtures/, all deterministic:
  strategies/  five-strategy comparison traces (aggregate schema)
  overlay/     empirical trace plus the matching theoretical bound curve,
               generated with beta >= min_beta so the bound dominates at
               every recorded iteration
  speedup/     worker-count sweep summary table
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dlsgd import engine, objectives, schedule, topology
from dlsgd.bounds import BoundParams, gap_bound_general_curve
from dlsgd.harness import (
    ExperimentConfig,
    ProblemSpec,
    TopologySpec,
    bounds_csv,
    compare_strategies,
    run_experiment,
    speedup_sweep,
)

ROOT = Path(__file__).resolve().parents[1] / "frontend" / "fixtures"
STRATEGIES = ["every_step", "varying:40", "fixed:50", "fixed:200", "final_only"]


def strategies_fixture():
    cfg = ExperimentConfig(
        problem=ProblemSpec(kind="quadratic", d=20, c1=15.0, c2=1.0 / 12.0),
        topology=TopologySpec(kind="er", n=20, p=0.3, seed=1),
        strategy="varying:40",
        T=2000,
        beta=1.0,
        repetitions=30,
        base_seed=0,
        record_every=20,
    )
    compare_strategies(cfg, STRATEGIES, out_dir=ROOT / "strategies")


def overlay_fixture():
    n, T = 8, 1000
    problem = objectives.quadratic_problem(20, 15.0, 1.0 / 12.0)
    beta = engine.min_beta(problem.kappa, problem.noise_c, n, T)
    w = topology.metropolis_weights(topology.gen_complete(n))
    sched = schedule.every_step(T)
    cfg = ExperimentConfig(
        problem=ProblemSpec(kind="quadratic", d=20, c1=15.0, c2=1.0 / 12.0),
        topology=TopologySpec(kind="complete", n=n),
        strategy="every_step",
        T=T,
        beta=beta,
        repetitions=40,
        base_seed=0,
        record_every=10,
    )
    res = run_experiment(cfg, out_dir=ROOT / "overlay")
    params = BoundParams(
        mu=problem.mu, L=problem.L, c=problem.noise_c, sigma2=problem.noise_sigma2,
        n=n, T=T, beta=beta, gap0=problem.value(problem.x0) - problem.f_star,
    )
    curve = gap_bound_general_curve(params, schedule.rho_sequence(sched, w.rho))
    rows = [("t", t, float(curve[t - 1])) for t in range(10, T + 1, 10)]
    (ROOT / "overlay" / "bounds.csv").write_text(bounds_csv(rows))

    by_t = dict(zip(res.t.tolist(), res.mean_gap.tolist()))
    for _, t, rhs in rows:
        assert rhs >= by_t[t], f"bound {rhs} below empirical {by_t[t]} at t={t}"
    print(f"overlay: bound dominates empirical at all {len(rows)} recorded steps")


def speedup_fixture():
    cfg = ExperimentConfig(
        problem=ProblemSpec(kind="quadratic", d=20, c1=15.0, c2=1.0 / 12.0),
        topology=TopologySpec(kind="path", n=4),
        strategy="varying:8",
        T=2000,
        beta=1.0,
        repetitions=30,
        base_seed=0,
        record_every=2000,
    )
    speedup_sweep(cfg, [4, 8, 16], out_dir=ROOT / "speedup")


def main():
    strategies_fixture()
    print("strategies fixture written")
    overlay_fixture()
    speedup_fixture()
    print(f"fixtures under {ROOT}")


if __name__ == "__main__":
    main()
