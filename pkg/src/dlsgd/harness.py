"""Experiment orchestration: configs, repeated seeded runs, aggregation, CSV output.

Configs are flat `key = value` text with dotted section prefixes. One
experiment fixes a problem, one topology sample, a communication strategy and
a horizon, then averages `repetitions` runs seeded base_seed + rep. Strategy
comparisons reuse the topology and the per-repetition seeds (common random
numbers), so zero-noise comparisons agree exactly.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import engine, objectives, schedule, topology
from .bounds import BoundParams, gap_bound_general_curve

TRACE_HEADER = "t,mean_gap,stderr_gap,mean_consensus"
BOUNDS_HEADER = "param,value,rhs"


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration."""


@dataclass(frozen=True)
class ProblemSpec:
    kind: str
    d: int | None = None
    c1: float | None = None
    c2: float | None = None
    dataset_path: str | None = None
    lam: float | None = None
    dimension_override: int | None = None
    batch: int = 1
    fstar_cache: str | None = None


@dataclass(frozen=True)
class TopologySpec:
    kind: str
    n: int
    p: float | None = None
    delta: float | None = None
    seed: int = 0


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemSpec
    topology: TopologySpec
    strategy: str
    T: int
    beta: float
    repetitions: int
    base_seed: int
    record_every: int | None = None
    out_dir: str | None = None

    def config_hash(self) -> str:
        skip = {"out_dir"}
        parts = []
        for prefix, obj in (("problem", self.problem), ("topology", self.topology), ("", self)):
            for name, val in vars(obj).items():
                if name in skip or isinstance(val, (ProblemSpec, TopologySpec)):
                    continue
                parts.append(f"{prefix}.{name}={val!r}" if prefix else f"{name}={val!r}")
        return hashlib.sha256("\n".join(sorted(parts)).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# config parsing

_KEYS = {
    "problem.kind": str,
    "problem.d": int,
    "problem.c1": float,
    "problem.c2": float,
    "problem.dataset_path": str,
    "problem.lambda": float,
    "problem.dimension_override": int,
    "problem.batch": int,
    "problem.fstar_cache": str,
    "topology.kind": str,
    "topology.n": int,
    "topology.p": float,
    "topology.delta": float,
    "topology.seed": int,
    "schedule.strategy": str,
    "run.T": int,
    "run.beta": float,
    "run.repetitions": int,
    "run.base_seed": int,
    "run.record_every": int,
    "output.dir": str,
}

_PROBLEM_KEYS = {
    "quadratic": {"problem.d", "problem.c1", "problem.c2"},
    "logistic": {
        "problem.dataset_path",
        "problem.lambda",
        "problem.dimension_override",
        "problem.batch",
        "problem.fstar_cache",
    },
}
_PROBLEM_REQUIRED = {
    "quadratic": {"problem.d", "problem.c1", "problem.c2"},
    "logistic": {"problem.dataset_path", "problem.lambda"},
}
_TOPOLOGY_KEYS = {
    "path": set(),
    "complete": set(),
    "er": {"topology.p", "topology.delta", "topology.seed"},
}


def parse_config_text(text: str) -> dict[str, str]:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {line!r}")
        key, value = key.strip(), value.strip()
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def load_config(path: str | Path) -> ExperimentConfig:
    """Load and validate an experiment config; unknown or missing keys fail."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    raw = parse_config_text(path.read_text())

    unknown = set(raw) - set(_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    typed: dict = {}
    for key, value in raw.items():
        try:
            typed[key] = _KEYS[key](value)
        except ValueError:
            raise ConfigError(f"key {key}: cannot parse {value!r} as {_KEYS[key].__name__}") from None

    for key in ("problem.kind", "topology.kind", "topology.n", "schedule.strategy",
                "run.T", "run.beta", "run.repetitions", "run.base_seed"):
        if key not in typed:
            raise ConfigError(f"missing required key {key}")

    pkind = typed["problem.kind"]
    if pkind not in _PROBLEM_KEYS:
        raise ConfigError(f"problem.kind must be quadratic or logistic, got {pkind!r}")
    extra = {k for k in typed if k.startswith("problem.") and k != "problem.kind"} - _PROBLEM_KEYS[pkind]
    if extra:
        raise ConfigError(f"keys {sorted(extra)} not valid for problem.kind = {pkind}")
    missing = _PROBLEM_REQUIRED[pkind] - set(typed)
    if missing:
        raise ConfigError(f"problem.kind = {pkind} requires keys {sorted(missing)}")

    tkind = typed["topology.kind"]
    if tkind not in _TOPOLOGY_KEYS:
        raise ConfigError(f"topology.kind must be path, er or complete, got {tkind!r}")
    extra = {k for k in typed if k.startswith("topology.") and k not in ("topology.kind", "topology.n")}
    extra -= _TOPOLOGY_KEYS[tkind]
    if extra:
        raise ConfigError(f"keys {sorted(extra)} not valid for topology.kind = {tkind}")

    n = typed["topology.n"]
    if n < 1:
        raise ConfigError("topology.n must be at least 1")
    p = typed.get("topology.p")
    delta = typed.get("topology.delta")
    if tkind == "er":
        if (p is None) == (delta is None):
            raise ConfigError("er topology requires exactly one of topology.p, topology.delta")
        if delta is not None:
            p = (1.0 + delta) * math.log(n) / n

    if typed["run.repetitions"] < 1:
        raise ConfigError("run.repetitions must be at least 1")
    if typed["run.base_seed"] < 0:
        raise ConfigError("run.base_seed must be non-negative")

    if pkind == "logistic":
        ds_path = Path(typed["problem.dataset_path"])
        if not ds_path.exists():
            raise ConfigError(f"dataset file not found: {ds_path}")

    cfg = ExperimentConfig(
        problem=ProblemSpec(
            kind=pkind,
            d=typed.get("problem.d"),
            c1=typed.get("problem.c1"),
            c2=typed.get("problem.c2"),
            dataset_path=typed.get("problem.dataset_path"),
            lam=typed.get("problem.lambda"),
            dimension_override=typed.get("problem.dimension_override"),
            batch=typed.get("problem.batch", 1),
            fstar_cache=typed.get("problem.fstar_cache"),
        ),
        topology=TopologySpec(kind=tkind, n=n, p=p, delta=delta, seed=typed.get("topology.seed", 0)),
        strategy=typed["schedule.strategy"],
        T=typed["run.T"],
        beta=typed["run.beta"],
        repetitions=typed["run.repetitions"],
        base_seed=typed["run.base_seed"],
        record_every=typed.get("run.record_every"),
        out_dir=typed.get("output.dir"),
    )
    # fail closed on an unusable schedule before any run starts
    try:
        schedule.parse_strategy(cfg.strategy, cfg.T)
    except ValueError as exc:
        raise ConfigError(f"schedule.strategy: {exc}") from None
    return cfg


# ---------------------------------------------------------------------------
# building blocks


def build_problem(spec: ProblemSpec) -> objectives.Problem:
    if spec.kind == "quadratic":
        return objectives.quadratic_problem(spec.d, spec.c1, spec.c2)
    data = objectives.parse_libsvm(Path(spec.dataset_path).read_text(), spec.dimension_override)
    return objectives.logistic_problem(data, spec.lam, batch=spec.batch, cache_path=spec.fstar_cache)


def build_topology(spec: TopologySpec) -> tuple[topology.Graph, topology.MixingMatrix]:
    if spec.kind == "path":
        g = topology.gen_path(spec.n)
    elif spec.kind == "complete":
        g = topology.gen_complete(spec.n)
    else:
        g = topology.gen_erdos_renyi(spec.n, spec.p, spec.seed)
    return g, topology.metropolis_weights(g)


# ---------------------------------------------------------------------------
# aggregation


@dataclass(frozen=True)
class AggregateResult:
    """Repetition averages on the shared record grid, plus spectral metadata."""

    label: str
    t: np.ndarray
    mean_gap: np.ndarray
    stderr_gap: np.ndarray
    mean_consensus: np.ndarray
    final_gaps: np.ndarray
    rho: float
    gap_factor: float
    comm_rounds: int
    config_hash: str

    @property
    def final_mean_gap(self) -> float:
        return float(self.mean_gap[-1])

    @property
    def final_stderr(self) -> float:
        return float(self.stderr_gap[-1])

    def trace_csv(self) -> str:
        lines = [TRACE_HEADER]
        for i in range(len(self.t)):
            lines.append(
                f"{self.t[i]},{self.mean_gap[i]:.17g},{self.stderr_gap[i]:.17g},"
                f"{self.mean_consensus[i]:.17g}"
            )
        return "\n".join(lines) + "\n"


def _stderr(values: np.ndarray) -> np.ndarray:
    reps = values.shape[0]
    if reps == 1:
        return np.zeros(values.shape[1])
    return values.std(axis=0, ddof=1) / math.sqrt(reps)


def _aggregate(traces: list[engine.Trace], label: str, w: topology.MixingMatrix,
               rounds: int, config_hash: str) -> AggregateResult:
    grid = traces[0].t
    for tr in traces[1:]:
        if not np.array_equal(tr.t, grid):
            raise RuntimeError("repetitions recorded on different grids")
    gaps = np.stack([tr.gap for tr in traces])
    cons = np.stack([tr.consensus for tr in traces])
    return AggregateResult(
        label=label,
        t=grid.copy(),
        mean_gap=gaps.mean(axis=0),
        stderr_gap=_stderr(gaps),
        mean_consensus=cons.mean(axis=0),
        final_gaps=gaps[:, -1].copy(),
        rho=w.rho,
        gap_factor=w.gap_factor,
        comm_rounds=rounds,
        config_hash=config_hash,
    )


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> AggregateResult:
    """Run `repetitions` seeded simulations of one config and aggregate them.

    The topology is sampled once per experiment from its own seed; run r uses
    engine seed base_seed + r. Writes trace.csv and summary.csv when an output
    directory is configured.
    """
    problem = build_problem(cfg.problem)
    _, w = build_topology(cfg.topology)
    sched = schedule.parse_strategy(cfg.strategy, cfg.T)
    result = _run_aggregate(cfg, problem, w, sched, cfg.strategy)
    target = out_dir if out_dir is not None else cfg.out_dir
    if target is not None:
        write_results(Path(target), [result], key="strategy")
    return result


def _run_aggregate(cfg, problem, w, sched, label) -> AggregateResult:
    rule = engine.StepSizeRule(mu=problem.mu, beta=cfg.beta)
    chash = cfg.config_hash()
    traces = [
        engine.run(problem, w, sched, rule, cfg.T, cfg.base_seed + rep,
                   record_every=cfg.record_every, config_hash=chash)
        for rep in range(cfg.repetitions)
    ]
    return _aggregate(traces, label, w, sched.comm_count, chash)


def compare_strategies(cfg: ExperimentConfig, strategies: list[str],
                       out_dir: str | Path | None = None) -> list[AggregateResult]:
    """One aggregate per strategy over a shared topology and shared rep seeds.

    All strategies are validated against the horizon before anything runs.
    """
    if not strategies:
        raise ConfigError("need at least one strategy")
    for strat in strategies:
        try:
            schedule.parse_strategy(strat, cfg.T)
        except ValueError as exc:
            raise ConfigError(f"strategy {strat!r}: {exc}") from None
    problem = build_problem(cfg.problem)
    _, w = build_topology(cfg.topology)
    results = []
    for strat in strategies:
        run_cfg = ExperimentConfig(
            problem=cfg.problem, topology=cfg.topology, strategy=strat, T=cfg.T,
            beta=cfg.beta, repetitions=cfg.repetitions, base_seed=cfg.base_seed,
            record_every=cfg.record_every, out_dir=cfg.out_dir,
        )
        sched = schedule.parse_strategy(strat, cfg.T)
        results.append(_run_aggregate(run_cfg, problem, w, sched, strat))
    target = out_dir if out_dir is not None else cfg.out_dir
    if target is not None:
        write_results(Path(target), results, key="strategy")
    return results


def speedup_sweep(cfg: ExperimentConfig, n_values: list[int], rounds_per_worker: int = 2,
                  out_dir: str | Path | None = None) -> list[AggregateResult]:
    """Scale the worker count at R = rounds_per_worker * n varying-interval rounds."""
    if not n_values:
        raise ConfigError("need at least one n value")
    for n in n_values:
        if n < 1:
            raise ConfigError("worker counts must be positive")
        r = rounds_per_worker * n
        if r * r > 2 * cfg.T:
            raise ConfigError(f"R = {r} exceeds sqrt(2T) for n = {n}, T = {cfg.T}")
    results = []
    for n in sorted(n_values):
        tspec = TopologySpec(kind=cfg.topology.kind, n=n, p=cfg.topology.p,
                             delta=cfg.topology.delta, seed=cfg.topology.seed)
        if tspec.kind == "er" and tspec.delta is not None:
            tspec = TopologySpec(kind="er", n=n, p=(1.0 + tspec.delta) * math.log(n) / n,
                                 delta=tspec.delta, seed=tspec.seed)
        strat = f"varying:{rounds_per_worker * n}"
        run_cfg = ExperimentConfig(
            problem=cfg.problem, topology=tspec, strategy=strat, T=cfg.T, beta=cfg.beta,
            repetitions=cfg.repetitions, base_seed=cfg.base_seed,
            record_every=cfg.record_every, out_dir=cfg.out_dir,
        )
        problem = build_problem(run_cfg.problem)
        _, w = build_topology(run_cfg.topology)
        sched = schedule.parse_strategy(strat, cfg.T)
        results.append(_run_aggregate(run_cfg, problem, w, sched, str(n)))
    target = out_dir if out_dir is not None else cfg.out_dir
    if target is not None:
        write_results(Path(target), results, key="n")
    return results


# ---------------------------------------------------------------------------
# bound curves and spectra


def bound_curve_rows(cfg: ExperimentConfig) -> list[tuple[str, int, float]]:
    """(param, value, rhs) rows of the general gap bound along the record grid."""
    problem = build_problem(cfg.problem)
    _, w = build_topology(cfg.topology)
    sched = schedule.parse_strategy(cfg.strategy, cfg.T)
    params = BoundParams(
        mu=problem.mu, L=problem.L, c=problem.noise_c, sigma2=problem.noise_sigma2,
        n=cfg.topology.n, T=cfg.T, beta=cfg.beta,
        gap0=problem.value(problem.x0) - problem.f_star,
    )
    curve = gap_bound_general_curve(params, schedule.rho_sequence(sched, w.rho))
    stride = cfg.record_every or engine.default_record_stride(cfg.T)
    rows = [("t", t, float(curve[t - 1])) for t in range(1, cfg.T + 1) if t % stride == 0 or t == cfg.T]
    return rows


def bounds_csv(rows: list[tuple[str, int, float]]) -> str:
    lines = [BOUNDS_HEADER] + [f"{p},{v},{r:.17g}" for p, v, r in rows]
    return "\n".join(lines) + "\n"


def spectra_info(cfg: ExperimentConfig) -> dict:
    g, w = build_topology(cfg.topology)
    sched = schedule.parse_strategy(cfg.strategy, cfg.T)
    return {
        "n": g.n,
        "edges": len(g.edges),
        "rho": w.rho,
        "gap_factor": w.gap_factor,
        "comm_rounds": sched.comm_count,
    }


# ---------------------------------------------------------------------------
# file output


def _slug(label: str) -> str:
    return label.replace(":", "_")


def write_results(out_dir: Path, results: list[AggregateResult], key: str) -> None:
    """Write per-result trace CSVs and one summary.csv; overwrites deterministically."""
    out_dir.mkdir(parents=True, exist_ok=True)
    if len(results) == 1:
        (out_dir / "trace.csv").write_text(results[0].trace_csv())
    else:
        for res in results:
            (out_dir / f"trace_{_slug(res.label)}.csv").write_text(res.trace_csv())
    lines = [f"{key},R,rho,gap_factor,final_mean_gap,final_stderr"]
    for res in results:
        lines.append(
            f"{res.label},{res.comm_rounds},{res.rho:.17g},{res.gap_factor:.17g},"
            f"{res.final_mean_gap:.17g},{res.final_stderr:.17g}"
        )
    (out_dir / "summary.csv").write_text("\n".join(lines) + "\n")
