"""Decentralized local SGD: the execution loop and per-run metric traces.

One run holds a d x n iterate matrix X (column i = worker i). Every step each
worker takes a stochastic gradient step; at scheduled iterations the post-step
iterates are averaged through the mixing matrix, X <- (X - eta_t G) W. Worker
i draws from its own stream seeded by (run seed, i), so results do not depend
on evaluation order across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .objectives import Problem
from .schedule import CommSchedule
from .topology import MixingMatrix

DIVERGENCE_NORM = 1e12


class DivergenceError(RuntimeError):
    """Iterates blew up (non-finite entries or Frobenius norm past the guard)."""

    def __init__(self, step: int, norm: float):
        super().__init__(f"iterates diverged at step {step} (||X||_F = {norm:.3e})")
        self.step = step
        self.norm = norm


@dataclass(frozen=True)
class StepSizeRule:
    """eta_t = 2 / (mu * (t + beta)), strictly decreasing in t."""

    mu: float
    beta: float

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.beta < 1:
            raise ValueError("beta must be at least 1")


def step_size(rule: StepSizeRule, t: int) -> float:
    if t < 0:
        raise ValueError("t must be non-negative")
    return 2.0 / (rule.mu * (t + rule.beta))


def min_beta(kappa: float, c: float, n: int, T: int) -> float:
    """Smallest step-size offset under which the general gap bound is valid."""
    if kappa < 1 or c < 0 or n < 1 or T < 1:
        raise ValueError("invalid bound parameters")
    return max(
        9.0 * kappa**2 * c * math.log(1.0 + T / (2.0 * kappa**2)) + 2.0 * kappa * (1.0 + c / n),
        2.0 * kappa**2,
    )


@dataclass
class WorkerField:
    """Mutable run state: iterate matrix, step counter, per-worker streams."""

    X: np.ndarray
    t: int
    streams: list[np.random.Generator]


@dataclass(frozen=True)
class Trace:
    """Per-run metric records at the recorded iterations.

    gap stores the single-run value F(xbar_t) - F*; expectations over noise
    are formed by averaging traces across repetitions.
    """

    t: np.ndarray
    gap: np.ndarray
    consensus: np.ndarray
    grad_sq: np.ndarray
    comms: np.ndarray
    seed: int
    config_hash: str = ""

    CSV_HEADER = "t,gap,consensus,grad_sq,comms,seed"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for i in range(len(self.t)):
            lines.append(
                f"{self.t[i]},{self.gap[i]:.17g},{self.consensus[i]:.17g},"
                f"{self.grad_sq[i]:.17g},{self.comms[i]},{self.seed}"
            )
        return "\n".join(lines) + "\n"


def column_mean(X: np.ndarray) -> np.ndarray:
    """Mean across columns, anchored at column 0 so equal columns average exactly."""
    return X[:, 0] + (X - X[:, :1]).mean(axis=1)


def consensus_distance(X: np.ndarray) -> float:
    """(1/n) sum_i ||x_i - xbar||^2; zero exactly when all columns are equal."""
    xbar = column_mean(X)
    return float(((X - xbar[:, None]) ** 2).sum() / X.shape[1])


def mix_columns(X: np.ndarray, w: np.ndarray) -> np.ndarray:
    """One gossip round X @ W, evaluated on deviations from the column mean.

    Operating on deviations keeps bit-identical columns bit-identical (their
    deviation block is exactly zero) and makes a rank-one averaging matrix
    produce exactly equal columns.
    """
    xbar = column_mean(X)
    dev = X - xbar[:, None]
    out = np.empty_like(X)
    for j in range(X.shape[1]):
        out[:, j] = xbar + dev @ w[:, j]
    return out


def default_record_stride(T: int) -> int:
    return 1 if T <= 10_000 else max(1, T // 1000)


def run(
    problem: Problem,
    w: MixingMatrix,
    s: CommSchedule,
    rule: StepSizeRule,
    T: int,
    seed: int,
    record_every: int | None = None,
    config_hash: str = "",
    step_hook: Callable[[int, np.ndarray], None] | None = None,
) -> Trace:
    """Execute T steps of decentralized local SGD and record metrics.

    Iterate tau is produced by a mixing update exactly when tau is in the
    schedule. Records are taken at t = 0, t = T, and every `record_every`
    steps in between. Deterministic given (inputs, seed); raises
    DivergenceError if the iterates blow up.
    """
    if s.T != T:
        raise ValueError(f"schedule horizon {s.T} does not match T={T}")
    if w.n < 1:
        raise ValueError("need at least one worker")
    if int(seed) != seed or seed < 0:
        raise ValueError("seed must be a non-negative integer")
    stride = default_record_stride(T) if record_every is None else max(1, int(record_every))

    n = w.n
    field_ = WorkerField(
        X=np.repeat(problem.x0[:, None], n, axis=1),
        t=0,
        streams=[np.random.default_rng((seed, i)) for i in range(n)],
    )
    comm_times = frozenset(s.times)
    comms = 0

    rec_t: list[int] = []
    rec_gap: list[float] = []
    rec_cons: list[float] = []
    rec_gsq: list[float] = []
    rec_comms: list[int] = []

    def record(t: int, X: np.ndarray):
        xbar = column_mean(X)
        rec_t.append(t)
        rec_gap.append(problem.value(xbar) - problem.f_star)
        rec_cons.append(consensus_distance(X))
        gsq = 0.0
        for i in range(n):
            gi = problem.full_gradient(X[:, i])
            gsq += float(gi @ gi)
        rec_gsq.append(gsq / n)
        rec_comms.append(comms)

    record(0, field_.X)
    for t in range(T):
        eta = step_size(rule, t)
        G = problem.gradients_block(field_.X, field_.streams)
        X = field_.X - eta * G
        if (t + 1) in comm_times:
            X = mix_columns(X, w.w)
            comms += 1
        field_.X = X
        field_.t = t + 1
        norm = float(np.linalg.norm(X))
        if not math.isfinite(norm) or norm > DIVERGENCE_NORM or not np.isfinite(X).all():
            raise DivergenceError(t + 1, norm)
        if step_hook is not None:
            step_hook(t + 1, X)
        if (t + 1) % stride == 0 or t + 1 == T:
            record(t + 1, X)

    return Trace(
        t=np.array(rec_t, dtype=int),
        gap=np.array(rec_gap),
        consensus=np.array(rec_cons),
        grad_sq=np.array(rec_gsq),
        comms=np.array(rec_comms, dtype=int),
        seed=seed,
        config_hash=config_hash,
    )
