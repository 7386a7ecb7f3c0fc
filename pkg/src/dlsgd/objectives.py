"""Objective oracles: a noisy quadratic and l2-regularized logistic regression.

Both satisfy the two standing model assumptions: the objective is mu-strongly
convex and L-smooth, and the gradient oracle is unbiased with conditional
second moment at most noise_c * ||grad F(x)||^2 + noise_sigma2.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np


class ParseError(ValueError):
    """Malformed dataset text; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Problem:
    """Objective descriptor: value/gradient oracles plus problem constants.

    stoch_gradient(x, rng) draws one noisy gradient from the given stream.
    stoch_gradient_block(X, rngs) evaluates all workers of a d x n iterate
    matrix at once, consuming stream i exactly as a stoch_gradient call on
    column i would; stoch_gradient_many(x, rng, count) stacks repeated draws
    at a single point. Both default to loops over stoch_gradient.
    """

    dim: int
    mu: float
    L: float
    noise_c: float
    noise_sigma2: float
    f_star: float
    x0: np.ndarray
    value: Callable[[np.ndarray], float]
    full_gradient: Callable[[np.ndarray], np.ndarray]
    stoch_gradient: Callable[[np.ndarray, np.random.Generator], np.ndarray]
    stoch_gradient_block: Callable[[np.ndarray, Sequence[np.random.Generator]], np.ndarray] | None = None
    stoch_gradient_many: Callable[[np.ndarray, np.random.Generator, int], np.ndarray] | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.mu <= 0 or self.L < self.mu:
            raise ValueError("need 0 < mu <= L")
        if self.noise_c < 0 or self.noise_sigma2 < 0:
            raise ValueError("noise constants must be non-negative")
        x0 = np.asarray(self.x0, dtype=float)
        if x0.shape != (self.dim,):
            raise ValueError("x0 has wrong dimension")
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)

    @property
    def kappa(self) -> float:
        return self.L / self.mu

    def gradients_block(self, X: np.ndarray, rngs: Sequence[np.random.Generator]) -> np.ndarray:
        if self.stoch_gradient_block is not None:
            return self.stoch_gradient_block(X, rngs)
        return np.stack([self.stoch_gradient(X[:, i], rng) for i, rng in enumerate(rngs)], axis=1)


def quadratic_problem(d: int, c1: float, c2: float) -> Problem:
    """F(x) = ||x||^2 / 2 with multiplicative + additive Gaussian gradient noise.

    Component i of the noisy gradient is x_i * (1 + z1_i) + z2_i with
    z1_i ~ N(0, c1) and z2_i ~ N(0, c2) drawn fresh per call, so the noise
    second moment is exactly c1 * ||grad F(x)||^2 + d * c2.
    """
    if d < 1:
        raise ValueError("d must be positive")
    if c1 < 0 or c2 < 0:
        raise ValueError("noise variances must be non-negative")
    s1, s2 = math.sqrt(c1), math.sqrt(c2)

    def value(x: np.ndarray) -> float:
        return 0.5 * float(x @ x)

    def full_gradient(x: np.ndarray) -> np.ndarray:
        return np.array(x, dtype=float)

    def stoch_gradient(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal((2, d))
        return x * (1.0 + s1 * z[0]) + s2 * z[1]

    def stoch_gradient_block(X: np.ndarray, rngs: Sequence[np.random.Generator]) -> np.ndarray:
        z = np.empty((2, d, len(rngs)))
        for i, rng in enumerate(rngs):
            z[:, :, i] = rng.standard_normal((2, d))
        return X * (1.0 + s1 * z[0]) + s2 * z[1]

    def stoch_gradient_many(x: np.ndarray, rng: np.random.Generator, count: int) -> np.ndarray:
        z = rng.standard_normal((count, 2, d))
        return x[None, :] * (1.0 + s1 * z[:, 0]) + s2 * z[:, 1]

    return Problem(
        dim=d,
        mu=1.0,
        L=1.0,
        noise_c=c1,
        noise_sigma2=d * c2,
        f_star=0.0,
        x0=np.ones(d),
        value=value,
        full_gradient=full_gradient,
        stoch_gradient=stoch_gradient,
        stoch_gradient_block=stoch_gradient_block,
        stoch_gradient_many=stoch_gradient_many,
    )


# ---------------------------------------------------------------------------
# sparse datasets in LIBSVM text format


@dataclass(frozen=True)
class Dataset:
    """Sparse binary-classification data: 1-based feature indices, labels in {0, 1}."""

    n_examples: int
    dim: int
    rows: tuple[tuple[tuple[int, float], ...], ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        if self.n_examples < 1 or self.dim < 1:
            raise ValueError("dataset must be non-empty")
        if len(self.rows) != self.n_examples or len(self.labels) != self.n_examples:
            raise ValueError("rows/labels length mismatch")
        if any(lab not in (0, 1) for lab in self.labels):
            raise ValueError("labels must be 0 or 1")
        for row in self.rows:
            if any(not 1 <= idx <= self.dim for idx, _ in row):
                raise ValueError("feature index out of range")

    @cached_property
    def dense(self) -> np.ndarray:
        a = np.zeros((self.n_examples, self.dim))
        for r, row in enumerate(self.rows):
            for idx, val in row:
                a[r, idx - 1] = val
        a.setflags(write=False)
        return a


def parse_libsvm(text: str | bytes, dim_override: int | None = None) -> Dataset:
    """Parse `label idx:val idx:val ...` lines; labels -1/+1 or 0/1, blank lines skipped.

    The feature dimension is the largest index seen unless dim_override is given.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    rows: list[tuple[tuple[int, float], ...]] = []
    labels: list[int] = []
    max_idx = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        tokens = line.split()
        try:
            raw = float(tokens[0])
        except ValueError:
            raise ParseError(f"non-numeric label {tokens[0]!r}", lineno) from None
        if raw not in (-1.0, 0.0, 1.0):
            raise ParseError(f"label must be -1, 0 or +1, got {tokens[0]!r}", lineno)
        labels.append(1 if raw == 1.0 else 0)
        feats = []
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise ParseError(f"malformed feature token {tok!r}", lineno)
            try:
                idx, val = int(idx_s), float(val_s)
            except ValueError:
                raise ParseError(f"malformed feature token {tok!r}", lineno) from None
            if idx <= 0:
                raise ParseError(f"feature index must be positive, got {idx}", lineno)
            max_idx = max(max_idx, idx)
            feats.append((idx, val))
        rows.append(tuple(feats))
    if not rows:
        raise ParseError("no examples found", 1)
    dim = dim_override if dim_override is not None else max_idx
    if dim < max_idx:
        raise ParseError(f"dimension override {dim} below max feature index {max_idx}", 1)
    if dim < 1:
        raise ParseError("dataset has no features and no dimension override", 1)
    return Dataset(len(rows), dim, tuple(rows), tuple(labels))


def serialize_libsvm(ds: Dataset) -> str:
    lines = []
    for row, lab in zip(ds.rows, ds.labels):
        feats = " ".join(f"{idx}:{val:.17g}" for idx, val in row)
        lines.append(("+1 " if lab == 1 else "-1 ") + feats if feats else ("+1" if lab == 1 else "-1"))
    return "\n".join(lines) + "\n"


def dataset_checksum(ds: Dataset) -> str:
    return hashlib.sha256(serialize_libsvm(ds).encode("ascii")).hexdigest()


# ---------------------------------------------------------------------------
# logistic regression


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def logistic_problem(
    data: Dataset,
    lam: float,
    batch: int = 1,
    f_star: float | None = None,
    cache_path: str | Path | None = None,
) -> Problem:
    """Mean logistic loss over the dataset plus (lam/2) ||x||^2.

    The stochastic gradient samples `batch` examples uniformly with
    replacement. mu = lam; L = lam + max_j ||A_j||^2 / 4 (the sigmoid slope
    is at most 1/4). noise_sigma2 is the exact sampling variance at x0,
    reported with noise_c = 0; the minimum value comes from f_star, the
    cache, or a deterministic full-gradient solve, in that order.
    """
    if lam <= 0:
        raise ValueError("regularization constant must be positive")
    if batch < 1:
        raise ValueError("batch must be positive")
    a = data.dense
    b = np.array(data.labels, dtype=float)
    n_ex, d = a.shape
    L = lam + 0.25 * float((a * a).sum(axis=1).max())
    x0 = np.zeros(d)

    def value(x: np.ndarray) -> float:
        z = a @ x
        return float(np.mean(np.logaddexp(0.0, z) - b * z) + 0.5 * lam * (x @ x))

    def full_gradient(x: np.ndarray) -> np.ndarray:
        p = _sigmoid(a @ x)
        return a.T @ (p - b) / n_ex + lam * x

    def stoch_gradient(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        j = rng.integers(0, n_ex, size=batch)
        rows = a[j]
        p = _sigmoid(rows @ x)
        return rows.T @ (p - b[j]) / batch + lam * x

    if f_star is None and cache_path is not None:
        cached = load_reference_cache(cache_path)
        if cached is not None and cached["checksum"] == dataset_checksum(data) and cached["lam"] == lam:
            f_star = cached["f_star"]
    if f_star is None:
        x_star, f_star = reference_minimizer(data, lam)
        if cache_path is not None:
            save_reference_cache(cache_path, dataset_checksum(data), lam, x_star, f_star)

    # exact second moment of the single-sample gradient noise at x0
    p0 = _sigmoid(a @ x0)
    per_sample = a * (p0 - b)[:, None] + lam * x0[None, :]
    mean_grad = per_sample.mean(axis=0)
    sigma2 = float(((per_sample - mean_grad) ** 2).sum(axis=1).mean()) / batch

    return Problem(
        dim=d,
        mu=lam,
        L=L,
        noise_c=0.0,
        noise_sigma2=sigma2,
        f_star=f_star,
        x0=x0,
        value=value,
        full_gradient=full_gradient,
        stoch_gradient=stoch_gradient,
    )


def reference_minimizer(
    data: Dataset, lam: float, tol: float = 1e-10, max_iter: int = 500_000
) -> tuple[np.ndarray, float]:
    """Deterministic full-gradient descent to gradient norm <= tol."""
    if lam <= 0:
        raise ValueError("regularization constant must be positive")
    a = data.dense
    b = np.array(data.labels, dtype=float)
    n_ex = a.shape[0]
    L = lam + 0.25 * float((a * a).sum(axis=1).max())
    x = np.zeros(a.shape[1])
    for _ in range(max_iter):
        g = a.T @ (_sigmoid(a @ x) - b) / n_ex + lam * x
        if float(np.linalg.norm(g)) <= tol:
            break
        x = x - g / L
    else:
        raise RuntimeError(f"reference solve did not reach tolerance {tol} in {max_iter} iterations")
    z = a @ x
    f = float(np.mean(np.logaddexp(0.0, z) - b * z) + 0.5 * lam * (x @ x))
    return x, f


def load_reference_cache(path: str | Path) -> dict | None:
    path = Path(path)
    if not path.exists():
        return None
    fields: dict = {}
    for line in path.read_text().splitlines():
        key, _, rest = line.partition(",")
        if key == "checksum":
            fields["checksum"] = rest.strip()
        elif key == "lambda":
            fields["lam"] = float(rest)
        elif key == "f_star":
            fields["f_star"] = float(rest)
        elif key == "x_star":
            fields["x_star"] = np.array([float(v) for v in rest.split(",")])
    if {"checksum", "lam", "f_star", "x_star"} - fields.keys():
        return None
    return fields


def save_reference_cache(path: str | Path, checksum: str, lam: float, x_star: np.ndarray, f_star: float) -> None:
    lines = [
        f"checksum,{checksum}",
        f"lambda,{lam:.17g}",
        f"f_star,{f_star:.17g}",
        "x_star," + ",".join(f"{v:.17g}" for v in x_star),
    ]
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# noise-model probes


def noise_moment_estimate(
    p: Problem, x: np.ndarray, samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Monte Carlo check of the gradient-noise model at a point.

    Returns (norm of the mean error, mean squared error norm) over `samples`
    draws; the first estimates the bias (should be ~ 0), the second the noise
    second moment, to compare against noise_c * ||grad F(x)||^2 + noise_sigma2.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    x = np.asarray(x, dtype=float)
    g = p.full_gradient(x)
    err_sum = np.zeros(p.dim)
    sq_sum = 0.0
    remaining = samples
    if p.stoch_gradient_many is not None:
        while remaining:
            k = min(remaining, 100_000)
            e = p.stoch_gradient_many(x, rng, k) - g[None, :]
            err_sum += e.sum(axis=0)
            sq_sum += float((e * e).sum())
            remaining -= k
    else:
        for _ in range(samples):
            e = p.stoch_gradient(x, rng) - g
            err_sum += e
            sq_sum += float(e @ e)
    return float(np.linalg.norm(err_sum / samples)), sq_sum / samples
