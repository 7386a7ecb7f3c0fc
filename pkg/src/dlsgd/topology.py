"""Undirected communication graphs and doubly stochastic gossip matrices.

Nodes are numbered 1..n. Mixing matrices use local-degree (Metropolis)
weights: the weight on edge {i, j} is 1/(1 + max(deg_i, deg_j)) and the
diagonal completes each row to 1, which makes the matrix symmetric doubly
stochastic with second eigenvalue magnitude strictly below 1 on connected
graphs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

MAX_SAMPLE_ATTEMPTS = 1000


class GraphGenerationError(RuntimeError):
    """Random sampling failed to produce a connected graph."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: no self-loops, no duplicate edges."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        norm = set()
        for pair in self.edges:
            i, j = pair
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"edge {pair} outside 1..{self.n}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for i, j in self.edges:
            deg[i - 1] += 1
            deg[j - 1] += 1
        return tuple(deg)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i - 1].append(j)
            adj[j - 1].append(i)
        return tuple(tuple(sorted(a)) for a in adj)


def is_connected(g: Graph) -> bool:
    if g.n == 1:
        return True
    seen = {1}
    queue = deque([1])
    while queue:
        u = queue.popleft()
        for v in g.neighbors[u - 1]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == g.n


def gen_path(n: int) -> Graph:
    """Path graph 1-2-...-n."""
    if n < 1:
        raise ValueError("n must be positive")
    return Graph(n, frozenset((i, i + 1) for i in range(1, n)))


def gen_complete(n: int) -> Graph:
    if n < 1:
        raise ValueError("n must be positive")
    return Graph(n, frozenset((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)))


def gen_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """Connected Erdos-Renyi sample, deterministic in (n, p, seed).

    Each unordered pair is included independently with probability p, with
    one uniform draw per pair in lexicographic order. Disconnected samples
    are redrawn from the sub-seed (seed, attempt), up to MAX_SAMPLE_ATTEMPTS.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if n == 1:
        return Graph(1, frozenset())
    if p == 0.0:
        raise ValueError("p = 0 cannot yield a connected graph for n > 1")

    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    for attempt in range(MAX_SAMPLE_ATTEMPTS):
        rng = np.random.default_rng((seed, attempt))
        draws = rng.random(len(pairs))
        g = Graph(n, frozenset(pair for pair, u in zip(pairs, draws) if u < p))
        if is_connected(g):
            return g
    raise GraphGenerationError(
        f"no connected sample in {MAX_SAMPLE_ATTEMPTS} attempts (n={n}, p={p}); p is too small"
    )


@dataclass(frozen=True)
class MixingMatrix:
    """Symmetric doubly stochastic matrix with cached spectral quantities.

    rho is the magnitude of the second-largest eigenvalue (by magnitude);
    gap_factor = 1/(1 - rho^2) is the constant the consensus error scales with.
    """

    n: int
    w: np.ndarray
    rho: float
    gap_factor: float

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.shape != (self.n, self.n):
            raise ValueError(f"matrix shape {w.shape} does not match n={self.n}")
        if not np.array_equal(w, w.T):
            raise ValueError("mixing matrix must be symmetric")
        if w.min() < 0.0:
            raise ValueError("mixing matrix entries must be non-negative")
        if np.abs(w.sum(axis=1) - 1.0).max() > 1e-12:
            raise ValueError("rows must sum to 1 within 1e-12")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho={self.rho} outside [0, 1)")
        if abs(self.gap_factor - 1.0 / (1.0 - self.rho**2)) > 1e-9 * self.gap_factor:
            raise ValueError("gap_factor inconsistent with rho")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @classmethod
    def from_dense(cls, w: np.ndarray) -> "MixingMatrix":
        """Wrap an externally supplied doubly stochastic matrix (test plumbing)."""
        w = np.asarray(w, dtype=float)
        rho = second_eigenvalue_magnitude(w)
        if rho >= 1.0:
            raise ValueError(f"matrix has |lambda_2| = {rho} >= 1 (disconnected support)")
        return cls(n=w.shape[0], w=w, rho=rho, gap_factor=1.0 / (1.0 - rho**2))


def second_eigenvalue_magnitude(w: np.ndarray) -> float:
    """|lambda_2| of a symmetric stochastic matrix, eigenvalues sorted by magnitude.

    Uses a full symmetric eigendecomposition; returns 0 for the 1x1 matrix,
    which has no second eigenvalue.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("expected a square matrix")
    if w.shape[0] == 1:
        return 0.0
    if np.abs(w - w.T).max() > 1e-12:
        raise ValueError("matrix must be symmetric")
    mags = np.sort(np.abs(np.linalg.eigvalsh(w)))[::-1]
    return float(mags[1])


def metropolis_weights(g: Graph) -> MixingMatrix:
    """Local-degree weight matrix of a connected graph.

    Edge weight 1/(1 + max(deg_i, deg_j)); the diagonal completes each row
    to 1. On a complete graph this reduces to exact uniform averaging.
    """
    if not is_connected(g):
        raise ValueError("graph must be connected")
    n = g.n
    w = np.zeros((n, n))
    deg = g.degrees
    for i, j in g.edges:
        wij = 1.0 / (1 + max(deg[i - 1], deg[j - 1]))
        w[i - 1, j - 1] = wij
        w[j - 1, i - 1] = wij
    for i in range(n):
        diag = 1.0 - (w[i].sum() - w[i, i])
        if diag < -1e-12:
            raise ValueError("row weights exceed 1")  # unreachable for valid degrees
        w[i, i] = max(diag, 0.0)
    rho = second_eigenvalue_magnitude(w)
    return MixingMatrix(n=n, w=w, rho=rho, gap_factor=1.0 / (1.0 - rho**2))


def contraction_check(w: MixingMatrix, y: np.ndarray) -> tuple[float, float]:
    """Evaluate both sides of the gossip contraction ||Y W||_F^2 <= rho^2 ||Y||_F^2.

    Requires every row of y to sum to zero (within 1e-9): the contraction
    only holds on the subspace orthogonal to the all-ones vector.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 2 or y.shape[1] != w.n:
        raise ValueError(f"y must be d x {w.n}")
    if np.abs(y.sum(axis=1)).max() > 1e-9:
        raise ValueError("rows of y must sum to zero")
    lhs = float(np.linalg.norm(y @ w.w) ** 2)
    rhs = float(w.rho**2 * np.linalg.norm(y) ** 2)
    return lhs, rhs


# ---------------------------------------------------------------------------
# text formats


def graph_to_edge_list(g: Graph) -> str:
    """Edge-list text: first line `n m`, then one `i j` line per edge (1-based)."""
    lines = [f"{g.n} {len(g.edges)}"]
    lines += [f"{i} {j}" for i, j in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def graph_from_edge_list(text: str) -> Graph:
    rows = [ln for ln in (s.strip() for s in text.splitlines()) if ln]
    if not rows:
        raise ValueError("empty edge-list text")
    head = rows[0].split()
    if len(head) != 2:
        raise ValueError("header must be `n m`")
    n, m = int(head[0]), int(head[1])
    if len(rows) - 1 != m:
        raise ValueError(f"expected {m} edge lines, found {len(rows) - 1}")
    edges = set()
    for ln in rows[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line: {ln!r}")
        edges.add((int(parts[0]), int(parts[1])))
    g = Graph(n, frozenset(edges))
    if len(g.edges) != m:
        raise ValueError("duplicate edges in edge list")
    if not is_connected(g):
        raise ValueError("edge list describes a disconnected graph")
    return g


def mixing_matrix_to_csv(m: MixingMatrix) -> str:
    """Dense CSV, 17 significant digits per entry (round-trips doubles exactly)."""
    return "\n".join(",".join(f"{v:.17g}" for v in row) for row in m.w) + "\n"


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [ln for ln in (s.strip() for s in text.splitlines()) if ln]
    return np.array([[float(v) for v in ln.split(",")] for ln in rows])
