"""Closed-form upper bounds on the expected optimality gap of the mean iterate.

All bounds share the first two terms, beta^2 * gap0 / T^2 + 2 L sigma^2 /
(n mu^2 T); they differ in the consensus penalty, which depends on how often
and how well the workers mix. gap_bound_general takes the full per-iteration
contraction sequence; the fixed- and varying-interval forms are its closed
upper bounds for those two schedule families.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import min_beta


@dataclass(frozen=True)
class BoundParams:
    """Constants entering the gap bounds; gap0 is F(xbar_0) - F*.

    kappa defaults to L/mu. beta below min_beta(kappa, c, n, T) makes the
    general bound inapplicable; that is flagged by valid_offset(), not
    enforced, so exploratory evaluations stay possible.
    """

    mu: float
    L: float
    c: float
    sigma2: float
    n: int
    T: int
    beta: float
    gap0: float
    kappa: float | None = None

    def __post_init__(self):
        if self.mu <= 0 or self.L < self.mu:
            raise ValueError("need 0 < mu <= L")
        if min(self.c, self.sigma2, self.gap0) < 0:
            raise ValueError("c, sigma2 and gap0 must be non-negative")
        if self.n < 1 or self.T < 1:
            raise ValueError("n and T must be positive")
        if self.beta < 1:
            raise ValueError("beta must be at least 1")
        ratio = self.L / self.mu
        if self.kappa is None:
            object.__setattr__(self, "kappa", ratio)
        elif abs(self.kappa - ratio) > 1e-12 * max(1.0, ratio):
            raise ValueError("kappa inconsistent with L/mu")

    def valid_offset(self) -> bool:
        return self.beta >= min_beta(self.kappa, self.c, self.n, self.T)

    def _base_terms(self, T: int) -> float:
        return (
            self.beta**2 * self.gap0 / T**2
            + 2.0 * self.L * self.sigma2 / (self.n * self.mu**2 * T)
        )


def _check_rho_seq(p: BoundParams, rho_seq: np.ndarray) -> np.ndarray:
    seq = np.asarray(rho_seq, dtype=float)
    if seq.shape != (p.T,):
        raise ValueError(f"rho sequence must have length T={p.T}, got shape {seq.shape}")
    if seq.min() < 0.0 or seq.max() > 1.0:
        raise ValueError("rho sequence entries must lie in [0, 1]")
    return seq


def gap_bound_general(p: BoundParams, rho_seq: np.ndarray) -> float:
    """Gap bound for an arbitrary per-iteration contraction sequence.

    The consensus penalty is (9 L^2 sigma^2 / (mu^3 T^2)) * S with
    S = sum_t (1/(t+beta)) * sum_{k<t} prod_{i=k..t-1} rho_i^2, evaluated in
    O(T) through the running recurrence P_{t+1} = rho_t^2 (P_t + 1); an empty
    product counts as 1.
    """
    seq = _check_rho_seq(p, rho_seq)
    rho2 = seq * seq
    partial = 0.0
    total = 0.0
    for t in range(p.T):
        total += partial / (t + p.beta)
        partial = rho2[t] * (partial + 1.0)
    return p._base_terms(p.T) + 9.0 * p.L**2 * p.sigma2 / (p.mu**3 * p.T**2) * total


def gap_bound_general_curve(p: BoundParams, rho_seq: np.ndarray) -> np.ndarray:
    """gap_bound_general evaluated at every prefix horizon t = 1..T.

    Entry t-1 bounds the expected gap after t steps of the same run; the
    shared prefix recurrence makes the whole curve O(T).
    """
    seq = _check_rho_seq(p, rho_seq)
    rho2 = seq * seq
    out = np.empty(p.T)
    partial = 0.0
    total = 0.0
    for t in range(p.T):
        total += partial / (t + p.beta)
        partial = rho2[t] * (partial + 1.0)
        horizon = t + 1
        out[t] = p._base_terms(horizon) + 9.0 * p.L**2 * p.sigma2 / (p.mu**3 * horizon**2) * total
    return out


def gap_bound_fixed_interval(p: BoundParams, H: int, rho: float) -> float:
    """Closed-form bound when workers communicate at least once every H steps.

    Requires beta > 1: the log factor ln(1 + T/(beta-1)) is undefined at
    beta = 1 and no substitute form is defined here.
    """
    if H < 1:
        raise ValueError("H must be positive")
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    if p.beta <= 1:
        raise ValueError("fixed-interval bound requires beta > 1")
    penalty = (
        9.0 * p.L**2 * p.sigma2 * H
        / (p.mu**3 * p.T**2 * (1.0 - rho**2))
        * np.log(1.0 + p.T / (p.beta - 1.0))
    )
    return p._base_terms(p.T) + float(penalty)


def gap_bound_varying_interval(p: BoundParams, R: int, rho: float) -> float:
    """Closed-form bound for the linearly growing interval schedule with R rounds."""
    if R < 1 or R * R > 2 * p.T:
        raise ValueError(f"R must satisfy 1 <= R <= sqrt(2T), got R={R}, T={p.T}")
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    penalty = 144.0 * p.L**2 * p.sigma2 / ((1.0 - rho**2) * p.mu**3 * p.T * R)
    return p._base_terms(p.T) + penalty


def decay_product(a: int, b: int) -> float:
    """prod_{i=a}^{b} (1 - 2/i) for integers b >= a > 2; at most (a/(b+1))^2."""
    if a <= 2:
        raise ValueError("a must exceed 2 (the factor at i = 2 vanishes)")
    if b < a:
        raise ValueError("b must be at least a")
    out = 1.0
    for i in range(a, b + 1):
        out *= 1.0 - 2.0 / i
    return out
