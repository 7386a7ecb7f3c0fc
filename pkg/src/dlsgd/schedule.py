"""Communication schedules: the set of iterations that perform a gossip round.

A schedule over horizon T is a strictly increasing sequence of iterate
indices tau_1 < ... < tau_R <= T (1-based). The engine mixes while producing
iterate tau, i.e. at loop step t = tau - 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

import numpy as np

STRATEGY_FORMS = "every_step | fixed:H | varying:R | final_only"


@dataclass(frozen=True)
class CommSchedule:
    T: int
    times: tuple[int, ...]
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("horizon must be positive")
        if not self.times:
            raise ValueError("schedule needs at least one communication time")
        if any(t2 <= t1 for t1, t2 in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        if self.times[0] < 1 or self.times[-1] > self.T:
            raise ValueError("times must lie in [1, T]")

    @property
    def comm_count(self) -> int:
        return len(self.times)

    def times_csv(self) -> str:
        return ",".join(str(t) for t in self.times)


def every_step(T: int) -> CommSchedule:
    if T < 1:
        raise ValueError("T must be positive")
    return CommSchedule(T, tuple(range(1, T + 1)), "every_step")


def final_only(T: int) -> CommSchedule:
    if T < 1:
        raise ValueError("T must be positive")
    return CommSchedule(T, (T,), "final_only")


def fixed_interval(T: int, H: int) -> CommSchedule:
    """Communicate every H iterations; the last interval is shortened to end at T."""
    if T < 1:
        raise ValueError("T must be positive")
    if not 1 <= H <= T:
        raise ValueError(f"H must lie in [1, T], got H={H}, T={T}")
    times = list(range(H, T + 1, H))
    if times[-1] != T:
        times.append(T)
    return CommSchedule(T, tuple(times), "fixed_interval", {"H": H})


def varying_interval(T: int, R: int) -> CommSchedule:
    """Linearly growing intervals: a = ceil(2T/R^2), tau_i = min(a*i*(i+1)/2, T).

    Consecutive gaps grow as a*(i+1) until the cap at T; the cap can repeat T,
    in which case a single final communication at T is kept. Requires
    R <= sqrt(2T), the regime where this schedule's gap bound applies.
    """
    if T < 1:
        raise ValueError("T must be positive")
    if R < 1:
        raise ValueError("R must be positive")
    if R * R > 2 * T:
        raise ValueError(f"R={R} exceeds sqrt(2T)={(2 * T) ** 0.5:.3f}")
    a = -(-2 * T // (R * R))
    times: list[int] = []
    for i in range(1, R + 1):
        tau = min(a * i * (i + 1) // 2, T)
        if not times or tau > times[-1]:
            times.append(tau)
    return CommSchedule(T, tuple(times), "varying_interval", {"R": R, "a": a})


def rho_sequence(s: CommSchedule, rho: float) -> np.ndarray:
    """Per-iteration contraction factors: rho at communication times, 1 elsewhere.

    Entry t (0-based) corresponds to iterate index t+1.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    seq = np.ones(s.T)
    for tau in s.times:
        seq[tau - 1] = rho
    return seq


def parse_strategy(spec: str, T: int) -> CommSchedule:
    """Build a schedule from its config-file name (every_step, fixed:H, varying:R, final_only)."""
    spec = spec.strip()
    if spec == "every_step":
        return every_step(T)
    if spec == "final_only":
        return final_only(T)
    if spec.startswith("fixed:"):
        return fixed_interval(T, _int_param(spec))
    if spec.startswith("varying:"):
        return varying_interval(T, _int_param(spec))
    raise ValueError(f"unknown strategy {spec!r}; expected one of: {STRATEGY_FORMS}")


def _int_param(spec: str) -> int:
    _, _, raw = spec.partition(":")
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"strategy parameter in {spec!r} must be an integer") from None


def max_varying_rounds(T: int) -> int:
    """Largest R accepted by varying_interval for horizon T."""
    return isqrt(2 * T)
