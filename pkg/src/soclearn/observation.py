"""Observation schemes linking each community to earlier communities.

Exogenous schemes fix (possibly stochastically) which predecessor
communities a period-t community observes.  The endogenous scheme instead
carries an observation price and a capacity schedule; realized
neighborhoods are then chosen by the strategy layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class MisuseError(TypeError):
    """Operation applied to a scheme kind it is not defined for."""


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    details: str


@dataclass(frozen=True)
class Star:
    """Everyone from period 2 on observes the first community only."""


@dataclass(frozen=True)
class Line:
    """Each community observes its immediate predecessor."""


@dataclass(frozen=True)
class Complete:
    """Each community observes all predecessors."""


@dataclass(frozen=True)
class CustomStochastic:
    """Offset patterns drawn independently each period.

    entries holds (pattern, probability) pairs; patterns are "last:k",
    "first:k", "all", or "none".  Probabilities must sum to one.
    """

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("custom scheme needs at least one pattern")
        for pat, p in self.entries:
            _pattern_max_index(pat, 2)  # validates the pattern syntax
            if p < 0:
                raise ValueError(f"pattern probability must be nonnegative, got {p}")
        total = sum(p for _, p in self.entries)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"pattern probabilities must sum to 1, got {total}")


@dataclass(frozen=True)
class CapacitySchedule:
    """Observation capacity K(t): "linear" is t-1, "constant" is a fixed
    count, "log2" is ceil(log2(t+1))."""

    kind: str
    value: int = 0

    def k_of(self, t: int) -> int:
        if self.kind == "linear":
            return t - 1
        if self.kind == "constant":
            return self.value
        if self.kind == "log2":
            return math.ceil(math.log2(t + 1))
        raise ValueError(f"unknown capacity kind {self.kind!r}")


def parse_capacity(text) -> CapacitySchedule:
    if isinstance(text, int):
        if text < 1:
            raise ValueError(f"constant capacity must be at least 1, got {text}")
        return CapacitySchedule("constant", text)
    text = text.strip().lower()
    if text in ("t-1", "t - 1"):
        return CapacitySchedule("linear")
    if text == "log2":
        return CapacitySchedule("log2")
    try:
        k = int(text)
    except ValueError:
        raise ValueError(f"capacity must be 't-1', 'log2', or an integer, got {text!r}")
    if k < 1:
        raise ValueError(f"constant capacity must be at least 1, got {k}")
    return CapacitySchedule("constant", k)


@dataclass(frozen=True)
class Endogenous:
    """Costly observation with capacity schedule; neighborhoods are chosen
    by the strategy, so realize_neighborhood does not apply."""

    cost: float
    capacity: CapacitySchedule

    def __post_init__(self):
        if not self.cost > 0 or not math.isfinite(self.cost):
            raise ValueError(f"observation cost must be positive and finite, got {self.cost}")


def _pattern_max_index(pattern: str, t: int) -> int:
    """Largest community index the pattern can reach at period t (0 if none)."""
    if pattern == "all":
        return t - 1
    if pattern == "none":
        return 0
    kind, _, num = pattern.partition(":")
    if kind in ("last", "first") and num.isdigit() and int(num) >= 1:
        k = int(num)
        return t - 1 if kind == "last" else min(k, t - 1)
    raise ValueError(f"unknown observation pattern {pattern!r}")


def pattern_neighborhood(pattern: str, t: int) -> frozenset[int]:
    if pattern == "all":
        return frozenset(range(1, t))
    if pattern == "none":
        return frozenset()
    kind, _, num = pattern.partition(":")
    k = int(num)
    if kind == "last":
        return frozenset(range(max(1, t - k), t))
    if kind == "first":
        return frozenset(range(1, min(k, t - 1) + 1))
    raise ValueError(f"unknown observation pattern {pattern!r}")


def realize_neighborhood(scheme, t: int, rng: np.random.Generator | None = None) -> frozenset[int]:
    """Realize the observed community set at period t (empty at t=1)."""
    if t < 1:
        raise ValueError(f"period index must be at least 1, got {t}")
    if t == 1:
        return frozenset()
    if isinstance(scheme, Star):
        return frozenset({1})
    if isinstance(scheme, Line):
        return frozenset({t - 1})
    if isinstance(scheme, Complete):
        return frozenset(range(1, t))
    if isinstance(scheme, CustomStochastic):
        if rng is None:
            raise ValueError("stochastic schemes need a random generator")
        probs = np.array([p for _, p in scheme.entries])
        i = int(np.searchsorted(np.cumsum(probs), rng.random(), side="right"))
        i = min(i, len(scheme.entries) - 1)
        return pattern_neighborhood(scheme.entries[i][0], t)
    if isinstance(scheme, Endogenous):
        raise MisuseError("endogenous neighborhoods are chosen by the strategy, not the scheme")
    raise MisuseError(f"unknown scheme {scheme!r}")


def check_expanding(scheme, horizon: int = 10_000, prob_tol: float = 1e-6) -> CheckReport:
    """Finite-horizon proxy for expanding observations.

    The defining limit says the chance that the newest observed community
    falls below any fixed bound vanishes.  Proxy: at t = horizon the
    probability that the maximum observed index stays below horizon/2 must
    not exceed prob_tol.  That probability is monotone in the bound, so
    the single largest bound is decisive.
    """
    if isinstance(scheme, Endogenous):
        raise MisuseError("expanding observations is a property of exogenous schemes")
    t = horizon
    bound = horizon // 2
    if isinstance(scheme, (Line, Complete)):
        return CheckReport(True, f"max observed index is t-1 = {t - 1} >= {bound}")
    if isinstance(scheme, Star):
        return CheckReport(False, f"max observed index stays 1 < {bound} forever")
    if isinstance(scheme, CustomStochastic):
        p_low = sum(p for pat, p in scheme.entries if _pattern_max_index(pat, t) < bound)
        ok = p_low <= prob_tol
        return CheckReport(ok, f"P(max observed index < {bound}) = {p_low:g} at t = {t}")
    raise MisuseError(f"unknown scheme {scheme!r}")


def check_infinite_complete(scheme, horizon: int = 10_000, prob_tol: float = 1e-6) -> CheckReport:
    """Finite-horizon proxy for infinite observations with full nesting.

    Requires, along periods up to the horizon: unbounded neighborhood
    sizes, and (with probability approaching one) that everything an
    observed community could itself have observed is also observed.
    """
    if isinstance(scheme, Endogenous):
        raise MisuseError("use capacity_limit_infinite for endogenous schemes")
    t = horizon
    if isinstance(scheme, Complete):
        return CheckReport(True, "complete observation nests all predecessors with size t-1")
    if isinstance(scheme, (Line, Star)):
        return CheckReport(False, "neighborhood size is capped at 1")
    if isinstance(scheme, CustomStochastic):
        # Only the "all" pattern gives unbounded size and nests predecessors.
        p_all = sum(p for pat, p in scheme.entries if pat == "all")
        if p_all >= 1.0 - prob_tol:
            return CheckReport(True, f"P(full prefix observed) = {p_all:g} per period")
        return CheckReport(False, f"P(full prefix observed) = {p_all:g} < {1 - prob_tol:g} at t = {t}")
    raise MisuseError(f"unknown scheme {scheme!r}")


def capacity_limit_infinite(capacity: CapacitySchedule, horizon: int = 10_000) -> CheckReport:
    """Finite-horizon proxy for K(t) growing past every fixed bound.

    Proxy: the running maximum of K over 1..horizon must still improve in
    the final half of the horizon (a plateaued schedule improves only
    early) and must exceed 1.
    """
    best = -1
    last_gain = 0
    for t in range(1, horizon + 1):
        k = capacity.k_of(t)
        if k > best:
            best = k
            last_gain = t
    if best >= 2 and last_gain > horizon // 2:
        return CheckReport(True, f"K reaches {best} with the last improvement at t = {last_gain}")
    return CheckReport(False, f"K plateaus at {best} after t = {last_gain}")
