"""Posterior machinery: cutoff pairs, contraction bounds, and state inference.

The cutoff pair (s0, s1) carves the signal support into an extreme-low,
middle, and extreme-high region with equal middle mass 1 - 2*epsilon under
both states.  Extreme regions pin the action to the signal; the middle
region defers to the observation-based posterior.  The contraction bounds
(ratio_bound, floor) govern how fast a wrong public belief decays when
extreme-region actions keep contradicting it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .signals import SignalStructure


class CutoffNotFoundError(ValueError):
    """No interior cutoff pair exists for the requested middle mass."""


class UnsupportedLatticeError(ValueError):
    """Exact inference is not available for this observation structure."""


class DegenerateHistoryError(ValueError):
    """The conditioning history has zero probability under both states."""


@dataclass(frozen=True)
class BeliefBounds:
    """Equal-mass cutoffs plus the one-step contraction constants.

    ratio_bound is the largest factor by which the state-1 odds can shrink
    per contradicting extreme action (strictly below one); floor is the
    smallest probability of an extreme action under the disfavored state.
    """

    s0: float
    s1: float
    ratio_bound: float
    floor: float


@dataclass(frozen=True)
class Posterior:
    prob: float  # P(state = 1 | conditioning information)
    method: str  # "exact" or "mc"
    half_width: float = 0.0
    confidence: float = 1.0


def cutoff_pair(structure: SignalStructure, q: int, epsilon: float) -> tuple[float, float]:
    """Solve for (s0, s1) with equal middle mass 1 - 2*epsilon under both states.

    Symmetric built-in families admit the exact solution s1 = 1 - 2*epsilon,
    s0 = -s1.  Otherwise the defect F0(s1) - F0(s0(s1)) - (1 - 2*epsilon) is
    strictly decreasing in s1 under a strict MLRP, so its unique root is
    bracketed and solved numerically; any residual multiplicity (possible
    only with flat likelihood-ratio stretches) is resolved by the root the
    bracketing solver returns.
    """
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    fam = structure.family_for(q)
    mid = 1.0 - 2.0 * epsilon
    if getattr(fam, "symmetric", False):
        # Both built-ins satisfy F0(s) + F1(s) = 1 + s, hence s1 = 1 - 2*eps.
        return (-mid, mid)

    def upper_to_lower(s1: float) -> float:
        return float(fam.ppf(1, float(fam.cdf(1, s1)) - mid))

    def defect(s1: float) -> float:
        return float(fam.cdf(0, s1)) - float(fam.cdf(0, upper_to_lower(s1))) - mid

    lo = float(fam.ppf(1, mid))
    hi = 1.0 - 1e-12
    if defect(lo) < -1e-12 or defect(hi) > 1e-12:
        raise CutoffNotFoundError(f"no interior cutoff pair for epsilon = {epsilon}")
    s1 = float(optimize.brentq(defect, lo, hi, xtol=1e-14, rtol=8.9e-16))
    return (upper_to_lower(s1), s1)


def belief_step_bounds(structure: SignalStructure, q: int, epsilon: float) -> BeliefBounds:
    """Contraction constants for the equal-mass cutoff profile at size q."""
    s0, s1 = cutoff_pair(structure, q, epsilon)
    fam = structure.family_for(q)
    f1_hi = float(fam.cdf(1, s1))
    f0_hi = float(fam.cdf(0, s1))
    f1_lo = float(fam.cdf(1, s0))
    f0_lo = float(fam.cdf(0, s0))
    ratio = max(f1_hi / f0_hi, (1.0 - f0_lo) / (1.0 - f1_lo))
    floor = min(f1_lo, 1.0 - f0_hi)
    return BeliefBounds(s0, s1, ratio, floor)


def reversal_horizon(belief: float, target: float, ratio_bound: float, cap: int = 10**6) -> int:
    """Contradicting extreme actions needed to push the state-1 belief below target.

    Each step multiplies the state-1 odds by at most ratio_bound < 1; the
    count of steps until the belief first drops strictly below the target
    bounds how long a wrong consensus can survive contrary evidence.
    """
    if not 0.0 < ratio_bound < 1.0:
        raise ValueError(f"ratio bound must lie in (0, 1), got {ratio_bound}")
    if not 0.0 < belief < 1.0 or not 0.0 < target < 1.0:
        raise ValueError("beliefs must be interior probabilities")
    steps = 0
    current = belief
    while current >= target:
        odds = current / (1.0 - current) * ratio_bound
        current = odds / (1.0 + odds)
        steps += 1
        if steps > cap:
            raise RuntimeError("reversal iteration exceeded its cap")
    return steps


@dataclass(frozen=True)
class History:
    """Realized observation available to the community acting at period t.

    outcomes pairs each observed period with its realized action statistic:
    the 0/1 community action for unanimous-action profiles, or the count of
    action-1 members for split profiles.
    """

    t: int
    outcomes: tuple[tuple[int, float], ...]

    def __post_init__(self):
        for tau, _ in self.outcomes:
            if not 1 <= tau < self.t:
                raise ValueError(f"observed period {tau} outside 1..{self.t - 1}")


def posterior_exact(scenario, history: History, signal: float | None = None) -> Posterior:
    """Exact posterior over the state given an observed history.

    Supported lattices: complete prefixes, single-predecessor chains
    (line, star, delegate chains), and bounded-lookback stochastic
    mixtures.  Anything else raises UnsupportedLatticeError.
    """
    from . import dynamics

    log_odds = dynamics.history_log_odds(scenario, history)
    if signal is not None:
        q = scenario.only_size()
        fam = scenario.structure.family_for(q)
        lr = float(fam.likelihood_ratio(signal))
        log_odds += np.log(lr)
    prob = 1.0 / (1.0 + np.exp(-log_odds)) if np.isfinite(log_odds) else (log_odds > 0) * 1.0
    return Posterior(float(prob), "exact")


def posterior_mc(scenario, history: History, signal: float | None = None,
                 replications: int = 4000, seed: int = 0, confidence: float = 0.95) -> Posterior:
    """Monte Carlo posterior from simulated histories under both states.

    The same uniform draws feed the two conditional simulations, so the
    comparison shares all sampling noise except what the state itself
    induces.  The returned half width combines the two interval estimates
    conservatively.
    """
    from . import dynamics
    from .engine import wilson_interval

    match0, match1 = dynamics.history_match_counts(scenario, history, replications, seed)
    if match0 == 0 and match1 == 0:
        raise DegenerateHistoryError("history never realized under either state")
    z = float(optimize.brentq(lambda x: _normal_cdf(x) - (1 + confidence) / 2, 0.0, 10.0))
    lo0, hi0 = wilson_interval(match0, replications, z)
    lo1, hi1 = wilson_interval(match1, replications, z)
    if signal is not None:
        q = scenario.only_size()
        fam = scenario.structure.family_for(q)
        lr = float(fam.likelihood_ratio(signal))
    else:
        lr = 1.0
    center = lr * (match1 / replications) / (lr * (match1 / replications) + match0 / replications)
    lo = lr * lo1 / (lr * lo1 + hi0) if (lo1 + hi0) > 0 else 0.0
    hi = lr * hi1 / (lr * hi1 + lo0) if (hi1 + lo0) > 0 else 1.0
    half = max(hi - center, center - lo)
    return Posterior(float(center), "mc", float(half), confidence)


def _normal_cdf(x: float) -> float:
    from math import erf, sqrt

    return 0.5 * (1.0 + erf(x / sqrt(2.0)))
