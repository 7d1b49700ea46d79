"""Strategy profiles and brute-force equilibrium verification.

Covers the truth-seeking rule, the equal-mass cutoff profile, delegate
observation chains, the endogenous-observation limit cutoff, separation
splits under congestion payoffs, and the symmetric fixed-point cutoff for
per-agent private signals.  Verification operations (best responses,
unanimity search, risk dominance) keep arithmetic in pure Python so exact
number types pass through.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy import optimize, stats

from .payoffs import PayoffSpec, validate_assumptions
from .signals import SignalStructure


class MisuseError(TypeError):
    """Operation applied outside its declared scope."""


class NoInteriorCutoffError(ValueError):
    """Private beliefs are too weak relative to the observation cost."""


class EquilibriumNotFoundError(ValueError):
    """No pure split survives the deviation checks on some belief range."""


# ---------------------------------------------------------------------------
# Profile descriptors consumed by the simulation engine.


@dataclass(frozen=True)
class TruthSeeking:
    """Maximize the probability of matching the state given all information."""


@dataclass(frozen=True)
class FixedAction:
    """Play one action unconditionally (calibration and smoke tests)."""

    action: int


@dataclass(frozen=True)
class CutoffCoordination:
    """Equal-mass cutoff profile: extreme signals act on the signal, the
    middle region follows the observation-only truth action."""

    epsilon: float


@dataclass(frozen=True)
class DelegateObserver:
    """One member observes the predecessor delegate and everyone copies;
    off-path realizations trigger the opposite action when punish is set."""

    punish: bool = True


@dataclass(frozen=True)
class EndogenousCutoff:
    """Observe (at cost) only when the signal is too weak to act on alone;
    the signal cutoff is the limit indifference point s*(Q)."""


@dataclass(frozen=True)
class SeparationSplit:
    """Communities split between actions under congestion payoffs, playing
    the selected pure split equilibrium for the current belief."""


@dataclass(frozen=True)
class PrivateSignalSymmetric:
    """Per-agent i.i.d. signals with a shared observation posterior; each
    agent plays a symmetric cutoff solved by fixed-point iteration."""

    max_iter: int = 500
    tol: float = 1e-8


# ---------------------------------------------------------------------------
# Elementary decision rules.


def truth_seeking_action(prob_state1: float) -> int:
    """Action matching the more likely state; ties break to 0."""
    return 1 if prob_state1 > 0.5 else 0


def cutoff_action(s: float, s0: float, s1: float, obs_prob_state1: float) -> int:
    """Equal-mass cutoff rule: extreme signal wins, middle follows observation."""
    if s >= s1:
        return 1
    if s <= s0:
        return 0
    return truth_seeking_action(obs_prob_state1)


# ---------------------------------------------------------------------------
# Best responses and unanimity.


@dataclass(frozen=True)
class BRReport:
    is_best_response: bool
    stay_payoff: float
    deviation_payoff: float
    gap: float  # deviation advantage when not a best response, else 0


def _expected(spec: PayoffSpec, p, a: int, m: int):
    return p * spec.utility(1, a, m) + (1 - p) * spec.utility(0, a, m)


def best_response_check(spec: PayoffSpec, q: int, p, action: int,
                        split_count: int | None = None) -> BRReport:
    """Check a candidate profile against all lone deviations.

    Unanimous profiles (split_count None) compare staying at head count q
    against deviating to a lone head count of 1.  Split profiles evaluate
    the member of the requested action's group against joining the other
    group, with head counts taken from the split.
    """
    if split_count is None:
        stay = _expected(spec, p, action, q)
        dev = _expected(spec, p, 1 - action, 1)
    else:
        if not 0 <= split_count <= q:
            raise ValueError(f"split count must lie in 0..{q}, got {split_count}")
        own = split_count if action == 1 else q - split_count
        other = q - own
        if own == 0:
            raise ValueError("no member plays the requested action in this split")
        stay = _expected(spec, p, action, own)
        dev = _expected(spec, p, 1 - action, other + 1)
    ok = stay >= dev
    return BRReport(ok, stay, dev, 0.0 if ok else dev - stay)


def split_is_equilibrium(spec: PayoffSpec, q: int, p, q1: int) -> bool:
    """No member of either group profits from switching sides."""
    if q1 >= 1 and not best_response_check(spec, q, p, 1, q1).is_best_response:
        return False
    if q1 <= q - 1 and not best_response_check(spec, q, p, 0, q1).is_best_response:
        return False
    return True


def unanimity_search(spec: PayoffSpec, q: int, belief_grid=None) -> list[tuple[float, int]]:
    """Hunt for interior split equilibria under an increasing payoff.

    Returns every (belief, q1) with 0 < q1 < q that survives the deviation
    checks; the conformity result says the list is empty, so any entry is a
    counterexample.
    """
    direction = validate_assumptions(spec, m_max=max(q, 2)).direction
    if direction != "increasing":
        raise MisuseError("unanimity search applies to increasing (coordination) payoffs")
    if belief_grid is None:
        belief_grid = np.linspace(0.01, 0.99, 99)
    found = []
    for p in belief_grid:
        for q1 in range(1, q):
            if split_is_equilibrium(spec, q, p, q1):
                found.append((float(p), q1))
    return found


# ---------------------------------------------------------------------------
# Risk dominance between the two unanimous profiles.


@dataclass(frozen=True)
class RiskDominanceReport:
    q: int
    p: float
    diffs: tuple  # (switch size, closed form, subset enumeration) per size
    dominant: int | None  # preferred unanimous action, None on a tie


def risk_dominance_closed_form(spec: PayoffSpec, q: int, switch: int, p):
    return (2 * p - 1) * (spec.match_gap(q) + spec.match_gap(switch))


def risk_dominance_enumerated(spec: PayoffSpec, q: int, switch: int, p):
    """Deviation-loss difference via explicit switching subsets.

    For each subset of the requested size, the members leaving the
    unanimous-1 profile fall to a head count equal to the subset size;
    the per-member loss difference against leaving unanimous-0 is summed
    and averaged over subsets, which must reproduce the closed form.
    """
    total = 0
    count = 0
    for subset in combinations(range(q), switch):
        for _ in subset:
            loss_from_1 = _expected(spec, p, 1, q) - _expected(spec, p, 0, switch)
            loss_from_0 = _expected(spec, p, 0, q) - _expected(spec, p, 1, switch)
            total = total + (loss_from_1 - loss_from_0)
        count += len(subset)
    return total / count


def risk_dominance_check(spec: PayoffSpec, q: int, p) -> RiskDominanceReport:
    """Compare unanimity on 1 against unanimity on 0 at public belief p.

    Action 1 risk-dominates when, for every switching-subset size, the
    expected loss of abandoning it weakly exceeds the loss of abandoning
    action 0.  The difference collapses to
    (2p-1) * (match_gap(q) + match_gap(switch)).
    """
    diffs = []
    for switch in range(1, q + 1):
        closed = risk_dominance_closed_form(spec, q, switch, p)
        enum = risk_dominance_enumerated(spec, q, switch, p)
        diffs.append((switch, closed, enum))
    if all(d[1] >= 0 for d in diffs) and any(d[1] > 0 for d in diffs):
        dominant = 1
    elif all(d[1] <= 0 for d in diffs) and any(d[1] < 0 for d in diffs):
        dominant = 0
    else:
        dominant = None
    return RiskDominanceReport(q, p, tuple(diffs), dominant)


# ---------------------------------------------------------------------------
# Delegate observation (costly observation sustaining a copy chain).


def delegate_profile(t: int, prescription: frozenset, realized: frozenset,
                     prob_state1: float, punish: bool = True) -> tuple[int | None, int]:
    """Observer assignment and community action for the delegate chain.

    Member 1 is the designated observer whenever there is something to
    observe.  On-path the community plays the truth action for its
    posterior; a realized neighborhood differing from the prescription
    flips the action when punishment is on.
    """
    observer = 1 if prescription else None
    action = truth_seeking_action(prob_state1)
    if punish and frozenset(realized) != frozenset(prescription):
        action = 1 - action
    return observer, action


@dataclass(frozen=True)
class DelegateReport:
    passed: bool
    observe_bound: float
    forgo_bound: float
    gap: float  # bound difference before subtracting the cost
    min_passing_size: int | None


def delegate_incentive_check(spec: PayoffSpec, structure: SignalStructure,
                             q: int, cost: float, t: int = 2,
                             size_cap: int = 64) -> DelegateReport:
    """Is paying to observe the predecessor delegate worth the cost?

    Compares a lower bound on the observe-and-coordinate payoff against an
    upper bound on the best unobserved payoff, both built from the signal
    density crossing point s-hat where f0 = f1.  The bound difference
    simplifies to (F0(s-hat) - 1/2) * match_gap for symmetric families.
    """
    if t < 2:
        raise MisuseError("there is nothing to observe before period 2")

    def bound_gap(size: int) -> tuple[float, float, float]:
        fam = structure.family_for(size)
        s_hat = float(fam.inv_likelihood_ratio(1.0))
        f0 = float(fam.cdf(0, s_hat))
        f1 = float(fam.cdf(1, s_hat))
        u11 = spec.utility(1, 1, size)
        u10 = spec.utility(1, 0, size)
        observe = 0.5 * ((f0 + 1.0 - f1) * u11 + (f1 + 1.0 - f0) * u10) - cost
        forgo = 0.5 * (u11 + u10)
        return observe, forgo, observe - forgo

    observe, forgo, diff = bound_gap(q)
    min_size = next((m for m in range(1, size_cap + 1) if bound_gap(m)[2] > 0), None)
    return DelegateReport(diff > 0, observe, forgo, diff + cost, min_size)


# ---------------------------------------------------------------------------
# Endogenous-observation limit cutoff.


def limit_cutoff(structure: SignalStructure, spec: PayoffSpec, cost: float, q: int) -> float:
    """Signal at which acting alone on the signal matches paying to observe.

    Solves belief(s) * u(1,1,Q) + (1 - belief(s)) * u(1,0,Q) = u(1,1,Q) - c,
    i.e. belief(s) = 1 - c / match_gap(Q), by bisection.  Beliefs too weak
    to reach that level raise NoInteriorCutoffError.
    """
    fam = structure.family_for(q)
    gap = spec.match_gap(q)
    target = 1.0 - cost / gap
    lo, hi = fam.belief_limits()
    if not lo < target < hi:
        raise NoInteriorCutoffError(
            f"belief limits ({lo:g}, {hi:g}) cannot reach the indifference level {target:g}"
        )

    def defect(s: float) -> float:
        f1 = float(fam.pdf(1, s))
        f0 = float(fam.pdf(0, s))
        return f1 / (f0 + f1) - target

    eps = 1e-12
    return float(optimize.bisect(defect, -1.0 + eps, 1.0 - eps, xtol=1e-12))


def analytic_limit_accuracy(structure: SignalStructure, spec: PayoffSpec,
                            cost: float, sizes) -> float:
    """Asymptotic P(correct) under the limit cutoff: E_G[F0(s*(Q))]."""
    total = 0.0
    for q, prob in sizes:
        s_star = limit_cutoff(structure, spec, cost, q)
        total += prob * float(structure.cdf(q, 0, s_star))
    return total


# ---------------------------------------------------------------------------
# Separation splits under congestion payoffs.


def separation_equilibria(spec: PayoffSpec, q: int, p) -> list[int]:
    """All pure split counts q1 (members on action 1) surviving deviations."""
    return [q1 for q1 in range(q + 1) if split_is_equilibrium(spec, q, p, q1)]


def separation_split(spec: PayoffSpec, q: int, p) -> list[int]:
    """Equilibrium split counts for a belief favoring state 1.

    Restricted to decreasing (separation) payoffs and p > 1/2; every
    returned count puts at least half the community on action 1.
    """
    direction = validate_assumptions(spec, m_max=max(q, 2)).direction
    if direction != "decreasing":
        raise MisuseError("separation splits apply to decreasing (congestion) payoffs")
    if not p > 0.5:
        raise MisuseError("separation characterization assumes a belief above 1/2")
    return separation_equilibria(spec, q, p)


@dataclass(frozen=True)
class SplitSelection:
    """Belief-interval step function of selected split counts.

    edges has J+1 entries bracketing J open intervals; counts[j] applies on
    (edges[j], edges[j+1]).  Exact edge hits resolve to the lower interval.
    """

    edges: tuple[float, ...]
    counts: tuple[int, ...]

    def count_at(self, p: float) -> int:
        j = int(np.searchsorted(np.asarray(self.edges), p, side="left")) - 1
        return self.counts[min(max(j, 0), len(self.counts) - 1)]


def separation_selection(spec: PayoffSpec, q: int) -> SplitSelection:
    """Selected split as a function of the public belief.

    Deviation conditions are linear in the belief, so their roots cut (0,1)
    into intervals with constant equilibrium sets.  On each interval the
    selection takes the largest equilibrium count when the belief favors
    state 1 and the smallest when it favors state 0, keeping the selection
    symmetric across states.
    """
    cuts = {0.5}
    for q1 in range(q + 1):
        pairs = []
        if q1 >= 1:
            pairs.append((1, q1, q - q1 + 1))
        if q1 <= q - 1:
            pairs.append((0, q - q1, q1 + 1))
        for action, own, other in pairs:
            # stay(p) - dev(p) = alpha + beta * p with the pieces below.
            stay0 = spec.utility(0, action, own)
            stay1 = spec.utility(1, action, own)
            dev0 = spec.utility(0, 1 - action, other)
            dev1 = spec.utility(1, 1 - action, other)
            alpha = stay0 - dev0
            beta = (stay1 - stay0) - (dev1 - dev0)
            if beta != 0:
                root = -alpha / beta
                if 0.0 < root < 1.0:
                    cuts.add(float(root))
    edges = [0.0] + sorted(cuts) + [1.0]
    counts = []
    for left, right in zip(edges[:-1], edges[1:]):
        mid = (left + right) / 2.0
        eqs = separation_equilibria(spec, q, mid)
        if not eqs:
            raise EquilibriumNotFoundError(
                f"no pure split equilibrium for beliefs near {mid:g} (q={q})"
            )
        counts.append(max(eqs) if mid > 0.5 else min(eqs))
    return SplitSelection(tuple(edges), tuple(counts))


# ---------------------------------------------------------------------------
# Symmetric cutoff with private per-agent signals.


@dataclass(frozen=True)
class CutoffSolution:
    cutoff: float
    converged: bool
    iterations: int


def _private_signal_cutoff_map(structure: SignalStructure, spec: PayoffSpec, q: int,
                               obs_posterior, cutoffs: np.ndarray) -> np.ndarray:
    """One best-response update of candidate symmetric cutoffs (vectorized)."""
    fam = structure.family_for(q)
    cutoffs = np.asarray(cutoffs, dtype=float)
    p_obs = np.broadcast_to(np.asarray(obs_posterior, dtype=float), cutoffs.shape)
    p1 = 1.0 - np.asarray(fam.cdf(1, cutoffs), dtype=float)
    p0 = 1.0 - np.asarray(fam.cdf(0, cutoffs), dtype=float)
    peers = q - 1
    j = np.arange(peers + 1)
    du1 = np.array([spec.utility(1, 1, jj + 1) - spec.utility(1, 0, q - jj) for jj in j])
    du0 = np.array([spec.utility(0, 1, jj + 1) - spec.utility(0, 0, q - jj) for jj in j])
    if peers == 0:
        a = np.full_like(cutoffs, du1[0])
        b = np.full_like(cutoffs, du0[0])
    else:
        pmf1 = stats.binom.pmf(j[None, :], peers, p1[:, None])
        pmf0 = stats.binom.pmf(j[None, :], peers, p0[:, None])
        a = pmf1 @ du1
        b = pmf0 @ du0
    new = np.empty_like(cutoffs)
    always1 = (a >= 0) & (b >= 0)
    never1 = (a <= 0) & (b <= 0)
    interior = ~always1 & ~never1
    new[always1] = -1.0
    new[never1] = 1.0
    if np.any(interior):
        ai, bi = a[interior], b[interior]
        if np.any(ai < bi):
            raise MisuseError("payoff induces an inverted cutoff rule")
        pi_star = bi / (bi - ai)
        odds = pi_star / (1.0 - pi_star) * (1.0 - p_obs[interior]) / p_obs[interior]
        new[interior] = np.asarray(fam.inv_likelihood_ratio(odds), dtype=float)
    return new


def private_signal_cutoff(structure: SignalStructure, spec: PayoffSpec, q: int,
                          obs_posterior: float, max_iter: int = 500,
                          tol: float = 1e-8) -> CutoffSolution:
    """Symmetric equilibrium cutoff given a shared observation posterior.

    Iterates the best-response map from the truth-seeking cutoff; a
    support-boundary fixed point means the whole community follows the
    observation regardless of signals (a herd).  Non-convergence inside
    the iteration cap returns the last iterate flagged unconverged.
    """
    if not 0.0 < obs_posterior < 1.0:
        raise ValueError("observation posterior must be interior")
    fam = structure.family_for(q)
    start = float(fam.inv_likelihood_ratio((1.0 - obs_posterior) / obs_posterior))
    current = np.array([start])
    for it in range(1, max_iter + 1):
        new = _private_signal_cutoff_map(structure, spec, q, obs_posterior, current)
        if abs(float(new[0]) - float(current[0])) < tol:
            return CutoffSolution(float(new[0]), True, it)
        current = new
    return CutoffSolution(float(current[0]), False, max_iter)
