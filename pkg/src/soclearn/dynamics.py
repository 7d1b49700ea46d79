"""Exact per-period dynamics for each supported scheme/profile pairing.

Each kernel advances a block of replications one period at a time,
tracking exactly the quantities later communities can condition on:

* complete lattices keep a running action log-likelihood ratio per trace;
* single-predecessor chains (line, star, delegate) keep the marginal
  P(observed action = 1 | state) alongside the realized action;
* private-signal lines keep the full action-count distribution per state;
* separation splits keep the running log odds of the revealed count path;
* bounded-lookback stochastic mixtures keep the joint distribution of the
  last-k action window per state.

Everything a kernel emits is a deterministic function of the uniform draw
block, so replication results never depend on how blocks are batched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import strategies as strat
from .beliefs import History, UnsupportedLatticeError, cutoff_pair
from .observation import Complete, CustomStochastic, Endogenous, Line, Star

_TINY = 2.0 ** -53


@dataclass
class PeriodOut:
    """Per-trace outputs for one period of a simulation block."""

    act_stat: np.ndarray  # unanimous action (0/1) or count of action-1 members
    act_frac: np.ndarray  # fraction of members on action 1
    correct: np.ndarray  # fraction of members matching the state
    a_hat: np.ndarray  # truth-seeking action from the community's information
    observed: np.ndarray  # nonempty observation this period
    forced: np.ndarray  # action rule ignored the signal entirely this period
    followed: np.ndarray  # realized action came from the observation branch


def _clip_u(u: np.ndarray) -> np.ndarray:
    return np.clip(u, _TINY, 1.0 - _TINY)


class _SizeDraw:
    def __init__(self, sizes):
        self.values = np.array([q for q, _ in sizes], dtype=np.int64)
        self.cum = np.cumsum(np.array([p for _, p in sizes], dtype=float))

    def draw(self, u: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.cum, u, side="right")
        return self.values[np.minimum(idx, self.values.size - 1)]


class _FamilyOps:
    """Vectorized signal-family operations grouped by community size."""

    def __init__(self, structure, sizes):
        self.qs = [q for q, _ in sizes]
        self.fams = {q: structure.family_for(q) for q in self.qs}

    def _group(self, qs, fn):
        out = np.empty(qs.shape, dtype=float)
        for q in self.qs:
            mask = qs == q
            if np.any(mask):
                out[mask] = fn(self.fams[q], mask)
        return out

    def ppf(self, qs, theta, u):
        out = np.empty(qs.shape, dtype=float)
        for q in self.qs:
            fam = self.fams[q]
            for th in (0, 1):
                mask = (qs == q) & (theta == th)
                if np.any(mask):
                    out[mask] = fam.ppf(th, u[mask])
        return out

    def cdf(self, qs, theta_value: int, x):
        return self._group(qs, lambda fam, m: fam.cdf(theta_value, x[m]))

    def loglr(self, qs, s):
        return self._group(qs, lambda fam, m: np.log(fam.likelihood_ratio(s[m])))

    def indifference(self, qs, log_odds):
        return self._group(qs, lambda fam, m: fam.indifference_signal(log_odds[m]))

    def log_lr_bounds(self, qs):
        lo = np.empty(qs.shape, dtype=float)
        hi = np.empty(qs.shape, dtype=float)
        for q in self.qs:
            mask = qs == q
            if np.any(mask):
                lo_q, hi_q = self.fams[q].log_lr_range()
                lo[mask] = lo_q
                hi[mask] = hi_q
        return lo, hi

    def per_size(self, fn) -> dict[int, float]:
        return {q: fn(q, self.fams[q]) for q in self.qs}

    def lookup(self, qs, table: dict[int, float]) -> np.ndarray:
        out = np.empty(qs.shape, dtype=float)
        for q, val in table.items():
            out[qs == q] = val
        return out


def _endogenous_cutoffs(scenario, q, fam) -> tuple[float, float]:
    """Upper and lower signal cutoffs for the pay-to-observe rule."""
    cost = scenario.scheme.cost
    hi = strat.limit_cutoff(scenario.structure, scenario.payoff, cost, q)
    gap = scenario.payoff.match_gap(q)
    target = cost / gap
    b_lo, b_hi = fam.belief_limits()
    if not b_lo < target < b_hi:
        raise strat.NoInteriorCutoffError(
            f"lower belief target {target!r} outside attainable beliefs ({b_lo!r}, {b_hi!r})"
        )

    def defect(s: float) -> float:
        f1 = float(fam.pdf(1, s))
        f0 = float(fam.pdf(0, s))
        return f1 / (f0 + f1) - target

    from scipy import optimize

    lo = float(optimize.bisect(defect, -1.0 + 1e-12, 1.0 - 1e-12, xtol=1e-12))
    return lo, hi


# ---------------------------------------------------------------------------
# Complete-lattice kernel (complete scheme, or endogenous full-capacity).


def _complete_kernel(scenario, theta, u):
    profile = scenario.profile
    ops = _FamilyOps(scenario.structure, scenario.sizes)
    sized = _SizeDraw(scenario.sizes)
    B = theta.size
    endog_obs = isinstance(scenario.scheme, Endogenous) and isinstance(
        profile, strat.EndogenousCutoff
    )
    if isinstance(profile, strat.CutoffCoordination):
        pairs = ops.per_size(lambda q, fam: cutoff_pair(scenario.structure, q, profile.epsilon))
        s0_map = {q: p[0] for q, p in pairs.items()}
        s1_map = {q: p[1] for q, p in pairs.items()}
    if endog_obs:
        cuts = ops.per_size(lambda q, fam: _endogenous_cutoffs(scenario, q, fam))
        lo_map = {q: c[0] for q, c in cuts.items()}
        hi_map = {q: c[1] for q, c in cuts.items()}

    llr = np.zeros(B)
    ones = np.ones(B, dtype=bool)
    for t in range(1, scenario.horizon + 1):
        qs = sized.draw(u[:, t, 0])
        s = ops.ppf(qs, theta, _clip_u(u[:, t, 1]))
        loglr_s = ops.loglr(qs, s)
        a_hat = (llr + loglr_s) > 0.0
        forced = np.zeros(B, dtype=bool)

        if isinstance(profile, strat.FixedAction):
            a = np.full(B, bool(profile.action))
            p1 = p0 = a.astype(float)
            observed = (ones & (t >= 2))
            forced = ones.copy()
            followed = ones.copy()
            inc = np.zeros(B)
        elif isinstance(profile, strat.TruthSeeking):
            thresh = ops.indifference(qs, llr)
            lo_rng, hi_rng = ops.log_lr_bounds(qs)
            force1 = -llr <= lo_rng
            force0 = -llr >= hi_rng
            forced = force1 | force0
            a = np.where(forced, force1, s > thresh)
            p1 = 1.0 - ops.cdf(qs, 1, thresh)
            p0 = 1.0 - ops.cdf(qs, 0, thresh)
            observed = (ones & (t >= 2))
            followed = observed & (a == (llr > 0.0))
            inc = _action_increment(a, p1, p0, forced)
        elif isinstance(profile, strat.CutoffCoordination):
            s0 = ops.lookup(qs, s0_map)
            s1 = ops.lookup(qs, s1_map)
            if t == 1:
                mid = np.clip(ops.indifference(qs, llr), s0, s1)
                mid_act = s > mid
            else:
                mid = np.where(llr > 0.0, s0, s1)
                mid_act = np.broadcast_to(llr > 0.0, (B,))
            a = np.where(s >= s1, True, np.where(s <= s0, False, mid_act))
            p1 = 1.0 - ops.cdf(qs, 1, mid)
            p0 = 1.0 - ops.cdf(qs, 0, mid)
            mid_range = (s > s0) & (s < s1)
            if isinstance(scenario.scheme, Endogenous):
                # Extreme signals act alone rather than pay the cost.
                observed = mid_range & (t >= 2)
            else:
                observed = (ones & (t >= 2))
            followed = mid_range & (t >= 2)
            inc = _action_increment(a, p1, p0, forced)
        elif endog_obs:
            lo = ops.lookup(qs, lo_map)
            hi = ops.lookup(qs, hi_map)
            mid = np.clip(ops.indifference(qs, llr), lo, hi)
            a = np.where(s >= hi, True, np.where(s <= lo, False, (llr + loglr_s) > 0.0))
            observed = (s > lo) & (s < hi) & (t >= 2)
            followed = observed & (a == (llr > 0.0))
            p1 = 1.0 - ops.cdf(qs, 1, mid)
            p0 = 1.0 - ops.cdf(qs, 0, mid)
            inc = _action_increment(a, p1, p0, forced)
        else:
            raise UnsupportedLatticeError(f"unsupported profile {profile!r} on a complete lattice")

        correct = (a == (theta == 1)).astype(float)
        yield t, PeriodOut(a.astype(float), a.astype(float), correct, a_hat, observed, forced, followed)
        llr = llr + inc


def _action_increment(a, p1, p0, forced):
    inc = np.zeros(a.shape, dtype=float)
    free = ~forced
    took1 = free & (a.astype(bool))
    took0 = free & (~a.astype(bool))
    inc[took1] = np.log(p1[took1]) - np.log(p0[took1])
    inc[took0] = np.log1p(-p1[took0]) - np.log1p(-p0[took0])
    return inc


# ---------------------------------------------------------------------------
# Single-predecessor chains: line, star, and the delegate copy chain.


def _chain_kernel(scenario, theta, u, mode: str):
    profile = scenario.profile
    ops = _FamilyOps(scenario.structure, scenario.sizes)
    sized = _SizeDraw(scenario.sizes)
    B = theta.size
    if isinstance(profile, strat.CutoffCoordination):
        pairs = ops.per_size(lambda q, fam: cutoff_pair(scenario.structure, q, profile.epsilon))
        s0_map = {q: p[0] for q, p in pairs.items()}
        s1_map = {q: p[1] for q, p in pairs.items()}

    # Marginals of the observed action variable under each state, plus its
    # realized value.  For the star the variable is frozen at t=1.
    m1 = np.zeros(B)
    m0 = np.zeros(B)
    prev = np.zeros(B, dtype=bool)
    ones = np.ones(B, dtype=bool)

    for t in range(1, scenario.horizon + 1):
        qs = sized.draw(u[:, t, 0])
        s = ops.ppf(qs, theta, _clip_u(u[:, t, 1]))
        loglr_s = ops.loglr(qs, s)
        forced = np.zeros(B, dtype=bool)

        if t == 1:
            zero = np.zeros(B)
            followed = np.zeros(B, dtype=bool)
            if isinstance(profile, strat.FixedAction):
                a = np.full(B, bool(profile.action))
                p1 = p0 = a.astype(float)
                forced = ones.copy()
                followed = ones.copy()
            elif isinstance(profile, strat.CutoffCoordination):
                s0 = ops.lookup(qs, s0_map)
                s1 = ops.lookup(qs, s1_map)
                mid = np.clip(ops.indifference(qs, zero), s0, s1)
                a = np.where(s >= s1, True, np.where(s <= s0, False, s > mid))
                p1 = 1.0 - ops.cdf(qs, 1, mid)
                p0 = 1.0 - ops.cdf(qs, 0, mid)
            else:  # truth-seeking and the delegate chain both sign-follow at t=1
                thresh = ops.indifference(qs, zero)
                a = s > thresh
                p1 = 1.0 - ops.cdf(qs, 1, thresh)
                p0 = 1.0 - ops.cdf(qs, 0, thresh)
            a_hat = loglr_s > 0.0
            observed = np.zeros(B, dtype=bool)
            m1, m0 = p1.copy(), p0.copy()
            prev = a.copy()
            correct = (a == (theta == 1)).astype(float)
            yield t, PeriodOut(a.astype(float), a.astype(float), correct, a_hat, observed, forced, followed)
            continue

        # Observation log odds for both possible observed values.
        with np.errstate(divide="ignore"):
            llr_if1 = np.log(m1) - np.log(m0)
            llr_if0 = np.log1p(-m1) - np.log1p(-m0)
        llr_obs = np.where(prev, llr_if1, llr_if0)
        a_hat = (llr_obs + loglr_s) > 0.0
        observed = ones.copy()

        if isinstance(profile, strat.FixedAction):
            a = np.full(B, bool(profile.action))
            new1 = new0 = a.astype(float)
            forced = ones.copy()
            followed = ones.copy()
        elif isinstance(profile, strat.DelegateObserver):
            a = prev.copy()
            new1, new0 = m1, m0
            forced = ones.copy()
            followed = ones.copy()
        elif isinstance(profile, strat.TruthSeeking):
            c1 = ops.indifference(qs, llr_if1)
            c0 = ops.indifference(qs, llr_if0)
            lo_rng, hi_rng = ops.log_lr_bounds(qs)
            llr_real = llr_obs
            force1 = -llr_real <= lo_rng
            force0 = -llr_real >= hi_rng
            forced = force1 | force0
            c_real = np.where(prev, c1, c0)
            a = np.where(forced, force1, s > c_real)
            followed = a == (llr_obs > 0.0)
            new1 = m1 * (1.0 - ops.cdf(qs, 1, c1)) + (1.0 - m1) * (1.0 - ops.cdf(qs, 1, c0))
            new0 = m0 * (1.0 - ops.cdf(qs, 0, c1)) + (1.0 - m0) * (1.0 - ops.cdf(qs, 0, c0))
        elif isinstance(profile, strat.CutoffCoordination):
            s0 = ops.lookup(qs, s0_map)
            s1 = ops.lookup(qs, s1_map)
            eff_if1 = np.where(llr_if1 > 0.0, s0, s1)
            eff_if0 = np.where(llr_if0 > 0.0, s0, s1)
            mid_act = np.where(prev, llr_if1 > 0.0, llr_if0 > 0.0)
            a = np.where(s >= s1, True, np.where(s <= s0, False, mid_act))
            followed = (s > s0) & (s < s1)
            new1 = m1 * (1.0 - ops.cdf(qs, 1, eff_if1)) + (1.0 - m1) * (1.0 - ops.cdf(qs, 1, eff_if0))
            new0 = m0 * (1.0 - ops.cdf(qs, 0, eff_if1)) + (1.0 - m0) * (1.0 - ops.cdf(qs, 0, eff_if0))
        else:
            raise UnsupportedLatticeError(f"unsupported profile {profile!r} on a chain lattice")

        if mode == "line":
            m1, m0 = np.asarray(new1, dtype=float), np.asarray(new0, dtype=float)
            prev = a.copy()
        # star mode: the observed variable stays the first action.

        correct = (a == (theta == 1)).astype(float)
        yield t, PeriodOut(a.astype(float), a.astype(float), correct, a_hat, observed, forced, followed)


# ---------------------------------------------------------------------------
# Private per-agent signals on a line: action-count chain.


class _CountChainTables:
    """Deterministic per-period tables for the private-signal line.

    For each period and each observable predecessor count k: the solved
    symmetric cutoff, the per-agent action-1 probabilities under both
    states, the observation-only truth action, and the count marginals.
    """

    def __init__(self, scenario):
        profile = scenario.profile
        if len(scenario.sizes) != 1:
            raise UnsupportedLatticeError("private-signal dynamics need a fixed community size")
        self.q = int(scenario.sizes[0][0])
        q = self.q
        fam = scenario.structure.family_for(q)
        T = scenario.horizon
        self.cut = np.empty((T + 1, q + 1))
        self.p1 = np.empty((T + 1, q + 1))
        self.p0 = np.empty((T + 1, q + 1))
        self.ahat = np.zeros((T + 1, q + 1), dtype=bool)
        self.mu1 = np.zeros((T + 1, q + 1))
        self.mu0 = np.zeros((T + 1, q + 1))
        self.converged = True

        def solve(posteriors: np.ndarray) -> np.ndarray:
            start = fam.inv_likelihood_ratio((1.0 - posteriors) / posteriors)
            current = np.asarray(start, dtype=float)
            for _ in range(profile.max_iter):
                new = strat._private_signal_cutoff_map(
                    scenario.structure, scenario.payoff, q, posteriors, current
                )
                if np.max(np.abs(new - current)) < profile.tol:
                    return new
                current = new
            self.converged = False
            return current

        # Period 1: no observation, posterior 1/2 for every (dummy) k.
        c1 = float(solve(np.array([0.5]))[0])
        self.cut[1, :] = c1
        self.p1[1, :] = 1.0 - float(fam.cdf(1, c1))
        self.p0[1, :] = 1.0 - float(fam.cdf(0, c1))
        self.ahat[1, :] = False
        ks = np.arange(q + 1)
        self.mu1[1] = stats.binom.pmf(ks, q, self.p1[1, 0])
        self.mu0[1] = stats.binom.pmf(ks, q, self.p0[1, 0])

        for t in range(2, T + 1):
            post = self.mu1[t - 1] / np.maximum(self.mu1[t - 1] + self.mu0[t - 1], 1e-300)
            post = np.clip(post, 1e-12, 1.0 - 1e-12)
            cuts = solve(post)
            self.cut[t] = cuts
            self.p1[t] = 1.0 - np.asarray(fam.cdf(1, cuts), dtype=float)
            self.p0[t] = 1.0 - np.asarray(fam.cdf(0, cuts), dtype=float)
            self.ahat[t] = self.mu1[t - 1] > self.mu0[t - 1]
            kern1 = stats.binom.pmf(ks[None, :], q, self.p1[t][:, None])
            kern0 = stats.binom.pmf(ks[None, :], q, self.p0[t][:, None])
            self.mu1[t] = self.mu1[t - 1] @ kern1
            self.mu0[t] = self.mu0[t - 1] @ kern0


def _count_chain_kernel(scenario, theta, u, tables: _CountChainTables):
    q = tables.q
    B = theta.size
    k_prev = np.zeros(B, dtype=np.int64)
    for t in range(1, scenario.horizon + 1):
        p = np.where(theta == 1, tables.p1[t][k_prev], tables.p0[t][k_prev])
        count = stats.binom.ppf(_clip_u(u[:, t, 1]), q, p).astype(np.int64)
        cut = tables.cut[t][k_prev]
        forced = (cut <= -1.0) | (cut >= 1.0)
        followed = forced & (t >= 2)
        a_hat = tables.ahat[t][k_prev]
        observed = np.full(B, t >= 2)
        frac = count / q
        correct = np.where(theta == 1, frac, 1.0 - frac)
        yield t, PeriodOut(count.astype(float), frac, correct, a_hat, observed, forced, followed)
        k_prev = count


# ---------------------------------------------------------------------------
# Separation splits with complete observation.


def _separation_kernel(scenario, theta, u):
    if len(scenario.sizes) != 1:
        raise UnsupportedLatticeError("separation dynamics need a fixed community size")
    q = int(scenario.sizes[0][0])
    fam = scenario.structure.family_for(q)
    selection = strat.separation_selection(scenario.payoff, q)
    edges = np.array(selection.edges)
    counts = np.array(selection.counts, dtype=np.int64)
    with np.errstate(divide="ignore"):
        logit_edges = np.log(edges) - np.log1p(-edges)
    # Intervals sharing a count value pool their probability mass.
    groups: dict[int, list[int]] = {}
    for j, c in enumerate(counts):
        groups.setdefault(int(c), []).append(j)

    B = theta.size
    llr = np.zeros(B)
    for t in range(1, scenario.horizon + 1):
        s = np.asarray(fam.ppf(1, _clip_u(u[:, t, 1])), dtype=float)
        mask0 = theta == 0
        if np.any(mask0):
            s[mask0] = fam.ppf(0, _clip_u(u[mask0, t, 1]))
        loglr_s = np.asarray(np.log(fam.likelihood_ratio(s)), dtype=float)
        x = llr + loglr_s
        j = np.searchsorted(logit_edges, x, side="left") - 1
        j = np.clip(j, 0, counts.size - 1)
        count = counts[j]

        # Signal positions of every belief edge given the current prior.
        cuts = fam.indifference_signal(llr[:, None] - logit_edges[None, :])
        f1 = np.asarray(fam.cdf(1, cuts), dtype=float)
        f0 = np.asarray(fam.cdf(0, cuts), dtype=float)
        seg1 = np.diff(f1, axis=1)
        seg0 = np.diff(f0, axis=1)
        prob1 = np.zeros(B)
        prob0 = np.zeros(B)
        for value, idxs in groups.items():
            hit = count == value
            if np.any(hit):
                prob1[hit] = seg1[np.ix_(hit, idxs)].sum(axis=1)
                prob0[hit] = seg0[np.ix_(hit, idxs)].sum(axis=1)
        forced = (seg1[np.arange(B), j] >= 1.0 - 1e-12) & (seg0[np.arange(B), j] >= 1.0 - 1e-12)
        inc = np.where(forced, 0.0, np.log(np.maximum(prob1, 1e-300)) - np.log(np.maximum(prob0, 1e-300)))

        frac = count / q
        correct = np.where(theta == 1, frac, 1.0 - frac)
        a_hat = x > 0.0
        observed = np.full(B, t >= 2)
        followed = forced & (t >= 2)
        yield t, PeriodOut(count.astype(float), frac, correct, a_hat, observed, forced, followed)
        llr = llr + inc


# ---------------------------------------------------------------------------
# Bounded-lookback stochastic mixtures: joint window-state chain.


class _WindowTables:
    """Per-period window-state marginals and decision tables.

    State w encodes the last min(t-1, k) actions with the newest action in
    bit 0.  For each period, pattern, and state the tables hold the
    observation log odds, the realized decision threshold data, and the
    per-state action-1 probabilities used to advance the marginals.
    """

    def __init__(self, scenario, lookback: int):
        if len(scenario.sizes) != 1:
            raise UnsupportedLatticeError("window dynamics need a fixed community size")
        self.k = lookback
        self.q = int(scenario.sizes[0][0])
        q = self.q
        fam = scenario.structure.family_for(q)
        profile = scenario.profile
        self.patterns = [pat for pat, _ in scenario.scheme.entries]
        self.pattern_cum = np.cumsum([p for _, p in scenario.scheme.entries])
        self.is_cutoff = isinstance(profile, strat.CutoffCoordination)
        if self.is_cutoff:
            self.s0, self.s1 = cutoff_pair(scenario.structure, q, profile.epsilon)
            self.fallback = float(np.clip(fam.indifference_signal(0.0), self.s0, self.s1))
        lo_rng, hi_rng = fam.log_lr_range()
        T = scenario.horizon
        P = len(self.patterns)
        self.thresh = []  # per t: array [P, states]
        self.forced = []
        self.llr_obs = []
        self.mu1 = []
        self.mu0 = []

        mu1 = np.array([1.0])
        mu0 = np.array([1.0])
        depth = {pat: (0 if pat == "none" else int(pat.split(":")[1])) for pat in self.patterns}
        for t in range(1, T + 1):
            l = min(t - 1, self.k)
            states = 1 << l
            thresh_t = np.empty((P, states))
            forced_t = np.zeros((P, states), dtype=bool)
            llr_t = np.zeros((P, states))
            for pi, pat in enumerate(self.patterns):
                d = min(depth[pat], l)
                if d == 0:
                    llr = np.zeros(states)
                else:
                    mask = (1 << d) - 1
                    obs = np.arange(states) & mask
                    num1 = np.bincount(obs, weights=mu1, minlength=1 << d)
                    num0 = np.bincount(obs, weights=mu0, minlength=1 << d)
                    with np.errstate(divide="ignore"):
                        llr = (np.log(num1) - np.log(num0))[obs]
                llr_t[pi] = llr
                if self.is_cutoff:
                    if d == 0:
                        thresh_t[pi] = self.fallback
                    else:
                        thresh_t[pi] = np.where(llr > 0.0, self.s0, self.s1)
                else:
                    c = np.asarray(fam.indifference_signal(llr), dtype=float)
                    f1 = -llr <= lo_rng
                    f0 = -llr >= hi_rng
                    forced_t[pi] = f1 | f0
                    thresh_t[pi] = np.where(f1, -1.0, np.where(f0, 1.0, c))
            self.thresh.append(thresh_t)
            self.forced.append(forced_t)
            self.llr_obs.append(llr_t)
            self.mu1.append(mu1)
            self.mu0.append(mu0)

            # Advance the window marginals: P(a=1 | state) mixes patterns.
            probs = np.array([p for _, p in scenario.scheme.entries])
            pa1 = np.zeros(states)
            pa0 = np.zeros(states)
            for pi in range(P):
                c = thresh_t[pi]
                pa1 += probs[pi] * (1.0 - np.asarray(fam.cdf(1, c), dtype=float))
                pa0 += probs[pi] * (1.0 - np.asarray(fam.cdf(0, c), dtype=float))
            l_next = min(t, self.k)
            new_states = 1 << l_next
            keep = (1 << l_next) - 1
            new1 = np.zeros(new_states)
            new0 = np.zeros(new_states)
            w = np.arange(states)
            for a in (0, 1):
                dest = ((w << 1) | a) & keep
                weight1 = mu1 * (pa1 if a == 1 else 1.0 - pa1)
                weight0 = mu0 * (pa0 if a == 1 else 1.0 - pa0)
                np.add.at(new1, dest, weight1)
                np.add.at(new0, dest, weight0)
            mu1, mu0 = new1, new0


def _window_kernel(scenario, theta, u, tables: _WindowTables):
    fam = scenario.structure.family_for(tables.q)
    B = theta.size
    window = np.zeros(B, dtype=np.int64)
    depth = [0 if pat == "none" else int(pat.split(":")[1]) for pat in tables.patterns]
    for t in range(1, scenario.horizon + 1):
        l = min(t - 1, tables.k)
        keep = (1 << l) - 1
        state = window & keep
        pi = np.searchsorted(tables.pattern_cum, u[:, t, 2], side="right")
        pi = np.minimum(pi, len(tables.patterns) - 1)
        s = np.asarray(fam.ppf(1, _clip_u(u[:, t, 1])), dtype=float)
        mask0 = theta == 0
        if np.any(mask0):
            s[mask0] = fam.ppf(0, _clip_u(u[mask0, t, 1]))
        loglr_s = np.asarray(np.log(fam.likelihood_ratio(s)), dtype=float)

        thresh = tables.thresh[t - 1][pi, state]
        forced = tables.forced[t - 1][pi, state]
        llr_obs = tables.llr_obs[t - 1][pi, state]
        observed = (np.minimum(np.array(depth)[pi], l) > 0)
        if tables.is_cutoff:
            d = np.minimum(np.array(depth)[pi], l)
            empty = d == 0
            mid_act = np.where(empty, s > thresh, llr_obs > 0.0)
            a = np.where(s >= tables.s1, True, np.where(s <= tables.s0, False, mid_act))
            followed = observed & (s > tables.s0) & (s < tables.s1)
        else:
            a = np.where(forced, thresh <= -1.0, s > thresh)
            followed = observed & (a == (llr_obs > 0.0))
        a_hat = (llr_obs + loglr_s) > 0.0
        correct = (a == (theta == 1)).astype(float)
        yield t, PeriodOut(a.astype(float), a.astype(float), correct, a_hat, observed, forced, followed)
        window = ((window << 1) | a.astype(np.int64)) & ((1 << tables.k) - 1)


# ---------------------------------------------------------------------------
# Kernel selection.


def make_kernel(scenario):
    """Bind a scenario to its exact dynamics; returns kernel(theta, u)."""
    scheme = scenario.scheme
    profile = scenario.profile

    if isinstance(profile, strat.PrivateSignalSymmetric):
        if not isinstance(scheme, Line):
            raise UnsupportedLatticeError("private-signal dynamics are defined on the line")
        tables = _CountChainTables(scenario)
        return lambda theta, u: _count_chain_kernel(scenario, theta, u, tables)

    if isinstance(profile, strat.SeparationSplit):
        if not isinstance(scheme, Complete):
            raise UnsupportedLatticeError("separation dynamics need complete observation")
        return lambda theta, u: _separation_kernel(scenario, theta, u)

    if isinstance(profile, strat.DelegateObserver):
        ok = isinstance(scheme, Line) or (
            isinstance(scheme, Endogenous) and scheme.capacity.kind == "constant"
        )
        if not ok:
            raise UnsupportedLatticeError("delegate chains observe one predecessor delegate")
        return lambda theta, u: _chain_kernel(scenario, theta, u, "line")

    if isinstance(scheme, Complete):
        return lambda theta, u: _complete_kernel(scenario, theta, u)

    if isinstance(scheme, Endogenous):
        if scheme.capacity.kind != "linear":
            raise UnsupportedLatticeError(
                "exact endogenous dynamics need full capacity K(t) = t-1"
            )
        if isinstance(profile, (strat.EndogenousCutoff, strat.CutoffCoordination,
                                strat.TruthSeeking, strat.FixedAction)):
            return lambda theta, u: _complete_kernel(scenario, theta, u)
        raise UnsupportedLatticeError(f"unsupported profile {profile!r} for endogenous capacity")

    if isinstance(scheme, Line):
        return lambda theta, u: _chain_kernel(scenario, theta, u, "line")

    if isinstance(scheme, Star):
        return lambda theta, u: _chain_kernel(scenario, theta, u, "star")

    if isinstance(scheme, CustomStochastic):
        depths = []
        for pat, _ in scheme.entries:
            if pat == "none":
                depths.append(0)
            elif pat.startswith("last:"):
                depths.append(int(pat.split(":")[1]))
            else:
                raise UnsupportedLatticeError(
                    f"exact dynamics support bounded lookback only, got pattern {pat!r}"
                )
        k = max(max(depths), 1)
        if k > 12:
            raise UnsupportedLatticeError(f"lookback {k} exceeds the exact window cap of 12")
        if not isinstance(profile, (strat.TruthSeeking, strat.CutoffCoordination)):
            raise UnsupportedLatticeError(f"unsupported profile {profile!r} for window dynamics")
        tables = _WindowTables(scenario, k)
        return lambda theta, u: _window_kernel(scenario, theta, u, tables)

    raise UnsupportedLatticeError(f"no exact dynamics for scheme {scheme!r}")


# ---------------------------------------------------------------------------
# Exact history likelihoods for the posterior engine.


def history_log_odds(scenario, history: History) -> float:
    """log P(h | state 1) - log P(h | state 0) for a supported lattice."""
    scheme = scenario.scheme
    profile = scenario.profile
    outcomes = dict(history.outcomes)

    if isinstance(profile, strat.PrivateSignalSymmetric):
        tables = _CountChainTables(scenario)
        if set(outcomes) != {history.t - 1}:
            raise UnsupportedLatticeError("private-signal histories carry the predecessor count")
        k = int(outcomes[history.t - 1])
        mu1 = tables.mu1[history.t - 1][k]
        mu0 = tables.mu0[history.t - 1][k]
        if mu1 == 0.0 and mu0 == 0.0:
            raise UnsupportedLatticeError("count unreachable under the solved profile")
        return float(np.log(mu1) - np.log(mu0))

    if isinstance(scheme, (Line, Star)) and isinstance(
        profile, (strat.TruthSeeking, strat.CutoffCoordination, strat.DelegateObserver, strat.FixedAction)
    ) or (isinstance(scheme, Endogenous) and isinstance(profile, strat.DelegateObserver)):
        tau = 1 if isinstance(scheme, Star) else history.t - 1
        if set(outcomes) != {tau}:
            raise UnsupportedLatticeError("chain histories carry one observed action")
        m1, m0 = _chain_marginal(scenario, tau)
        v = int(outcomes[tau])
        return float(np.log(m1 if v == 1 else 1.0 - m1) - np.log(m0 if v == 1 else 1.0 - m0))

    if isinstance(scheme, Complete) or (
        isinstance(scheme, Endogenous) and scheme.capacity.kind == "linear"
    ):
        if set(outcomes) != set(range(1, history.t)):
            raise UnsupportedLatticeError("complete lattices need the full action prefix")
        return _complete_replay(scenario, [outcomes[tau] for tau in range(1, history.t)])

    if isinstance(scheme, CustomStochastic):
        tables = _WindowTables(scenario, max(
            max((0 if p == "none" else int(p.split(":")[1])) for p, _ in scheme.entries), 1))
        l = min(history.t - 1, tables.k)
        num1 = num0 = 0.0
        for w in range(1 << l):
            fits = all(
                ((w >> (history.t - 1 - tau)) & 1) == int(v)
                for tau, v in outcomes.items()
                if history.t - tau <= l
            )
            if any(history.t - tau > l for tau in outcomes):
                raise UnsupportedLatticeError("history reaches past the lookback window")
            if fits:
                num1 += tables.mu1[history.t - 1][w]
                num0 += tables.mu0[history.t - 1][w]
        if num1 == 0.0 and num0 == 0.0:
            raise UnsupportedLatticeError("window history unreachable under the profile")
        return float(np.log(num1) - np.log(num0))

    raise UnsupportedLatticeError(f"no exact likelihood for scheme {scheme!r}")


def _only_size(scenario) -> int:
    if len(scenario.sizes) != 1:
        raise UnsupportedLatticeError("history replay needs a fixed community size")
    return int(scenario.sizes[0][0])


def _chain_marginal(scenario, tau: int) -> tuple[float, float]:
    """P(observed chain action = 1 | state) after tau periods."""
    q = _only_size(scenario)
    fam = scenario.structure.family_for(q)
    profile = scenario.profile
    if isinstance(profile, strat.FixedAction):
        return float(profile.action), float(profile.action)
    if isinstance(profile, strat.CutoffCoordination):
        s0, s1 = cutoff_pair(scenario.structure, q, profile.epsilon)
        c = float(np.clip(fam.indifference_signal(0.0), s0, s1))
    else:
        c = float(fam.indifference_signal(0.0))
    m1 = 1.0 - float(fam.cdf(1, c))
    m0 = 1.0 - float(fam.cdf(0, c))
    if isinstance(profile, strat.DelegateObserver) or isinstance(scenario.scheme, Star):
        return m1, m0
    for _ in range(2, tau + 1):
        with np.errstate(divide="ignore"):
            llr1 = np.log(m1) - np.log(m0)
            llr0 = np.log1p(-m1) - np.log1p(-m0)
        if isinstance(profile, strat.TruthSeeking):
            c1 = float(fam.indifference_signal(llr1))
            c0 = float(fam.indifference_signal(llr0))
        else:
            c1 = s0 if llr1 > 0 else s1
            c0 = s0 if llr0 > 0 else s1
        n1 = m1 * (1.0 - float(fam.cdf(1, c1))) + (1.0 - m1) * (1.0 - float(fam.cdf(1, c0)))
        n0 = m0 * (1.0 - float(fam.cdf(0, c1))) + (1.0 - m0) * (1.0 - float(fam.cdf(0, c0)))
        m1, m0 = n1, n0
    return m1, m0


def _complete_replay(scenario, actions) -> float:
    """Replay a full unanimous-action prefix, returning its log odds."""
    q = _only_size(scenario)
    fam = scenario.structure.family_for(q)
    profile = scenario.profile

    if isinstance(profile, strat.SeparationSplit):
        return _separation_replay(scenario, actions)

    if isinstance(profile, strat.CutoffCoordination):
        s0, s1 = cutoff_pair(scenario.structure, q, profile.epsilon)
    if isinstance(profile, strat.EndogenousCutoff):
        lo_cut, hi_cut = _endogenous_cutoffs(scenario, q, fam)

    llr = 0.0
    for t, a in enumerate(actions, start=1):
        a = int(a)
        if isinstance(profile, strat.FixedAction):
            if a != profile.action:
                raise UnsupportedLatticeError("impossible action under a fixed profile")
            continue
        if isinstance(profile, strat.TruthSeeking):
            lo_rng, hi_rng = fam.log_lr_range()
            if -llr <= lo_rng or -llr >= hi_rng:
                continue  # forced period carries no information
            c = float(fam.indifference_signal(llr))
        elif isinstance(profile, strat.CutoffCoordination):
            if t == 1:
                c = float(np.clip(fam.indifference_signal(0.0), s0, s1))
            else:
                c = s0 if llr > 0 else s1
        else:  # endogenous cutoff
            c = float(np.clip(fam.indifference_signal(llr), lo_cut, hi_cut))
        p1 = 1.0 - float(fam.cdf(1, c))
        p0 = 1.0 - float(fam.cdf(0, c))
        llr += (np.log(p1) - np.log(p0)) if a == 1 else (np.log1p(-p1) - np.log1p(-p0))
    return float(llr)


def _separation_replay(scenario, counts) -> float:
    q = _only_size(scenario)
    fam = scenario.structure.family_for(q)
    selection = strat.separation_selection(scenario.payoff, q)
    edges = np.array(selection.edges)
    values = np.array(selection.counts, dtype=np.int64)
    with np.errstate(divide="ignore"):
        logit_edges = np.log(edges) - np.log1p(-edges)
    llr = 0.0
    for count in counts:
        cuts = np.asarray(fam.indifference_signal(llr - logit_edges), dtype=float)
        seg1 = np.diff(np.asarray(fam.cdf(1, cuts), dtype=float))
        seg0 = np.diff(np.asarray(fam.cdf(0, cuts), dtype=float))
        hit = values == int(count)
        p1 = float(seg1[hit].sum())
        p0 = float(seg0[hit].sum())
        if p1 == 0.0 and p0 == 0.0:
            raise UnsupportedLatticeError("count unreachable under the selected splits")
        llr += np.log(max(p1, 1e-300)) - np.log(max(p0, 1e-300))
    return float(llr)


# ---------------------------------------------------------------------------
# Monte Carlo history matching (common random numbers across states).


def history_match_counts(scenario, history: History, replications: int, seed: int) -> tuple[int, int]:
    from ._rng import substream

    periods = sorted(tau for tau, _ in history.outcomes)
    values = {tau: v for tau, v in history.outcomes}
    matches = [0, 0]
    block = 4096
    done = 0
    while done < replications:
        n = min(block, replications - done)
        u = np.stack([
            substream(seed, done + i).random((scenario.horizon + 1, 4)) for i in range(n)
        ])
        for th in (0, 1):
            theta = np.full(n, th, dtype=np.int64)
            ok = np.ones(n, dtype=bool)
            kernel = make_kernel(scenario)
            for t, out in kernel(theta, u):
                if t in values:
                    ok &= np.rint(out.act_stat).astype(np.int64) == int(values[t])
                if t >= history.t - 1:
                    break
            matches[th] += int(ok.sum())
        done += n
    return matches[0], matches[1]
