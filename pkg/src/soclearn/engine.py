"""Sequential-process simulation driver and learning-metric aggregation.

Replications are split into fixed-size blocks.  Each block is a pure
function of (scenario, seed, block index), and blocks are folded in index
order, so the emitted CSV is byte-identical no matter how many worker
processes computed the blocks.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ._rng import uniform_block
from .dynamics import make_kernel

BLOCK = 4096
WILSON_Z = 1.959963984540054  # two-sided 95%
SCHEMA_VERSION = "1"
SCHEMA_COLUMNS = (
    "t",
    "reps",
    "p_correct",
    "ci_low",
    "ci_high",
    "p_truthtell_given_obs",
    "p_observed",
    "herd_frequency",
    "acc_state0",
    "acc_state1",
)


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything needed to simulate one scenario.

    sizes is the finite-support community-size distribution as
    ((size, probability), ...) pairs.
    """

    structure: object
    payoff: object
    scheme: object
    profile: object
    sizes: tuple[tuple[int, float], ...]
    horizon: int = 200
    replications: int = 10_000
    seed: int = 0
    herd_window: int = 50
    forced_state: int | None = None
    label: str = ""

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if not self.sizes:
            raise ValueError("community size distribution is empty")
        total = 0.0
        for q, p in self.sizes:
            if int(q) != q or q < 1:
                raise ValueError(f"community size {q!r} must be a positive integer")
            if p <= 0.0:
                raise ValueError(f"size probability {p!r} must be positive")
            total += p
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"size probabilities sum to {total!r}, expected 1")
        if self.forced_state not in (None, 0, 1):
            raise ValueError("forced_state must be None, 0, or 1")
        if self.herd_window < 1:
            raise ValueError("herd window must be at least 1")

    def only_size(self) -> int:
        if len(self.sizes) != 1:
            raise ValueError("scenario has a non-degenerate size distribution")
        return int(self.sizes[0][0])


@dataclass
class SimulationTrace:
    """Per-period record of a single replication."""

    theta: int
    t: np.ndarray
    act_stat: np.ndarray
    act_frac: np.ndarray
    correct: np.ndarray
    a_hat: np.ndarray
    observed: np.ndarray
    forced: np.ndarray
    followed: np.ndarray


@dataclass(frozen=True)
class HerdVerdict:
    herd: bool
    start: int | None = None
    action: float | None = None
    correct: bool | None = None


@dataclass
class LearningCurve:
    """Per-period learning metrics plus run identity."""

    label: str
    horizon: int
    replications: int
    seed: int
    herd_window: int
    t: np.ndarray
    p_correct: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    p_truthtell_given_obs: np.ndarray
    p_observed: np.ndarray
    herd_frequency: np.ndarray
    acc_state0: np.ndarray
    acc_state1: np.ndarray
    wrong_herd_frequency: np.ndarray
    p_correct_observed: np.ndarray
    p_correct_unobserved: np.ndarray

    def at(self, t: int) -> dict[str, float]:
        i = int(t) - 1
        if not 0 <= i < self.horizon:
            raise IndexError(f"period {t} outside 1..{self.horizon}")
        return {name: float(getattr(self, name)[i]) for name in SCHEMA_COLUMNS if name != "reps"} | {
            "reps": float(self.replications)
        }

    def rows(self):
        for i in range(self.horizon):
            yield (
                int(self.t[i]),
                self.replications,
                self.p_correct[i],
                self.ci_low[i],
                self.ci_high[i],
                self.p_truthtell_given_obs[i],
                self.p_observed[i],
                self.herd_frequency[i],
                self.acc_state0[i],
                self.acc_state1[i],
            )

    def csv_text(self) -> str:
        lines = [",".join(SCHEMA_COLUMNS)]
        for row in self.rows():
            t, reps, *rest = row
            lines.append(",".join([str(t), str(reps)] + ["%.6g" % v for v in rest]))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text())


def wilson_interval(successes: float, total: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total <= 0:
        return (float("nan"), float("nan"))
    p = successes / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2.0 * total)) / denom
    half = (z / denom) * np.sqrt(p * (1.0 - p) / total + z * z / (4.0 * total * total))
    return (max(0.0, float(center - half)), min(1.0, float(center + half)))


def run_trace(spec: ScenarioSpec, rep_seed: int = 0) -> SimulationTrace:
    """Simulate one replication; deterministic given (spec.seed, rep_seed)."""
    u = uniform_block(spec.seed, int(rep_seed), 1, spec.horizon)
    theta = _draw_theta(spec, u)
    T = spec.horizon
    act_stat = np.empty(T)
    act_frac = np.empty(T)
    correct = np.empty(T)
    a_hat = np.empty(T, dtype=bool)
    observed = np.empty(T, dtype=bool)
    forced = np.empty(T, dtype=bool)
    followed = np.empty(T, dtype=bool)
    kernel = make_kernel(spec)
    for t, out in kernel(theta, u):
        i = t - 1
        act_stat[i] = out.act_stat[0]
        act_frac[i] = out.act_frac[0]
        correct[i] = out.correct[0]
        a_hat[i] = out.a_hat[0]
        observed[i] = out.observed[0]
        forced[i] = out.forced[0]
        followed[i] = out.followed[0]
    return SimulationTrace(
        int(theta[0]), np.arange(1, T + 1), act_stat, act_frac, correct, a_hat, observed, forced,
        followed,
    )


def detect_herd(trace: SimulationTrace, window: int = 50) -> HerdVerdict:
    """Absorbed unanimous run ending at T, ignoring signals throughout."""
    if window < 1:
        raise ValueError("window must be at least 1")
    T = trace.t.size
    final = trace.act_frac[T - 1]
    start = None
    for i in range(T - 1, -1, -1):
        unanimous = trace.act_frac[i] in (0.0, 1.0)
        if trace.followed[i] and unanimous and trace.act_frac[i] == final:
            start = i + 1
        else:
            break
    if start is None or T - start + 1 < window:
        return HerdVerdict(False)
    action = float(final)
    return HerdVerdict(True, start, action, bool(action == float(trace.theta)))


def _draw_theta(spec: ScenarioSpec, u: np.ndarray) -> np.ndarray:
    if spec.forced_state is not None:
        return np.full(u.shape[0], int(spec.forced_state), dtype=np.int64)
    return (u[:, 0, 0] < 0.5).astype(np.int64)


_KERNEL_CACHE: dict[str, object] = {}


def _kernel_for(spec: ScenarioSpec):
    key = repr(spec)
    kernel = _KERNEL_CACHE.get(key)
    if kernel is None:
        kernel = make_kernel(spec)
        if len(_KERNEL_CACHE) > 32:
            _KERNEL_CACHE.clear()
        _KERNEL_CACHE[key] = kernel
    return kernel


def _block_stats(args):
    """Aggregate one replication block; pure in (spec, seed, start, count)."""
    spec, seed, start, count = args
    T = spec.horizon
    u = uniform_block(seed, start, count, T)
    theta = _draw_theta(spec, u)
    is_one = theta == 1

    corr = np.zeros(T + 1)
    corr_obs = np.zeros(T + 1)
    truth_obs = np.zeros(T + 1)
    obs_cnt = np.zeros(T + 1, dtype=np.int64)
    acc0 = np.zeros(T + 1)
    acc1 = np.zeros(T + 1)
    frac = np.empty((count, T + 1))
    followed = np.empty((count, T + 1), dtype=bool)

    kernel = _kernel_for(spec)
    for t, out in kernel(theta, u):
        corr[t] = out.correct.sum()
        obs = out.observed
        obs_cnt[t] = int(obs.sum())
        corr_obs[t] = out.correct[obs].sum()
        truth_obs[t] = float(np.sum(obs & (out.a_hat == is_one)))
        acc1[t] = out.correct[is_one].sum()
        acc0[t] = out.correct[~is_one].sum()
        frac[:, t] = out.act_frac
        followed[:, t] = out.followed

    # Absorbed-run detection: maximal observation-following unanimous
    # constant suffix; signal-driven periods break the run.
    final = frac[:, T]
    run = np.ones(count, dtype=bool)
    run_start = np.full(count, T + 1, dtype=np.int64)
    for t in range(T, 0, -1):
        ok = followed[:, t] & ((frac[:, t] == 0.0) | (frac[:, t] == 1.0)) & (frac[:, t] == final)
        run &= ok
        run_start[run] = t
    declared = (T - run_start + 1) >= spec.herd_window
    wrong = declared & (final != theta)
    herd_hist = np.bincount(run_start[declared], minlength=T + 2)[: T + 2]
    wrong_hist = np.bincount(run_start[wrong], minlength=T + 2)[: T + 2]

    return (
        corr,
        corr_obs,
        truth_obs,
        obs_cnt,
        acc0,
        acc1,
        herd_hist,
        wrong_hist,
        int((~is_one).sum()),
        int(is_one.sum()),
    )


def resolve_workers(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("SOCLEARN_WORKERS", "").strip()
    if env:
        return max(1, int(env))
    return 1


def estimate_curve(
    spec: ScenarioSpec,
    replications: int | None = None,
    seed: int | None = None,
    workers: int | None = None,
) -> LearningCurve:
    """Aggregate learning metrics over independent replications."""
    R = spec.replications if replications is None else int(replications)
    master = spec.seed if seed is None else int(seed)
    if R < 1:
        raise ValueError("replications must be at least 1")
    nworkers = resolve_workers(workers)
    T = spec.horizon

    tasks = []
    start = 0
    while start < R:
        n = min(BLOCK, R - start)
        tasks.append((spec, master, start, n))
        start += n

    if nworkers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            parts = list(pool.map(_block_stats, tasks, chunksize=1))
    else:
        parts = [_block_stats(task) for task in tasks]

    corr = np.zeros(T + 1)
    corr_obs = np.zeros(T + 1)
    truth_obs = np.zeros(T + 1)
    obs_cnt = np.zeros(T + 1, dtype=np.int64)
    acc0 = np.zeros(T + 1)
    acc1 = np.zeros(T + 1)
    herd_hist = np.zeros(T + 2, dtype=np.int64)
    wrong_hist = np.zeros(T + 2, dtype=np.int64)
    n0 = n1 = 0
    for part in parts:  # fold in block order for bit-stable totals
        corr += part[0]
        corr_obs += part[1]
        truth_obs += part[2]
        obs_cnt += part[3]
        acc0 += part[4]
        acc1 += part[5]
        herd_hist += part[6]
        wrong_hist += part[7]
        n0 += part[8]
        n1 += part[9]

    ts = np.arange(1, T + 1)
    p_correct = corr[1:] / R
    lo = np.empty(T)
    hi = np.empty(T)
    for i in range(T):
        lo[i], hi[i] = wilson_interval(corr[i + 1], R)
    with np.errstate(invalid="ignore", divide="ignore"):
        p_truth = np.where(obs_cnt[1:] > 0, truth_obs[1:] / np.maximum(obs_cnt[1:], 1), np.nan)
        p_obs = obs_cnt[1:] / R
        accs0 = (acc0[1:] / n0) if n0 > 0 else np.full(T, np.nan)
        accs1 = (acc1[1:] / n1) if n1 > 0 else np.full(T, np.nan)
        pc_obs = np.where(obs_cnt[1:] > 0, corr_obs[1:] / np.maximum(obs_cnt[1:], 1), np.nan)
        unobs = R - obs_cnt[1:]
        pc_unobs = np.where(unobs > 0, (corr[1:] - corr_obs[1:]) / np.maximum(unobs, 1), np.nan)
    herd_cum = np.cumsum(herd_hist)[1 : T + 1] / R
    wrong_cum = np.cumsum(wrong_hist)[1 : T + 1] / R

    return LearningCurve(
        label=spec.label,
        horizon=T,
        replications=R,
        seed=master,
        herd_window=spec.herd_window,
        t=ts,
        p_correct=p_correct,
        ci_low=lo,
        ci_high=hi,
        p_truthtell_given_obs=p_truth,
        p_observed=p_obs,
        herd_frequency=herd_cum,
        acc_state0=accs0,
        acc_state1=accs1,
        wrong_herd_frequency=wrong_cum,
        p_correct_observed=pc_obs,
        p_correct_unobserved=pc_unobs,
    )


@dataclass(frozen=True)
class FosdComparison:
    """Terminal estimates under two size distributions, low and high."""

    low_estimate: float
    low_interval: tuple[float, float]
    high_estimate: float
    high_interval: tuple[float, float]
    low_analytic: float
    high_analytic: float
    ordered: bool
    horizon: int


def fosd_dominates(g_low, g_high, tol: float = 1e-12) -> bool:
    """True when g_high first-order stochastically dominates g_low."""
    support = sorted({q for q, _ in g_low} | {q for q, _ in g_high})
    low = dict(g_low)
    high = dict(g_high)
    cum_low = cum_high = 0.0
    for q in support:
        cum_low += low.get(q, 0.0)
        cum_high += high.get(q, 0.0)
        if cum_high > cum_low + tol:
            return False
    return True


def compare_fosd(
    spec: ScenarioSpec,
    g_low,
    g_high,
    replications: int | None = None,
    seed: int | None = None,
    workers: int | None = None,
) -> FosdComparison:
    """Terminal accuracy under two stochastically ordered size distributions."""
    from .strategies import analytic_limit_accuracy

    g_low = tuple((int(q), float(p)) for q, p in g_low)
    g_high = tuple((int(q), float(p)) for q, p in g_high)
    if not fosd_dominates(g_low, g_high):
        raise ValueError("high size distribution does not stochastically dominate the low one")

    results = []
    for g in (g_low, g_high):
        sub = replace(spec, sizes=g)
        curve = estimate_curve(sub, replications=replications, seed=seed, workers=workers)
        results.append((float(curve.p_correct[-1]), (float(curve.ci_low[-1]), float(curve.ci_high[-1]))))
    analytic = [
        analytic_limit_accuracy(spec.structure, spec.payoff, spec.scheme.cost, g)
        for g in (g_low, g_high)
    ]
    (low_est, low_iv), (high_est, high_iv) = results
    half = (low_iv[1] - low_iv[0]) / 2.0 + (high_iv[1] - high_iv[0]) / 2.0
    return FosdComparison(
        low_estimate=low_est,
        low_interval=low_iv,
        high_estimate=high_est,
        high_interval=high_iv,
        low_analytic=analytic[0],
        high_analytic=analytic[1],
        ordered=high_est - low_est > half,
        horizon=spec.horizon,
    )


def meta_text(spec: ScenarioSpec, curve: LearningCurve, extra: dict | None = None) -> str:
    """Run-metadata block for meta.txt; excludes anything worker-dependent."""
    import scipy

    from . import __version__

    lines = {
        "schema_version": SCHEMA_VERSION,
        "columns": ",".join(SCHEMA_COLUMNS),
        "label": spec.label or "(unnamed)",
        "seed": str(curve.seed),
        "horizon": str(curve.horizon),
        "replications": str(curve.replications),
        "herd_window": str(curve.herd_window),
        "interval": f"wilson z={WILSON_Z!r} (95%)",
        "soclearn_version": __version__,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
    }
    if extra:
        lines.update({str(k): str(v) for k, v in extra.items()})
    return "".join(f"{k} = {v}\n" for k, v in lines.items())
