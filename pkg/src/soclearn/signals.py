"""Community signal families on (-1, 1) and private-belief utilities.

A signal family fixes the conditional densities (f0, f1) of the shared
community signal under the two states.  Families are attached to community
sizes through a SignalStructure, which allows a default family plus
per-size overrides.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SignalDomainError(ValueError):
    """Signal argument lies outside the open support (-1, 1)."""


class UnclassifiedBeliefsError(ValueError):
    """Belief limits are neither unbounded for some size nor interior for all."""


@dataclass(frozen=True)
class BeliefClass:
    """Boundedness classification of private beliefs over a size support."""

    kind: str  # "unbounded" or "bounded"
    lower: float
    upper: float


@dataclass(frozen=True)
class MlrpReport:
    passed: bool
    witness: tuple[float, float, float, float] | None = None


class LinearSymmetric:
    """Triangular-tilt family: f1(s) = (1+s)/2, f0(s) = (1-s)/2.

    Likelihood ratios cover (0, inf), so private beliefs are unbounded.
    """

    symmetric = True

    def pdf(self, theta: int, s):
        s = np.asarray(s, dtype=float)
        return (1.0 + s) / 2.0 if theta == 1 else (1.0 - s) / 2.0

    def cdf(self, theta: int, s):
        s = np.asarray(s, dtype=float)
        if theta == 1:
            return (1.0 + s) ** 2 / 4.0
        return 1.0 - (1.0 - s) ** 2 / 4.0

    def ppf(self, theta: int, u):
        u = np.asarray(u, dtype=float)
        if theta == 1:
            return 2.0 * np.sqrt(u) - 1.0
        return 1.0 - 2.0 * np.sqrt(1.0 - u)

    def likelihood_ratio(self, s):
        s = np.asarray(s, dtype=float)
        return (1.0 + s) / (1.0 - s)

    def inv_likelihood_ratio(self, r):
        # Exact inverse; the ratio spans (0, inf) so no clipping is needed.
        r = np.asarray(r, dtype=float)
        return (r - 1.0) / (r + 1.0)

    def indifference_signal(self, log_odds):
        # Solves LR(s) = exp(-log_odds); tanh keeps extreme odds stable.
        return np.tanh(-np.asarray(log_odds, dtype=float) / 2.0)

    def log_lr_range(self) -> tuple[float, float]:
        return (-np.inf, np.inf)

    def belief_limits(self) -> tuple[float, float]:
        return (0.0, 1.0)


class BoundedMixture:
    """Uniform-mixture family: f1(s) = (1+lam*s)/2, f0(s) = (1-lam*s)/2.

    The mixing weight lam in (0, 1) bounds likelihood ratios inside
    [(1-lam)/(1+lam), (1+lam)/(1-lam)], so private beliefs are interior.
    """

    symmetric = True

    def __init__(self, lam: float):
        if not 0.0 < lam < 1.0:
            raise ValueError(f"mixing weight must lie in (0, 1), got {lam}")
        self.lam = float(lam)

    def pdf(self, theta: int, s):
        s = np.asarray(s, dtype=float)
        tilt = self.lam * s
        return (1.0 + tilt) / 2.0 if theta == 1 else (1.0 - tilt) / 2.0

    def cdf(self, theta: int, s):
        s = np.asarray(s, dtype=float)
        base = (s + 1.0) / 2.0
        bow = self.lam * (s * s - 1.0) / 4.0
        return base + bow if theta == 1 else base - bow

    def ppf(self, theta: int, u):
        u = np.asarray(u, dtype=float)
        lam = self.lam
        if theta == 1:
            disc = (1.0 - lam) ** 2 + 4.0 * lam * u
            return (np.sqrt(disc) - 1.0) / lam
        disc = (1.0 - lam) ** 2 + 4.0 * lam * (1.0 - u)
        return -(np.sqrt(disc) - 1.0) / lam

    def likelihood_ratio(self, s):
        s = np.asarray(s, dtype=float)
        tilt = self.lam * s
        return (1.0 + tilt) / (1.0 - tilt)

    def inv_likelihood_ratio(self, r):
        # Ratios outside the attainable band map to the support endpoints.
        r = np.asarray(r, dtype=float)
        s = (r - 1.0) / (self.lam * (r + 1.0))
        return np.clip(s, -1.0, 1.0)

    def indifference_signal(self, log_odds):
        s = np.tanh(-np.asarray(log_odds, dtype=float) / 2.0) / self.lam
        return np.clip(s, -1.0, 1.0)

    def log_lr_range(self) -> tuple[float, float]:
        hi = np.log((1.0 + self.lam) / (1.0 - self.lam))
        return (-hi, hi)

    def belief_limits(self) -> tuple[float, float]:
        return ((1.0 - self.lam) / 2.0, (1.0 + self.lam) / 2.0)


class TabulatedFamily:
    """Piecewise-linear densities read off a shared signal grid.

    Densities are renormalized to integrate to one over [-1, 1].  The CDF
    is piecewise quadratic and inverted cell by cell, so quantile
    round-trips are exact up to float arithmetic.  Belief limits are taken
    from the grid endpoints, which is a finite-grid proxy for the true
    limits.
    """

    symmetric = False

    def __init__(self, grid: np.ndarray, f0: np.ndarray, f1: np.ndarray):
        grid = np.asarray(grid, dtype=float)
        f0 = np.asarray(f0, dtype=float)
        f1 = np.asarray(f1, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid must hold at least two signal points")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if not (np.isclose(grid[0], -1.0) and np.isclose(grid[-1], 1.0)):
            raise ValueError("grid must span [-1, 1]")
        if f0.shape != grid.shape or f1.shape != grid.shape:
            raise ValueError("density tables must match the grid length")
        if np.any(f0 <= 0) or np.any(f1 <= 0):
            raise ValueError("densities must be strictly positive on the grid")
        self.grid = grid
        h = np.diff(grid)
        self._f = {}
        self._F = {}
        for theta, f in ((0, f0), (1, f1)):
            mass = float(np.sum((f[:-1] + f[1:]) / 2.0 * h))
            f = f / mass
            F = np.concatenate(([0.0], np.cumsum((f[:-1] + f[1:]) / 2.0 * h)))
            F[-1] = 1.0
            self._f[theta] = f
            self._F[theta] = F

    def pdf(self, theta: int, s):
        s = np.asarray(s, dtype=float)
        return np.interp(s, self.grid, self._f[theta])

    def cdf(self, theta: int, s):
        s = np.asarray(s, dtype=float)
        s = np.clip(s, -1.0, 1.0)
        i = np.clip(np.searchsorted(self.grid, s, side="right") - 1, 0, self.grid.size - 2)
        g, f, F = self.grid, self._f[theta], self._F[theta]
        ds = s - g[i]
        slope = (f[i + 1] - f[i]) / (g[i + 1] - g[i])
        return F[i] + f[i] * ds + 0.5 * slope * ds * ds

    def ppf(self, theta: int, u):
        u = np.asarray(u, dtype=float)
        u = np.clip(u, 0.0, 1.0)
        g, f, F = self.grid, self._f[theta], self._F[theta]
        i = np.clip(np.searchsorted(F, u, side="right") - 1, 0, g.size - 2)
        slope = (f[i + 1] - f[i]) / (g[i + 1] - g[i])
        du = u - F[i]
        # Solve 0.5*slope*ds^2 + f_i*ds = du for ds inside the cell.
        lin = np.where(slope == 0.0, 1.0, slope)
        disc = np.sqrt(np.maximum(f[i] ** 2 + 2.0 * lin * du, 0.0))
        ds = np.where(slope == 0.0, du / f[i], (disc - f[i]) / lin)
        return np.clip(g[i] + ds, -1.0, 1.0)

    def likelihood_ratio(self, s):
        return self.pdf(1, s) / self.pdf(0, s)

    def inv_likelihood_ratio(self, r):
        # The knot ratio sequence is monotone whenever the family passes
        # the MLRP check, so interpolation on knots inverts it.
        r = np.asarray(r, dtype=float)
        knots = self._f[1] / self._f[0]
        return np.interp(r, knots, self.grid)

    def indifference_signal(self, log_odds):
        x = np.clip(-np.asarray(log_odds, dtype=float), -700.0, 700.0)
        return self.inv_likelihood_ratio(np.exp(x))

    def log_lr_range(self) -> tuple[float, float]:
        knots = self._f[1] / self._f[0]
        return (float(np.log(knots[0])), float(np.log(knots[-1])))

    def belief_limits(self) -> tuple[float, float]:
        f0, f1 = self._f[0], self._f[1]
        return (f1[0] / (f0[0] + f1[0]), f1[-1] / (f0[-1] + f1[-1]))


def load_tabulated(path0, path1, grid_size: int = 257) -> TabulatedFamily:
    """Build a TabulatedFamily from two-column (signal, density) text tables.

    Both tables are resampled by linear interpolation onto a common
    uniform grid so the two states share knots.
    """
    cols0 = np.loadtxt(path0, ndmin=2)
    cols1 = np.loadtxt(path1, ndmin=2)
    grid = np.linspace(-1.0, 1.0, grid_size)
    f0 = np.interp(grid, cols0[:, 0], cols0[:, 1])
    f1 = np.interp(grid, cols1[:, 0], cols1[:, 1])
    return TabulatedFamily(grid, f0, f1)


@dataclass(frozen=True)
class SignalStructure:
    """Default signal family plus optional per-community-size overrides."""

    default: object
    per_size: dict[int, object] = field(default_factory=dict)

    def family_for(self, q: int):
        return self.per_size.get(int(q), self.default)

    def pdf(self, q: int, theta: int, s):
        return self.family_for(q).pdf(theta, s)

    def cdf(self, q: int, theta: int, s):
        return self.family_for(q).cdf(theta, s)

    def ppf(self, q: int, theta: int, u):
        return self.family_for(q).ppf(theta, u)


def _check_open_support(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if np.any(s <= -1.0) or np.any(s >= 1.0):
        raise SignalDomainError(f"signal must lie strictly inside (-1, 1), got {s}")
    return s


def private_belief(structure: SignalStructure, q: int, s):
    """Posterior probability of state 1 from the community signal alone."""
    s = _check_open_support(s)
    fam = structure.family_for(q)
    f1 = fam.pdf(1, s)
    f0 = fam.pdf(0, s)
    return f1 / (f0 + f1)


def cdf(structure: SignalStructure, q: int, theta: int, s):
    s = np.asarray(s, dtype=float)
    if np.any(s < -1.0) or np.any(s > 1.0):
        raise SignalDomainError(f"signal must lie in [-1, 1], got {s}")
    return structure.cdf(q, theta, s)


def sample_signal(structure: SignalStructure, q: int, theta: int, rng: np.random.Generator, size=None):
    """Draw community signals by inverse-CDF from a uniform variate."""
    u = rng.random(size)
    return structure.ppf(q, theta, u)


def classify_beliefs(structure: SignalStructure, sizes) -> BeliefClass:
    """Classify private beliefs over a community-size support.

    Beliefs are unbounded when some size attains limits 0 and 1, and
    bounded when every size keeps both limits interior.  Mixed supports
    fit neither definition and raise UnclassifiedBeliefsError.
    """
    tol = 1e-9
    limits = [structure.family_for(q).belief_limits() for q in sizes]
    if not limits:
        raise ValueError("size support is empty")
    if any(lo <= tol and hi >= 1.0 - tol for lo, hi in limits):
        return BeliefClass("unbounded", min(l[0] for l in limits), max(l[1] for l in limits))
    if all(lo > tol and hi < 1.0 - tol for lo, hi in limits):
        return BeliefClass("bounded", min(l[0] for l in limits), max(l[1] for l in limits))
    raise UnclassifiedBeliefsError(
        "size support mixes one-sided or degenerate belief limits: " f"{limits}"
    )


def check_mlrp(structure: SignalStructure, q: int, grid_size: int = 2001) -> MlrpReport:
    """Check that the likelihood ratio f1/f0 is nondecreasing on a grid.

    For piecewise-linear tabulated densities the ratio is monotone within
    each cell, so knot ordering is decisive; analytic families are checked
    on the evaluation grid directly.
    """
    fam = structure.family_for(q)
    if isinstance(fam, TabulatedFamily):
        s = fam.grid
    else:
        s = np.linspace(-1.0, 1.0, grid_size)[1:-1]
    ratio = np.asarray(fam.pdf(1, s) / fam.pdf(0, s), dtype=float)
    bad = np.nonzero(np.diff(ratio) < -1e-12)[0]
    if bad.size:
        i = int(bad[0])
        return MlrpReport(False, (float(s[i]), float(s[i + 1]), float(ratio[i]), float(ratio[i + 1])))
    return MlrpReport(True, None)
