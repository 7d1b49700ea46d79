"""Payoffs over (state, action, same-action head count) and their assumptions.

The head count m includes the agent herself, so m ranges over 1..Q inside a
community of size Q.  Arithmetic stays in pure Python so exact number types
(e.g. fractions.Fraction) pass through untouched; the verification suites
rely on that for exact closed-form comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class PayoffDomainError(ValueError):
    """Arguments outside the payoff domain (bad state, action, or count)."""


class ThresholdNotFoundError(ValueError):
    """No conformity threshold exists below the search cap."""


@dataclass(frozen=True)
class PayoffSpec:
    """Utility u(theta, a, m) in one of three forms.

    kind "linear":     u = base + 1{a==theta}*(match_bonus + match_step*(m-1))
                           + conformity_step*(m-1)
    kind "separation": u = 1{a==theta}*match_bonus + kappa/m
    kind "table":      u = table[theta][a][m-1], table shape (2, 2, m_cap)
    """

    kind: str = "linear"
    base: float = 0.1
    match_bonus: float = 1.0
    conformity_step: float = 0.25
    match_step: float = 0.0
    kappa: float = 2.0
    table: tuple = field(default=None, repr=False)

    def utility(self, theta: int, a: int, m: int):
        if theta not in (0, 1) or a not in (0, 1):
            raise PayoffDomainError(f"state and action must be 0 or 1, got ({theta}, {a})")
        if m < 1 or m != int(m):
            raise PayoffDomainError(f"head count must be a positive integer, got {m}")
        m = int(m)
        if self.kind == "linear":
            u = self.base + self.conformity_step * (m - 1)
            if a == theta:
                u = u + self.match_bonus + self.match_step * (m - 1)
            return u
        if self.kind == "separation":
            u = self.kappa / m
            if a == theta:
                u = u + self.match_bonus
            return u
        if self.kind == "table":
            if m > len(self.table[0][0]):
                raise PayoffDomainError(f"head count {m} exceeds the tabulated cap")
            return self.table[theta][a][m - 1]
        raise PayoffDomainError(f"unknown payoff kind {self.kind!r}")

    def match_gap(self, m: int):
        """Utility margin of matching the state at a fixed head count."""
        return self.utility(1, 1, m) - self.utility(1, 0, m)


def linear_payoff(base=0.1, match_bonus=1.0, conformity_step=0.25, match_step=0.0) -> PayoffSpec:
    return PayoffSpec("linear", base=base, match_bonus=match_bonus,
                      conformity_step=conformity_step, match_step=match_step)


def separation_payoff(kappa=2.0, match_bonus=1.0) -> PayoffSpec:
    return PayoffSpec("separation", match_bonus=match_bonus, kappa=kappa)


def tabulated_payoff(values) -> PayoffSpec:
    """Wrap a (2, 2, m_cap) nested sequence of utilities."""
    table = tuple(tuple(tuple(row) for row in plane) for plane in values)
    if len(table) != 2 or any(len(plane) != 2 for plane in table):
        raise PayoffDomainError("table must have shape (2, 2, m_cap)")
    if len({len(row) for plane in table for row in plane}) != 1:
        raise PayoffDomainError("all table rows must share the head-count cap")
    return PayoffSpec("table", table=table)


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    direction: str | None  # "increasing" (coordination) or "decreasing" (separation)
    violations: tuple[str, ...] = ()


def validate_assumptions(spec: PayoffSpec, m_max: int = 64) -> ValidationReport:
    """Check positivity, strict shared monotonicity in m, label symmetry,
    and (for increasing payoffs) a finite conformity witness.

    Label symmetry means u(0,0,m) = u(1,1,m) and u(1,0,m) = u(0,1,m) with
    matching strictly better at equal head counts.  The conformity witness
    is some m with u(1,0,m) > u(1,1,1): enough misaligned company beats a
    lone match.
    """
    bad: list[str] = []
    u = spec.utility
    if spec.kind == "table":
        m_max = min(m_max, len(spec.table[0][0]))
    for theta in (0, 1):
        for a in (0, 1):
            for m in range(1, m_max + 1):
                if not u(theta, a, m) > 0:
                    bad.append(f"u({theta},{a},{m}) <= 0")
    deltas = []
    for theta in (0, 1):
        for a in (0, 1):
            for m in range(1, m_max):
                deltas.append((theta, a, m, u(theta, a, m + 1) - u(theta, a, m)))
    increasing = all(d > 0 for *_, d in deltas)
    decreasing = all(d < 0 for *_, d in deltas)
    direction = "increasing" if increasing else "decreasing" if decreasing else None
    if direction is None:
        flat = next((t for t in deltas if not (t[3] > 0) and not (t[3] < 0)), None)
        if flat is not None:
            bad.append(f"assumption 1: u({flat[0]},{flat[1]},m) not strictly monotone at m={flat[2]}")
        else:
            bad.append(
                "assumption 1: head-count monotonicity direction differs across (state, action) pairs"
            )
    for m in range(1, m_max + 1):
        if u(0, 0, m) != u(1, 1, m):
            bad.append(f"assumption 2: u(0,0,{m}) != u(1,1,{m})")
        if u(1, 0, m) != u(0, 1, m):
            bad.append(f"assumption 2: u(1,0,{m}) != u(0,1,{m})")
        if not u(1, 1, m) > u(1, 0, m):
            bad.append(f"assumption 2: u(1,1,{m}) <= u(1,0,{m})")
    # Decreasing payoffs are separation-mode: assumption 3 does not apply.
    separation = spec.kind == "separation" or direction == "decreasing"
    if not separation:
        if not any(u(1, 0, m) > u(1, 1, 1) for m in range(1, m_max + 1)):
            bad.append(f"assumption 3: no head count m <= {m_max} with u(1,0,m) > u(1,1,1)")
    return ValidationReport(not bad, direction, tuple(bad))


def conformity_threshold(spec: PayoffSpec, q_cap: int = 1024) -> int:
    """Smallest head count at which misaligned company weakly beats a lone match.

    Returns the least m with u(1,0,m) >= u(1,1,1).  Communities at least
    this large sustain unanimity on either action.
    """
    lone_match = spec.utility(1, 1, 1)
    for m in range(1, q_cap + 1):
        if spec.utility(1, 0, m) >= lone_match:
            return m
    raise ThresholdNotFoundError(f"no conformity threshold at or below {q_cap}")
