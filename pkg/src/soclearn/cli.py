"""Command-line front end: run scenarios, list presets, verify properties.

Exit codes: 0 success, 1 config parse error, 2 semantic validation
failure, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .beliefs import belief_step_bounds, cutoff_pair, reversal_horizon
from .config import ConfigError, parse_config, validate_scenario
from .engine import SCHEMA_COLUMNS, estimate_curve, meta_text
from .payoffs import PayoffSpec, conformity_threshold, linear_payoff, separation_payoff, validate_assumptions
from .presets import PRESET_NAMES, preset, preset_table
from .signals import BoundedMixture, LinearSymmetric, SignalStructure
from .strategies import (
    delegate_incentive_check,
    risk_dominance_check,
    separation_selection,
    separation_split,
    unanimity_search,
)


def _fraction_payoff() -> PayoffSpec:
    return linear_payoff(Fraction(1, 10), Fraction(1), Fraction(1, 4), match_step=Fraction(0))


def _suite_payoff(payoff: PayoffSpec | None = None) -> tuple[bool, list[str]]:
    """Unanimity-only equilibria for coordination payoffs (interior splits absent)."""
    spec = payoff if payoff is not None else _fraction_payoff()
    lines = []
    report = validate_assumptions(spec)
    if not report.passed:
        lines.append(
            "FAIL payoff: Prop 1 scope needs the payoff assumptions; violated: "
            + "; ".join(report.violations)
        )
        return False, lines
    qhat = conformity_threshold(spec)
    lines.append(f"ok payoff: assumptions hold, conformity threshold {qhat}")
    ok = True
    for q in range(2, 9):
        found = unanimity_search(spec, q)
        if found:
            ok = False
            p, q1 = found[0]
            lines.append(f"FAIL payoff: interior split q1={q1} at belief {p:.4g} for q={q}")
        else:
            lines.append(f"ok payoff: no interior split equilibria at q={q}")
    return ok, lines


def _suite_risk(payoff: PayoffSpec | None = None) -> tuple[bool, list[str]]:
    """Switching-subset enumeration must equal the closed form exactly."""
    spec = payoff if payoff is not None else _fraction_payoff()
    lines = []
    ok = True
    grid = [Fraction(n, 40) for n in range(20, 41)]
    for q in range(2, 7):
        for p in grid:
            rep = risk_dominance_check(spec, q, p)
            for switch, closed, enum in rep.diffs:
                if closed != enum:
                    ok = False
                    lines.append(
                        f"FAIL risk: q={q} p={p} switch={switch}: closed {closed} != enumerated {enum}"
                    )
                if p >= Fraction(1, 2) and closed < 0:
                    ok = False
                    lines.append(f"FAIL risk: truth-favored action loses at q={q} p={p}")
        if ok:
            lines.append(f"ok risk: closed form matches enumeration for q={q} over {len(grid)} beliefs")
    return ok, lines


def _suite_separation(payoff: PayoffSpec | None = None) -> tuple[bool, list[str]]:
    """Randomized sweeps: selected splits never put the minority on the favored action."""
    lines = []
    ok = True
    rng = np.random.default_rng(20260810)
    for i in range(20):
        if payoff is not None:
            spec = payoff
        else:
            spec = separation_payoff(
                kappa=float(rng.uniform(0.5, 4.0)), match_bonus=float(rng.uniform(0.5, 2.0))
            )
        q = int(rng.integers(2, 9))
        p = float(rng.uniform(0.505, 0.995))
        splits = separation_split(spec, q, p)
        low = [q1 for q1 in splits if q1 < math.ceil(q / 2)]
        if low:
            ok = False
            lines.append(f"FAIL separation: sweep {i}: q={q} p={p:.4g} returned minority split {low}")
    if ok:
        lines.append("ok separation: 20 sweeps kept the favored action in the majority")
    hand = separation_selection(separation_payoff(kappa=2.0, match_bonus=1.0), 4).count_at(0.6)
    if hand == 2:
        lines.append("ok separation: kappa=2 q=4 belief 0.6 selects a 2-2 split")
    else:
        ok = False
        lines.append(f"FAIL separation: kappa=2 q=4 belief 0.6 selected {hand}, expected 2")
    return ok, lines


def _suite_delegate(payoff: PayoffSpec | None = None) -> tuple[bool, list[str]]:
    """Observation worth the cost exactly when (F0(s-hat) - 1/2) gap > c."""
    spec = payoff if payoff is not None else linear_payoff(0.1, 1.0, 0.25)
    structure = SignalStructure(LinearSymmetric())
    lines = []
    ok = True
    rep = delegate_incentive_check(spec, structure, 5, 0.1)
    if rep.passed:
        lines.append("ok delegate: observing at cost 0.1 beats forgoing at size 5")
    else:
        ok = False
        lines.append("FAIL delegate: cost 0.1 should be worth paying at size 5")
    for q in range(1, 13):
        if delegate_incentive_check(spec, structure, q, 0.3).passed:
            ok = False
            lines.append(f"FAIL delegate: cost 0.3 should never be worth paying (size {q})")
    fam = structure.family_for(5)
    s_hat = float(fam.inv_likelihood_ratio(1.0))
    algebra = (float(fam.cdf(0, s_hat)) - 0.5) * float(spec.match_gap(5))
    if abs(rep.gap - algebra) < 1e-12:
        lines.append(f"ok delegate: bound gap matches (F0(s-hat) - 1/2) * match gap = {algebra:.6g}")
    else:
        ok = False
        lines.append(f"FAIL delegate: bound gap {rep.gap!r} != algebraic {algebra!r}")
    return ok, lines


def _suite_beliefs(payoff: PayoffSpec | None = None) -> tuple[bool, list[str]]:
    """Frozen step-bound and reversal-horizon oracles."""
    lines = []
    ok = True
    structure = SignalStructure(LinearSymmetric())
    bounds = belief_step_bounds(structure, 1, 0.25)
    if bounds.ratio_bound == 0.6 and bounds.floor == 0.0625:
        lines.append("ok beliefs: step bounds y=0.6 w=0.0625 exactly")
    else:
        ok = False
        lines.append(f"FAIL beliefs: step bounds ({bounds.ratio_bound!r}, {bounds.floor!r})")
    horizon = reversal_horizon(0.75, 0.5, 0.6)
    if horizon == 3:
        lines.append("ok beliefs: reversal horizon (0.75 -> 0.5 at ratio 0.6) is 3")
    else:
        ok = False
        lines.append(f"FAIL beliefs: reversal horizon {horizon}, expected 3")
    bm = SignalStructure(BoundedMixture(0.5))
    s0, s1 = cutoff_pair(bm, 5, 0.05)
    mass1 = float(bm.cdf(5, 1, s1) - bm.cdf(5, 1, s0))
    mass0 = float(bm.cdf(5, 0, s1) - bm.cdf(5, 0, s0))
    if abs(mass1 - 0.9) < 1e-9 and abs(mass0 - 0.9) < 1e-9:
        lines.append("ok beliefs: equal-mass cutoffs carve 1-2*eps under both states")
    else:
        ok = False
        lines.append(f"FAIL beliefs: cutoff masses ({mass1!r}, {mass0!r}) differ from 0.9")
    return ok, lines


_SUITES = {
    "payoff": _suite_payoff,
    "risk": _suite_risk,
    "separation": _suite_separation,
    "delegate": _suite_delegate,
    "beliefs": _suite_beliefs,
}


def run_suite(name: str, payoff: PayoffSpec | None = None) -> tuple[bool, list[str]]:
    try:
        fn = _SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(_SUITES)}") from None
    return fn(payoff)


def _cmd_run(args) -> int:
    target = args.config
    try:
        if Path(target).exists():
            spec = parse_config(target)
        elif target in PRESET_NAMES:
            spec = preset(target)
        else:
            print(
                f"error: {target!r} is neither a readable config file nor a preset name",
                file=sys.stderr,
            )
            return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        updates = {}
        if args.seed is not None:
            updates["seed"] = args.seed
        if args.replications_override is not None:
            updates["replications"] = args.replications_override
        if args.horizon_override is not None:
            updates["horizon"] = args.horizon_override
        if updates:
            spec = replace(spec, **updates)
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2

    problems = validate_scenario(spec)
    if problems:
        for problem in problems:
            print(f"validation error: {problem}", file=sys.stderr)
        return 2

    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        curve = estimate_curve(spec, workers=args.threads)
        curve.write_csv(out_dir / "curve.csv")
        (out_dir / "meta.txt").write_text(
            meta_text(spec, curve, extra={"preset": spec.label or target})
        )
    except Exception as exc:  # noqa: BLE001 - boundary: map to exit code
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {out_dir / 'curve.csv'} ({spec.horizon} rows, {len(SCHEMA_COLUMNS)} columns)")
    return 0


def _cmd_list_presets(_args) -> int:
    rows = preset_table()
    width = max(len(name) for name, _ in rows)
    print(f"{'preset'.ljust(width)}  description")
    for name, description in rows:
        print(f"{name.ljust(width)}  {description}")
    return 0


def _cmd_verify(args) -> int:
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    all_ok = True
    for name in names:
        ok, lines = run_suite(name)
        for line in lines:
            print(line)
        all_ok &= ok
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soclearn",
        description="Sequential social learning: scenario runs and property verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate a scenario config or preset")
    run_p.add_argument("config", help="path to a scenario config, or a preset name")
    run_p.add_argument("--seed", type=int, default=None, help="override the master seed")
    run_p.add_argument("--out-dir", default=".", help="directory for curve.csv and meta.txt")
    run_p.add_argument("--replications-override", type=int, default=None)
    run_p.add_argument("--horizon-override", type=int, default=None)
    run_p.add_argument(
        "--threads", type=int, default=None,
        help="worker processes (overrides SOCLEARN_WORKERS)",
    )
    run_p.set_defaults(fn=_cmd_run)

    list_p = sub.add_parser("list-presets", help="show the built-in scenario presets")
    list_p.set_defaults(fn=_cmd_list_presets)

    verify_p = sub.add_parser("verify", help="run brute-force property suites")
    verify_p.add_argument("--suite", default="all", choices=["all", *list(_SUITES)])
    verify_p.set_defaults(fn=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
