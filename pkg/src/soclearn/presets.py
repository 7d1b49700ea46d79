"""Named scenario presets covering each learning regime at desk scale."""

from __future__ import annotations

from .engine import ScenarioSpec
from .observation import Complete, Endogenous, Line, parse_capacity
from .payoffs import linear_payoff, separation_payoff
from .signals import BoundedMixture, LinearSymmetric, SignalStructure
from .strategies import (
    CutoffCoordination,
    DelegateObserver,
    EndogenousCutoff,
    PrivateSignalSymmetric,
    SeparationSplit,
    TruthSeeking,
)


def _linear() -> SignalStructure:
    return SignalStructure(LinearSymmetric())


def _bounded(lam: float = 0.5) -> SignalStructure:
    return SignalStructure(BoundedMixture(lam))


def _spec(**kw) -> ScenarioSpec:
    kw.setdefault("payoff", linear_payoff(0.1, 1.0, 0.25))
    return ScenarioSpec(**kw)


def _build_ex_unbounded_complete() -> ScenarioSpec:
    return _spec(
        structure=_linear(),
        scheme=Complete(),
        profile=TruthSeeking(),
        sizes=((1, 1.0),),
        horizon=500,
        replications=10_000,
        seed=20260801,
        label="ex_unbounded_complete",
    )


def _build_ex_bounded_singleton() -> ScenarioSpec:
    return _spec(
        structure=_bounded(),
        scheme=Complete(),
        profile=TruthSeeking(),
        sizes=((1, 1.0),),
        horizon=500,
        replications=10_000,
        seed=20260802,
        label="ex_bounded_singleton",
    )


def _build_thm1_bounded() -> ScenarioSpec:
    return _spec(
        structure=_bounded(),
        scheme=Complete(),
        profile=CutoffCoordination(epsilon=0.05),
        sizes=((5, 1.0),),
        horizon=500,
        replications=10_000,
        seed=20260803,
        label="thm1_bounded",
    )


def _build_thm2_singleton_endog() -> ScenarioSpec:
    return _spec(
        structure=_linear(),
        scheme=Endogenous(cost=0.1, capacity=parse_capacity("t-1")),
        profile=EndogenousCutoff(),
        sizes=((1, 1.0),),
        horizon=300,
        replications=100_000,
        seed=20260804,
        label="thm2_singleton_endog",
    )


def _build_thm3_endog_unbounded() -> ScenarioSpec:
    return _spec(
        structure=_linear(),
        scheme=Endogenous(cost=0.1, capacity=parse_capacity(1)),
        profile=DelegateObserver(),
        sizes=((5, 1.0),),
        horizon=300,
        replications=10_000,
        seed=20260805,
        label="thm3_endog_unbounded",
    )


def _build_thm4_endog_bounded() -> ScenarioSpec:
    return _spec(
        structure=_bounded(),
        scheme=Endogenous(cost=0.1, capacity=parse_capacity("t-1")),
        profile=CutoffCoordination(epsilon=0.05),
        sizes=((5, 1.0),),
        horizon=500,
        replications=10_000,
        seed=20260806,
        label="thm4_endog_bounded",
    )


def _build_prop4_truthseek_endog() -> ScenarioSpec:
    return _spec(
        structure=_linear(),
        payoff=linear_payoff(0.1, 0.2, 0.25, match_step=0.2),
        scheme=Endogenous(cost=0.1, capacity=parse_capacity("t-1")),
        profile=EndogenousCutoff(),
        sizes=((5, 1.0),),
        horizon=300,
        replications=10_000,
        seed=20260807,
        label="prop4_truthseek_endog",
    )


def _build_prop5_private_signals() -> ScenarioSpec:
    return _spec(
        structure=_bounded(),
        scheme=Line(),
        profile=PrivateSignalSymmetric(),
        sizes=((20, 1.0),),
        horizon=500,
        replications=10_000,
        seed=20260808,
        label="prop5_private_signals",
    )


def _build_prop6_separation() -> ScenarioSpec:
    return _spec(
        structure=_linear(),
        payoff=separation_payoff(kappa=2.0),
        scheme=Complete(),
        profile=SeparationSplit(),
        sizes=((4, 1.0),),
        horizon=300,
        replications=10_000,
        seed=20260809,
        label="prop6_separation",
    )


_BUILDERS = {
    "ex_unbounded_complete": _build_ex_unbounded_complete,
    "ex_bounded_singleton": _build_ex_bounded_singleton,
    "thm1_bounded": _build_thm1_bounded,
    "thm2_singleton_endog": _build_thm2_singleton_endog,
    "thm3_endog_unbounded": _build_thm3_endog_unbounded,
    "thm4_endog_bounded": _build_thm4_endog_bounded,
    "prop4_truthseek_endog": _build_prop4_truthseek_endog,
    "prop5_private_signals": _build_prop5_private_signals,
    "prop6_separation": _build_prop6_separation,
}

DESCRIPTIONS = {
    "ex_unbounded_complete": "Prop 2 regime: unbounded beliefs, complete observation, truth-seeking singletons",
    "ex_bounded_singleton": "herding baseline: bounded beliefs, truth-seeking singletons, complete observation",
    "thm1_bounded": "Theorem 1 cutoff equilibrium at the conformity threshold, bounded beliefs",
    "thm2_singleton_endog": "Theorem 2 limit-cutoff (s*) regime: endogenous observation, singletons",
    "thm3_endog_unbounded": "Theorem 3 delegate chain under costly observation, unbounded beliefs",
    "thm4_endog_bounded": "Theorem 4 cutoff equilibrium under costly observation, bounded beliefs",
    "prop4_truthseek_endog": "Prop 4 size-dominance regime: growing match bonus, endogenous observation",
    "prop5_private_signals": "Prop 5 private signals on a line with symmetric cutoff responses",
    "prop6_separation": "Prop 6 separation splits under strong conformity, complete observation",
}

PRESET_NAMES = tuple(_BUILDERS)


def preset(name: str) -> ScenarioSpec:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        known = ", ".join(PRESET_NAMES)
        raise KeyError(f"unknown preset {name!r}; known presets: {known}") from None
    return builder()


def preset_table() -> list[tuple[str, str]]:
    return [(name, DESCRIPTIONS[name]) for name in PRESET_NAMES]
