"""Sequential Bayesian social learning with coordination motives.

Simulation engine and verification library: shared-signal communities act
in sequence over exogenous or endogenous observation structures; the
package simulates the resulting learning dynamics exactly and brute-force
checks the equilibrium constructions behind them.
"""

from .beliefs import (
    BeliefBounds,
    CutoffNotFoundError,
    DegenerateHistoryError,
    History,
    Posterior,
    UnsupportedLatticeError,
    belief_step_bounds,
    cutoff_pair,
    posterior_exact,
    posterior_mc,
    reversal_horizon,
)
from .engine import (
    FosdComparison,
    HerdVerdict,
    LearningCurve,
    ScenarioSpec,
    SimulationTrace,
    compare_fosd,
    detect_herd,
    estimate_curve,
    fosd_dominates,
    run_trace,
    wilson_interval,
)
from .observation import (
    CapacitySchedule,
    Complete,
    CustomStochastic,
    Endogenous,
    Line,
    MisuseError,
    Star,
    capacity_limit_infinite,
    check_expanding,
    check_infinite_complete,
    parse_capacity,
    realize_neighborhood,
)
from .payoffs import (
    PayoffDomainError,
    PayoffSpec,
    ThresholdNotFoundError,
    conformity_threshold,
    linear_payoff,
    separation_payoff,
    tabulated_payoff,
    validate_assumptions,
)
from .presets import PRESET_NAMES, preset, preset_table
from .signals import (
    BeliefClass,
    BoundedMixture,
    LinearSymmetric,
    SignalDomainError,
    SignalStructure,
    TabulatedFamily,
    UnclassifiedBeliefsError,
    check_mlrp,
    classify_beliefs,
    load_tabulated,
    private_belief,
    sample_signal,
)
from .strategies import (
    CutoffCoordination,
    CutoffSolution,
    DelegateObserver,
    DelegateReport,
    EndogenousCutoff,
    EquilibriumNotFoundError,
    FixedAction,
    NoInteriorCutoffError,
    PrivateSignalSymmetric,
    SeparationSplit,
    TruthSeeking,
    analytic_limit_accuracy,
    best_response_check,
    cutoff_action,
    delegate_incentive_check,
    delegate_profile,
    limit_cutoff,
    private_signal_cutoff,
    risk_dominance_check,
    separation_selection,
    separation_split,
    split_is_equilibrium,
    truth_seeking_action,
    unanimity_search,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
