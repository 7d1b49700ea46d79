"""Exact dynamics kernels: dispatch, cross-route agreement, replay checks."""

import numpy as np
import pytest

from soclearn.beliefs import History, UnsupportedLatticeError, posterior_exact
from soclearn.engine import ScenarioSpec, estimate_curve, run_trace
from soclearn.dynamics import history_log_odds, history_match_counts, make_kernel
from soclearn.observation import (
    CapacitySchedule,
    Complete,
    CustomStochastic,
    Endogenous,
    Line,
    Star,
)
from soclearn.payoffs import linear_payoff, separation_payoff
from soclearn.signals import BoundedMixture, LinearSymmetric, SignalStructure
from soclearn.strategies import (
    CutoffCoordination,
    DelegateObserver,
    FixedAction,
    PrivateSignalSymmetric,
    SeparationSplit,
    TruthSeeking,
)

BOUNDED = SignalStructure(BoundedMixture(0.5))
LINEAR = SignalStructure(LinearSymmetric())


def scenario(**kw):
    base = dict(
        structure=BOUNDED,
        payoff=linear_payoff(),
        scheme=Complete(),
        profile=TruthSeeking(),
        sizes=((1, 1.0),),
        horizon=30,
        replications=400,
        seed=7,
    )
    base.update(kw)
    return ScenarioSpec(**base)


class TestDispatch:
    def test_supported_combinations(self):
        make_kernel(scenario())
        make_kernel(scenario(scheme=Line()))
        make_kernel(scenario(scheme=Star(), profile=CutoffCoordination(0.05), sizes=((5, 1.0),)))
        make_kernel(scenario(scheme=CustomStochastic((("last:2", 0.5), ("none", 0.5)))))
        make_kernel(scenario(
            scheme=Endogenous(0.1, CapacitySchedule("linear")),
            structure=LINEAR,
        ))
        make_kernel(scenario(
            scheme=Line(), profile=PrivateSignalSymmetric(), sizes=((5, 1.0),)))
        make_kernel(scenario(
            profile=SeparationSplit(), payoff=separation_payoff(), sizes=((4, 1.0),),
            structure=LINEAR,
        ))
        make_kernel(scenario(scheme=Line(), profile=DelegateObserver()))
        make_kernel(scenario(
            scheme=Endogenous(0.1, CapacitySchedule("constant", 1)),
            profile=DelegateObserver(), structure=LINEAR,
        ))

    def test_unsupported_combinations(self):
        with pytest.raises(UnsupportedLatticeError):
            make_kernel(scenario(profile=PrivateSignalSymmetric(), sizes=((5, 1.0),)))
        with pytest.raises(UnsupportedLatticeError):
            make_kernel(scenario(scheme=Line(), profile=SeparationSplit(),
                                 payoff=separation_payoff(), sizes=((4, 1.0),)))
        with pytest.raises(UnsupportedLatticeError):
            make_kernel(scenario(scheme=Endogenous(0.1, CapacitySchedule("constant", 2))))
        with pytest.raises(UnsupportedLatticeError):
            make_kernel(scenario(scheme=CustomStochastic((("first:2", 1.0),))))
        with pytest.raises(UnsupportedLatticeError):
            make_kernel(scenario(scheme=CustomStochastic((("last:13", 1.0),))))


class TestCrossRoute:
    def test_line_equals_last1_window(self):
        # Two independent kernels (chain marginals vs window-state tables)
        # must agree on every metric, byte for byte.
        for profile, sizes in ((TruthSeeking(), ((5, 1.0),)),
                               (CutoffCoordination(0.05), ((5, 1.0),))):
            a = estimate_curve(scenario(scheme=Line(), profile=profile,
                                        sizes=sizes, replications=2000))
            b = estimate_curve(scenario(
                scheme=CustomStochastic((("last:1", 1.0),)),
                profile=profile, sizes=sizes, replications=2000))
            assert a.csv_text() == b.csv_text()

    def test_complete_replay_matches_manual_recursion(self):
        spec = scenario(horizon=12)
        fam = BOUNDED.family_for(1)
        for rep in range(6):
            trace = run_trace(spec, rep_seed=rep)
            llr = 0.0
            for i in range(spec.horizon):
                prob = posterior_exact(
                    spec, History(i + 1, tuple((tau + 1, float(trace.act_frac[tau]))
                                               for tau in range(i)))
                ).prob
                assert prob == pytest.approx(1.0 / (1.0 + np.exp(-llr)), abs=1e-9)
                thresh = float(fam.indifference_signal(llr))
                p1 = 1.0 - float(fam.cdf(1, thresh))
                p0 = 1.0 - float(fam.cdf(0, thresh))
                if trace.act_frac[i] == 1.0:
                    llr += np.log(p1) - np.log(p0)
                else:
                    llr += np.log1p(-p1) - np.log1p(-p0)


class TestChainSemantics:
    def test_delegate_copies_the_first_action(self):
        spec = scenario(scheme=Line(), profile=DelegateObserver(), horizon=15)
        for rep in range(5):
            trace = run_trace(spec, rep_seed=rep)
            assert np.all(trace.act_frac[1:] == trace.act_frac[0])
            assert np.all(trace.observed[1:])
            assert not trace.observed[0]

    def test_fixed_action_is_always_followed(self):
        spec = scenario(profile=FixedAction(1), horizon=10)
        trace = run_trace(spec, rep_seed=3)
        assert np.all(trace.act_frac == 1.0)
        assert np.all(trace.followed)
        assert np.all(trace.forced)

    def test_first_period_never_counts_as_following(self):
        for scheme in (Complete(), Line()):
            spec = scenario(scheme=scheme, horizon=8)
            for rep in range(4):
                trace = run_trace(spec, rep_seed=rep)
                assert not trace.followed[0]
                assert not trace.observed[0]


class TestHistoryLikelihoods:
    def test_chain_marginal_consistency(self):
        # Exact chain log odds must match a brute-force simulated estimate.
        spec = scenario(scheme=Line(), horizon=6)
        h = History(4, ((3, 1.0),))
        log_odds = history_log_odds(spec, h)
        m0, m1 = history_match_counts(spec, h, replications=40_000, seed=2)
        est = np.log(m1) - np.log(m0)
        assert log_odds == pytest.approx(est, abs=0.08)

    def test_star_expects_the_first_period(self):
        spec = scenario(scheme=Star(), horizon=6)
        assert np.isfinite(history_log_odds(spec, History(4, ((1, 1.0),))))
        with pytest.raises(UnsupportedLatticeError):
            history_log_odds(spec, History(4, ((3, 1.0),)))

    def test_complete_needs_the_full_prefix(self):
        spec = scenario(horizon=6)
        with pytest.raises(UnsupportedLatticeError):
            history_log_odds(spec, History(4, ((1, 1.0), (3, 1.0))))

    def test_symmetric_history_is_uninformative(self):
        spec = scenario(scheme=CustomStochastic((("last:2", 1.0),)), horizon=8)
        # Window likelihoods must be label-symmetric: swapping all actions
        # flips the sign of the log odds.
        up = history_log_odds(spec, History(5, ((3, 1.0), (4, 1.0))))
        down = history_log_odds(spec, History(5, ((3, 0.0), (4, 0.0))))
        assert up == pytest.approx(-down, abs=1e-9)
        assert up > 0


class TestPrivateSignalKernel:
    def test_boundary_cutoff_census(self):
        spec = scenario(
            scheme=Line(), profile=PrivateSignalSymmetric(), sizes=((20, 1.0),),
            horizon=25, replications=1500, seed=3,
        )
        curve = estimate_curve(spec)
        # Once the count posterior is extreme the whole community herds, so
        # accuracy plateaus strictly inside (0.5, 1).
        assert 0.5 < curve.p_correct[-1] < 1.0
        assert np.all(curve.p_observed[1:] == 1.0)

    def test_act_stat_is_a_count(self):
        spec = scenario(
            scheme=Line(), profile=PrivateSignalSymmetric(), sizes=((5, 1.0),),
            horizon=10,
        )
        trace = run_trace(spec, rep_seed=1)
        assert np.all((trace.act_stat >= 0) & (trace.act_stat <= 5))
        assert np.all(trace.act_stat == np.round(trace.act_stat))


class TestSeparationKernel:
    def test_split_counts_and_flags(self):
        spec = scenario(
            profile=SeparationSplit(), payoff=separation_payoff(kappa=2.0),
            structure=LINEAR, sizes=((4, 1.0),), horizon=12,
        )
        trace = run_trace(spec, rep_seed=2)
        assert np.all((trace.act_stat >= 0) & (trace.act_stat <= 4))
        assert np.all(trace.act_frac == trace.act_stat / 4.0)
