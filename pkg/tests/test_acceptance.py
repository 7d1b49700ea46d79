"""Acceptance gate: one test per headline regime or closed-form oracle.

Each test reproduces one verification target at its stated scale and
tolerance, against analytic values from the two built-in signal families.
The terminal summary prints one PASS/FAIL line per test (see conftest),
so a red line here names the exact property that broke.
"""

import math
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from soclearn.beliefs import History, belief_step_bounds, posterior_exact, posterior_mc, reversal_horizon
from soclearn.engine import ScenarioSpec, compare_fosd, estimate_curve, run_trace
from soclearn.observation import Complete
from soclearn.payoffs import linear_payoff, separation_payoff
from soclearn.presets import preset
from soclearn.signals import BoundedMixture, LinearSymmetric, SignalStructure
from soclearn.strategies import (
    TruthSeeking,
    delegate_incentive_check,
    limit_cutoff,
    private_signal_cutoff,
    risk_dominance_check,
    separation_selection,
    separation_split,
    unanimity_search,
)


class TestLimitCutoffRegime:
    def test_thm2_limit_cutoff_and_terminal_accuracy(self):
        spec = preset("thm2_singleton_endog")
        s_star = limit_cutoff(spec.structure, spec.payoff, spec.scheme.cost, 1)
        assert s_star == pytest.approx(0.8, abs=1e-9)
        target = float(spec.structure.cdf(1, 0, 0.8))
        assert target == pytest.approx(0.99, abs=1e-12)
        curve = estimate_curve(spec)
        assert abs(curve.p_correct[-1] - target) <= 0.01


class TestCutoffEquilibrium:
    def test_thm1_truthtelling_and_accuracy_floors(self):
        curve = estimate_curve(preset("thm1_bounded"))
        assert curve.p_truthtell_given_obs[-1] >= 0.97
        assert curve.p_correct[-1] >= 0.93


class TestHerdingBaseline:
    def test_bounded_singletons_plateau_short_of_learning(self):
        curve = estimate_curve(preset("ex_bounded_singleton"))
        assert abs(curve.at(500)["p_correct"] - curve.at(250)["p_correct"]) < 0.01
        assert curve.p_correct[-1] <= 0.97
        assert curve.wrong_herd_frequency[-1] > 0.01


class TestUnanimityOnlyEquilibria:
    def test_prop1_no_interior_splits_default_payoff(self):
        payoff = linear_payoff()
        for q in range(2, 9):
            assert unanimity_search(payoff, q) == []


class TestRiskDominance:
    def test_prop3_closed_form_matches_enumeration_exactly(self):
        payoff = linear_payoff(Fraction(1, 10), Fraction(1), Fraction(1, 4),
                               match_step=Fraction(0))
        grid = [Fraction(n, 100) for n in range(1, 100)]
        for q in range(2, 7):
            for p in grid:
                report = risk_dominance_check(payoff, q, p)
                for _switch, closed, enumerated in report.diffs:
                    assert closed == enumerated
                    if p >= Fraction(1, 2):
                        assert closed >= 0


class TestDelegateIncentives:
    def test_thm34_observation_bound(self):
        payoff = linear_payoff(0.1, 1.0, 0.25)
        structure = SignalStructure(LinearSymmetric())
        report = delegate_incentive_check(payoff, structure, 5, 0.1)
        assert report.passed
        fam = structure.family_for(5)
        s_hat = float(fam.inv_likelihood_ratio(1.0))
        algebra = (float(fam.cdf(0, s_hat)) - 0.5) * float(payoff.match_gap(5))
        assert report.gap == pytest.approx(algebra, abs=1e-12)
        assert report.gap > 0.1
        for q in range(1, 13):
            assert not delegate_incentive_check(payoff, structure, q, 0.3).passed


class TestSizeDominance:
    def test_prop4_larger_communities_learn_more(self):
        spec = preset("prop4_truthseek_endog")
        report = compare_fosd(spec, ((5, 1.0),), ((10, 1.0),))
        assert report.ordered
        assert abs(report.low_estimate - report.low_analytic) < 0.02
        assert abs(report.high_estimate - report.high_analytic) < 0.02


class TestPrivateSignalHerds:
    def test_prop5_boundary_cutoff_blocks_learning(self):
        spec = preset("prop5_private_signals")
        solution = private_signal_cutoff(spec.structure, spec.payoff, 20, 0.9)
        assert solution.converged
        assert solution.cutoff == -1.0
        curve = estimate_curve(spec)
        assert curve.p_correct[-1] < 0.99
        assert curve.wrong_herd_frequency[-1] > 0.01


class TestSeparationSplits:
    def test_prop6_majority_always_on_favored_action(self):
        rng = np.random.default_rng(20260811)
        for _ in range(20):
            payoff = separation_payoff(
                kappa=float(rng.uniform(0.5, 4.0)),
                match_bonus=float(rng.uniform(0.5, 2.0)),
            )
            q = int(rng.integers(2, 9))
            p = float(rng.uniform(0.505, 0.995))
            assert all(q1 >= math.ceil(q / 2) for q1 in separation_split(payoff, q, p))
        hand = separation_selection(separation_payoff(kappa=2.0, match_bonus=1.0), 4)
        assert hand.count_at(0.6) == 2


class TestBeliefEngine:
    def test_step_bounds_reversal_and_mc_coverage(self):
        structure = SignalStructure(LinearSymmetric())
        bounds = belief_step_bounds(structure, 1, 0.25)
        assert bounds.ratio_bound == 0.6
        assert bounds.floor == 0.0625
        assert reversal_horizon(0.75, 0.5, 0.6) == 3

        spec = ScenarioSpec(
            structure=SignalStructure(BoundedMixture(0.5)),
            payoff=linear_payoff(),
            scheme=Complete(),
            profile=TruthSeeking(),
            sizes=((1, 1.0),),
            horizon=6,
            replications=64,
            seed=11,
        )
        hits = 0
        for trial in range(200):
            trace = run_trace(spec, rep_seed=trial)
            history = History(4, tuple((tau, float(trace.act_frac[tau - 1])) for tau in range(1, 4)))
            exact = posterior_exact(spec, history)
            mc = posterior_mc(spec, history, replications=3000, seed=trial)
            hits += abs(exact.prob - mc.prob) <= mc.half_width
        assert hits / 200 >= 0.95


class TestDeterminism:
    def test_worker_count_never_changes_emitted_bytes(self, tmp_path):
        # 8192 replications spans two blocks, so worker 3 splits real work
        args = [
            sys.executable, "-m", "soclearn.cli", "run", "thm1_bounded",
            "--replications-override", "8192", "--horizon-override", "80",
        ]
        for threads, sub in (("1", "a"), ("3", "b")):
            proc = subprocess.run(
                args + ["--threads", threads, "--out-dir", str(tmp_path / sub)],
                capture_output=True, text=True, check=False,
            )
            assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "a" / "curve.csv").read_bytes() == (
            tmp_path / "b" / "curve.csv"
        ).read_bytes()
