"""Equilibrium-layer oracles: best responses, dominance, cutoffs, splits."""

from fractions import Fraction

import numpy as np
import pytest

from soclearn.payoffs import linear_payoff, separation_payoff
from soclearn.signals import BoundedMixture, LinearSymmetric, SignalStructure
from soclearn.strategies import (
    MisuseError,
    NoInteriorCutoffError,
    analytic_limit_accuracy,
    best_response_check,
    cutoff_action,
    delegate_incentive_check,
    limit_cutoff,
    private_signal_cutoff,
    risk_dominance_check,
    risk_dominance_closed_form,
    risk_dominance_enumerated,
    separation_equilibria,
    separation_selection,
    separation_split,
    truth_seeking_action,
    unanimity_search,
)

LINEAR = SignalStructure(LinearSymmetric())
BOUNDED = SignalStructure(BoundedMixture(0.5))


def exact_payoff():
    return linear_payoff(Fraction(1, 10), Fraction(1), Fraction(1, 4), match_step=Fraction(0))


class TestActions:
    def test_truth_seeking_tie_goes_to_zero(self):
        assert truth_seeking_action(0.5) == 0
        assert truth_seeking_action(0.5001) == 1
        assert truth_seeking_action(0.4999) == 0

    def test_cutoff_action_regions(self):
        # Extreme signals pin the action; the middle defers to the posterior.
        assert cutoff_action(0.95, -0.9, 0.9, 0.1) == 1
        assert cutoff_action(-0.95, -0.9, 0.9, 0.9) == 0
        assert cutoff_action(0.0, -0.9, 0.9, 0.9) == 1
        assert cutoff_action(0.0, -0.9, 0.9, 0.1) == 0


class TestBestResponse:
    def test_unanimity_holds_above_threshold(self):
        spec = exact_payoff()
        for p in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            for action in (0, 1):
                assert best_response_check(spec, 5, p, action).is_best_response

    def test_lone_agent_follows_belief(self):
        spec = exact_payoff()
        assert best_response_check(spec, 1, Fraction(3, 4), 1).is_best_response
        assert not best_response_check(spec, 1, Fraction(1, 4), 1).is_best_response

    def test_split_counts_validated(self):
        spec = exact_payoff()
        with pytest.raises(ValueError):
            best_response_check(spec, 4, Fraction(1, 2), 1, split_count=7)
        with pytest.raises(ValueError):
            best_response_check(spec, 4, Fraction(1, 2), 1, split_count=0)


class TestUnanimity:
    def test_no_interior_equilibria_small_sizes(self):
        spec = exact_payoff()
        for q in range(2, 9):
            assert unanimity_search(spec, q) == []

    def test_separation_payoff_is_misuse(self):
        with pytest.raises(MisuseError):
            unanimity_search(separation_payoff(), 4)


class TestRiskDominance:
    def test_frozen_example(self):
        spec = exact_payoff()
        # (2p - 1) * (gap(5) + gap(2)) at p = 0.7 with unit gaps.
        value = risk_dominance_closed_form(spec, 5, 2, Fraction(7, 10))
        assert value == Fraction(4, 5)

    def test_enumeration_matches_closed_form(self):
        spec = exact_payoff()
        for q in (2, 3, 4, 5):
            for p in (Fraction(11, 20), Fraction(7, 10), Fraction(19, 20)):
                for switch in range(1, q + 1):
                    closed = risk_dominance_closed_form(spec, q, switch, p)
                    assert closed == risk_dominance_enumerated(spec, q, switch, p)

    def test_dominant_action_tracks_belief(self):
        spec = exact_payoff()
        assert risk_dominance_check(spec, 5, Fraction(7, 10)).dominant == 1
        assert risk_dominance_check(spec, 5, Fraction(3, 10)).dominant == 0
        assert risk_dominance_check(spec, 5, Fraction(1, 2)).dominant is None


class TestDelegate:
    def test_pass_and_fail_frozen(self):
        spec = linear_payoff()
        ok = delegate_incentive_check(spec, LINEAR, 5, cost=0.1)
        assert ok.passed
        # (F0(s-hat) - 1/2) * match_gap with s-hat = 0 and F0(0) = 3/4.
        assert ok.gap == pytest.approx(0.25, abs=1e-12)
        for q in range(1, 13):
            assert not delegate_incentive_check(spec, LINEAR, q, cost=0.3).passed

    def test_min_passing_size(self):
        # Match gap grows with the head count, so a steep match_step
        # eventually covers a cost the base gap cannot.
        spec = linear_payoff(0.1, 0.2, 0.25, match_step=0.2)
        report = delegate_incentive_check(spec, LINEAR, 1, cost=0.3)
        assert not report.passed
        assert report.min_passing_size is not None
        assert delegate_incentive_check(spec, LINEAR, report.min_passing_size, cost=0.3).passed

    def test_too_early_is_misuse(self):
        with pytest.raises(MisuseError):
            delegate_incentive_check(linear_payoff(), LINEAR, 5, cost=0.1, t=1)


class TestLimitCutoff:
    def test_frozen_values(self):
        spec = linear_payoff()
        assert limit_cutoff(LINEAR, spec, 0.1, 1) == pytest.approx(0.8, abs=1e-9)
        prop4_style = linear_payoff(0.1, 0.2, 0.25, match_step=0.2)
        assert limit_cutoff(LINEAR, prop4_style, 0.1, 5) == pytest.approx(0.8, abs=1e-9)
        assert limit_cutoff(LINEAR, prop4_style, 0.1, 10) == pytest.approx(0.9, abs=1e-9)

    def test_belief_target_identity(self):
        # belief(s*) = 1 - c / match_gap by construction.
        spec = linear_payoff()
        s = limit_cutoff(LINEAR, spec, 0.25, 1)
        fam = LINEAR.family_for(1)
        belief = float(fam.pdf(1, s) / (fam.pdf(0, s) + fam.pdf(1, s)))
        assert belief == pytest.approx(0.75, abs=1e-9)

    def test_bounded_family_can_lack_a_cutoff(self):
        # Target belief 0.9 exceeds the 0.75 belief ceiling at lam = 0.5.
        with pytest.raises(NoInteriorCutoffError):
            limit_cutoff(BOUNDED, linear_payoff(), 0.1, 1)

    def test_analytic_accuracy(self):
        spec = linear_payoff(0.1, 0.2, 0.25, match_step=0.2)
        acc5 = analytic_limit_accuracy(LINEAR, spec, 0.1, ((5, 1.0),))
        acc10 = analytic_limit_accuracy(LINEAR, spec, 0.1, ((10, 1.0),))
        assert acc5 == pytest.approx(0.99, abs=1e-9)
        assert acc10 == pytest.approx(0.9975, abs=1e-9)
        mixed = analytic_limit_accuracy(LINEAR, spec, 0.1, ((5, 0.5), (10, 0.5)))
        assert mixed == pytest.approx((0.99 + 0.9975) / 2, abs=1e-9)


class TestSeparation:
    def test_hand_case(self):
        spec = separation_payoff(kappa=2.0)
        assert separation_selection(spec, 4).count_at(0.6) == 2
        assert separation_split(spec, 4, 0.6) == [2]

    def test_sweeps_keep_majority_on_favored_action(self, rng):
        for _ in range(20):
            spec = separation_payoff(
                kappa=float(rng.uniform(0.5, 4.0)),
                match_bonus=float(rng.uniform(0.5, 2.0)),
            )
            q = int(rng.integers(2, 9))
            p = float(rng.uniform(0.505, 0.995))
            for q1 in separation_split(spec, q, p):
                assert q1 >= int(np.ceil(q / 2)), (spec, q, p, q1)

    def test_state_symmetric_selection(self):
        spec = separation_payoff(kappa=2.0)
        sel = separation_selection(spec, 5)
        for p in (0.55, 0.7, 0.9):
            assert sel.count_at(p) + sel.count_at(1.0 - p) == 5

    def test_misuse_guards(self):
        with pytest.raises(MisuseError):
            separation_split(linear_payoff(), 4, 0.6)
        with pytest.raises(MisuseError):
            separation_split(separation_payoff(), 4, 0.5)

    def test_equilibria_survive_deviations(self, rng):
        spec = separation_payoff(kappa=1.5)
        for _ in range(10):
            q = int(rng.integers(2, 8))
            p = float(rng.uniform(0.4, 0.6))
            for q1 in separation_equilibria(spec, q, p):
                assert 0 <= q1 <= q


class TestPrivateSignalCutoff:
    def test_singleton_reduces_to_truth_seeking(self):
        spec = linear_payoff()
        for posterior in (0.3, 0.5, 0.7):
            sol = private_signal_cutoff(BOUNDED, spec, 1, posterior)
            assert sol.converged
            fam = BOUNDED.family_for(1)
            expected = float(fam.inv_likelihood_ratio((1.0 - posterior) / posterior))
            assert sol.cutoff == pytest.approx(expected, abs=1e-6)

    def test_flat_posterior_gives_symmetric_cutoff(self):
        sol = private_signal_cutoff(BOUNDED, linear_payoff(), 20, 0.5)
        assert sol.converged
        assert sol.cutoff == pytest.approx(0.0, abs=1e-8)

    def test_strong_posterior_herds_at_the_boundary(self):
        sol = private_signal_cutoff(BOUNDED, linear_payoff(), 20, 0.9)
        assert sol.converged
        assert sol.cutoff == -1.0

    def test_posterior_domain(self):
        with pytest.raises(ValueError):
            private_signal_cutoff(BOUNDED, linear_payoff(), 5, 1.0)
