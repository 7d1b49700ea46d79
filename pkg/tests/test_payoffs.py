"""Payoff-spec oracles: utilities, assumption checks, conformity threshold."""

from fractions import Fraction

import pytest

from soclearn.payoffs import (
    PayoffDomainError,
    PayoffSpec,
    ThresholdNotFoundError,
    conformity_threshold,
    linear_payoff,
    separation_payoff,
    tabulated_payoff,
    validate_assumptions,
)


class TestUtility:
    def test_linear_frozen_values(self):
        spec = linear_payoff()
        assert spec.utility(1, 1, 1) == pytest.approx(1.1)
        assert spec.utility(1, 0, 1) == pytest.approx(0.1)
        assert spec.utility(1, 0, 5) == pytest.approx(1.1)
        assert spec.utility(1, 1, 5) == pytest.approx(2.1)

    def test_label_symmetry(self):
        spec = linear_payoff()
        for m in range(1, 10):
            assert spec.utility(0, 0, m) == spec.utility(1, 1, m)
            assert spec.utility(0, 1, m) == spec.utility(1, 0, m)

    def test_separation_decreases_in_company(self):
        spec = separation_payoff(kappa=2.0)
        values = [spec.utility(1, 1, m) for m in range(1, 8)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert spec.utility(1, 1, 2) == pytest.approx(2.0)  # match 1 + 2/2

    def test_table_lookup(self):
        spec = tabulated_payoff([[[1.0, 2.0], [0.0, 0.5]], [[0.0, 0.5], [1.0, 2.0]]])
        assert spec.utility(0, 0, 2) == 2.0
        assert spec.utility(1, 0, 1) == 0.0
        with pytest.raises(PayoffDomainError):
            spec.utility(1, 1, 3)  # beyond the tabulated head-count cap

    def test_domain_errors(self):
        spec = linear_payoff()
        with pytest.raises(PayoffDomainError):
            spec.utility(2, 0, 1)
        with pytest.raises(PayoffDomainError):
            spec.utility(1, 1, 0)
        with pytest.raises(PayoffDomainError):
            spec.utility(1, 1, 1.5)

    def test_fraction_inputs_stay_exact(self):
        # Exact rational parameters must survive utility evaluation; the
        # brute-force equilibrium checks rely on it.
        spec = linear_payoff(Fraction(1, 10), Fraction(1), Fraction(1, 4), match_step=Fraction(0))
        value = spec.utility(1, 0, 5)
        assert isinstance(value, Fraction)
        assert value == Fraction(11, 10)

    def test_table_shape_errors(self):
        with pytest.raises(PayoffDomainError):
            tabulated_payoff([[[1.0]]])
        with pytest.raises(PayoffDomainError):
            tabulated_payoff([[[1.0, 2.0], [0.0]], [[0.0, 0.5], [1.0, 2.0]]])


class TestAssumptions:
    def test_default_passes_increasing(self):
        report = validate_assumptions(linear_payoff())
        assert report.passed
        assert report.direction == "increasing"
        assert report.violations == ()

    def test_separation_passes_decreasing(self):
        report = validate_assumptions(separation_payoff())
        assert report.direction == "decreasing"

    def test_flat_payoff_names_the_finite_witness(self):
        # Matching alone, no coordination term: misaligned company never
        # beats a lone match, so the finite-witness requirement fails.
        report = validate_assumptions(linear_payoff(conformity_step=0.0))
        assert not report.passed
        assert any(v.startswith("assumption 3") for v in report.violations)

    def test_asymmetric_table_names_label_symmetry(self):
        table = [[[1.0, 2.0], [0.0, 0.5]], [[0.1, 0.6], [1.5, 2.5]]]
        report = validate_assumptions(tabulated_payoff(table))
        assert not report.passed
        assert any(v.startswith("assumption 2") for v in report.violations)

    def test_nonmonotone_table_names_monotonicity(self):
        table = [[[1.0, 0.5], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.5]]]
        report = validate_assumptions(tabulated_payoff(table))
        assert not report.passed
        assert any(v.startswith("assumption 1") for v in report.violations)


class TestConformityThreshold:
    def test_default_frozen(self):
        # u(1,0,m) >= u(1,1,1) first at m = 5: 0.25*(m-1) >= 1.
        assert conformity_threshold(linear_payoff()) == 5

    def test_scales_with_step(self):
        assert conformity_threshold(linear_payoff(conformity_step=0.5)) == 3
        assert conformity_threshold(linear_payoff(conformity_step=0.125)) == 9

    def test_absent_threshold_raises(self):
        with pytest.raises(ThresholdNotFoundError):
            conformity_threshold(linear_payoff(conformity_step=0.0))


def test_match_gap():
    assert linear_payoff().match_gap(7) == pytest.approx(1.0)
    prop4_style = linear_payoff(0.1, 0.2, 0.25, match_step=0.2)
    assert prop4_style.match_gap(5) == pytest.approx(1.0)
    assert prop4_style.match_gap(10) == pytest.approx(2.0)


def test_unknown_kind_rejected():
    with pytest.raises(PayoffDomainError):
        PayoffSpec(kind="mystery").utility(1, 1, 1)
