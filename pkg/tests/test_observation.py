"""Observation schemes: neighborhoods, capacity schedules, limit proxies."""

import numpy as np
import pytest

from soclearn.observation import (
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
    pattern_neighborhood,
    realize_neighborhood,
)


class TestNeighborhoods:
    def test_first_period_is_empty(self):
        for scheme in (Star(), Line(), Complete()):
            assert realize_neighborhood(scheme, 1) == frozenset()

    def test_fixed_schemes(self):
        assert realize_neighborhood(Star(), 7) == frozenset({1})
        assert realize_neighborhood(Line(), 7) == frozenset({6})
        assert realize_neighborhood(Complete(), 4) == frozenset({1, 2, 3})

    def test_patterns(self):
        assert pattern_neighborhood("all", 5) == frozenset({1, 2, 3, 4})
        assert pattern_neighborhood("last:2", 5) == frozenset({3, 4})
        assert pattern_neighborhood("last:9", 3) == frozenset({1, 2})
        assert pattern_neighborhood("first:2", 5) == frozenset({1, 2})
        assert pattern_neighborhood("none", 5) == frozenset()

    def test_custom_draws_follow_probabilities(self, rng):
        scheme = CustomStochastic((("last:1", 0.75), ("none", 0.25)))
        draws = [realize_neighborhood(scheme, 9, rng) for _ in range(4000)]
        share = np.mean([d == frozenset({8}) for d in draws])
        assert share == pytest.approx(0.75, abs=0.03)

    def test_custom_requires_rng(self):
        with pytest.raises(ValueError):
            realize_neighborhood(CustomStochastic((("last:1", 1.0),)), 3)

    def test_endogenous_is_misuse(self):
        scheme = Endogenous(0.1, CapacitySchedule("linear"))
        with pytest.raises(MisuseError):
            realize_neighborhood(scheme, 3)


class TestSchemeValidation:
    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ValueError):
            CustomStochastic((("last:1", 0.5), ("none", 0.4)))

    def test_unknown_pattern_rejected(self):
        with pytest.raises(ValueError):
            CustomStochastic((("recent:3", 1.0),))

    def test_cost_must_be_positive(self):
        with pytest.raises(ValueError):
            Endogenous(0.0, CapacitySchedule("linear"))


class TestCapacity:
    def test_parse_forms(self):
        assert parse_capacity("t-1") == CapacitySchedule("linear")
        assert parse_capacity("log2") == CapacitySchedule("log2")
        assert parse_capacity("3") == CapacitySchedule("constant", 3)
        assert parse_capacity(1) == CapacitySchedule("constant", 1)
        with pytest.raises(ValueError):
            parse_capacity("0")
        with pytest.raises(ValueError):
            parse_capacity("sqrt")

    def test_schedules(self):
        assert CapacitySchedule("linear").k_of(10) == 9
        assert CapacitySchedule("constant", 2).k_of(10) == 2
        assert CapacitySchedule("log2").k_of(7) == 3

    def test_limit_proxy(self):
        assert capacity_limit_infinite(CapacitySchedule("linear")).passed
        assert capacity_limit_infinite(CapacitySchedule("log2")).passed
        assert not capacity_limit_infinite(CapacitySchedule("constant", 5)).passed


class TestLimitProxies:
    def test_expanding(self):
        assert check_expanding(Line()).passed
        assert check_expanding(Complete()).passed
        assert not check_expanding(Star()).passed
        assert check_expanding(CustomStochastic((("last:1", 1.0),))).passed
        # A persistent chance of observing only the first community breaks
        # the vanishing-probability requirement.
        mixed = CustomStochastic((("last:1", 0.9), ("first:1", 0.1)))
        assert not check_expanding(mixed).passed

    def test_infinite_complete(self):
        assert check_infinite_complete(Complete()).passed
        assert not check_infinite_complete(Line()).passed
        assert not check_infinite_complete(Star()).passed
        assert check_infinite_complete(CustomStochastic((("all", 1.0),))).passed
        assert not check_infinite_complete(CustomStochastic((("all", 0.5), ("none", 0.5),))).passed

    def test_endogenous_misuse(self):
        scheme = Endogenous(0.1, CapacitySchedule("linear"))
        with pytest.raises(MisuseError):
            check_expanding(scheme)
        with pytest.raises(MisuseError):
            check_infinite_complete(scheme)
