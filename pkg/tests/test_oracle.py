"""Tests for the brute-force oracle and the smoothness checks."""

from __future__ import annotations

from itertools import product

import pytest

from src.actions import ExplicitActionSet
from src.bases import covering, power
from src.distributions import shapley
from src.errors import CapacityError
from src.harness.scenarios import gen_random_singleton, resolve_rule
from src.models import Allocation, GameInstance
from src.oracle import all_nash, exact_optimum, instance_efficiency, iter_profiles, worst_nash
from src.poa.certificate import compute_poa
from src.poa.smoothness import smoothness_bound, smoothness_check, smoothness_check_exhaustive


def _make_instance(**overrides) -> GameInstance:
    defaults = dict(
        values=(1.0, 0.4),
        action_sets=(ExplicitActionSet(((0,), (1,))), ExplicitActionSet(((0,), (1,)))),
        basis=covering(2),
        rule=shapley(2),
    )
    defaults.update(overrides)
    return GameInstance(**defaults)


class TestEnumeration:
    def test_lexicographic_order(self):
        profiles = [a.choices for a in iter_profiles(_make_instance())]
        assert profiles == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_cap(self):
        with pytest.raises(CapacityError, match="4 profiles exceed oracle cap 3") as exc:
            list(iter_profiles(_make_instance(), cap=3))
        assert exc.value.profiles == 4
        assert exc.value.cap == 3


class TestExactOptimum:
    def test_first_maximizer_wins(self):
        best, value = exact_optimum(_make_instance())
        assert best.choices == (0, 1)
        assert value == pytest.approx(1.4)


class TestEquilibria:
    def test_unique_equilibrium(self):
        equilibria = all_nash(_make_instance())
        assert [a.choices for a in equilibria] == [(0, 0)]

    def test_worst_nash(self):
        worst, value = worst_nash(_make_instance())
        assert worst.choices == (0, 0)
        assert value == pytest.approx(1.0)

    def test_efficiency(self):
        assert instance_efficiency(_make_instance()) == pytest.approx(5 / 7)

    def test_efficiency_respects_cap(self):
        with pytest.raises(CapacityError):
            instance_efficiency(_make_instance(), cap=2)

    @pytest.mark.parametrize("n", [2, 3])
    def test_poa_bounds_random_instances(self, n):
        bound = compute_poa(shapley(n), covering(n), n).poa
        for seed in range(1000):
            instance = gen_random_singleton(n, 4, covering(n), seed)
            assert instance_efficiency(instance) >= bound - 1e-9


    @pytest.mark.parametrize(
        "spec, basis",
        [
            ("mc", covering),
            ("gairing", covering),
            ("optimal", covering),
            ("sv", lambda n: power(n, 0.5)),
            ("mc", lambda n: power(n, 0.5)),
            ("optimal", lambda n: power(n, 0.5)),
        ],
    )
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_rules_bound_random_instances(self, spec, basis, n):
        w = basis(n)
        rule = resolve_rule(spec, w)
        bound = compute_poa(rule, w, n).poa
        for seed in range(20):
            instance = gen_random_singleton(n, 5, w, seed).with_rule(rule)
            assert instance_efficiency(instance) >= bound - 1e-9

class TestSmoothness:
    def test_bound(self):
        assert smoothness_bound(1) == pytest.approx(1.0)
        assert smoothness_bound(4) == pytest.approx(4 / 7)

    def test_single_pair(self):
        instance = _make_instance()
        a_prime = Allocation.of(instance, [0, 1])
        a = Allocation.of(instance, [0, 0])
        assert smoothness_check(instance, a_prime, a, 1.0, 0.5)
        assert not smoothness_check(instance, a_prime, a, 1.0, 0.4)

    def test_shapley_covering_is_smooth(self):
        for seed in range(20):
            instance = gen_random_singleton(3, 4, covering(3), seed)
            assert smoothness_check_exhaustive(instance, 1.0, 1.0 - 1.0 / 3) is None

    def test_violation_found(self):
        violation = smoothness_check_exhaustive(_make_instance(), 1.0, 0.0)
        assert violation is not None
        assert violation.gap > 0.0

    def test_warns_when_not_budget_balanced(self, caplog):
        instance = _make_instance(rule=shapley(2).scaled(2.0))
        a = Allocation.of(instance, [0, 0])
        smoothness_check(instance, a, a, 1.0, 1.0)
        assert "sub-budget-balanced" in caplog.text

    def test_two_agent_value_grid_is_smooth(self):
        subsets = ExplicitActionSet(((0,), (1,), (0, 1)))
        grid = [k / 10 for k in range(1, 11)]
        for v0, v1 in product(grid, grid):
            instance = _make_instance(values=(v0, v1), action_sets=(subsets, subsets))
            assert smoothness_check_exhaustive(instance, 1.0, 0.5) is None
