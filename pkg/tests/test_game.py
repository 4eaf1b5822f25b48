"""Tests for welfare, utilities, the potential and equilibrium checks."""

from __future__ import annotations

import pytest

from src.actions import ExplicitActionSet
from src.bases import covering, power
from src.distributions import marginal_contribution, shapley
from src.errors import StructuralError
from src.game import (
    deviation_utility,
    is_nash,
    potential,
    resource_gains,
    utility,
    validate_standing_assumptions,
    welfare,
    welfare_without,
)
from src.harness.scenarios import gen_random_singleton
from src.models import Allocation, DistributionRule, GameInstance
from src.oracle import all_nash, iter_profiles


def _make_instance(**overrides) -> GameInstance:
    """Two agents choosing between r0 (value 1) and r1 (value 0.4)."""
    defaults = dict(
        values=(1.0, 0.4),
        action_sets=(ExplicitActionSet(((0,), (1,))), ExplicitActionSet(((0,), (1,)))),
        basis=covering(2),
        rule=shapley(2),
    )
    defaults.update(overrides)
    return GameInstance(**defaults)


def _alloc(instance: GameInstance, *choices: int) -> Allocation:
    return Allocation.of(instance, choices)


class TestWelfare:
    def test_split_profile(self):
        instance = _make_instance()
        assert welfare(instance, _alloc(instance, 0, 1)) == pytest.approx(1.4)

    def test_shared_profile(self):
        instance = _make_instance()
        assert welfare(instance, _alloc(instance, 0, 0)) == pytest.approx(1.0)
        assert welfare(instance, _alloc(instance, 1, 1)) == pytest.approx(0.4)

    def test_welfare_without(self):
        instance = _make_instance()
        assert welfare_without(instance, _alloc(instance, 0, 0), 0) == pytest.approx(1.0)
        assert welfare_without(instance, _alloc(instance, 0, 1), 1) == pytest.approx(1.0)

    def test_allocation_from_other_instance(self):
        instance = _make_instance()
        other = _make_instance(values=(1.0, 0.4, 0.2))
        with pytest.raises(StructuralError, match="does not belong"):
            welfare(instance, _alloc(other, 0, 0))


class TestUtility:
    def test_shared_resource_is_split(self):
        instance = _make_instance()
        a = _alloc(instance, 0, 0)
        assert utility(instance, a, 0) == pytest.approx(0.5)
        assert utility(instance, a, 1) == pytest.approx(0.5)

    def test_resource_gains(self):
        instance = _make_instance()
        gains = resource_gains(instance, _alloc(instance, 0, 0), 0)
        assert gains == pytest.approx({0: 0.5, 1: 0.4})

    def test_deviation_utility(self):
        instance = _make_instance()
        assert deviation_utility(instance, _alloc(instance, 1, 1), 0, 0) == pytest.approx(1.0)

    def test_agent_out_of_range(self):
        instance = _make_instance()
        with pytest.raises(StructuralError, match="agent index 2"):
            utility(instance, _alloc(instance, 0, 0), 2)


class TestPotential:
    @pytest.mark.parametrize(
        "choices, expected",
        [((1, 1), 0.6), ((0, 1), 1.4), ((0, 0), 1.5)],
    )
    def test_values(self, choices, expected):
        instance = _make_instance()
        assert potential(instance, _alloc(instance, *choices)) == pytest.approx(expected)

    def test_unilateral_change_matches_utility_change(self):
        basis = power(3, 0.5)
        instance = gen_random_singleton(3, 4, basis, seed=7)
        for a in iter_profiles(instance):
            for i, actions in enumerate(instance.action_sets):
                for k in range(len(actions)):
                    choices = list(a.choices)
                    choices[i] = k
                    b = Allocation.of(instance, choices)
                    delta_phi = potential(instance, b) - potential(instance, a)
                    delta_u = utility(instance, b, i) - utility(instance, a, i)
                    assert delta_phi == pytest.approx(delta_u, abs=1e-12)


class TestIsNash:
    def test_both_on_small_resource_is_not_nash(self):
        instance = _make_instance()
        check = is_nash(instance, _alloc(instance, 1, 1))
        assert not check
        assert check.deviation.agent == 0
        assert check.deviation.action == 0
        assert check.deviation.gain == pytest.approx(0.8)

    def test_split_is_not_nash(self):
        instance = _make_instance()
        check = is_nash(instance, _alloc(instance, 0, 1))
        assert not check.is_nash
        assert check.deviation.agent == 1

    def test_shared_large_resource_is_nash(self):
        instance = _make_instance()
        check = is_nash(instance, _alloc(instance, 0, 0))
        assert check
        assert check.deviation is None

    def test_tolerance_absorbs_tiny_gains(self):
        instance = _make_instance(values=(1.0, 0.5 + 1e-12))
        assert is_nash(instance, _alloc(instance, 0, 0))
        assert not is_nash(instance, _alloc(instance, 0, 0), tol=0.0)


class TestStandingAssumptions:
    def test_valid_instance(self):
        assert validate_standing_assumptions(_make_instance()) == []

    def test_rule_outside_class_f(self):
        instance = _make_instance(rule=DistributionRule.from_inner([0.5, 0.25]))
        assert validate_standing_assumptions(instance) == ["f not in class F"]

    def test_no_valuable_resource(self):
        instance = _make_instance(values=(0.0, 0.0))
        assert "no positively valued reachable resource" in validate_standing_assumptions(
            instance
        )

    def test_agent_without_nonempty_action(self):
        instance = _make_instance(
            action_sets=(ExplicitActionSet(((),)), ExplicitActionSet(((0,),)))
        )
        assert validate_standing_assumptions(instance) == ["agent 0 has no nonempty action"]


def _make_random_instances(basis, count: int = 5) -> list[GameInstance]:
    return [gen_random_singleton(3, 4, basis, seed=11, sample=s) for s in range(count)]


class TestInvariants:
    @pytest.mark.parametrize("factor", [0.25, 3.0])
    def test_scaling_values_scales_everything(self, factor):
        for instance in _make_random_instances(power(3, 0.5)):
            scaled = instance.scaled(factor)
            for a in iter_profiles(instance):
                assert welfare(scaled, a) == pytest.approx(factor * welfare(instance, a))
                assert potential(scaled, a) == pytest.approx(factor * potential(instance, a))
                for i in range(instance.n_agents):
                    assert utility(scaled, a, i) == pytest.approx(factor * utility(instance, a, i))
                assert bool(is_nash(scaled, a)) == bool(is_nash(instance, a))

    @pytest.mark.parametrize("basis", [covering(3), power(3, 0.5), power(3, 2)])
    def test_shapley_is_budget_balanced(self, basis):
        for instance in _make_random_instances(basis):
            for a in iter_profiles(instance):
                total = sum(utility(instance, a, i) for i in range(instance.n_agents))
                assert total == pytest.approx(welfare(instance, a), abs=1e-12)

    @pytest.mark.parametrize("basis", [covering(3), power(3, 0.5), power(3, 2)])
    def test_marginal_contribution_pays_the_marginal_welfare(self, basis):
        for instance in _make_random_instances(basis):
            instance = instance.with_rule(marginal_contribution(basis))
            for a in iter_profiles(instance):
                for i in range(instance.n_agents):
                    marginal = welfare(instance, a) - welfare_without(instance, a, i)
                    assert utility(instance, a, i) == pytest.approx(marginal, abs=1e-12)

    @pytest.mark.parametrize("basis", [covering(3), power(3, 0.5)])
    def test_equilibria_have_positive_welfare(self, basis):
        for instance in _make_random_instances(basis, count=10):
            assert validate_standing_assumptions(instance) == []
            for a in all_nash(instance):
                assert welfare(instance, a) > 0.0
