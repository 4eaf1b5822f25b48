"""Tests for the explicit PoA formulas."""

from __future__ import annotations

import math

import pytest

from src.bases import covering, power, vehicle_target
from src.closed_forms import (
    Maximizer,
    covering_w_star,
    covering_w_star_nonincreasing,
    curvature,
    curvature_approx,
    gairing_limit,
    mc_w_star,
    poa_gairing,
    poa_mc_submodular,
    poa_shapley_submodular,
    submodular_monotonicity_sweep,
    submodular_w_star,
    supermodular_poa,
)
from src.distributions import gairing, shapley
from src.errors import PreconditionError, StructuralError
from src.models import DistributionRule
from src.poa.smoothness import smoothness_bound


class TestSubmodular:
    def test_shapley_on_covering(self):
        result = submodular_w_star(shapley(3), covering(3), 3)
        assert result.value == pytest.approx(5 / 3)
        assert result.at == (2, 1)

    def test_poa_shapley_submodular(self):
        assert poa_shapley_submodular(covering(4), 4) == pytest.approx(1 / 1.75)

    def test_linear_basis_is_efficient(self):
        assert submodular_w_star(shapley(4), power(4, 1), 4).value == pytest.approx(1.0)
        assert mc_w_star(power(4, 1), 4).value == pytest.approx(1.0)

    def test_mc_on_covering(self):
        result = mc_w_star(covering(3), 3)
        assert result.value == pytest.approx(2.0)
        assert result.at == (1,)
        assert poa_mc_submodular(covering(3), 3) == pytest.approx(0.5)

    def test_mc_below_shapley_on_vehicle_target(self):
        w = vehicle_target(10, 0.8)
        assert poa_mc_submodular(w, 10) < poa_shapley_submodular(w, 10)

    def test_needs_concave_basis(self):
        with pytest.raises(PreconditionError, match="concave"):
            submodular_w_star(shapley(3), power(3, 2), 3)

    def test_needs_rule_above_mc(self):
        w = vehicle_target(3, 0.8)
        below = DistributionRule.from_inner([1.0, 0.0, 0.0])
        with pytest.raises(PreconditionError, match="f >= f_MC"):
            submodular_w_star(below, w, 3)

    def test_size_mismatch(self):
        with pytest.raises(StructuralError, match="expected 4"):
            submodular_w_star(shapley(3), covering(3), 4)

    def test_monotonicity_sweep_on_covering(self):
        assert submodular_monotonicity_sweep([0.0], range(2, 7)) == []

    def test_monotonicity_sweep_entries(self):
        for d, n, before, after in submodular_monotonicity_sweep([0.3, 0.7], range(2, 9)):
            assert 0.3 <= d <= 0.7
            assert 3 <= n <= 8
            assert after < before


class TestCovering:
    @pytest.mark.parametrize("n", [2, 3, 6, 10])
    def test_shapley(self, n):
        assert covering_w_star(shapley(n), n).value == pytest.approx(2 - 1 / n)

    def test_single_agent(self):
        assert covering_w_star(shapley(1), 1) == Maximizer(1.0, ())

    def test_gairing_three_agents(self):
        full = covering_w_star(gairing(3), 3)
        reduced = covering_w_star_nonincreasing(gairing(3), 3)
        assert full.value == pytest.approx(11 / 7)
        assert reduced.value == pytest.approx(11 / 7)

    @pytest.mark.parametrize("n", [2, 5, 12])
    def test_reduced_form_agrees_for_nonincreasing_rules(self, n):
        for f in (shapley(n), gairing(n)):
            assert covering_w_star_nonincreasing(f, n).value == pytest.approx(
                covering_w_star(f, n).value
            )

    def test_reduced_form_needs_unit_first_share(self):
        with pytest.raises(PreconditionError, match="f\\(1\\) = 1"):
            covering_w_star_nonincreasing(shapley(3).scaled(2.0), 3)

    def test_reduced_form_needs_nonincreasing_rule(self):
        rising = DistributionRule.from_inner([1.0, 0.2, 0.3])
        with pytest.raises(PreconditionError, match="non-increasing"):
            covering_w_star_nonincreasing(rising, 3)


class TestGairingPoA:
    def test_two_agents_meets_smoothness_bound(self):
        assert poa_gairing(2) == pytest.approx(2 / 3)
        assert smoothness_bound(2) == pytest.approx(2 / 3)

    @pytest.mark.parametrize("n", range(3, 16))
    def test_beats_smoothness_bound(self, n):
        assert smoothness_bound(n) < poa_gairing(n)

    def test_matches_covering_formula(self):
        for n in (2, 3, 8):
            assert poa_gairing(n) == pytest.approx(covering_w_star(gairing(n), n).poa)

    def test_decreases_to_limit(self):
        values = [poa_gairing(n) for n in range(2, 16)]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(gairing_limit(), abs=1e-9)
        assert gairing_limit() == pytest.approx(1 - 1 / math.e)

    def test_needs_two_agents(self):
        with pytest.raises(StructuralError):
            poa_gairing(1)


class TestSupermodular:
    def test_shapley_quadratic(self):
        assert supermodular_poa(shapley(3), power(3, 2), 3) == pytest.approx(1 / 3)

    def test_needs_convex_basis(self):
        with pytest.raises(PreconditionError, match="convex"):
            supermodular_poa(shapley(3), vehicle_target(3, 0.5), 3)

    def test_needs_fw_at_least_one(self):
        with pytest.raises(PreconditionError, match="f·w >= 1"):
            supermodular_poa(shapley(3), covering(3), 3)


class TestCurvature:
    def test_covering(self):
        assert curvature(covering(4), 4) == pytest.approx(1.0)
        assert curvature_approx(covering(4), 4) == pytest.approx(1 - 1 / math.e)

    def test_linear(self):
        assert curvature(power(4, 1), 4) == pytest.approx(0.0)
        assert curvature_approx(power(4, 1), 4) == pytest.approx(1.0)
