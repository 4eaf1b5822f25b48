"""Tests for the LP model and the tableau simplex."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.optimize import linprog

from src.config import Config
from src.errors import SolverError, StructuralError
from src.lp.base import LinearProgram, LPBuilder, Relation, Sense, SolveStatus
from src.lp.simplex import solve


def _make_max_lp() -> LinearProgram:
    """max x + y  s.t.  x + 2y ≤ 4,  3x + y ≤ 6,  x, y ≥ 0."""
    builder = LPBuilder(sense=Sense.MAXIMIZE)
    builder.add_variable("x", cost=1.0)
    builder.add_variable("y", cost=1.0)
    builder.add_constraint({"x": 1.0, "y": 2.0}, Relation.LE, 4.0, name="first")
    builder.add_constraint({"x": 3.0, "y": 1.0}, Relation.LE, 6.0, name="second")
    return builder.build()


class TestLinearProgram:
    def test_shape_mismatch(self):
        with pytest.raises(StructuralError, match="does not fit"):
            LinearProgram(
                objective=np.array([1.0, 1.0]),
                matrix=np.array([[1.0, 2.0, 3.0]]),
                relations=(Relation.LE,),
                rhs=np.array([1.0]),
            )

    def test_ragged_rows(self):
        with pytest.raises(StructuralError, match="ragged"):
            LinearProgram(
                objective=np.array([1.0, 1.0]),
                matrix=[[1.0, 2.0], [1.0]],
                relations=(Relation.LE, Relation.LE),
                rhs=np.array([1.0, 1.0]),
            )

    def test_relation_count(self):
        with pytest.raises(StructuralError, match="differ in count"):
            LinearProgram(
                objective=np.array([1.0]),
                matrix=np.array([[1.0]]),
                relations=(),
                rhs=np.array([1.0]),
            )

    def test_inverted_bounds(self):
        with pytest.raises(StructuralError, match="lower bound exceeds"):
            LinearProgram(
                objective=np.array([1.0]),
                matrix=np.zeros((0, 1)),
                relations=(),
                rhs=np.array([]),
                lower=np.array([2.0]),
                upper=np.array([1.0]),
            )

    def test_non_finite_data(self):
        with pytest.raises(StructuralError, match="finite"):
            LinearProgram(
                objective=np.array([math.nan]),
                matrix=np.array([[1.0]]),
                relations=(Relation.LE,),
                rhs=np.array([1.0]),
            )

    def test_max_violation(self):
        lp = _make_max_lp()
        assert lp.max_violation(np.array([1.6, 1.2])) == pytest.approx(0.0, abs=1e-12)
        assert lp.max_violation(np.array([2.0, 2.0])) == pytest.approx(2.0)


class TestLPBuilder:
    def test_duplicate_variable(self):
        builder = LPBuilder()
        builder.add_variable("x")
        with pytest.raises(StructuralError, match="duplicate"):
            builder.add_variable("x")

    def test_unknown_variable(self):
        builder = LPBuilder()
        builder.add_variable("x")
        with pytest.raises(StructuralError, match="unknown variable 'y'"):
            builder.add_constraint({"y": 1.0}, Relation.LE, 1.0, name="row")

    def test_build(self):
        lp = _make_max_lp()
        assert lp.num_variables == 2
        assert lp.num_constraints == 2
        assert lp.variable_names == ("x", "y")
        assert lp.row_names == ("first", "second")
        assert lp.sense is Sense.MAXIMIZE


class TestSolve:
    def test_maximize(self):
        lp = _make_max_lp()
        result = solve(lp)
        assert result.status is SolveStatus.OPTIMAL
        assert result.objective == pytest.approx(2.8)
        assert result.value(lp, "x") == pytest.approx(1.6)
        assert result.value(lp, "y") == pytest.approx(1.2)

    def test_counts_refactorizations(self):
        result = solve(_make_max_lp())
        assert result.refactorizations >= 1

    def test_violated_optimum_raises(self, monkeypatch):
        monkeypatch.setattr(LinearProgram, "max_violation", lambda self, x: 1.0)
        with pytest.raises(SolverError, match="violates"):
            solve(_make_max_lp())

    def test_duals_are_sensitivities(self):
        lp = _make_max_lp()
        result = solve(lp, want_duals=True)
        assert result.duals == pytest.approx([0.4, 0.2])
        assert result.dual_objective == pytest.approx(2.8)

    def test_free_variable_max_of_constants(self):
        builder = LPBuilder()
        builder.add_variable("mu", cost=1.0, lower=-math.inf)
        builder.add_constraint({"mu": 1.0}, Relation.GE, 1.0)
        builder.add_constraint({"mu": 1.0}, Relation.GE, 3.0)
        lp = builder.build()
        result = solve(lp)
        assert result.objective == pytest.approx(3.0)
        assert result.value(lp, "mu") == pytest.approx(3.0)

    def test_bounds_and_free_variables(self):
        builder = LPBuilder()
        builder.add_variable("x1", cost=1.0, lower=-1.0, upper=3.0)
        builder.add_variable("x2", cost=2.0, lower=-math.inf)
        builder.add_constraint({"x1": 1.0, "x2": 1.0}, Relation.GE, 1.0)
        builder.add_constraint({"x2": 1.0}, Relation.GE, -5.0)
        lp = builder.build()
        result = solve(lp)
        assert result.objective == pytest.approx(-1.0)
        assert result.value(lp, "x1") == pytest.approx(3.0)
        assert result.value(lp, "x2") == pytest.approx(-2.0)

    def test_equality_rows(self):
        builder = LPBuilder()
        builder.add_variable("x", cost=1.0)
        builder.add_variable("y", cost=1.0)
        builder.add_constraint({"x": 1.0, "y": 1.0}, Relation.EQ, 2.0)
        builder.add_constraint({"x": 1.0, "y": -1.0}, Relation.EQ, 1.0)
        lp = builder.build()
        result = solve(lp)
        assert result.value(lp, "x") == pytest.approx(1.5)
        assert result.value(lp, "y") == pytest.approx(0.5)

    def test_infeasible(self):
        builder = LPBuilder()
        builder.add_variable("x", cost=1.0)
        builder.add_constraint({"x": 1.0}, Relation.EQ, 1.0)
        builder.add_constraint({"x": 1.0}, Relation.GE, 2.0)
        result = solve(builder.build())
        assert result.status is SolveStatus.INFEASIBLE
        assert not result.is_optimal
        assert math.isnan(result.objective)

    def test_unbounded(self):
        builder = LPBuilder(sense=Sense.MAXIMIZE)
        builder.add_variable("x", cost=1.0)
        builder.add_variable("y")
        builder.add_constraint({"x": 1.0, "y": -1.0}, Relation.LE, 1.0)
        result = solve(builder.build())
        assert result.status is SolveStatus.UNBOUNDED

    def test_no_constraints(self):
        builder = LPBuilder()
        builder.add_variable("x", cost=2.0, lower=1.5)
        lp = builder.build()
        assert solve(lp).objective == pytest.approx(3.0)

    def test_degenerate_cycling_example(self):
        # classic instance on which Dantzig pricing with naive ties cycles
        c = np.array([-0.75, 150.0, -0.02, 6.0])
        a = np.array([[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]])
        b = np.array([0.0, 0.0, 1.0])
        lp = LinearProgram(objective=c, matrix=a, relations=(Relation.LE,) * 3, rhs=b)
        result = solve(lp, config=Config(feas_tol=1e-9))
        assert result.is_optimal
        assert result.objective == pytest.approx(-0.05)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_scipy_on_random_programs(self, seed):
        rng = np.random.default_rng(seed)
        m, n = 6, 5
        a = rng.uniform(0.1, 1.0, size=(m, n))
        b = rng.uniform(1.0, 2.0, size=m)
        c = rng.uniform(0.0, 1.0, size=n)
        floor = np.ones((1, n))
        lp = LinearProgram(
            objective=c,
            matrix=np.vstack([a, floor]),
            relations=(Relation.LE,) * m + (Relation.GE,),
            rhs=np.append(b, 0.1),
            sense=Sense.MAXIMIZE,
        )
        ours = solve(lp)
        reference = linprog(
            -c,
            A_ub=np.vstack([a, -floor]),
            b_ub=np.append(b, -0.1),
            bounds=[(0, None)] * n,
            method="highs",
        )
        assert reference.status == 0
        assert ours.objective == pytest.approx(-reference.fun, abs=1e-7)
        assert lp.max_violation(ours.x) <= 1e-8
