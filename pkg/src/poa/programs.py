"""Builders for the price-of-anarchy linear programs.

Every builder reads f and w through their boundary-extended vectors, so f(n+1) = w(n+1) = 0
enter the coefficients without special cases.
"""

from __future__ import annotations

from src.distributions import classify_rule
from src.errors import PreconditionError, StructuralError
from src.lp.base import LinearProgram, LPBuilder, Relation, Sense
from src.models import DistributionRule, WelfareBasis
from src.poa.index_sets import IndexTriple, index_set_i, index_set_ir

LAMBDA = "lambda"
MU = "mu"


def theta_name(t: IndexTriple) -> str:
    return f"theta[{t.a},{t.x},{t.b}]"


def check_inputs(f: DistributionRule, w: WelfareBasis, n: int) -> None:
    if not (f.n == w.n == n):
        raise StructuralError(f"rule n={f.n}, basis n={w.n} and n={n} must agree")
    if not f.in_class_f:
        raise StructuralError("f not in class F")
    if not w.is_positive:
        raise StructuralError("w not positive on [1, n]")


def equilibrium_coefficient(f: DistributionRule, w: WelfareBasis, t: IndexTriple) -> float:
    """a·f(a+x)·w(a+x) − b·f(a+x+1)·w(a+x+1)."""
    j = t.a + t.x
    return t.a * f(j) * w(j) - t.b * f(j + 1) * w(j + 1)


def equilibrium_welfare(w: WelfareBasis, t: IndexTriple) -> float:
    return w(t.a + t.x) if t.a + t.x >= 1 else 0.0


def optimum_welfare(w: WelfareBasis, t: IndexTriple) -> float:
    return w(t.b + t.x) if t.b + t.x >= 1 else 0.0


def primal_lp(f: DistributionRule, w: WelfareBasis, n: int) -> LinearProgram:
    """max Σ 1{b+x≥1} w(b+x) θ  s.t. equilibrium sum ≥ 0, normalization = 1, θ ≥ 0."""
    check_inputs(f, w, n)
    builder = LPBuilder(sense=Sense.MAXIMIZE)
    triples = index_set_i(n)
    for t in triples:
        builder.add_variable(theta_name(t), cost=optimum_welfare(w, t))
    builder.add_constraint(
        {theta_name(t): equilibrium_coefficient(f, w, t) for t in triples},
        Relation.GE,
        0.0,
        name="equilibrium",
    )
    builder.add_constraint(
        {theta_name(t): equilibrium_welfare(w, t) for t in triples},
        Relation.EQ,
        1.0,
        name="normalization",
    )
    return builder.build()


def dual_lp(f: DistributionRule, w: WelfareBasis, n: int) -> LinearProgram:
    """min μ over λ ≥ 0, μ free; one row per triple of I_R."""
    check_inputs(f, w, n)
    builder = LPBuilder(sense=Sense.MINIMIZE)
    builder.add_variable(LAMBDA, lower=0.0)
    builder.add_variable(MU, cost=1.0, lower=float("-inf"))
    for t in index_set_ir(n):
        builder.add_constraint(
            {MU: -equilibrium_welfare(w, t), LAMBDA: equilibrium_coefficient(f, w, t)},
            Relation.LE,
            -optimum_welfare(w, t),
            name=f"ir[{t.a},{t.x},{t.b}]",
        )
    return builder.build()


def reduced_pairs(n: int) -> list[tuple[int, int]]:
    """(j, l) ∈ [0, n]² with j + l ≥ 1, lexicographic."""
    return [(j, ell) for j in range(n + 1) for ell in range(n + 1) if j + ell >= 1]


def reduced_coefficient(f: DistributionRule, w: WelfareBasis, j: int, ell: int) -> float:
    n = f.n
    if j + ell <= n:
        return j * f(j) * w(j) - ell * f(j + 1) * w(j + 1)
    return (n - ell) * f(j) * w(j) - (n - j) * f(j + 1) * w(j + 1)


def reduced_dual_lp(f: DistributionRule, w: WelfareBasis, n: int) -> LinearProgram:
    """Dual restricted to (j, l) pairs; valid when f·w is non-increasing.

    Rows: μ w(j) ≥ w(l) + λ·c(j, l) for every pair of :func:`reduced_pairs`. The j = 0 rows
    reduce to λ·l·f(1)·w(1) ≥ w(l).
    """
    check_inputs(f, w, n)
    if not classify_rule(f, w).fw_nonincreasing:
        raise PreconditionError("reduced dual needs f·w non-increasing on [1, n]")
    builder = LPBuilder(sense=Sense.MINIMIZE)
    builder.add_variable(LAMBDA, lower=0.0)
    builder.add_variable(MU, cost=1.0, lower=float("-inf"))
    for j, ell in reduced_pairs(n):
        builder.add_constraint(
            {MU: -w(j), LAMBDA: reduced_coefficient(f, w, j, ell)},
            Relation.LE,
            -w(ell),
            name=f"pair[{j},{ell}]",
        )
    return builder.build()
