"""PoA-optimal distribution rules via the design linear programs."""

from __future__ import annotations

import logging
from dataclasses import replace

from src.bases import covering
from src.closed_forms import covering_w_star
from src.distributions import marginal_contribution
from src.errors import PreconditionError, SolverError, StructuralError
from src.lp.base import LPBuilder, Relation, Sense
from src.lp.simplex import solve
from src.models import DistributionRule, Method, PoAReport, WelfareBasis
from src.poa.certificate import compute_poa
from src.poa.index_sets import index_set_ir
from src.poa.programs import MU, equilibrium_welfare, optimum_welfare

logger = logging.getLogger(__name__)

_AGREEMENT_TOL = 1e-6


def _f(j: int) -> str:
    return f"f[{j}]"


def _design_builder(n: int, lower: list[float]) -> LPBuilder:
    builder = LPBuilder(sense=Sense.MINIMIZE)
    for j in range(1, n + 1):
        builder.add_variable(_f(j), lower=lower[j - 1])
    builder.add_variable(MU, cost=1.0, lower=float("-inf"))
    return builder


def _solve_design(builder: LPBuilder, n: int, family: str) -> tuple[list[float], float]:
    lp = builder.build()
    result = solve(lp)
    if not result.is_optimal:
        raise SolverError(f"{family} design program is {result.status.value}")
    values = [result.value(lp, _f(j)) for j in range(1, n + 1)]
    mu = result.value(lp, MU)
    logger.info("%s design: mu*=%.12g after %d pivots", family, mu, result.pivots)
    return values, mu


def _check_agreement(mu: float, certified: float, family: str) -> None:
    if abs(certified - mu) > _AGREEMENT_TOL * max(1.0, mu):
        raise SolverError(
            f"{family} value mu*={mu:.12g} disagrees with certified W*={certified:.12g}"
        )
    logger.debug("%s value mu*=%.12g certified", family, mu)


def design_report(rule: DistributionRule, w: WelfareBasis, n: int, mu: float) -> PoAReport:
    """Certificate for a designed rule, re-solved independently of the design program."""
    report = compute_poa(rule, w, n)
    _check_agreement(mu, report.w_star, "design")
    return replace(report, mu_star=mu)


def _check_basis(w: WelfareBasis, n: int) -> None:
    if w.n != n:
        raise StructuralError(f"basis n={w.n} does not match n={n}")
    if not w.is_positive:
        raise StructuralError("w not positive on [1, n]")


def optimal_rule(w: WelfareBasis, n: int) -> tuple[DistributionRule, PoAReport]:
    """min μ over (f̃ ∈ F, μ) with one row per triple of I_R (λ folded into f̃).

    The returned rule is f̃ / f̃(1); rescaling leaves every equilibrium unchanged.
    """
    _check_basis(w, n)
    builder = _design_builder(n, [1.0] + [0.0] * (n - 1))
    for t in index_set_ir(n):
        j = t.a + t.x
        coefficients = {MU: -equilibrium_welfare(w, t)}
        if 1 <= j <= n and t.a:
            coefficients[_f(j)] = t.a * w(j)
        if j + 1 <= n and t.b:
            coefficients[_f(j + 1)] = -t.b * w(j + 1)
        builder.add_constraint(coefficients, Relation.LE, -optimum_welfare(w, t))
    values, mu = _solve_design(builder, n, "general")
    rule = DistributionRule.from_inner(values, name="optimal").scaled(1.0 / values[0])
    return rule, design_report(rule, w, n, mu)


def _pair_rows(w: WelfareBasis, n: int) -> list[tuple[dict[str, float], float]]:
    rows: list[tuple[dict[str, float], float]] = []
    for j in range(1, n + 1):
        for ell in range(0, j + 1):
            # both families coincide on j + l = n
            own, other = (j, ell) if j + ell <= n else (n - ell, n - j)
            coefficients = {MU: -w(j), _f(j): own * w(j)}
            if j + 1 <= n and other:
                coefficients[_f(j + 1)] = -other * w(j + 1)
            rows.append((coefficients, -w(ell)))
    return rows


def optimal_rule_submodular(w: WelfareBasis, n: int) -> tuple[DistributionRule, PoAReport]:
    """Design restricted to F_s = {f ≥ f_MC, f·w non-increasing} for concave normalized w."""
    _check_basis(w, n)
    if not (w.is_nondecreasing_concave and w.is_normalized):
        raise PreconditionError("submodular design needs w non-decreasing, concave, w(1) = 1")
    mc = marginal_contribution(w)
    builder = _design_builder(n, [max(mc(j), 1.0 if j == 1 else 0.0) for j in range(1, n + 1)])
    for coefficients, rhs in _pair_rows(w, n):
        builder.add_constraint(coefficients, Relation.LE, rhs)
    for j in range(1, n):
        builder.add_constraint({_f(j + 1): w(j + 1), _f(j): -w(j)}, Relation.LE, 0.0)
    values, mu = _solve_design(builder, n, "submodular")
    rule = DistributionRule.from_inner(values, name="optimal-submodular")
    return rule, design_report(rule, w, n, mu)


def optimal_rule_covering(n: int) -> tuple[DistributionRule, PoAReport]:
    """Covering design with 3(n−1) rows; certified with the explicit covering formula."""
    if n < 2:
        raise StructuralError(f"covering design needs n >= 2, got {n}")
    builder = _design_builder(n, [1.0] + [0.0] * (n - 1))
    for j in range(1, n):
        builder.add_constraint({_f(j + 1): j + 1.0, MU: -1.0}, Relation.LE, 0.0)
        builder.add_constraint({_f(j): float(j), _f(j + 1): -1.0, MU: -1.0}, Relation.LE, -1.0)
        builder.add_constraint({_f(j + 1): float(j), MU: -1.0}, Relation.LE, -1.0)
    values, mu = _solve_design(builder, n, "covering")
    rule = DistributionRule.from_inner(values, name="optimal-covering").scaled(1.0 / values[0])
    certified = covering_w_star(rule, n).value
    _check_agreement(mu, certified, "covering design")
    report = PoAReport(n, rule, covering(n), certified, Method.CLOSED_FORM, mu_star=mu)
    return rule, report
