"""Exact price-of-anarchy certificates and tight worst-case instances."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from src.actions import ExplicitActionSet
from src.distributions import classify_rule
from src.errors import PreconditionError, SolverError, StructuralError
from src.lp.simplex import solve
from src.models import (
    Allocation,
    DistributionRule,
    GameInstance,
    Method,
    PoAReport,
    WelfareBasis,
    WorstCase,
)
from src.poa.index_sets import IndexTriple, index_set_i
from src.poa.programs import (
    LAMBDA,
    MU,
    check_inputs,
    dual_lp,
    equilibrium_coefficient,
    equilibrium_welfare,
    optimum_welfare,
    primal_lp,
    reduced_coefficient,
    reduced_dual_lp,
    reduced_pairs,
)

logger = logging.getLogger(__name__)

_W_STAR_SLACK = 1e-7


@dataclass(frozen=True, eq=False)
class ThetaSolution:
    """θ over I; triples that are not listed are zero."""

    n: int
    values: Mapping[IndexTriple, float]

    def __post_init__(self) -> None:
        cleaned: dict[IndexTriple, float] = {}
        for key, theta in self.values.items():
            t = IndexTriple(*key)
            if min(t) < 0 or not 1 <= t.total <= self.n:
                raise StructuralError(f"{t} is not in I for n={self.n}")
            if theta < -1e-12:
                raise StructuralError(f"theta{tuple(t)} = {theta} is negative")
            cleaned[t] = max(float(theta), 0.0)
        object.__setattr__(self, "values", dict(sorted(cleaned.items())))

    @classmethod
    def from_vector(cls, n: int, x: np.ndarray) -> ThetaSolution:
        triples = index_set_i(n)
        if len(x) != len(triples):
            raise StructuralError(f"expected {len(triples)} theta values, got {len(x)}")
        return cls(n, {t: float(v) for t, v in zip(triples, x) if v > 0.0})

    def objective(self, w: WelfareBasis) -> float:
        return sum(optimum_welfare(w, t) * v for t, v in self.values.items())

    def normalization(self, w: WelfareBasis) -> float:
        return sum(equilibrium_welfare(w, t) * v for t, v in self.values.items())

    def equilibrium_sum(self, f: DistributionRule, w: WelfareBasis) -> float:
        return sum(equilibrium_coefficient(f, w, t) * v for t, v in self.values.items())

    def is_feasible(self, f: DistributionRule, w: WelfareBasis, tol: float = 1e-8) -> bool:
        return self.equilibrium_sum(f, w) >= -tol and abs(self.normalization(w) - 1.0) <= tol


# ── Closed-form helpers ────────────────────────────────────────────


def lambda_star(f: DistributionRule, w: WelfareBasis) -> float:
    """Optimal λ of the reduced dual, known a priori under its two preconditions."""
    if f.n != w.n:
        raise StructuralError(f"rule n={f.n} does not match basis n={w.n}")
    n = f.n
    if not classify_rule(f, w).fw_nonincreasing:
        raise PreconditionError("lambda* needs f·w non-increasing")
    floor = f(1) * w(1) * min(ell / w(ell) for ell in range(1, n + 1))
    if any(f(j) < floor / j - 1e-12 for j in range(1, n + 1)):
        raise PreconditionError("lambda* needs f(j) >= f(1)·w(1)·min_l(l/w(l)) / j")
    return max(w(ell) / ell for ell in range(1, n + 1)) / (f(1) * w(1))


def mu_star(f: DistributionRule, w: WelfareBasis, lam: float) -> float:
    """W* for a known λ: the largest right-hand side of the reduced dual over rows with j ≥ 1."""
    return max(
        (w(ell) + lam * reduced_coefficient(f, w, j, ell)) / w(j)
        for j, ell in reduced_pairs(f.n)
        if j >= 1
    )


# ── Programs ───────────────────────────────────────────────────────


def _resolve_method(f: DistributionRule, w: WelfareBasis, method: Method) -> Method:
    if method is Method.AUTO:
        if classify_rule(f, w).fw_nonincreasing:
            return Method.REDUCED_DUAL
        logger.info("f·w is not non-increasing; using the full dual program")
        return Method.DUAL
    if method not in (Method.PRIMAL, Method.DUAL, Method.REDUCED_DUAL):
        raise StructuralError(f"method {method.value!r} is not an LP method")
    return method


def _checked_w_star(value: float, method: Method) -> float:
    if value < 1.0 - _W_STAR_SLACK:
        raise SolverError(f"{method.value} program returned W* = {value} < 1")
    return max(value, 1.0)


def primal_theta(f: DistributionRule, w: WelfareBasis, n: int) -> tuple[ThetaSolution, float]:
    """Optimal θ of the primal program and its value W*."""
    lp = primal_lp(f, w, n)
    result = solve(lp)
    if not result.is_optimal:
        raise SolverError(f"primal PoA program is {result.status.value}")
    return ThetaSolution.from_vector(n, result.x), _checked_w_star(result.objective, Method.PRIMAL)


def compute_poa(
    f: DistributionRule,
    w: WelfareBasis,
    n: int,
    method: Method = Method.AUTO,
    *,
    witness: bool = False,
) -> PoAReport:
    """PoA(f) = 1/W* from the selected program; ``witness`` adds a tight instance."""
    check_inputs(f, w, n)
    method = _resolve_method(f, w, method)
    lam = mu = None
    theta: ThetaSolution | None = None
    if method is Method.PRIMAL:
        theta, w_star = primal_theta(f, w, n)
    else:
        lp = reduced_dual_lp(f, w, n) if method is Method.REDUCED_DUAL else dual_lp(f, w, n)
        result = solve(lp)
        if not result.is_optimal:
            raise SolverError(f"{method.value} PoA program is {result.status.value}")
        lam, mu = result.value(lp, LAMBDA), result.value(lp, MU)
        w_star = _checked_w_star(mu, method)

    worst_case = None
    if witness:
        if theta is None:
            theta, _ = primal_theta(f, w, n)
        worst_case = reconstruct_worst_case(theta, f, w, n)
    logger.debug("PoA via %s: W*=%.12g (n=%d)", method.value, w_star, n)
    return PoAReport(n, f, w, w_star, method, lambda_star=lam, mu_star=mu, witness=worst_case)


# ── Worst-case reconstruction ──────────────────────────────────────


def reconstruct_worst_case(
    theta: ThetaSolution, f: DistributionRule, w: WelfareBasis, n: int
) -> WorstCase:
    """Game whose equilibrium has welfare 1 and whose optimum has welfare Σ w(b+x)·θ.

    Each triple with θ > 0 yields n resources r(t, j), j ∈ [0, n), valued θ/n. With
    k = (j − i) mod n, agent i's equilibrium action holds r(t, j) iff k < a+x and its
    optimal action iff a ≤ k < a+x+b, so every copy is covered a+x times at equilibrium,
    b+x times at the optimum, and each agent sees a, x, b exclusive/shared/optimal-only
    copies per triple. Action 0 is the equilibrium action, action 1 the optimal one.
    """
    check_inputs(f, w, n)
    if theta.n != n:
        raise StructuralError(f"theta built for n={theta.n}, expected {n}")
    if not theta.is_feasible(f, w):
        raise PreconditionError("theta is not feasible for the primal program")
    values: list[float] = []
    equilibrium: list[list[int]] = [[] for _ in range(n)]
    optimum: list[list[int]] = [[] for _ in range(n)]
    for t, th in theta.values.items():
        if th <= 0.0:
            continue
        for j in range(n):
            r = len(values)
            values.append(th / n)
            for i in range(n):
                k = (j - i) % n
                if k < t.a + t.x:
                    equilibrium[i].append(r)
                if t.a <= k < t.a + t.x + t.b:
                    optimum[i].append(r)
    action_sets = tuple(
        ExplicitActionSet((tuple(equilibrium[i]), tuple(optimum[i]))) for i in range(n)
    )
    instance = GameInstance(tuple(values), action_sets, w, f)
    return WorstCase(
        instance=instance,
        equilibrium=Allocation.of(instance, [0] * n),
        optimum=Allocation.of(instance, [1] * n),
    )
