"""Named distribution rules and their structural predicates."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from src.errors import StructuralError
from src.models import DistributionRule, WelfareBasis

_TOL = 1e-12
_EXACT_GAIRING_MAX_N = 20


def shapley(n: int) -> DistributionRule:
    """f_SV(j) = 1/j."""
    if n < 1:
        raise StructuralError(f"n must be >= 1, got {n}")
    return DistributionRule.from_inner([1.0 / j for j in range(1, n + 1)], name="sv")


def marginal_contribution(w: WelfareBasis) -> DistributionRule:
    """f_MC(j) = 1 − w(j−1)/w(j)."""
    if not w.is_positive:
        raise StructuralError("marginal contribution needs w(j) > 0 on [1, n]")
    return DistributionRule.from_inner(
        [1.0 - w(j - 1) / w(j) for j in range(1, w.n + 1)], name="mc"
    )


def _gairing_tail(n: int, one, zero):
    # T_j = (j−1)!·(1/((n−1)(n−1)!) + Σ_{i=j}^{n−1} 1/i!), via T_j = (T_{j+1} + 1)/j
    tail = [zero] * (n + 1)
    tail[n] = one / (n - 1)
    for j in range(n - 1, 0, -1):
        tail[j] = (tail[j + 1] + one) / j
    return tail


def gairing(n: int) -> DistributionRule:
    """Optimal covering rule; f_G(j) = T_j / T_1 so f_G(1) = 1 exactly.

    Computed with exact rationals up to n = 20 and with the float recursion beyond, which
    runs backwards from j = n and therefore never overflows.
    """
    if n < 2:
        raise StructuralError(f"gairing rule needs n >= 2, got {n}")
    if n <= _EXACT_GAIRING_MAX_N:
        tail = _gairing_tail(n, Fraction(1), Fraction(0))
        inner = [float(tail[j] / tail[1]) for j in range(1, n + 1)]
    else:
        tail = _gairing_tail(n, 1.0, 0.0)
        inner = [tail[j] / tail[1] for j in range(1, n + 1)]
    inner[0] = 1.0
    return DistributionRule.from_inner(inner, name="gairing")


@dataclass(frozen=True)
class RuleClassification:
    fw_nonincreasing: bool
    dominates_mc: bool
    f_nonincreasing: bool
    fw_at_least_one: bool

    @property
    def in_submodular_family(self) -> bool:
        """Membership in F_s: f ≥ f_MC and f·w non-increasing."""
        return self.fw_nonincreasing and self.dominates_mc


def classify_rule(f: DistributionRule, w: WelfareBasis) -> RuleClassification:
    if f.n != w.n:
        raise StructuralError(f"rule n={f.n} does not match basis n={w.n}")
    n = f.n
    fw = [f(j) * w(j) for j in range(n + 1)]
    mc = marginal_contribution(w) if w.is_positive else None
    return RuleClassification(
        fw_nonincreasing=all(fw[j + 1] <= fw[j] + _TOL for j in range(1, n)),
        dominates_mc=mc is not None and all(f(j) >= mc(j) - _TOL for j in range(1, n + 1)),
        f_nonincreasing=all(f(j + 1) <= f(j) + _TOL for j in range(1, n)),
        fw_at_least_one=all(fw[j] >= 1.0 - _TOL for j in range(1, n + 1)),
    )
