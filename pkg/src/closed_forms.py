"""Explicit price-of-anarchy formulas, used to cross-check the LP certificates.

All formulas read the boundary-extended f and w (index n+1 maps to 0). W*-type scans return
the maximizing indices; ties keep the lexicographically smallest one.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass

from src.bases import power
from src.distributions import classify_rule, shapley
from src.errors import PreconditionError, StructuralError
from src.models import DistributionRule, WelfareBasis

logger = logging.getLogger(__name__)

_TOL = 1e-12


@dataclass(frozen=True)
class Maximizer:
    value: float
    at: tuple[int, ...]

    @property
    def poa(self) -> float:
        return 1.0 / self.value


def _argmax(candidates: Iterable[tuple[float, tuple[int, ...]]]) -> Maximizer:
    best: Maximizer | None = None
    for value, at in candidates:
        if best is None or value > best.value:
            best = Maximizer(value, at)
    if best is None:
        raise StructuralError("empty maximization")
    return best


def _require_submodular_basis(w: WelfareBasis) -> None:
    if not (w.is_nondecreasing_concave and w.is_normalized):
        raise PreconditionError("formula needs w non-decreasing, concave and w(1) = 1")


def _check_n(f: DistributionRule | WelfareBasis, n: int) -> None:
    if f.n != n:
        raise StructuralError(f"object built for n={f.n}, expected {n}")


# ── Submodular welfare ─────────────────────────────────────────────


def submodular_w_star(f: DistributionRule, w: WelfareBasis, n: int) -> Maximizer:
    """max_{l ≤ j ∈ [n]} w(l)/w(j) + min(j, n−l)·f(j) − min(l, n−j)·f(j+1)·w(j+1)/w(j)."""
    _check_n(f, n)
    _check_n(w, n)
    _require_submodular_basis(w)
    classes = classify_rule(f, w)
    if not (classes.fw_nonincreasing and classes.dominates_mc):
        raise PreconditionError("formula needs f·w non-increasing and f >= f_MC")
    return _argmax(
        (
            w(ell) / w(j)
            + min(j, n - ell) * f(j)
            - min(ell, n - j) * f(j + 1) * w(j + 1) / w(j),
            (j, ell),
        )
        for j in range(1, n + 1)
        for ell in range(1, j + 1)
    )


def poa_shapley_submodular(w: WelfareBasis, n: int) -> float:
    _check_n(w, n)
    _require_submodular_basis(w)
    return submodular_w_star(shapley(n), w, n).poa


def mc_w_star(w: WelfareBasis, n: int) -> Maximizer:
    """1 + max_j min(j, n−j)·[2w(j) − w(j−1) − w(j+1)] / w(j); the j = n term vanishes."""
    _check_n(w, n)
    _require_submodular_basis(w)
    best = _argmax(
        (min(j, n - j) * (2 * w(j) - w(j - 1) - w(j + 1)) / w(j), (j,))
        for j in range(1, n + 1)
    )
    return Maximizer(1.0 + best.value, best.at)


def poa_mc_submodular(w: WelfareBasis, n: int) -> float:
    return mc_w_star(w, n).poa


def submodular_monotonicity_sweep(
    exponents: Iterable[float], n_values: Iterable[int]
) -> list[tuple[float, int, float, float]]:
    """Cases where W*_SV for w(j) = j^d decreases when n grows by one step of ``n_values``.

    Each entry is (d, n, W*(previous n), W*(n)). The property is only observed, never
    guaranteed, so callers report the list instead of asserting on it.
    """
    failures: list[tuple[float, int, float, float]] = []
    ns = sorted(n_values)
    for d in exponents:
        previous: float | None = None
        for n in ns:
            value = submodular_w_star(shapley(n), power(n, d), n).value
            if previous is not None and value < previous - 1e-12:
                failures.append((d, n, previous, value))
                logger.info("W*_SV decreased at d=%g n=%d: %.9g -> %.9g", d, n, previous, value)
            previous = value
    return failures


# ── Covering (w ≡ 1) ───────────────────────────────────────────────


def covering_w_star(f: DistributionRule, n: int) -> Maximizer:
    """1 + max_{j∈[n−1]} {(j+1)f(j+1) − 1, jf(j) − f(j+1), jf(j+1)}; ``at`` = (j, term)."""
    _check_n(f, n)
    if not f.in_class_f:
        raise PreconditionError("f not in class F")
    if n == 1:
        return Maximizer(1.0, ())
    best = _argmax(
        (term, (j, k))
        for j in range(1, n)
        for k, term in enumerate(
            ((j + 1) * f(j + 1) - 1.0, j * f(j) - f(j + 1), j * f(j + 1))
        )
    )
    return Maximizer(1.0 + best.value, best.at)


def covering_w_star_nonincreasing(f: DistributionRule, n: int) -> Maximizer:
    """1 + max{max_{j∈[n−1]} jf(j) − f(j+1), (n−1)f(n)}; ``at`` = (j,) or (n,) for the tail term."""
    _check_n(f, n)
    if not f.in_class_f or abs(f(1) - 1.0) > _TOL:
        raise PreconditionError("reduced covering formula needs f(1) = 1")
    if any(f(j + 1) > f(j) + _TOL for j in range(1, n)):
        raise PreconditionError("reduced covering formula needs f non-increasing")
    candidates = [(j * f(j) - f(j + 1), (j,)) for j in range(1, n)]
    candidates.append(((n - 1) * f(n), (n,)))
    best = _argmax(candidates)
    return Maximizer(1.0 + best.value, best.at)


def poa_gairing(n: int) -> float:
    """1 − 1/(1/((n−1)(n−1)!) + Σ_{i=0}^{n−1} 1/i!), which tends to 1 − 1/e."""
    if n < 2:
        raise StructuralError(f"gairing PoA needs n >= 2, got {n}")
    total = 0.0
    term = 1.0
    for i in range(n):
        if i > 0:
            term /= i
        total += term
    # term == 1/(n−1)! here
    total += term / (n - 1)
    return 1.0 - 1.0 / total


def gairing_limit() -> float:
    return 1.0 - 1.0 / math.e


# ── Supermodular welfare ───────────────────────────────────────────


def supermodular_poa(f: DistributionRule, w: WelfareBasis, n: int) -> float:
    """(n / w(n)) / max_j j·f(j) for convex w with w(1) = f(1) = 1 and f·w ≥ 1."""
    _check_n(f, n)
    _check_n(w, n)
    if not (w.is_nondecreasing_convex and w.is_normalized):
        raise PreconditionError("formula needs w non-decreasing, convex and w(1) = 1")
    if abs(f(1) - 1.0) > _TOL or not classify_rule(f, w).fw_at_least_one:
        raise PreconditionError("formula needs f(1) = 1 and f·w >= 1")
    return (n / w(n)) / max(j * f(j) for j in range(1, n + 1))


# ── Curvature benchmark ────────────────────────────────────────────


def curvature(w: WelfareBasis, n: int) -> float:
    """Worst-case curvature 1 + w(n−1) − w(n)."""
    _check_n(w, n)
    return 1.0 + w(n - 1) - w(n)


def curvature_approx(w: WelfareBasis, n: int) -> float:
    """Best polynomial-time ratio 1 − c/e for the equivalent cardinality-constrained problem."""
    return 1.0 - curvature(w, n) / math.e
