"""(λ, μ)-smoothness checks for pure profiles."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from src.game import deviation_utility, welfare
from src.models import Allocation, GameInstance
from src.oracle import iter_profiles

logger = logging.getLogger(__name__)

_SLACK = 1e-12


def smoothness_bound(n: int) -> float:
    """b(n) = 1 / (2 − 1/n): best smoothness bound for covering games."""
    return 1.0 / (2.0 - 1.0 / n)


def _warn_if_not_sub_budget_balanced(instance: GameInstance) -> None:
    f = instance.rule
    if any(j * f(j) > 1.0 + _SLACK for j in range(1, instance.n_agents + 1)):
        logger.warning("Utilities are not sub-budget-balanced; the smoothness bound is vacuous")


def _deviation_sum(instance: GameInstance, a_prime: Allocation, a: Allocation) -> float:
    return sum(
        deviation_utility(instance, a, i, a_prime.choices[i]) for i in range(instance.n_agents)
    )


def smoothness_check(
    instance: GameInstance, a_prime: Allocation, a: Allocation, lam: float, mu: float
) -> bool:
    """Σ_i u_i(a'_i, a_{-i}) ≥ λ W(a') − μ W(a) for this pair."""
    _warn_if_not_sub_budget_balanced(instance)
    lhs = _deviation_sum(instance, a_prime, a)
    rhs = lam * welfare(instance, a_prime) - mu * welfare(instance, a)
    return lhs >= rhs - _SLACK * max(1.0, abs(rhs))


@dataclass(frozen=True)
class SmoothnessViolation:
    a_prime: Allocation
    a: Allocation
    gap: float


def smoothness_check_exhaustive(
    instance: GameInstance, lam: float, mu: float, cap: int | None = None
) -> SmoothnessViolation | None:
    """First violating (a', a) pair over all profile pairs, or None if the game is smooth."""
    _warn_if_not_sub_budget_balanced(instance)
    profiles = list(iter_profiles(instance, cap))
    welfares = [welfare(instance, p) for p in profiles]
    for a_prime, w_prime in zip(profiles, welfares):
        for a, w_a in zip(profiles, welfares):
            rhs = lam * w_prime - mu * w_a
            lhs = _deviation_sum(instance, a_prime, a)
            if lhs < rhs - _SLACK * max(1.0, abs(rhs)):
                return SmoothnessViolation(a_prime, a, rhs - lhs)
    return None
