"""Welfare, utilities, potential and equilibrium checks for GMMC games.

Sums always run over resources in ascending id order so repeated evaluations are
bit-for-bit identical.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

from src.config import get_config
from src.errors import StructuralError
from src.models import Allocation, Deviation, GameInstance, NashCheck

logger = logging.getLogger(__name__)


def _check(instance: GameInstance, a: Allocation) -> None:
    if a.n_agents != instance.n_agents or len(a.coverage) != instance.n_resources:
        raise StructuralError("allocation does not belong to this instance")
    for i, (actions, choice) in enumerate(zip(instance.action_sets, a.choices)):
        if not 0 <= choice < len(actions):
            raise StructuralError(f"agent {i} choice {choice} out of range")


def _check_agent(instance: GameInstance, i: int) -> None:
    if not 0 <= i < instance.n_agents:
        raise StructuralError(f"agent index {i} out of range [0, {instance.n_agents})")


def welfare(instance: GameInstance, a: Allocation) -> float:
    """W(a) = Σ_{r covered} v_r · w(|a|_r)."""
    _check(instance, a)
    w = instance.basis.values
    return sum(v * w[c] for v, c in zip(instance.values, a.coverage) if c > 0)


def welfare_without(instance: GameInstance, a: Allocation, i: int) -> float:
    """W(∅, a_{-i}): welfare once agent ``i`` is removed."""
    _check(instance, a)
    _check_agent(instance, i)
    w = instance.basis.values
    own = set(a.actions[i])
    total = 0.0
    for r, (v, c) in enumerate(zip(instance.values, a.coverage)):
        count = c - 1 if r in own else c
        if count > 0:
            total += v * w[count]
    return total


def utility(instance: GameInstance, a: Allocation, i: int) -> float:
    """u_i(a) = Σ_{r ∈ a_i} v_r · w(|a|_r) · f(|a|_r)."""
    _check(instance, a)
    _check_agent(instance, i)
    w, f = instance.basis.values, instance.rule.values
    return sum(instance.values[r] * w[a.coverage[r]] * f[a.coverage[r]] for r in a.actions[i])


def potential(instance: GameInstance, a: Allocation) -> float:
    """Rosenthal potential Σ_r Σ_{j=1}^{|a|_r} v_r · w(j) · f(j)."""
    _check(instance, a)
    w, f = instance.basis.values, instance.rule.values
    prefix = [0.0]
    for j in range(1, instance.n_agents + 1):
        prefix.append(prefix[-1] + w[j] * f[j])
    return sum(v * prefix[c] for v, c in zip(instance.values, a.coverage) if c > 0)


def resource_gains(instance: GameInstance, a: Allocation, i: int) -> dict[int, float]:
    """Payoff agent ``i`` collects from each resource it could hold, others fixed.

    For r in the ground set of A_i the entry is v_r · w(c+1) · f(c+1) where c counts the
    other agents on r. u_i(a_i', a_{-i}) is the sum of the entries over a_i'.
    """
    return coverage_gains(instance, a.coverage, a.actions[i], i)


def coverage_gains(
    instance: GameInstance, coverage: Sequence[int], own: Sequence[int], i: int
) -> dict[int, float]:
    """:func:`resource_gains` on a raw coverage vector where agent ``i`` holds ``own``."""
    w, f = instance.basis.values, instance.rule.values
    held = set(own)
    gains: dict[int, float] = {}
    for r in instance.action_sets[i].ground:
        c = coverage[r] - (1 if r in held else 0) + 1
        gains[r] = instance.values[r] * w[c] * f[c]
    return gains


def deviation_utility(instance: GameInstance, a: Allocation, i: int, action: int) -> float:
    """u_i(a_i', a_{-i}) for a_i' = the ``action``-th element of A_i."""
    _check(instance, a)
    _check_agent(instance, i)
    gains = resource_gains(instance, a, i)
    return sum(gains[r] for r in instance.action_sets[i].action(action))


def is_nash(instance: GameInstance, a: Allocation, tol: float | None = None) -> NashCheck:
    """Pure Nash check; a deviation counts only if it gains more than tol·max(1, u_i)."""
    _check(instance, a)
    tol = get_config().nash_tol if tol is None else tol
    for i, actions in enumerate(instance.action_sets):
        gains = resource_gains(instance, a, i)
        current = sum(gains[r] for r in a.actions[i])
        best = actions.best_response(gains)
        gain = sum(gains[r] for r in actions.action(best)) - current
        if gain > tol * max(1.0, abs(current)):
            return NashCheck(False, Deviation(agent=i, action=best, gain=gain))
    return NashCheck(True)


def validate_standing_assumptions(instance: GameInstance) -> list[str]:
    violations: list[str] = []
    for i, actions in enumerate(instance.action_sets):
        if not actions.has_nonempty_action:
            violations.append(f"agent {i} has no nonempty action")
    reachable = {r for actions in instance.action_sets for r in actions.ground}
    if not any(instance.values[r] > 0.0 for r in reachable):
        violations.append("no positively valued reachable resource")
    if not instance.basis.is_positive:
        violations.append("w not positive on [1, n]")
    if not instance.rule.in_class_f:
        violations.append("f not in class F")
    if violations:
        logger.debug("Standing assumption violations: %s", violations)
    return violations
