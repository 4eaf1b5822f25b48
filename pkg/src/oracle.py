"""Brute-force ground truth on small instances.

Profiles are enumerated in mixed-radix (lexicographic) order over action indices; ties in
welfare keep the first profile seen.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator

from src.config import get_config
from src.errors import CapacityError, PreconditionError
from src.game import is_nash, welfare
from src.models import Allocation, GameInstance

logger = logging.getLogger(__name__)


def iter_profiles(instance: GameInstance, cap: int | None = None) -> Iterator[Allocation]:
    cap = get_config().oracle_cap if cap is None else cap
    count = instance.profile_count
    if count > cap:
        logger.warning("Oracle refused: %d profiles exceed cap %d", count, cap)
        raise CapacityError(count, cap)
    ranges = [range(len(actions)) for actions in instance.action_sets]
    for choices in itertools.product(*ranges):
        yield Allocation.of(instance, choices)


def exact_optimum(instance: GameInstance, cap: int | None = None) -> tuple[Allocation, float]:
    best: Allocation | None = None
    best_value = -1.0
    for a in iter_profiles(instance, cap):
        value = welfare(instance, a)
        if value > best_value:
            best, best_value = a, value
    assert best is not None
    return best, best_value


def all_nash(instance: GameInstance, cap: int | None = None) -> list[Allocation]:
    return [a for a in iter_profiles(instance, cap) if is_nash(instance, a)]


def worst_nash(instance: GameInstance, cap: int | None = None) -> tuple[Allocation, float]:
    equilibria = all_nash(instance, cap)
    if not equilibria:
        # potential maximizers are equilibria, so this only happens on malformed input
        raise PreconditionError("instance has no pure Nash equilibrium")
    worst = equilibria[0]
    worst_value = welfare(instance, worst)
    for a in equilibria[1:]:
        value = welfare(instance, a)
        if value < worst_value:
            worst, worst_value = a, value
    return worst, worst_value


def instance_efficiency(instance: GameInstance, cap: int | None = None) -> float:
    """Worst equilibrium welfare over optimal welfare."""
    _, optimum = exact_optimum(instance, cap)
    if optimum <= 0.0:
        raise PreconditionError("optimal welfare is zero; efficiency undefined")
    _, worst = worst_nash(instance, cap)
    return worst / optimum
