"""Best-response dynamics driven by the Rosenthal potential.

Each revision computes the per-resource payoffs the agent would collect with the others
held fixed and asks its action set for the maximizing action; an agent only moves when
that strictly beats its current payoff by more than ``improve_tol``.
"""

from __future__ import annotations

import io
import logging

import pandas as pd

from src.config import get_config
from src.dynamics.scheduler import RoundRobinScheduler, Scheduler
from src.errors import StructuralError
from src.game import coverage_gains, potential, resource_gains
from src.models import Allocation, BRStep, BRTrace, GameInstance

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["step", "agent", "action", "potential"]


def best_response(instance: GameInstance, a: Allocation, i: int) -> int:
    """Smallest action index of A_i maximizing u_i(a_i', a_{-i})."""
    if not 0 <= i < instance.n_agents:
        raise StructuralError(f"agent index {i} out of range [0, {instance.n_agents})")
    return instance.action_sets[i].best_response(resource_gains(instance, a, i))


class _Dynamics:
    """Mutable profile with incrementally maintained coverage and potential."""

    def __init__(self, instance: GameInstance, init: Allocation) -> None:
        self.instance = instance
        self.choices = list(init.choices)
        self.actions = list(init.actions)
        self.coverage = list(init.coverage)
        self.potential = potential(instance, init)
        self.steps: list[BRStep] = []

    def revise(self, i: int, improve_tol: float) -> bool:
        actions = self.instance.action_sets[i]
        gains = coverage_gains(self.instance, self.coverage, self.actions[i], i)
        current = sum(gains[r] for r in self.actions[i])
        best = actions.best_response(gains)
        gain = sum(gains[r] for r in actions.action(best)) - current
        changed = gain > improve_tol and best != self.choices[i]
        if changed:
            # exact potential: Δφ equals the mover's utility change
            self._move(i, best)
            self.potential += gain
        self.steps.append(
            BRStep(len(self.steps), i, self.choices[i], self.potential, changed)
        )
        return changed

    def _move(self, i: int, choice: int) -> None:
        for r in self.actions[i]:
            self.coverage[r] -= 1
        action = self.instance.action_sets[i].action(choice)
        for r in action:
            self.coverage[r] += 1
        self.choices[i] = choice
        self.actions[i] = action


def run_best_response(
    instance: GameInstance,
    init: Allocation,
    max_rounds: int | None = None,
    *,
    scheduler: Scheduler | None = None,
    improve_tol: float | None = None,
) -> tuple[Allocation, BRTrace]:
    """Revise agents round by round until nobody can improve or ``max_rounds`` is used up.

    The run stops as soon as every agent other than the last mover has been checked
    without moving since the last move; ``rounds`` is the round in which that happens.
    Running out of rounds yields ``converged=False``.
    """
    config = get_config()
    max_rounds = config.max_rounds if max_rounds is None else max_rounds
    if max_rounds < 1:
        raise StructuralError(f"max_rounds must be >= 1, got {max_rounds}")
    scheduler = scheduler or RoundRobinScheduler()
    improve_tol = config.improve_tol if improve_tol is None else improve_tol
    if init.n_agents != instance.n_agents:
        raise StructuralError("initial allocation does not belong to this instance")

    state = _Dynamics(instance, init)
    initial_potential = state.potential
    pending = set(range(instance.n_agents))
    for round_index in range(1, max_rounds + 1):
        for i in scheduler.order(instance.n_agents, round_index):
            if state.revise(i, improve_tol):
                pending = set(range(instance.n_agents)) - {i}
            else:
                pending.discard(i)
            if not pending:
                return _finish(state, initial_potential, round_index, converged=True)
    logger.info("Best response did not converge within %d rounds", max_rounds)
    return _finish(state, initial_potential, max_rounds, converged=False)


def _finish(
    state: _Dynamics, initial_potential: float, rounds: int, *, converged: bool
) -> tuple[Allocation, BRTrace]:
    final = Allocation.of(state.instance, state.choices)
    trace = BRTrace(initial_potential, tuple(state.steps), rounds, converged)
    logger.debug(
        "Best response: %d rounds, %d switches, converged=%s", rounds, trace.switches, converged
    )
    return final, trace


def matroid_round_bound(n: int, m: int, max_rank: int) -> int:
    """n²·m·max_rank best responses suffice when every A_i is a matroid basis family."""
    if min(n, m, max_rank) < 1:
        raise StructuralError("matroid bound needs positive n, m and rank")
    return n * n * m * max_rank


def trace_to_csv(trace: BRTrace) -> str:
    frame = pd.DataFrame(
        [(s.step, s.agent, s.action, s.potential) for s in trace.steps], columns=TRACE_COLUMNS
    )
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format="%.12g", lineterminator="\n")
    return buffer.getvalue()
