from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np


class Scheduler(ABC):
    """Order in which agents revise during one best-response round."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Short label used in traces and experiment tables."""

    @abstractmethod
    def order(self, n_agents: int, round_index: int) -> list[int]:
        """Permutation of ``range(n_agents)`` for round ``round_index`` (1-based)."""


class RoundRobinScheduler(Scheduler):
    @property
    def name(self) -> str:
        return "round-robin"

    def order(self, n_agents: int, round_index: int) -> list[int]:
        return list(range(n_agents))


class RandomOrderScheduler(Scheduler):
    """Asynchronous variant: a fresh seeded permutation each round.

    The permutation depends only on (seed, stream, round index), so runs replay exactly.
    """

    def __init__(self, seed: int, stream: int = 0) -> None:
        self._seed = int(seed)
        self._stream = int(stream)

    @property
    def name(self) -> str:
        return f"random:{self._seed}"

    def order(self, n_agents: int, round_index: int) -> list[int]:
        rng = np.random.Generator(
            np.random.Philox(
                np.random.SeedSequence([self._seed, self._stream], spawn_key=(round_index,))
            )
        )
        return [int(i) for i in rng.permutation(n_agents)]
