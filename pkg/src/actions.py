"""Action-set families.

An agent's action set is either listed explicitly or described implicitly as a uniform
matroid (every subset of a ground set with at most / exactly ``rank`` elements). Both expose
the same canonical indexing so allocations can store plain integers.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from math import comb

from src.errors import StructuralError

Action = tuple[int, ...]


def _canonical(action: Sequence[int]) -> Action:
    return tuple(sorted({int(r) for r in action}))


class ActionSet(ABC):
    """Ordered family of actions (sorted resource-id tuples)."""

    @abstractmethod
    def __len__(self) -> int:
        ...

    @abstractmethod
    def action(self, index: int) -> Action:
        """Action stored at ``index`` in canonical order."""

    @abstractmethod
    def index(self, action: Sequence[int]) -> int:
        """Smallest index holding ``action``; StructuralError if absent."""

    @property
    @abstractmethod
    def ground(self) -> Action:
        """Every resource appearing in some action, sorted."""

    @abstractmethod
    def best_response(self, gains: Mapping[int, float]) -> int:
        """Smallest index maximizing Σ_{r ∈ action} gains[r].

        ``gains`` must hold a nonnegative entry for every resource of :attr:`ground`.
        """

    def __iter__(self) -> Iterator[Action]:
        for k in range(len(self)):
            yield self.action(k)

    @property
    def has_nonempty_action(self) -> bool:
        return len(self.ground) > 0

    def _check_index(self, index: int) -> None:
        if not 0 <= index < len(self):
            raise StructuralError(f"action index {index} out of range [0, {len(self)})")


@dataclass(frozen=True)
class ExplicitActionSet(ActionSet):
    actions: tuple[Action, ...]

    def __post_init__(self) -> None:
        if not self.actions:
            raise StructuralError("action set must not be empty")
        object.__setattr__(self, "actions", tuple(_canonical(a) for a in self.actions))
        for act in self.actions:
            if act and act[0] < 0:
                raise StructuralError(f"negative resource id in action {act}")

    def __len__(self) -> int:
        return len(self.actions)

    def action(self, index: int) -> Action:
        self._check_index(index)
        return self.actions[index]

    def index(self, action: Sequence[int]) -> int:
        try:
            return self.actions.index(_canonical(action))
        except ValueError:
            raise StructuralError(f"action {tuple(action)} not in action set") from None

    @property
    def ground(self) -> Action:
        return tuple(sorted({r for act in self.actions for r in act}))

    def best_response(self, gains: Mapping[int, float]) -> int:
        best_index = 0
        best_value = sum(gains[r] for r in self.actions[0])
        for k in range(1, len(self.actions)):
            value = sum(gains[r] for r in self.actions[k])
            if value > best_value:
                best_index, best_value = k, value
        return best_index


# ── Uniform matroid ─────────────────────────────────────────────────


def _unrank(m: int, size: int, rank: int) -> tuple[int, ...]:
    """Lexicographic unranking of a ``size``-combination of range(m)."""
    combo: list[int] = []
    x = 0
    for remaining in range(size, 0, -1):
        while True:
            block = comb(m - x - 1, remaining - 1)
            if rank < block:
                break
            rank -= block
            x += 1
        combo.append(x)
        x += 1
    return tuple(combo)


def _rank(m: int, combo: Sequence[int]) -> int:
    size = len(combo)
    rank = 0
    prev = -1
    for pos, c in enumerate(combo):
        for x in range(prev + 1, c):
            rank += comb(m - x - 1, size - pos - 1)
        prev = c
    return rank


@dataclass(frozen=True)
class UniformMatroidActionSet(ActionSet):
    """Subsets of ``items`` with at most ``rank`` elements (exactly ``rank`` if ``exact``).

    Canonical order: size ascending, then lexicographic by position in ``items``.
    """

    items: tuple[int, ...]
    rank: int
    exact: bool = False

    def __post_init__(self) -> None:
        items = tuple(sorted({int(r) for r in self.items}))
        object.__setattr__(self, "items", items)
        if self.rank < 1:
            raise StructuralError(f"matroid rank must be >= 1, got {self.rank}")
        if items and items[0] < 0:
            raise StructuralError("negative resource id in ground set")

    @property
    def _sizes(self) -> range:
        top = min(self.rank, len(self.items))
        return range(top, top + 1) if self.exact else range(0, top + 1)

    def __len__(self) -> int:
        m = len(self.items)
        return sum(comb(m, s) for s in self._sizes)

    def action(self, index: int) -> Action:
        self._check_index(index)
        m = len(self.items)
        for size in self._sizes:
            block = comb(m, size)
            if index < block:
                return tuple(self.items[p] for p in _unrank(m, size, index))
            index -= block
        raise StructuralError("unreachable action index")  # pragma: no cover

    def index(self, action: Sequence[int]) -> int:
        act = _canonical(action)
        if len(act) not in self._sizes:
            raise StructuralError(f"action {act} has invalid size for rank {self.rank}")
        position = {r: p for p, r in enumerate(self.items)}
        try:
            combo = [position[r] for r in act]
        except KeyError:
            raise StructuralError(f"action {act} leaves the ground set") from None
        m = len(self.items)
        offset = sum(comb(m, s) for s in self._sizes if s < len(act))
        return offset + _rank(m, combo)

    @property
    def ground(self) -> Action:
        return self.items

    def best_response(self, gains: Mapping[int, float]) -> int:
        top = min(self.rank, len(self.items))
        order = sorted(range(len(self.items)), key=lambda p: (-gains[self.items[p]], p))
        if self.exact:
            chosen = order[:top]
        else:
            chosen = [p for p in order[:top] if gains[self.items[p]] > 0.0]
        return self.index(tuple(self.items[p] for p in chosen))
