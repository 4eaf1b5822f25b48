from __future__ import annotations

import math
import uuid
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any

from src.actions import Action, ActionSet
from src.errors import StructuralError

_SHAPE_TOL = 1e-12


def _check_extended(n: int, values: tuple[float, ...], label: str) -> None:
    if n < 1:
        raise StructuralError(f"{label}: n must be >= 1, got {n}")
    if len(values) != n + 2:
        raise StructuralError(f"{label}: expected {n + 2} values on {{0..n+1}}, got {len(values)}")
    if any(not math.isfinite(v) or v < 0.0 for v in values):
        raise StructuralError(f"{label}: values must be finite and nonnegative")
    if values[0] != 0.0 or values[-1] != 0.0:
        raise StructuralError(f"{label}: boundary values at 0 and n+1 must be zero")


def _second_differences(values: tuple[float, ...], n: int) -> list[float]:
    return [values[j + 1] - 2.0 * values[j] + values[j - 1] for j in range(2, n)]


def _nondecreasing(values: tuple[float, ...], n: int) -> bool:
    return all(values[j + 1] >= values[j] - _SHAPE_TOL for j in range(1, n))


@dataclass(frozen=True)
class WelfareBasis:
    """w on {0,…,n+1} with boundary zeros."""

    n: int
    values: tuple[float, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        _check_extended(self.n, self.values, "welfare basis")

    @classmethod
    def from_inner(cls, inner: Sequence[float], name: str = "") -> WelfareBasis:
        """Build from w(1..n); the boundary zeros are added."""
        return cls(n=len(inner), values=(0.0, *inner, 0.0), name=name)

    def __call__(self, j: int) -> float:
        return self.values[j]

    @property
    def inner(self) -> tuple[float, ...]:
        return self.values[1:-1]

    @property
    def is_positive(self) -> bool:
        return all(v > 0.0 for v in self.inner)

    @property
    def is_nondecreasing_concave(self) -> bool:
        return _nondecreasing(self.values, self.n) and all(
            d <= _SHAPE_TOL for d in _second_differences(self.values, self.n)
        )

    @property
    def is_nondecreasing_convex(self) -> bool:
        return _nondecreasing(self.values, self.n) and all(
            d >= -_SHAPE_TOL for d in _second_differences(self.values, self.n)
        )

    @property
    def is_normalized(self) -> bool:
        return abs(self.values[1] - 1.0) <= _SHAPE_TOL


@dataclass(frozen=True)
class DistributionRule:
    """f on {0,…,n+1} with boundary zeros; class F additionally needs f(1) ≥ 1."""

    n: int
    values: tuple[float, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        _check_extended(self.n, self.values, "distribution rule")

    @classmethod
    def from_inner(cls, inner: Sequence[float], name: str = "") -> DistributionRule:
        return cls(n=len(inner), values=(0.0, *inner, 0.0), name=name)

    def __call__(self, j: int) -> float:
        return self.values[j]

    @property
    def inner(self) -> tuple[float, ...]:
        return self.values[1:-1]

    @property
    def in_class_f(self) -> bool:
        return self.values[1] >= 1.0 - _SHAPE_TOL

    def scaled(self, factor: float) -> DistributionRule:
        """Positive rescaling; equilibria (and so the PoA) are unchanged."""
        if factor <= 0.0:
            raise StructuralError(f"rescaling factor must be positive, got {factor}")
        return DistributionRule(self.n, tuple(v * factor for v in self.values), self.name)


@dataclass(frozen=True)
class GameInstance:
    """Resources are the dense ids 0..m-1, ``values[r]`` = v_r."""

    values: tuple[float, ...]
    action_sets: tuple[ActionSet, ...]
    basis: WelfareBasis
    rule: DistributionRule

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "action_sets", tuple(self.action_sets))
        if self.rule.n != self.basis.n:
            raise StructuralError(f"rule n={self.rule.n} does not match basis n={self.basis.n}")
        if not 1 <= len(self.action_sets) <= self.basis.n:
            raise StructuralError(
                f"{len(self.action_sets)} agents incompatible with basis n={self.basis.n}"
            )
        if any(not math.isfinite(v) or v < 0.0 for v in self.values):
            raise StructuralError("resource values must be finite and nonnegative")
        m = len(self.values)
        for i, actions in enumerate(self.action_sets):
            if len(actions) == 0:
                raise StructuralError(f"agent {i} has an empty action set")
            ground = actions.ground
            if ground and ground[-1] >= m:
                raise StructuralError(f"agent {i} references resource {ground[-1]} >= {m}")

    @property
    def n_agents(self) -> int:
        return len(self.action_sets)

    @property
    def n_resources(self) -> int:
        return len(self.values)

    @property
    def profile_count(self) -> int:
        return math.prod(len(actions) for actions in self.action_sets)

    def with_rule(self, rule: DistributionRule) -> GameInstance:
        return replace(self, rule=rule)

    def scaled(self, factor: float) -> GameInstance:
        return replace(self, values=tuple(v * factor for v in self.values))


@dataclass(frozen=True)
class Allocation:
    choices: tuple[int, ...]
    actions: tuple[Action, ...]
    coverage: tuple[int, ...]

    @classmethod
    def of(cls, instance: GameInstance, choices: Sequence[int]) -> Allocation:
        choices = tuple(int(c) for c in choices)
        if len(choices) != instance.n_agents:
            raise StructuralError(
                f"allocation has {len(choices)} choices for {instance.n_agents} agents"
            )
        actions = tuple(
            action_set.action(c) for action_set, c in zip(instance.action_sets, choices)
        )
        coverage = [0] * instance.n_resources
        for act in actions:
            for r in act:
                coverage[r] += 1
        return cls(choices=choices, actions=actions, coverage=tuple(coverage))

    @property
    def n_agents(self) -> int:
        return len(self.choices)


@dataclass(frozen=True)
class Deviation:
    agent: int
    action: int
    gain: float


@dataclass(frozen=True)
class NashCheck:
    is_nash: bool
    deviation: Deviation | None = None

    def __bool__(self) -> bool:
        return self.is_nash


# ── PoA certificates ───────────────────────────────────────────────


class Method(Enum):
    PRIMAL = "primal"
    DUAL = "dual"
    REDUCED_DUAL = "reduced-dual"
    AUTO = "auto"
    CLOSED_FORM = "closed-form"


@dataclass(frozen=True)
class WorstCase:
    instance: GameInstance
    equilibrium: Allocation
    optimum: Allocation


@dataclass(frozen=True)
class PoAReport:
    n: int
    rule: DistributionRule
    basis: WelfareBasis
    w_star: float
    method: Method
    lambda_star: float | None = None
    mu_star: float | None = None
    witness: WorstCase | None = None

    @property
    def poa(self) -> float:
        return 1.0 / self.w_star


# ── Dynamics ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class BRStep:
    step: int
    agent: int
    action: int
    potential: float
    changed: bool


@dataclass(frozen=True)
class BRTrace:
    initial_potential: float
    steps: tuple[BRStep, ...]
    rounds: int
    converged: bool

    @property
    def switches(self) -> int:
        """Number of best-response moves that changed the allocation."""
        return sum(1 for s in self.steps if s.changed)

    @property
    def potential_path(self) -> list[float]:
        return [self.initial_potential] + [s.potential for s in self.steps if s.changed]


# ── Experiment archive ─────────────────────────────────────────────


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _new_run_id() -> str:
    return uuid.uuid4().hex[:8]


@dataclass
class ExperimentRun:
    scenario: str
    config: dict[str, Any]
    seed: int
    samples: int
    summary: list[dict[str, Any]] = field(default_factory=list)
    run_id: str = field(default_factory=_new_run_id)
    started: datetime = field(default_factory=_utcnow)
