"""Benchmark instance generators and rule/basis spec strings.

Every sample draws from its own counter-based stream keyed by (seed, sample, stream), so
samples can be evaluated in any order or in parallel and still replay bit for bit.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any

import numpy as np

from src.actions import ExplicitActionSet, UniformMatroidActionSet
from src.bases import covering, power, vehicle_target
from src.design import optimal_rule, optimal_rule_covering
from src.distributions import gairing, marginal_contribution, shapley
from src.errors import StructuralError
from src.harness.serialization import load_basis, load_instance, load_rule
from src.models import DistributionRule, GameInstance, WelfareBasis

logger = logging.getLogger(__name__)

GENERATOR_STREAM = 0
INIT_STREAM = 1

RULE_NAMES = ("sv", "mc", "gairing", "optimal")


def sample_rng(seed: int, sample: int, stream: int = GENERATOR_STREAM) -> np.random.Generator:
    if seed < 0 or sample < 0:
        raise StructuralError("seed and sample index must be nonnegative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, sample, stream])))


# ── Spec strings ───────────────────────────────────────────────────


def _spec_argument(spec: str, prefix: str) -> str:
    argument = spec[len(prefix):]
    if not argument:
        raise StructuralError(f"spec {spec!r} is missing its argument")
    return argument


def _spec_float(spec: str, prefix: str) -> float:
    argument = _spec_argument(spec, prefix)
    try:
        return float(argument)
    except ValueError:
        raise StructuralError(f"spec {spec!r}: {argument!r} is not a number") from None


def resolve_basis(spec: str, n: int) -> WelfareBasis:
    """covering | power:D | vehicle:P | file:PATH."""
    if spec == "covering":
        return covering(n)
    if spec.startswith("power:"):
        return power(n, _spec_float(spec, "power:"))
    if spec.startswith("vehicle:"):
        return vehicle_target(n, _spec_float(spec, "vehicle:"))
    if spec.startswith("file:"):
        basis = load_basis(Path(_spec_argument(spec, "file:")))
        if basis.n != n:
            raise StructuralError(f"basis file has n={basis.n}, expected {n}")
        return basis
    raise StructuralError(f"unknown basis spec {spec!r}")


def _is_covering(w: WelfareBasis) -> bool:
    return all(v == 1.0 for v in w.inner)


@lru_cache(maxsize=64)
def _optimal_for(w: WelfareBasis) -> DistributionRule:
    n = w.n
    if _is_covering(w) and n >= 2:
        return optimal_rule_covering(n)[0]
    return optimal_rule(w, n)[0]


def resolve_rule(spec: str, w: WelfareBasis) -> DistributionRule:
    """sv | mc | gairing | optimal | file:PATH, built for the basis ``w``.

    ``optimal`` uses the covering design when w ≡ 1 and the general design otherwise.
    Designed rules are memoized per basis; rule files are reread on every call.
    """
    n = w.n
    if spec == "sv":
        return shapley(n)
    if spec == "mc":
        return marginal_contribution(w)
    if spec == "gairing":
        return gairing(n)
    if spec == "optimal":
        return _optimal_for(w)
    if spec.startswith("file:"):
        rule = load_rule(Path(_spec_argument(spec, "file:")))
        if rule.n != n:
            raise StructuralError(f"rule file has n={rule.n}, expected {n}")
        return rule
    raise StructuralError(f"unknown rule spec {spec!r}")


# ── Generators ─────────────────────────────────────────────────────


def gen_vehicle_target(
    n_agents: int, n_targets: int, p: float, seed: int, sample: int = 0
) -> GameInstance:
    """Targets valued U[0, 1]; each agent may pick one of two distinct random targets."""
    if n_agents < 1 or n_targets < 1:
        raise StructuralError("vehicle-target needs at least one agent and one target")
    basis = vehicle_target(n_agents, p)
    rng = sample_rng(seed, sample)
    values = rng.uniform(0.0, 1.0, size=n_targets)
    per_agent = min(2, n_targets)
    action_sets = tuple(
        ExplicitActionSet(
            tuple((int(t),) for t in sorted(rng.choice(n_targets, per_agent, replace=False)))
        )
        for _ in range(n_agents)
    )
    return GameInstance(tuple(values), action_sets, basis, shapley(n_agents))


@dataclass(frozen=True)
class CachingParams:
    grid_x: int = 200
    grid_y: int = 200
    n_nodes: int = 20
    n_items: int = 200
    alpha: float = 0.8
    radius: float = 50.0
    capacity: int = 1
    exact: bool = False

    def __post_init__(self) -> None:
        if min(self.grid_x, self.grid_y, self.n_nodes, self.n_items, self.capacity) < 1:
            raise StructuralError("caching dimensions and capacity must be positive")
        if self.alpha <= 0.0 or self.radius < 0.0:
            raise StructuralError("caching needs alpha > 0 and radius >= 0")

    @classmethod
    def paper_scale(cls, alpha: float = 0.8) -> CachingParams:
        return cls(800, 800, 100, 1000, alpha, 200.0, 1)

    @property
    def query_rates(self) -> np.ndarray:
        """Zipf rates q_r = 1 / r^alpha for r = 1..n_items."""
        return 1.0 / np.arange(1, self.n_items + 1, dtype=float) ** self.alpha


def gen_caching(params: CachingParams, seed: int, sample: int = 0) -> GameInstance:
    """Nodes and items uniform on the grid; a node may cache items within ``radius``.

    Nodes that reach no item are dropped. The basis keeps n = n_nodes so the rule is the
    same for every sample.
    """
    rng = sample_rng(seed, sample)
    size = np.array([params.grid_x, params.grid_y])
    nodes = rng.integers(0, size, size=(params.n_nodes, 2))
    items = rng.integers(0, size, size=(params.n_items, 2))
    distance = np.hypot(*(nodes[:, None, :] - items[None, :, :]).transpose(2, 0, 1))
    reachable = distance <= params.radius
    action_sets = []
    for i in range(params.n_nodes):
        ground = tuple(int(r) for r in np.flatnonzero(reachable[i]))
        if not ground:
            logger.warning("Caching node %d reaches no item and is dropped", i)
            continue
        action_sets.append(UniformMatroidActionSet(ground, params.capacity, params.exact))
    if not action_sets:
        raise StructuralError("no caching node reaches any item")
    n = params.n_nodes
    return GameInstance(tuple(params.query_rates), tuple(action_sets), covering(n), shapley(n))


def gen_random_singleton(
    n_agents: int, n_resources: int, basis: WelfareBasis, seed: int, sample: int = 0
) -> GameInstance:
    """Values U[0, 1]; each agent gets 1..m distinct singleton actions."""
    if n_resources < 1:
        raise StructuralError("random-singleton needs at least one resource")
    rng = sample_rng(seed, sample)
    values = rng.uniform(0.0, 1.0, size=n_resources)
    action_sets = []
    for _ in range(n_agents):
        k = int(rng.integers(1, n_resources + 1))
        chosen = sorted(int(r) for r in rng.choice(n_resources, k, replace=False))
        action_sets.append(ExplicitActionSet(tuple((r,) for r in chosen)))
    return GameInstance(tuple(values), tuple(action_sets), basis, shapley(basis.n))


def random_choices(instance: GameInstance, rng: np.random.Generator) -> list[int]:
    """Uniform initial action per agent (the canonical first action if the set is huge)."""
    choices = []
    for actions in instance.action_sets:
        size = len(actions)
        choices.append(int(rng.integers(size)) if size < 2**62 else 0)
    return choices


# ── Scenarios ──────────────────────────────────────────────────────


class Scenario(ABC):
    """Family of sampled instances sharing one welfare basis."""

    name: str

    @property
    @abstractmethod
    def basis(self) -> WelfareBasis:
        """Basis every generated instance uses."""

    @abstractmethod
    def generate(self, seed: int, sample: int) -> GameInstance:
        """Instance number ``sample``; fully determined by (seed, sample)."""

    def surrogate(self) -> float | None:
        """Upper bound on the optimal welfare used when the oracle cannot run."""
        return None

    def describe(self) -> dict[str, Any]:
        fields = asdict(self)  # type: ignore[call-overload]
        params = {k: v for k, v in fields.items() if k != "name"}
        return {"scenario": self.name, **params}


@dataclass(frozen=True)
class VehicleTargetScenario(Scenario):
    n_agents: int = 10
    n_targets: int = 11
    p: float = 0.8
    name: str = field(default="vehicle-target", init=False)

    @property
    def basis(self) -> WelfareBasis:
        return vehicle_target(self.n_agents, self.p)

    def generate(self, seed: int, sample: int) -> GameInstance:
        return gen_vehicle_target(self.n_agents, self.n_targets, self.p, seed, sample)


@dataclass(frozen=True)
class CachingScenario(Scenario):
    params: CachingParams = field(default_factory=CachingParams)
    name: str = field(default="caching", init=False)

    @property
    def basis(self) -> WelfareBasis:
        return covering(self.params.n_nodes)

    def generate(self, seed: int, sample: int) -> GameInstance:
        return gen_caching(self.params, seed, sample)

    def surrogate(self) -> float | None:
        """W_tot = Σ q_r."""
        return float(self.params.query_rates.sum())


@dataclass(frozen=True)
class RandomSingletonScenario(Scenario):
    n_agents: int = 3
    n_resources: int = 4
    basis_spec: str = "covering"
    name: str = field(default="random-singleton", init=False)

    @property
    def basis(self) -> WelfareBasis:
        return resolve_basis(self.basis_spec, self.n_agents)

    def generate(self, seed: int, sample: int) -> GameInstance:
        return gen_random_singleton(self.n_agents, self.n_resources, self.basis, seed, sample)


@dataclass(frozen=True)
class FileScenario(Scenario):
    """One instance replayed every sample; only the initial allocation varies."""

    path: str = ""
    name: str = field(default="file", init=False)

    @property
    def basis(self) -> WelfareBasis:
        return load_instance(Path(self.path)).basis

    def generate(self, seed: int, sample: int) -> GameInstance:
        return load_instance(Path(self.path))


SCENARIOS = ("vehicle-target", "caching", "random-singleton", "file")
