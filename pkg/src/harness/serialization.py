"""JSON instance files.

    {
      "resources": [{"id": 7, "value": 0.4}, ...],
      "agents": [[[7], [3, 7]], {"ground": [3, 7, 9], "rank": 2, "exact": false}, ...],
      "basis": {"n": 3, "w": [1, 1, 1]},
      "rule": {"f": [1, 0.5, 0.333]}
    }

``w`` and ``f`` list the values on 1..n; the boundary zeros are implicit. Resource ids may
be any JSON scalar and are mapped to dense ids in file order. An agent is either a list of
actions or a uniform-matroid object. ``rule`` is optional and defaults to the Shapley rule.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from src.actions import ActionSet, ExplicitActionSet, UniformMatroidActionSet
from src.distributions import shapley
from src.errors import StructuralError
from src.models import DistributionRule, GameInstance, WelfareBasis

logger = logging.getLogger(__name__)


def _require(data: Mapping[str, Any], key: str, where: str) -> Any:
    if not isinstance(data, Mapping) or key not in data:
        raise StructuralError(f"{where}: missing field {key!r}")
    return data[key]


def _number(raw: Any, where: str) -> float:
    if isinstance(raw, bool):
        raise StructuralError(f"{where}: expected a number, got {raw!r}")
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise StructuralError(f"{where}: expected a number, got {raw!r}") from None


def _integer(raw: Any, where: str) -> int:
    integral = isinstance(raw, int) or (isinstance(raw, float) and raw.is_integer())
    if isinstance(raw, bool) or not integral:
        raise StructuralError(f"{where}: expected an integer, got {raw!r}")
    return int(raw)


def _resource_id(raw: Any, where: str) -> Any:
    if isinstance(raw, (list, dict)) or raw is None:
        raise StructuralError(f"{where}: resource id must be a string or number, got {raw!r}")
    return raw


def _numbers(raw: Any, where: str) -> list[float]:
    if not isinstance(raw, list):
        raise StructuralError(f"{where}: expected a list of numbers")
    return [_number(v, f"{where}[{j}]") for j, v in enumerate(raw)]


def _read_json(path: Path) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"{path}: invalid JSON ({exc})") from None


# ── Bases and rules ────────────────────────────────────────────────


def basis_from_dict(data: Mapping[str, Any]) -> WelfareBasis:
    values = _numbers(_require(data, "w", "basis"), "basis.w")
    if "n" in data and _integer(data["n"], "basis.n") != len(values):
        raise StructuralError(f"basis declares n={data['n']} but lists {len(values)} values")
    return WelfareBasis.from_inner(values, name=str(data.get("name", "file")))


def rule_from_dict(data: Mapping[str, Any]) -> DistributionRule:
    values = _numbers(_require(data, "f", "rule"), "rule.f")
    if "n" in data and _integer(data["n"], "rule.n") != len(values):
        raise StructuralError(f"rule declares n={data['n']} but lists {len(values)} values")
    return DistributionRule.from_inner(values, name=str(data.get("name", "file")))


def load_basis(path: Path) -> WelfareBasis:
    return basis_from_dict(_read_json(path))


def load_rule(path: Path) -> DistributionRule:
    return rule_from_dict(_read_json(path))


# ── Instances ──────────────────────────────────────────────────────


def _agent_from_json(raw: Any, ids: Mapping[Any, int], i: int) -> ActionSet:
    def dense(rid: Any) -> int:
        rid = _resource_id(rid, f"agent {i}")
        if rid not in ids:
            raise StructuralError(f"agent {i} references unknown resource {rid!r}")
        return ids[rid]

    if isinstance(raw, Mapping):
        ground = _require(raw, "ground", f"agent {i}")
        if not isinstance(ground, list):
            raise StructuralError(f"agent {i}.ground: expected a list of resource ids")
        rank = _integer(_require(raw, "rank", f"agent {i}"), f"agent {i}.rank")
        items = tuple(dense(r) for r in ground)
        return UniformMatroidActionSet(items, rank, bool(raw.get("exact", False)))
    if not isinstance(raw, list) or not raw:
        raise StructuralError(f"agent {i}: expected a nonempty list of actions")
    for k, action in enumerate(raw):
        if not isinstance(action, list):
            raise StructuralError(f"agent {i} action {k}: expected a list of resource ids")
    return ExplicitActionSet(tuple(tuple(dense(r) for r in action) for action in raw))


def instance_from_dict(data: Mapping[str, Any]) -> GameInstance:
    resources = _require(data, "resources", "instance")
    ids: dict[Any, int] = {}
    values: list[float] = []
    if not isinstance(resources, list):
        raise StructuralError("instance.resources: expected a list")
    for j, entry in enumerate(resources):
        rid = _resource_id(_require(entry, "id", f"resources[{j}]"), f"resources[{j}].id")
        if rid in ids:
            raise StructuralError(f"duplicate resource id {rid!r}")
        ids[rid] = len(values)
        values.append(_number(_require(entry, "value", f"resources[{j}]"), f"resources[{j}].value"))
    agents = _require(data, "agents", "instance")
    if not isinstance(agents, list):
        raise StructuralError("instance.agents: expected a list")
    action_sets = tuple(_agent_from_json(raw, ids, i) for i, raw in enumerate(agents))
    basis = basis_from_dict(_require(data, "basis", "instance"))
    rule = rule_from_dict(data["rule"]) if "rule" in data else shapley(basis.n)
    return GameInstance(tuple(values), action_sets, basis, rule)


def _agent_to_json(actions: ActionSet) -> Any:
    if isinstance(actions, UniformMatroidActionSet):
        return {"ground": list(actions.items), "rank": actions.rank, "exact": actions.exact}
    return [list(action) for action in actions]


def instance_to_dict(instance: GameInstance) -> dict[str, Any]:
    return {
        "resources": [{"id": r, "value": v} for r, v in enumerate(instance.values)],
        "agents": [_agent_to_json(actions) for actions in instance.action_sets],
        "basis": {"n": instance.basis.n, "w": list(instance.basis.inner)},
        "rule": {"f": list(instance.rule.inner)},
    }


def load_instance(path: Path) -> GameInstance:
    instance = instance_from_dict(_read_json(path))
    logger.debug(
        "Loaded %s: %d agents, %d resources", path, instance.n_agents, instance.n_resources
    )
    return instance


def save_instance(instance: GameInstance, path: Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=2), encoding="utf-8")


def rule_to_dict(rule: DistributionRule) -> dict[str, Any]:
    return {"n": rule.n, "name": rule.name, "f": list(rule.inner)}


def save_rule(rule: DistributionRule, path: Path) -> None:
    Path(path).write_text(json.dumps(rule_to_dict(rule), indent=2), encoding="utf-8")
