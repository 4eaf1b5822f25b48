from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from src.errors import StructuralError


class Sense(Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"


class Relation(Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """Dense LP: optimize c·x subject to rows A x (≤ | = | ≥) b and lower ≤ x ≤ upper."""

    objective: np.ndarray
    matrix: np.ndarray
    relations: tuple[Relation, ...]
    rhs: np.ndarray
    sense: Sense = Sense.MINIMIZE
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    variable_names: tuple[str, ...] = ()
    row_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        c = np.asarray(self.objective, dtype=float).reshape(-1)
        nvars = c.size
        try:
            a = np.asarray(self.matrix, dtype=float)
        except ValueError as exc:
            raise StructuralError(f"ragged constraint rows: {exc}") from None
        if a.size == 0:
            a = a.reshape(0, nvars)
        b = np.asarray(self.rhs, dtype=float).reshape(-1)
        if a.ndim != 2 or a.shape[1] != nvars:
            raise StructuralError(
                f"constraint matrix shape {a.shape} does not fit {nvars} variables"
            )
        if a.shape[0] != b.size or len(self.relations) != b.size:
            raise StructuralError("rows, relations and right-hand sides differ in count")
        lower = np.zeros(nvars) if self.lower is None else np.asarray(self.lower, dtype=float)
        upper = (
            np.full(nvars, math.inf) if self.upper is None else np.asarray(self.upper, dtype=float)
        )
        if lower.shape != (nvars,) or upper.shape != (nvars,):
            raise StructuralError("bounds must have one entry per variable")
        if np.any(lower > upper):
            raise StructuralError("a lower bound exceeds its upper bound")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise StructuralError("LP data must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "rhs", b)
        object.__setattr__(self, "relations", tuple(Relation(r) for r in self.relations))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def num_variables(self) -> int:
        return self.objective.size

    @property
    def num_constraints(self) -> int:
        return self.rhs.size

    def max_violation(self, x: np.ndarray) -> float:
        """Largest constraint or bound violation of ``x``."""
        lhs = self.matrix @ x
        worst = 0.0
        for value, rel, b in zip(lhs, self.relations, self.rhs):
            if rel is Relation.LE:
                worst = max(worst, value - b)
            elif rel is Relation.GE:
                worst = max(worst, b - value)
            else:
                worst = max(worst, abs(value - b))
        if x.size:
            worst = max(worst, float(np.max(self.lower - x)), float(np.max(x - self.upper)))
        return worst


@dataclass
class LPBuilder:
    """Incremental construction of a :class:`LinearProgram` with named variables."""

    sense: Sense = Sense.MINIMIZE
    _names: list[str] = field(default_factory=list)
    _index: dict[str, int] = field(default_factory=dict)
    _objective: list[float] = field(default_factory=list)
    _lower: list[float] = field(default_factory=list)
    _upper: list[float] = field(default_factory=list)
    _rows: list[dict[int, float]] = field(default_factory=list)
    _relations: list[Relation] = field(default_factory=list)
    _rhs: list[float] = field(default_factory=list)
    _row_names: list[str] = field(default_factory=list)

    def add_variable(
        self, name: str, cost: float = 0.0, lower: float = 0.0, upper: float = math.inf
    ) -> int:
        if name in self._index:
            raise StructuralError(f"duplicate variable {name!r}")
        self._index[name] = len(self._names)
        self._names.append(name)
        self._objective.append(float(cost))
        self._lower.append(float(lower))
        self._upper.append(float(upper))
        return self._index[name]

    def add_constraint(
        self, coefficients: Mapping[str, float], relation: Relation, rhs: float, name: str = ""
    ) -> None:
        row: dict[int, float] = {}
        for var, coef in coefficients.items():
            if var not in self._index:
                raise StructuralError(f"unknown variable {var!r} in constraint {name!r}")
            if coef != 0.0:
                k = self._index[var]
                row[k] = row.get(k, 0.0) + float(coef)
        self._rows.append(row)
        self._relations.append(relation)
        self._rhs.append(float(rhs))
        self._row_names.append(name)

    def build(self) -> LinearProgram:
        matrix = np.zeros((len(self._rows), len(self._names)))
        for i, row in enumerate(self._rows):
            for k, coef in row.items():
                matrix[i, k] = coef
        return LinearProgram(
            objective=np.array(self._objective),
            matrix=matrix,
            relations=tuple(self._relations),
            rhs=np.array(self._rhs),
            sense=self.sense,
            lower=np.array(self._lower),
            upper=np.array(self._upper),
            variable_names=tuple(self._names),
            row_names=tuple(self._row_names),
        )


@dataclass(frozen=True, eq=False)
class SolveResult:
    status: SolveStatus
    objective: float
    x: np.ndarray
    duals: np.ndarray | None = None
    dual_objective: float | None = None
    pivots: int = 0
    used_bland: bool = False
    refactorizations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL

    def value(self, lp: LinearProgram, name: str) -> float:
        return float(self.x[lp.variable_names.index(name)])

