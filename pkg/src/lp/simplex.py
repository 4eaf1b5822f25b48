"""Dense two-phase tableau simplex.

Variables are shifted/split into nonnegative columns, finite upper bounds become extra
rows, rows are turned into equalities with slack/surplus columns and negated where the
right-hand side is negative. Phase 1 minimizes the sum of artificials (only rows without a
usable slack get one), phase 2 the real objective. Dantzig pricing switches to Bland's rule
after a long run of degenerate pivots. The tableau is rebuilt from the original rows every
few pivots and whenever a phase ends; a basis that drifted infeasible is repaired with dual
simplex pivots before optimality is accepted.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.config import Config, get_config
from src.errors import SolverError
from src.lp.base import LinearProgram, Relation, Sense, SolveResult, SolveStatus

logger = logging.getLogger(__name__)

_PIVOT_TOL = 1e-9
_REFACTOR_EVERY = 50
_MAX_REPAIRS = 20


@dataclass
class _StandardForm:
    matrix: np.ndarray  # equality rows over structural + slack columns
    rhs: np.ndarray  # nonnegative
    cost: np.ndarray  # minimize
    offset: float
    transform: np.ndarray  # x = transform @ y[:n_struct] + shift
    shift: np.ndarray
    row_sign: np.ndarray
    basic_slack: list[int | None]


@dataclass
class _PivotState:
    feas_tol: float
    opt_tol: float
    bland_after: int
    max_pivots: int
    pivots: int = 0
    degenerate_run: int = 0
    bland: bool = False
    refactorizations: int = 0
    refactor_every: int = _REFACTOR_EVERY


@dataclass
class _System:
    """Original rows and phase cost the tableau is refactorized from."""

    matrix: np.ndarray
    rhs: np.ndarray
    cost: np.ndarray

    def feas_tol(self, state: _PivotState) -> float:
        return state.feas_tol * max(1.0, float(np.max(np.abs(self.rhs), initial=0.0)))


def _split_columns(lp: LinearProgram) -> tuple[np.ndarray, np.ndarray, list[tuple[int, float]]]:
    n = lp.num_variables
    signs: list[tuple[int, float]] = []
    shift = np.zeros(n)
    upper_rows: list[tuple[int, float]] = []
    for j in range(n):
        lo, up = lp.lower[j], lp.upper[j]
        if math.isfinite(lo):
            shift[j] = lo
            signs.append((j, 1.0))
            if math.isfinite(up):
                upper_rows.append((len(signs) - 1, up - lo))
        elif math.isfinite(up):
            shift[j] = up
            signs.append((j, -1.0))
        else:
            signs.extend([(j, 1.0), (j, -1.0)])
    transform = np.zeros((n, len(signs)))
    for k, (j, s) in enumerate(signs):
        transform[j, k] = s
    return transform, shift, upper_rows


def _standardize(lp: LinearProgram) -> _StandardForm:
    transform, shift, upper_rows = _split_columns(lp)
    n_struct = transform.shape[1]
    structural = lp.matrix @ transform
    rhs = lp.rhs - lp.matrix @ shift
    relations = list(lp.relations)
    if upper_rows:
        extra = np.zeros((len(upper_rows), n_struct))
        for i, (k, ub) in enumerate(upper_rows):
            extra[i, k] = 1.0
        structural = np.vstack([structural, extra])
        rhs = np.concatenate([rhs, [ub for _, ub in upper_rows]])
        relations.extend([Relation.LE] * len(upper_rows))

    m = len(relations)
    slack_rows = [i for i, rel in enumerate(relations) if rel is not Relation.EQ]
    slacks = np.zeros((m, len(slack_rows)))
    slack_col: dict[int, int] = {}
    for s, i in enumerate(slack_rows):
        slacks[i, s] = 1.0 if relations[i] is Relation.LE else -1.0
        slack_col[i] = n_struct + s
    matrix = np.hstack([structural, slacks])

    row_sign = np.where(rhs < 0.0, -1.0, 1.0)
    matrix *= row_sign[:, None]
    rhs = rhs * row_sign
    basic_slack: list[int | None] = []
    for i in range(m):
        k = slack_col.get(i)
        basic_slack.append(k if k is not None and matrix[i, k] > 0.0 else None)

    cost = np.concatenate([lp.objective @ transform, np.zeros(len(slack_rows))])
    offset = float(lp.objective @ shift)
    if lp.sense is Sense.MAXIMIZE:
        cost, offset = -cost, -offset
    return _StandardForm(matrix, rhs, cost, offset, transform, shift, row_sign, basic_slack)


# ── Pivoting ───────────────────────────────────────────────────────


def _pivot(tab: np.ndarray, basis: list[int], r: int, k: int) -> None:
    tab[r] /= tab[r, k]
    factor = tab[:, k].copy()
    factor[r] = 0.0
    tab -= np.outer(factor, tab[r])
    tab[:, k] = 0.0
    tab[r, k] = 1.0
    basis[r] = k


def _refactor(tab: np.ndarray, basis: list[int], system: _System) -> None:
    """Rebuild every tableau row from the original rows and the current basis."""
    if not basis:
        tab[-1, :-1] = system.cost
        tab[-1, -1] = 0.0
        return
    try:
        solved = np.linalg.solve(
            system.matrix[:, basis], np.column_stack([system.matrix, system.rhs])
        )
    except np.linalg.LinAlgError:
        raise SolverError("basis became singular during refactorization") from None
    tab[:-1] = solved
    cost_b = system.cost[basis]
    tab[-1, :-1] = system.cost - cost_b @ solved[:, :-1]
    tab[-1, -1] = -float(cost_b @ solved[:, -1])


def _step(
    tab: np.ndarray, basis: list[int], pivot: tuple[int, int], state: _PivotState,
    system: _System,
) -> None:
    if state.pivots >= state.max_pivots:
        raise SolverError(f"simplex pivot budget of {state.max_pivots} exhausted")
    _pivot(tab, basis, *pivot)
    state.pivots += 1
    if state.pivots % state.refactor_every == 0:
        _refactor(tab, basis, system)
        state.refactorizations += 1


def _entering(tab: np.ndarray, allowed: int, state: _PivotState) -> int | None:
    reduced = tab[-1, :allowed]
    candidates = np.flatnonzero(reduced < -state.opt_tol)
    if candidates.size == 0:
        return None
    if state.bland:
        return int(candidates[0])
    return int(candidates[np.argmin(reduced[candidates])])


def _leaving(tab: np.ndarray, basis: list[int], k: int, state: _PivotState) -> int | None:
    column = tab[:-1, k]
    rows = np.flatnonzero(column > _PIVOT_TOL)
    if rows.size == 0:
        return None
    ratios = np.maximum(tab[rows, -1], 0.0) / column[rows]
    best = ratios.min()
    ties = rows[ratios <= best + 1e-12 * (1.0 + best)]
    if state.bland:
        return int(ties[np.argmin([basis[i] for i in ties])])
    return int(ties[np.argmax(column[ties])])


def _iterate(
    tab: np.ndarray, basis: list[int], allowed: int, state: _PivotState, system: _System
) -> SolveStatus:
    while True:
        k = _entering(tab, allowed, state)
        if k is None:
            return SolveStatus.OPTIMAL
        r = _leaving(tab, basis, k, state)
        if r is None:
            return SolveStatus.UNBOUNDED
        degenerate = tab[r, -1] <= state.feas_tol
        _step(tab, basis, (r, k), state, system)
        state.degenerate_run = state.degenerate_run + 1 if degenerate else 0
        if not state.bland and state.degenerate_run > state.bland_after:
            state.bland = True
            logger.info(
                "Switching to Bland's rule after %d degenerate pivots", state.degenerate_run
            )


def _dual_repair(
    tab: np.ndarray, basis: list[int], allowed: int, state: _PivotState, system: _System
) -> bool:
    """Dual simplex pivots until every basic value is >= -tol; False if no pivot exists."""
    tol = system.feas_tol(state)
    while True:
        values = tab[:-1, -1]
        r = int(np.argmin(values))
        if values[r] >= -tol:
            return True
        row = tab[r, :allowed]
        cols = np.flatnonzero(row < -_PIVOT_TOL)
        if cols.size == 0:
            return False
        ratios = np.maximum(tab[-1, cols], 0.0) / -row[cols]
        best = ratios.min()
        ties = cols[ratios <= best + 1e-12 * (1.0 + best)]
        k = int(ties[np.argmax(-row[ties])])
        _step(tab, basis, (r, k), state, system)


def _optimize(
    tab: np.ndarray, basis: list[int], allowed: int, state: _PivotState, system: _System
) -> SolveStatus:
    """Primal simplex, then refactorize and repair until the basis is verified optimal."""
    tol = system.feas_tol(state)
    for _ in range(_MAX_REPAIRS):
        status = _iterate(tab, basis, allowed, state, system)
        _refactor(tab, basis, system)
        state.refactorizations += 1
        if status is SolveStatus.UNBOUNDED:
            if _iterate(tab, basis, allowed, state, system) is SolveStatus.UNBOUNDED:
                return SolveStatus.UNBOUNDED
            _refactor(tab, basis, system)
        if float(np.min(tab[:-1, -1], initial=0.0)) < -tol:
            logger.info("Basis drifted infeasible after %d pivots; dual repair", state.pivots)
            if not _dual_repair(tab, basis, allowed, state, system):
                raise SolverError("dual simplex could not restore a feasible basis")
            continue
        if float(np.min(tab[-1, :allowed], initial=0.0)) >= -state.opt_tol:
            return SolveStatus.OPTIMAL
    raise SolverError(f"simplex did not settle after {_MAX_REPAIRS} refactorizations")


# ── Phases ─────────────────────────────────────────────────────────


def _phase_one(
    form: _StandardForm, state: _PivotState
) -> tuple[np.ndarray, list[int], list[int]] | None:
    """Feasible basis as (tableau without artificials, basis, kept rows) or None if infeasible."""
    m, ncols = form.matrix.shape
    art_rows = [i for i in range(m) if form.basic_slack[i] is None]
    artificials = np.zeros((m, len(art_rows)))
    basis = [k if k is not None else -1 for k in form.basic_slack]
    for a, i in enumerate(art_rows):
        artificials[i, a] = 1.0
        basis[i] = ncols + a
    tab = np.zeros((m + 1, ncols + len(art_rows) + 1))

    if art_rows:
        cost = np.concatenate([np.zeros(ncols), np.ones(len(art_rows))])
        system = _System(np.hstack([form.matrix, artificials]), form.rhs, cost)
        _refactor(tab, basis, system)
        _optimize(tab, basis, ncols + len(art_rows), state, system)
        if -tab[-1, -1] > system.feas_tol(state):
            return None
    else:
        tab[:m, :ncols] = form.matrix
        tab[:m, -1] = form.rhs

    kept = list(range(m))
    for r in range(m):
        if basis[r] < ncols:
            continue
        row = np.abs(tab[r, :ncols])
        k = int(np.argmax(row)) if ncols else 0
        if ncols and row[k] > _PIVOT_TOL:
            _pivot(tab, basis, r, k)
        else:
            kept.remove(r)
    rows = kept + [m]
    tab = np.hstack([tab[rows, :ncols], tab[rows, -1:]])
    return tab, [basis[r] for r in kept], kept


def _duals(
    lp: LinearProgram, form: _StandardForm, basis: list[int], kept: list[int]
) -> tuple[np.ndarray, float]:
    b_matrix = form.matrix[np.ix_(kept, basis)]
    pi_kept = np.linalg.solve(b_matrix.T, form.cost[basis])
    pi = np.zeros(form.matrix.shape[0])
    pi[kept] = pi_kept
    dual_objective = float(pi @ form.rhs) + form.offset
    sensitivities = (form.row_sign * pi)[: lp.num_constraints]
    if lp.sense is Sense.MAXIMIZE:
        sensitivities, dual_objective = -sensitivities, -dual_objective
    return sensitivities, dual_objective


def _not_optimal(status: SolveStatus, lp: LinearProgram, state: _PivotState) -> SolveResult:
    logger.debug("LP %s after %d pivots", status.value, state.pivots)
    return SolveResult(
        status, math.nan, np.full(lp.num_variables, math.nan), pivots=state.pivots,
        used_bland=state.bland, refactorizations=state.refactorizations,
    )


def solve(
    lp: LinearProgram, *, want_duals: bool = False, config: Config | None = None
) -> SolveResult:
    """Solve ``lp``; infeasible and unbounded programs are statuses, not exceptions.

    Dual values are sensitivities ∂(optimal objective)/∂(rhs_i) in the program's own sense.
    An optimum that fails the final feasibility check raises :class:`SolverError`.
    """
    config = config or get_config()
    form = _standardize(lp)
    m, ncols = form.matrix.shape
    state = _PivotState(
        feas_tol=config.feas_tol,
        opt_tol=config.opt_tol,
        bland_after=10 * (ncols + m),
        max_pivots=50 * (ncols + m) + 1000,
        refactor_every=max(_REFACTOR_EVERY, m // 4),
    )

    phase_one = _phase_one(form, state)
    if phase_one is None:
        return _not_optimal(SolveStatus.INFEASIBLE, lp, state)
    tab, basis, kept = phase_one
    system = _System(form.matrix[kept], form.rhs[kept], form.cost)
    _refactor(tab, basis, system)
    if _optimize(tab, basis, ncols, state, system) is SolveStatus.UNBOUNDED:
        return _not_optimal(SolveStatus.UNBOUNDED, lp, state)

    y = np.zeros(ncols)
    y[basis] = np.maximum(tab[:-1, -1], 0.0)
    n_struct = form.transform.shape[1]
    x = form.transform @ y[:n_struct] + form.shift
    objective = float(lp.objective @ x)
    violation = lp.max_violation(x)
    if violation > config.feas_tol * max(1.0, float(np.max(np.abs(lp.rhs), initial=0.0))):
        raise SolverError(f"LP solution violates constraints by {violation:.3g}")

    duals, dual_objective = _duals(lp, form, basis, kept) if want_duals else (None, None)
    logger.debug("LP optimal: value=%.12g pivots=%d refactorizations=%d bland=%s", objective,
                 state.pivots, state.refactorizations, state.bland)
    return SolveResult(
        SolveStatus.OPTIMAL,
        objective,
        x,
        duals=duals,
        dual_objective=dual_objective,
        pivots=state.pivots,
        used_bland=state.bland,
        refactorizations=state.refactorizations,
    )
