"""Revised simplex machinery for column generation, plus a dense LP front end.

The column-generation solvers keep a square basis of explicit columns and a
dense basis inverse that is updated in product form and refactorized every
``refactor_every`` pivots or whenever the dual residual drifts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import Cycling, Infeasible, NumericFailure, SingularBasis, Unbounded
from .tolerances import DEFAULT, Tolerances

logger = logging.getLogger(__name__)


class ColumnKind(IntEnum):
    # order doubles as the Bland ranking of column families
    THETA = 0
    ARTIFICIAL_Y = 1
    SURPLUS = 2
    MATCHING = 3


@dataclass(frozen=True)
class ColumnDescriptor:
    kind: ColumnKind
    matching: tuple[int, ...] = ()
    row: int = -1

    @classmethod
    def of_matching(cls, links) -> "ColumnDescriptor":
        return cls(ColumnKind.MATCHING, tuple(sorted(links)))

    @classmethod
    def surplus(cls, row: int) -> "ColumnDescriptor":
        return cls(ColumnKind.SURPLUS, row=row)

    @property
    def bland_key(self) -> tuple:
        return (int(self.kind), self.row, len(self.matching), self.matching)


@dataclass
class SimplexState:
    """Basis of a standard-form LP ``min f^T x  s.t.  U x = g, x >= 0``."""

    columns: list[ColumnDescriptor]
    basis: np.ndarray  # B, one column per basic variable
    cost: np.ndarray  # f_B
    rhs: np.ndarray  # g
    tol: Tolerances = DEFAULT
    binv: np.ndarray = field(init=False)
    x: np.ndarray = field(init=False)
    pivots: int = 0
    degenerate_streak: int = 0
    since_refactor: int = 0

    def __post_init__(self):
        self.basis = np.array(self.basis, dtype=float)
        self.cost = np.array(self.cost, dtype=float)
        self.rhs = np.array(self.rhs, dtype=float)
        m = len(self.columns)
        if self.basis.shape != (m, m):
            raise SingularBasis(f"basis must be square, got {self.basis.shape} for {m} columns")
        self.refactor()

    @property
    def size(self) -> int:
        return len(self.columns)

    def refactor(self) -> None:
        try:
            binv = np.linalg.inv(self.basis)
        except np.linalg.LinAlgError as exc:
            raise SingularBasis(str(exc)) from exc
        if not np.all(np.isfinite(binv)) or np.linalg.cond(self.basis) > 1e13:
            raise SingularBasis("basis is numerically singular")
        self.binv = binv
        x = binv @ self.rhs
        if x.min(initial=0.0) < -max(self.tol.primal, 1e-7):
            raise NumericFailure(f"refactorized basis is primal infeasible (min x = {x.min():.3e})")
        self.x = np.maximum(x, 0.0)
        self.since_refactor = 0

    def set_objective(self, cost: Sequence[float], rhs: Sequence[float]) -> None:
        """Swap in new basic costs and right-hand side, keeping the basis."""
        self.cost = np.array(cost, dtype=float)
        self.rhs = np.array(rhs, dtype=float)
        self.refactor()

    @property
    def objective(self) -> float:
        return float(self.cost @ self.x)

    def value_of(self, kind: ColumnKind) -> float:
        for c, v in zip(self.columns, self.x):
            if c.kind is kind:
                return float(v)
        return 0.0


def dual_variables(state: SimplexState) -> np.ndarray:
    """Dual vector p with p^T B = f_B^T."""
    p = state.cost @ state.binv
    resid = np.abs(p @ state.basis - state.cost).max(initial=0.0)
    if resid > state.tol.dual_residual:
        state.refactor()
        p = state.cost @ state.binv
        resid = np.abs(p @ state.basis - state.cost).max(initial=0.0)
        if resid > state.tol.dual_residual:
            raise SingularBasis(f"dual residual {resid:.2e} after refactorization")
    return p


def pivot(
    state: SimplexState,
    entering: ColumnDescriptor,
    column_values: np.ndarray,
    cost: float,
    bland: bool = False,
) -> int:
    """Bring ``entering`` into the basis; returns the basis position that left.

    Leaving variable by the min-ratio test. Ratio ties go to the lowest basis
    position, or to the lowest Bland key when ``bland`` is set.
    """
    u = np.asarray(column_values, dtype=float)
    d = state.binv @ u
    tol = state.tol
    eligible = np.flatnonzero(d > tol.pivot)
    if eligible.size == 0:
        raise Unbounded(f"column {entering} has no positive pivot entry")
    ratios = state.x[eligible] / d[eligible]
    best = ratios.min()
    ties = eligible[ratios <= best + 1e-12 * max(1.0, abs(best))]
    if bland and ties.size > 1:
        r = int(min(ties, key=lambda i: state.columns[i].bland_key))
    else:
        r = int(ties[0])
    step = state.x[r] / d[r]

    # product-form update of x and the inverse
    state.x = state.x - step * d
    state.x[r] = step
    state.x[np.abs(state.x) < 1e-15] = 0.0
    if state.x.min() < -tol.primal:
        raise NumericFailure(f"basic value dropped to {state.x.min():.3e}")
    state.x = np.maximum(state.x, 0.0)
    row = state.binv[r] / d[r]
    state.binv -= np.outer(d, row)
    state.binv[r] = row

    state.columns[r] = entering
    state.basis[:, r] = u
    state.cost[r] = cost
    state.pivots += 1
    state.since_refactor += 1
    state.degenerate_streak = state.degenerate_streak + 1 if step <= 1e-12 else 0
    if state.since_refactor >= tol.refactor_every:
        state.refactor()
    return r


@dataclass(frozen=True)
class DenseLPResult:
    x: np.ndarray
    objective: float
    # marginals d(objective)/d(rhs) for inequality and equality rows
    duals_ub: np.ndarray
    duals_eq: np.ndarray


def solve_dense_lp(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    sense: str = "min",
    bounds=(0, None),
) -> DenseLPResult:
    """Solve a polynomially sized LP with HiGHS.

    ``sense`` is ``"min"`` or ``"max"``; the returned objective and duals are
    expressed in that sense.
    """
    c = np.asarray(c, dtype=float)
    sign = -1.0 if sense == "max" else 1.0
    res = linprog(
        sign * c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs",
        options={"primal_feasibility_tolerance": 1e-9, "dual_feasibility_tolerance": 1e-9},
    )
    if res.status == 2:
        raise Infeasible(res.message)
    if res.status == 3:
        raise Unbounded(res.message)
    if res.status != 0:
        raise NumericFailure(res.message)
    duals_ub = np.asarray(res.ineqlin.marginals) * sign if A_ub is not None else np.zeros(0)
    duals_eq = np.asarray(res.eqlin.marginals) * sign if A_eq is not None else np.zeros(0)
    return DenseLPResult(np.asarray(res.x), float(sign * res.fun), duals_ub, duals_eq)


def check_iteration_cap(state: SimplexState, cap: int) -> None:
    if state.pivots >= cap:
        raise Cycling(f"iteration cap of {cap} pivots reached")
