"""Schedule-oriented optimal MTFS solver.

The LP has one column per matching of the expanded graph, so columns are
generated on demand: the duals of the current basis turn into link weights
and a maximum-weight matching yields the most attractive column.

Rows are the destination nodes (``>= theta``), the relay nodes in access
networks (``= 0``) and the unit frame length. With destination rows first
the standard form reads

    A t - theta*1 - s = 0,   1^T t = 1,   min -theta                (max-min)
    A t - y*1     - s = theta*1, 1^T t = 1, min -c^T t              (throughput)

where ``c`` is the eNB egress of each matching.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import Disconnected, UnreachableUe
from .expansion import expand_nodes, first_copy_link
from .lp import (
    ColumnDescriptor,
    ColumnKind,
    SimplexState,
    check_iteration_cap,
    dual_variables,
    pivot,
)
from .matching import WeightedGraph, max_weight_matching
from .model import (
    Network,
    Schedule,
    Slot,
    ThroughputVector,
    reachable_from_enb,
    throughput_of_schedule,
)
from .tolerances import DEFAULT, Tolerances

logger = logging.getLogger(__name__)

MAXMIN, THROUGHPUT = 1, 2


def column_of_matching(net: Network, m: Iterable[int], rows: Iterable[int]) -> np.ndarray:
    """Node-matching column: capacity entering minus capacity leaving each row node.

    ``rows`` are original node ids; on an expanded network all copies of a
    super node contribute to its row.
    """
    rows = list(rows)
    index = {v: i for i, v in enumerate(rows)}
    col = np.zeros(len(rows))
    for k in m:
        e = net.links[k]
        i = index.get(net.super_of(e.dst))
        if i is not None:
            col[i] += e.capacity
        i = index.get(net.super_of(e.src))
        if i is not None:
            col[i] -= e.capacity
    return col


@dataclass
class Problem:
    """Row layout and pricing data for one network."""

    net: Network  # unexpanded
    exp: Network  # node-expanded
    rows: list[int]  # original node ids, destinations first
    n_dest: int
    src_row: np.ndarray  # per expanded link, row index or -1
    dst_row: np.ndarray
    from_enb: np.ndarray  # per expanded link
    usable: np.ndarray  # link touches only rows or the eNB
    graph_edges: tuple[tuple[int, int], ...]

    @classmethod
    def build(cls, net: Network) -> "Problem":
        net = net.original
        reach = reachable_from_enb(net)
        if net.access_mode:
            missing = [v for v in net.ues if v not in reach]
            if missing:
                raise UnreachableUe(f"UEs {missing} are unreachable from the eNB")
            relays = [v for v in net.mmbs if v in reach]
            rows = list(net.ues) + relays
        else:
            missing = [v for v in net.mmbs if v not in reach]
            if missing:
                raise Disconnected(f"mmBSs {missing} are unreachable from the eNB")
            rows = list(net.mmbs)
        exp = expand_nodes(net)
        row_of = {v: i for i, v in enumerate(rows)}
        src_row = np.array([row_of.get(exp.super_of(e.src), -1) for e in exp.links], dtype=int)
        dst_row = np.array([row_of.get(exp.super_of(e.dst), -1) for e in exp.links], dtype=int)
        from_enb = np.array([exp.super_of(e.src) == 0 for e in exp.links])
        usable = (dst_row >= 0) & ((src_row >= 0) | from_enb)
        edges = tuple((e.src, e.dst) for e in exp.links)
        return cls(net, exp, rows, len(net.destinations), src_row, dst_row, from_enb, usable, edges)

    @property
    def m(self) -> int:
        return len(self.rows) + 1

    def matching_column(self, links: Iterable[int]) -> np.ndarray:
        u = np.zeros(self.m)
        caps = self.exp.capacities
        for k in links:
            if self.dst_row[k] >= 0:
                u[self.dst_row[k]] += caps[k]
            if self.src_row[k] >= 0:
                u[self.src_row[k]] -= caps[k]
        u[-1] = 1.0
        return u

    def egress(self, links: Iterable[int]) -> float:
        caps = self.exp.capacities
        return float(sum(caps[k] for k in links if self.from_enb[k]))

    def theta_column(self) -> np.ndarray:
        u = np.zeros(self.m)
        u[: self.n_dest] = -1.0
        return u

    def surplus_column(self, row: int) -> np.ndarray:
        u = np.zeros(self.m)
        u[row] = -1.0
        return u

    def column(self, d: ColumnDescriptor) -> np.ndarray:
        if d.kind is ColumnKind.MATCHING:
            return self.matching_column(d.matching)
        if d.kind is ColumnKind.SURPLUS:
            return self.surplus_column(d.row)
        return self.theta_column()

    def cost(self, d: ColumnDescriptor, phase: int) -> float:
        if phase == MAXMIN:
            return -1.0 if d.kind is ColumnKind.THETA else 0.0
        return -self.egress(d.matching) if d.kind is ColumnKind.MATCHING else 0.0

    def pricing_weights(self, p: np.ndarray, phase: int) -> np.ndarray:
        pr = np.append(p[:-1], 0.0)  # index -1 (eNB / no row) reads 0
        w = self.exp.capacities * (pr[self.dst_row] - pr[self.src_row])
        if phase == THROUGHPUT:
            w = w + self.exp.capacities * self.from_enb
        return np.where(self.usable, w, 0.0)

    def price(self, p: np.ndarray, phase: int) -> tuple[ColumnDescriptor, float]:
        """Most negative reduced cost over all matching columns."""
        w = self.pricing_weights(p, phase)
        g = WeightedGraph(self.exp.n_nodes, self.graph_edges, tuple(w.tolist()))
        links, _ = max_weight_matching(g)
        d = ColumnDescriptor.of_matching(links)
        return d, self.cost(d, phase) - float(p @ self.matching_column(d.matching))


def initial_schedule(net: Network, tol: Tolerances = DEFAULT) -> SimplexState:
    """Basis of the single-link BFS-tree schedule with equal destination throughput.

    Each tree link e is on for theta0 * n_e / c_e, where n_e counts the
    destinations below e, and theta0 makes the frame exactly one unit long.
    """
    return _initial_state(Problem.build(net), tol)


def bfs_tree(prob: Problem) -> dict[int, int]:
    """Parent link (expanded index) of every row node, BFS from eNB copy 0."""
    net = prob.net
    first = first_copy_link(prob.exp)
    in_rows = set(prob.rows)
    parent: dict[int, int] = {}
    queue = deque([0])
    seen = {0}
    while queue:
        v = queue.popleft()
        for k in sorted(net.out_links[v], key=lambda k: net.links[k].dst):
            w = net.links[k].dst
            if w in seen or w not in in_rows:
                continue
            seen.add(w)
            parent[w] = first[k]
            queue.append(w)
    return parent


def _initial_state(prob: Problem, tol: Tolerances) -> SimplexState:
    parent = bfs_tree(prob)
    exp = prob.exp
    # destinations in each subtree
    below = {v: 0 for v in prob.rows}
    dests = set(prob.rows[: prob.n_dest])
    for v in prob.rows:
        if v not in dests:
            continue
        u = v
        while u != 0:
            below[u] += 1
            u = exp.super_of(exp.links[parent[u]].src)
    weight = sum(below[v] / exp.links[parent[v]].capacity for v in prob.rows)
    theta0 = 1.0 / weight
    columns = [ColumnDescriptor.of_matching([parent[v]]) for v in prob.rows]
    columns.append(ColumnDescriptor(ColumnKind.THETA))
    basis = np.column_stack([prob.column(d) for d in columns])
    cost = [prob.cost(d, MAXMIN) for d in columns]
    rhs = np.zeros(prob.m)
    rhs[-1] = 1.0
    state = SimplexState(columns, basis, cost, rhs, tol)
    expected = [theta0 * below[v] / exp.links[parent[v]].capacity for v in prob.rows] + [theta0]
    if not np.allclose(state.x, expected, rtol=1e-9, atol=1e-12):
        logger.warning("initial basis values differ from the closed form")
    return state


@dataclass
class PhaseLog:
    pivots: int = 0
    degenerate: int = 0
    bland_pivots: int = 0
    final_eta: float = float("nan")
    seconds: float = 0.0


@dataclass
class MaxMinResult:
    theta: float
    state: SimplexState
    problem: Problem
    log: PhaseLog


@dataclass
class MtfsResult:
    theta: float
    network_throughput: float
    schedule: Schedule  # indices refer to ``expanded`` links
    expanded: Network
    throughput: ThroughputVector
    state: SimplexState
    logs: dict[str, PhaseLog] = field(default_factory=dict)

    @property
    def wall_time(self) -> float:
        return sum(l.seconds for l in self.logs.values())


def _column_generation(prob: Problem, state: SimplexState, phase: int, max_pivots: Optional[int]) -> PhaseLog:
    tol = state.tol
    log = PhaseLog()
    start = time.perf_counter()
    cap = state.pivots + (max_pivots if max_pivots is not None else 200 * prob.m + 2000)
    bland_after = 3 * prob.m
    theta_kind = ColumnKind.THETA if phase == MAXMIN else ColumnKind.ARTIFICIAL_Y
    theta_col = prob.theta_column()
    theta_cost = -1.0 if phase == MAXMIN else 0.0
    while True:
        p = dual_variables(state)
        mcol, eta1 = prob.price(p, phase)
        eta2 = theta_cost - float(p @ theta_col)
        k3 = int(np.argmin(p[: prob.n_dest])) if prob.n_dest else -1
        eta3 = float(p[k3]) if k3 >= 0 else np.inf
        candidates = [
            (eta2, ColumnDescriptor(theta_kind)),
            (eta3, ColumnDescriptor.surplus(k3)),
            (eta1, mcol),
        ]
        eta = min(c[0] for c in candidates)
        log.final_eta = eta
        if eta >= -tol.reduced_cost:
            break
        check_iteration_cap(state, cap)
        bland = state.degenerate_streak >= bland_after
        if bland:
            # first improving family in Bland order: theta/y, surplus, matchings
            if eta3 < -tol.reduced_cost:
                k3 = int(np.flatnonzero(p[: prob.n_dest] < -tol.reduced_cost)[0])
                candidates[1] = (float(p[k3]), ColumnDescriptor.surplus(k3))
            entering = next(c for c in candidates if c[0] < -tol.reduced_cost)[1]
            log.bland_pivots += 1
        else:
            entering = next(c for c in candidates if c[0] == eta)[1]
        pivot(state, entering, prob.column(entering), prob.cost(entering, phase), bland=bland)
        log.pivots += 1
        if state.degenerate_streak:
            log.degenerate += 1
    log.seconds = time.perf_counter() - start
    return log


def solve_maxmin(
    net: Network, tol: Tolerances = DEFAULT, max_pivots: Optional[int] = None
) -> MaxMinResult:
    """Max-min destination throughput by column generation over matchings."""
    prob = Problem.build(net)
    state = _initial_state(prob, tol)
    log = _column_generation(prob, state, MAXMIN, max_pivots)
    theta = state.value_of(ColumnKind.THETA)
    logger.info("max-min theta=%.6g after %d pivots", theta, log.pivots)
    return MaxMinResult(theta, state, prob, log)


def extract_schedule(state: SimplexState, tol: Tolerances = DEFAULT) -> Schedule:
    """Slots of the basic matching columns, padded with an idle slot."""
    slots = []
    for d, x in zip(state.columns, state.x):
        if d.kind is ColumnKind.MATCHING and d.matching and x > tol.min_slot:
            slots.append(Slot(d.matching, float(x)))
    idle = 1.0 - sum(s.duration for s in slots)
    if idle > 1e-12:
        slots.append(Slot((), idle))
    return Schedule(tuple(slots))


def solve_mtfs(
    net: Network, maxmin: Optional[MaxMinResult] = None, tol: Tolerances = DEFAULT,
    max_pivots: Optional[int] = None,
) -> MtfsResult:
    """Maximum network throughput subject to the max-min throughput.

    Continues from the final max-min basis, with the theta column reused as
    the artificial variable y (which any feasible point must hold at 0).
    """
    if maxmin is None:
        maxmin = solve_maxmin(net, tol, max_pivots)
    prob, state, theta = maxmin.problem, maxmin.state, maxmin.theta
    state.columns = [
        ColumnDescriptor(ColumnKind.ARTIFICIAL_Y) if d.kind is ColumnKind.THETA else d
        for d in state.columns
    ]
    rhs = np.zeros(prob.m)
    rhs[: prob.n_dest] = theta
    rhs[-1] = 1.0
    state.set_objective([prob.cost(d, THROUGHPUT) for d in state.columns], rhs)
    log = _column_generation(prob, state, THROUGHPUT, max_pivots)
    sched = extract_schedule(state, tol)
    tput = throughput_of_schedule(prob.exp, sched)
    logger.info("network throughput=%.6g after %d pivots", tput.total, log.pivots)
    return MtfsResult(
        theta, tput.total, sched, prob.exp, tput, state, {"maxmin": maxmin.log, "mtfs": log}
    )


def solve(net: Network, tol: Tolerances = DEFAULT, max_pivots: Optional[int] = None) -> MtfsResult:
    """Both steps: max-min throughput, then maximum network throughput."""
    return solve_mtfs(net, solve_maxmin(net, tol, max_pivots), tol, max_pivots)


def solve_access(net: Network, tol: Tolerances = DEFAULT) -> MtfsResult:
    """MTFS for a backhaul-and-access network: UEs are the destinations and
    every mmBS forwards exactly what it receives."""
    if not net.access_mode:
        raise ValueError("network has no UEs")
    return solve(net, tol)


def termination_gap(result: MtfsResult | MaxMinResult, phase: int) -> float:
    """Re-price the final basis once; returns the minimum reduced cost found."""
    prob = result.problem if isinstance(result, MaxMinResult) else Problem.build(result.expanded.original)
    p = dual_variables(result.state)
    _, eta1 = prob.price(p, phase)
    theta_cost = -1.0 if phase == MAXMIN else 0.0
    eta2 = theta_cost - float(p @ prob.theta_column())
    eta3 = float(p[: prob.n_dest].min()) if prob.n_dest else np.inf
    return min(eta1, eta2, eta3)
