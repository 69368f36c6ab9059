"""Ground-truth MTFS values from the complete matching column set.

Only for small instances: every matching of the expanded graph is enumerated
and the max-min / throughput LPs are solved densely with all columns present.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import Infeasible, TooLarge
from .expansion import expand_nodes
from .lp import solve_dense_lp
from .matching import enumerate_matchings
from .model import LinkTimeVector, Network, Schedule, Slot
from .mtfs import column_of_matching

MAX_ORACLE_NODES = 12


@dataclass(frozen=True)
class OracleSolution:
    value: float
    theta: float
    slot_lengths: np.ndarray  # one entry per matching
    matchings: list[frozenset]
    expanded: Network

    def schedule(self, min_slot: float = 1e-12) -> Schedule:
        slots = [
            Slot(tuple(sorted(m)), float(x))
            for m, x in zip(self.matchings, self.slot_lengths)
            if x > min_slot
        ]
        return _pad(slots)


def _pad(slots: list[Slot]) -> Schedule:
    total = sum(s.duration for s in slots)
    # renormalize solver noise so the frame is exactly one unit long
    if total > 0:
        slots = [Slot(s.links, s.duration / total) for s in slots]
    return Schedule(tuple(slots))


class _FullLP:
    def __init__(self, net: Network):
        net = net.original
        exp = expand_nodes(net)
        if exp.n_nodes > MAX_ORACLE_NODES:
            raise TooLarge(f"{exp.n_nodes} expanded nodes exceeds the oracle guard of {MAX_ORACLE_NODES}")
        self.exp = exp
        self.matchings = enumerate_matchings(exp)
        dest = net.destinations
        relay = [v for v in net.relays]
        self.A_dest = np.column_stack([column_of_matching(exp, m, dest) for m in self.matchings])
        self.A_relay = (
            np.column_stack([column_of_matching(exp, m, relay) for m in self.matchings])
            if relay
            else np.zeros((0, len(self.matchings)))
        )
        self.egress = np.array(
            [sum(exp.links[k].capacity for k in m if exp.super_of(exp.links[k].src) == 0) for m in self.matchings]
        )

    @property
    def K(self) -> int:
        return len(self.matchings)

    def _eq(self, extra_cols: int):
        rows = [np.concatenate([np.ones(self.K), np.zeros(extra_cols)])]
        rhs = [1.0]
        for r in self.A_relay:
            rows.append(np.concatenate([r, np.zeros(extra_cols)]))
            rhs.append(0.0)
        return np.array(rows), np.array(rhs)


def oracle_maxmin(net: Network) -> OracleSolution:
    """Exact max-min throughput over all matchings (expanded nodes <= 12)."""
    lp = _FullLP(net)
    n_dest = lp.A_dest.shape[0]
    c = np.zeros(lp.K + 1)
    c[-1] = 1.0
    A_ub = np.hstack([-lp.A_dest, np.ones((n_dest, 1))])
    A_eq, b_eq = lp._eq(1)
    bounds = [(0, None)] * lp.K + [(None, None)]
    res = solve_dense_lp(c, A_ub, np.zeros(n_dest), A_eq, b_eq, sense="max", bounds=bounds)
    theta = res.objective
    return OracleSolution(theta, theta, res.x[: lp.K], lp.matchings, lp.exp)


def oracle_mtfs(net: Network, theta: Optional[float] = None) -> OracleSolution:
    """Exact maximum network throughput given the max-min throughput."""
    lp = _FullLP(net)
    if theta is None:
        theta = oracle_maxmin(net).theta
    n_dest = lp.A_dest.shape[0]
    floor = theta - 1e-10 * max(1.0, abs(theta))
    A_eq, b_eq = lp._eq(0)
    res = solve_dense_lp(lp.egress, -lp.A_dest, -floor * np.ones(n_dest), A_eq, b_eq, sense="max")
    return OracleSolution(res.objective, theta, res.x, lp.matchings, lp.exp)


def decompose_link_times(net: Network, t: LinkTimeVector) -> Optional[Schedule]:
    """Write link times on expanded ``net`` as a convex combination of matchings.

    Returns the induced unit schedule, or None if ``t`` lies outside the
    schedule polyhedron.
    """
    if net.n_nodes > MAX_ORACLE_NODES:
        raise TooLarge(f"{net.n_nodes} nodes exceeds the oracle guard of {MAX_ORACLE_NODES}")
    matchings = enumerate_matchings(net)
    X = np.zeros((net.n_links, len(matchings)))
    for j, m in enumerate(matchings):
        for k in m:
            X[k, j] = 1.0
    A_eq = np.vstack([X, np.ones((1, len(matchings)))])
    b_eq = np.concatenate([t.times, [1.0]])
    try:
        res = solve_dense_lp(np.zeros(len(matchings)), A_eq=A_eq, b_eq=b_eq)
    except Infeasible:
        return None
    slots = [Slot(tuple(sorted(m)), float(x)) for m, x in zip(matchings, res.x) if x > 1e-12]
    return _pad(slots)
