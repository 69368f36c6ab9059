"""eNB / node expansion and mapping expanded schedules back to original links.

Expanded node ids are contiguous per super node: the copies of original node
``v`` are ``first[v] .. first[v] + copies[v] - 1``.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import AlreadyExpanded, RfLimitViolated
from .model import Link, LinkTimeVector, Network, Node, NodeRole, Schedule, Slot


def _expand(net: Network, copies: Sequence[int], split_rf: Sequence[bool]) -> Network:
    if net.expanded:
        raise AlreadyExpanded("network is already expanded")
    first = np.concatenate([[0], np.cumsum(copies)[:-1]]).astype(int)
    nodes = []
    for v in net.nodes:
        rf = 1 if split_rf[v.id] else v.rf_chains
        for _ in range(copies[v.id]):
            nodes.append(Node(len(nodes), v.role, rf, origin=v.id))
    links = []
    for k, e in enumerate(net.links):
        for i in range(copies[e.src]):
            for j in range(copies[e.dst]):
                links.append(Link(int(first[e.src]) + i, int(first[e.dst]) + j, e.capacity, origin=k))
    return Network(tuple(nodes), tuple(links), expanded=True, parent=net)


def expand_enb(net: Network, rf: Optional[int] = None) -> Network:
    """Replace the eNB by ``rf`` (default: its RF count) single-RF copies.

    Each copy inherits every eNB link with the same capacity; other nodes are
    kept as they are.
    """
    r = net.nodes[0].rf_chains if rf is None else rf
    copies = [r] + [1] * (net.n_nodes - 1)
    split = [True] + [False] * (net.n_nodes - 1)
    return _expand(net, copies, split)


def expand_nodes(net: Network) -> Network:
    """Replace every node by ``rf_chains`` single-RF copies.

    A link of capacity c between nodes with R_v and R_v' chains becomes
    R_v * R_v' links of capacity c, one per copy pair.
    """
    copies = [v.rf_chains for v in net.nodes]
    return _expand(net, copies, [True] * net.n_nodes)


def super_members(net: Network) -> list[list[int]]:
    """Expanded node ids grouped by original node."""
    groups: list[list[int]] = [[] for _ in range(net.original.n_nodes)]
    for v in net.nodes:
        groups[net.super_of(v.id)].append(v.id)
    return groups


def first_copy_link(net: Network) -> list[int]:
    """For each original link, the index of its first expanded copy."""
    out = [-1] * net.original.n_links
    for k in range(net.n_links - 1, -1, -1):
        out[net.link_origin(k)] = k
    return out


def collapse_schedule(sched: Schedule, net: Network) -> tuple[Schedule, LinkTimeVector]:
    """Map a schedule on expanded ``net`` onto the original links.

    A slot may contain an original link several times when several RF chain
    pairs serve it at once. Raises RfLimitViolated if a slot touches a super
    node more often than it has RF chains.
    """
    orig = net.original
    slots = []
    t = np.zeros(orig.n_links)
    for i, s in enumerate(sched.slots):
        used: dict[int, int] = {}
        pairs = []
        for k, a in s.link_activity():
            ko = net.link_origin(k)
            e = orig.links[ko]
            for v in (e.src, e.dst):
                used[v] = used.get(v, 0) + 1
                if used[v] > orig.nodes[v].rf_chains:
                    raise RfLimitViolated(v, i)
            pairs.append((ko, a))
            t[ko] += a
        pairs.sort()
        links = tuple(p[0] for p in pairs)
        active = None if s.active is None else tuple(p[1] for p in pairs)
        slots.append(Slot(links, s.duration, active))
    return Schedule(tuple(slots)), LinkTimeVector(t)


def expanded_node_ids(net: Network, role: NodeRole) -> list[int]:
    return [v.id for v in net.nodes if v.role is role]
