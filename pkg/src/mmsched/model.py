"""Network, schedule and throughput data model.

Node ids are dense and 0-based with the eNB at id 0. Expanded networks keep a
reference to the network they were expanded from; every expanded node and link
records the id of its original (``origin``) so results can be reported on the
unexpanded topology.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import NegativeNetFlow, NetworkError, NoEnbLinks, NonMatchingSlot
from .tolerances import DEFAULT


class NodeRole(str, Enum):
    ENB = "enb"
    MMBS = "mmbs"
    UE = "ue"


@dataclass(frozen=True)
class Node:
    id: int
    role: NodeRole
    rf_chains: int = 1
    origin: Optional[int] = None

    def __post_init__(self):
        if self.rf_chains < 1:
            raise NetworkError(f"node {self.id}: rf_chains must be >= 1")


@dataclass(frozen=True)
class Link:
    src: int
    dst: int
    capacity: float
    origin: Optional[int] = None

    def __post_init__(self):
        if self.src == self.dst:
            raise NetworkError(f"self-loop at node {self.src}")
        if not self.capacity > 0:
            raise NetworkError(f"link {self.src}->{self.dst} has non-positive capacity")


@dataclass(frozen=True, eq=False)
class Network:
    """Directed, capacitated downlink network.

    An unexpanded network has exactly one eNB (id 0) and no links entering it.
    """

    nodes: tuple[Node, ...]
    links: tuple[Link, ...]
    expanded: bool = False
    parent: Optional["Network"] = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "links", tuple(self.links))
        for i, node in enumerate(self.nodes):
            if node.id != i:
                raise NetworkError("node ids must be dense and ordered")
        n = len(self.nodes)
        for link in self.links:
            if not (0 <= link.src < n and 0 <= link.dst < n):
                raise NetworkError(f"link {link.src}->{link.dst} references an unknown node")
        if self.expanded:
            if self.parent is None:
                raise NetworkError("expanded networks need a parent")
            return
        enbs = [v.id for v in self.nodes if v.role is NodeRole.ENB]
        if enbs != [0]:
            raise NetworkError("an unexpanded network needs exactly one eNB at id 0")
        seen = set()
        for link in self.links:
            if link.dst == 0:
                raise NetworkError("downlink networks cannot have links entering the eNB")
            if (link.src, link.dst) in seen:
                raise NetworkError(f"duplicate link {link.src}->{link.dst}")
            seen.add((link.src, link.dst))

    @classmethod
    def build(
        cls,
        n_mmbs: int,
        links: Iterable[tuple[int, int, float]],
        enb_rf: int = 1,
        mmbs_rf: int | Sequence[int] = 1,
        n_ues: int = 0,
    ) -> "Network":
        """Convenience constructor: eNB is 0, mmBSs 1..n_mmbs, then UEs."""
        rf = [mmbs_rf] * n_mmbs if isinstance(mmbs_rf, int) else list(mmbs_rf)
        nodes = [Node(0, NodeRole.ENB, enb_rf)]
        nodes += [Node(i + 1, NodeRole.MMBS, rf[i]) for i in range(n_mmbs)]
        nodes += [Node(n_mmbs + 1 + i, NodeRole.UE) for i in range(n_ues)]
        return cls(tuple(nodes), tuple(Link(s, d, float(c)) for s, d, c in links))

    # -- structure -------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_links(self) -> int:
        return len(self.links)

    @property
    def original(self) -> "Network":
        return self.parent if self.expanded else self

    def super_of(self, v: int) -> int:
        """Id of the node ``v`` was expanded from (``v`` itself if unexpanded)."""
        return self.nodes[v].origin if self.expanded else v

    def link_origin(self, k: int) -> int:
        return self.links[k].origin if self.expanded else k

    @cached_property
    def out_links(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in self.nodes]
        for k, link in enumerate(self.links):
            out[link.src].append(k)
        return tuple(tuple(x) for x in out)

    @cached_property
    def in_links(self) -> tuple[tuple[int, ...], ...]:
        inc = [[] for _ in self.nodes]
        for k, link in enumerate(self.links):
            inc[link.dst].append(k)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def capacities(self) -> np.ndarray:
        return np.array([link.capacity for link in self.links], dtype=float)

    def ids_with_role(self, role: NodeRole) -> list[int]:
        return [v.id for v in self.nodes if v.role is role]

    @property
    def enb_rf(self) -> int:
        return self.original.nodes[0].rf_chains

    @property
    def mmbs(self) -> list[int]:
        """Original ids of the mmBSs."""
        return self.original.ids_with_role(NodeRole.MMBS)

    @property
    def ues(self) -> list[int]:
        return self.original.ids_with_role(NodeRole.UE)

    @property
    def access_mode(self) -> bool:
        return bool(self.ues)

    @property
    def destinations(self) -> list[int]:
        """Original ids whose throughput is reported: UEs if any, else mmBSs."""
        return self.ues if self.access_mode else self.mmbs

    @property
    def relays(self) -> list[int]:
        """Original ids that must forward everything they receive."""
        return self.mmbs if self.access_mode else []

    def enb_neighbors(self) -> list[int]:
        net = self.original
        return sorted({net.links[k].dst for k in net.out_links[0]})

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        if self.expanded:
            raise NetworkError("only unexpanded networks are serialized")
        return {
            "nodes": [{"id": v.id, "role": v.role.value, "rf": v.rf_chains} for v in self.nodes],
            "links": [{"src": e.src, "dst": e.dst, "cap_gbps": e.capacity} for e in self.links],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Network":
        nodes = tuple(
            Node(int(v["id"]), NodeRole(v["role"]), int(v.get("rf", 1))) for v in data["nodes"]
        )
        links = tuple(Link(int(e["src"]), int(e["dst"]), float(e["cap_gbps"])) for e in data["links"])
        return cls(nodes, links)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "Network":
        return cls.from_dict(json.loads(text))

    def with_rf(self, enb_rf: Optional[int] = None, mmbs_rf: Optional[int] = None) -> "Network":
        """Copy of an unexpanded network with different RF chain counts."""
        nodes = []
        for v in self.nodes:
            rf = v.rf_chains
            if v.role is NodeRole.ENB and enb_rf is not None:
                rf = enb_rf
            elif v.role is NodeRole.MMBS and mmbs_rf is not None:
                rf = mmbs_rf
            nodes.append(Node(v.id, v.role, rf))
        return Network(tuple(nodes), self.links)

    def scaled(self, factor: float) -> "Network":
        """Copy of an unexpanded network with all capacities multiplied by ``factor``."""
        return Network(
            self.nodes, tuple(Link(e.src, e.dst, e.capacity * factor) for e in self.links)
        )


Matching = frozenset  # frozenset[int] of link indices


@dataclass(frozen=True)
class Slot:
    """Links active together for ``duration``.

    ``active`` optionally gives a per-link active time (<= duration) for links
    that only use part of the slot; ``None`` means every link is on throughout.
    """

    links: tuple[int, ...]
    duration: float
    active: Optional[tuple[float, ...]] = None

    def link_activity(self) -> Iterable[tuple[int, float]]:
        if self.active is None:
            return ((k, self.duration) for k in self.links)
        return zip(self.links, self.active)


@dataclass(frozen=True)
class Schedule:
    slots: tuple[Slot, ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Iterable[int], float]]) -> "Schedule":
        return cls(tuple(Slot(tuple(sorted(m)), float(d)) for m, d in pairs))

    @property
    def length(self) -> float:
        return float(sum(s.duration for s in self.slots))

    @property
    def busy_slots(self) -> int:
        return sum(1 for s in self.slots if s.links)

    def scaled(self, rho: float) -> "Schedule":
        return Schedule(
            tuple(
                Slot(s.links, s.duration * rho, None if s.active is None else tuple(a * rho for a in s.active))
                for s in self.slots
            )
        )

    def to_dict(self) -> dict:
        out = []
        for s in self.slots:
            item = {"links": list(s.links), "duration": s.duration}
            if s.active is not None:
                item["active"] = list(s.active)
            out.append(item)
        return {"slots": out}

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        slots = []
        for item in data["slots"]:
            active = item.get("active")
            slots.append(
                Slot(
                    tuple(int(k) for k in item["links"]),
                    float(item["duration"]),
                    None if active is None else tuple(float(a) for a in active),
                )
            )
        return cls(tuple(slots))

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class LinkTimeVector:
    """Total active time of each link within the unit frame."""

    times: np.ndarray

    def node_load(self, net: Network) -> np.ndarray:
        """Sum of incident link times per node of ``net``."""
        load = np.zeros(net.n_nodes)
        for k, link in enumerate(net.links):
            load[link.src] += self.times[k]
            load[link.dst] += self.times[k]
        return load

    def satisfies_degree_constraints(self, net: Network, tol: float = DEFAULT.schedule) -> bool:
        """Check that no node is busy for more than its RF chain count."""
        rf = np.array([v.rf_chains for v in net.nodes], dtype=float)
        return bool(np.all(self.node_load(net) <= rf + tol))


@dataclass(frozen=True)
class ThroughputVector:
    """Per-destination downlink rate (Gbps), keyed by original node id."""

    nodes: tuple[int, ...]
    rates: np.ndarray

    @property
    def min(self) -> float:
        return float(self.rates.min()) if len(self.rates) else 0.0

    @property
    def total(self) -> float:
        return float(self.rates.sum())

    def as_dict(self) -> dict[int, float]:
        return {v: float(r) for v, r in zip(self.nodes, self.rates)}


# -- operations ----------------------------------------------------------


def _slot_overuse(net: Network, links: Sequence[int]) -> Optional[int]:
    used: dict[int, int] = {}
    for k in links:
        link = net.links[k]
        for v in (link.src, link.dst):
            used[v] = used.get(v, 0) + 1
            if used[v] > net.nodes[v].rf_chains:
                return v
    return None


def net_flow(net: Network, sched: Schedule) -> np.ndarray:
    """Net rate (in minus out) at every original node."""
    flow = np.zeros(net.original.n_nodes)
    for s in sched.slots:
        for k, a in s.link_activity():
            link = net.links[k]
            flow[net.super_of(link.dst)] += link.capacity * a
            flow[net.super_of(link.src)] -= link.capacity * a
    return flow


def throughput_of_schedule(
    net: Network, sched: Schedule, tol: float = DEFAULT.flow
) -> ThroughputVector:
    """Per-destination throughput of ``sched`` on ``net``.

    Raises NonMatchingSlot if a slot overuses a node's RF chains and
    NegativeNetFlow if a destination or relay ends up sending more than it
    receives.
    """
    for i, s in enumerate(sched.slots):
        v = _slot_overuse(net, s.links)
        if v is not None:
            raise NonMatchingSlot(i, v)
    flow = net_flow(net, sched)
    for v in net.destinations + net.relays:
        if flow[v] < -tol:
            raise NegativeNetFlow(v, float(flow[v]))
    dests = net.destinations
    return ThroughputVector(tuple(dests), np.maximum(flow[dests], 0.0))


def link_time_of_schedule(sched: Schedule, n_links: Optional[int] = None) -> LinkTimeVector:
    if n_links is None:
        n_links = 1 + max((k for s in sched.slots for k in s.links), default=-1)
    t = np.zeros(n_links)
    for s in sched.slots:
        for k, a in s.link_activity():
            t[k] += a
    return LinkTimeVector(t)


@dataclass(frozen=True)
class Violation:
    kind: str
    slot: Optional[int]
    detail: str


@dataclass(frozen=True)
class ScheduleReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first(self) -> Optional[Violation]:
        return self.violations[0] if self.violations else None

    def __bool__(self) -> bool:
        return self.ok


def verify_schedule(net: Network, sched: Schedule, tol: float = DEFAULT.schedule) -> ScheduleReport:
    """Check that every slot respects RF limits and the slots fill one frame.

    On an expanded network this is exactly "every slot is a matching". On an
    unexpanded network a slot may touch node ``v`` up to ``rf_chains`` times,
    which is equivalent to being a matching of the expanded graph.
    """
    out: list[Violation] = []
    for i, s in enumerate(sched.slots):
        if not s.duration > 0:
            out.append(Violation("NonPositiveDuration", i, f"duration {s.duration}"))
        bad = [k for k in s.links if not 0 <= k < net.n_links]
        if bad:
            out.append(Violation("UnknownLink", i, f"links {bad}"))
            continue
        if s.active is not None:
            if len(s.active) != len(s.links):
                out.append(Violation("ActiveMismatch", i, "active times do not match links"))
            elif any(a < -tol or a > s.duration + tol for a in s.active):
                out.append(Violation("ActiveExceedsSlot", i, "active time outside [0, duration]"))
        v = _slot_overuse(net, s.links)
        if v is not None:
            out.append(Violation("NonMatchingSlot", i, f"node {v} overused"))
    total = sched.length
    if abs(total - 1.0) > tol:
        out.append(Violation("LengthMismatch", None, f"slot durations sum to {total!r}"))
    return ScheduleReport(tuple(out))


def max_tput_baseline(net: Network) -> float:
    """Maximum eNB egress ignoring fairness.

    The ``min(R, L)`` strongest eNB links stay on for the whole frame; a
    multi-RF mmBS can take up to ``rf_chains`` of the eNB's chains.
    """
    net = net.original
    caps = []
    for k in net.out_links[0]:
        link = net.links[k]
        caps += [link.capacity] * net.nodes[link.dst].rf_chains
    if not caps:
        raise NoEnbLinks("the eNB has no outgoing links")
    caps.sort(reverse=True)
    return float(sum(caps[: net.nodes[0].rf_chains]))


def reachable_from_enb(net: Network) -> set[int]:
    net = net.original
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for k in net.out_links[v]:
            w = net.links[k].dst
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def check_connectivity(net: Network) -> bool:
    """True iff every mmBS and UE is reachable from the eNB over directed links."""
    seen = reachable_from_enb(net)
    return all(v in seen for v in net.mmbs + net.ues)
