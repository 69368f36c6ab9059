"""Edge-coloring based approximate MTFS.

Two steps. First a polynomial LP over link times, restricted only by
necessary conditions for schedulability, gives an upper bound on the max-min
throughput and a link-time vector. Then the link times are chopped into
quanta of length ``granularity``, the quanta form a multigraph, and a proper
edge coloring of it turns into slots (one color per slot).

Necessary conditions for single-RF mmBSs: with ``tk[k]`` the fraction of the
frame in which exactly k links run between non-eNB nodes,

    sum_k tk[k] <= 1
    sum_k k * tk[k] = sum of link times between non-eNB nodes
    eNB busy time + sum_k max(0, R - W + 2k) * tk[k] <= R
    busy time of every other node <= 1

since k such links leave at most W - 2k nodes for the eNB's R chains. R is
first clamped to the eNB's degree. With UEs present, W counts the mmBSs plus
the UEs the eNB reaches directly, and only links with both ends in that set
are counted in k.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .coloring import ColoringMultigraph, color_multigraph
from .errors import BoundViolated, Infeasible
from .expansion import expand_enb, expand_nodes
from .lp import solve_dense_lp
from .model import (
    LinkTimeVector,
    Network,
    NodeRole,
    Schedule,
    Slot,
    ThroughputVector,
    link_time_of_schedule,
    reachable_from_enb,
    throughput_of_schedule,
)

logger = logging.getLogger(__name__)


class ConstraintVariant(str, Enum):
    SINGLE_RF = "single_rf"
    MULTI_RF = "multi_rf"
    ACCESS = "access"


@dataclass(frozen=True)
class EcConfig:
    granularity: float = 0.001
    drop_tolerance: float = 1e-9
    # None picks from the network: access if it has UEs, multi-RF if any
    # non-eNB node has several chains, single-RF otherwise
    constraint_variant: Optional[ConstraintVariant] = None

    def __post_init__(self):
        if not 0 < self.granularity <= 1:
            raise ValueError("granularity must lie in (0, 1]")
        if self.drop_tolerance < 0:
            raise ValueError("drop tolerance must be non-negative")
        if self.constraint_variant is not None:
            object.__setattr__(self, "constraint_variant", ConstraintVariant(self.constraint_variant))

    def variant_for(self, net: Network) -> ConstraintVariant:
        if self.constraint_variant is not None:
            return self.constraint_variant
        if any(v.rf_chains > 1 for v in net.nodes[1:]):
            return ConstraintVariant.MULTI_RF
        if net.access_mode:
            return ConstraintVariant.ACCESS
        return ConstraintVariant.SINGLE_RF


def effective_enb_rf(net: Network) -> int:
    """eNB chains that can ever be busy at once: min(R, number of eNB neighbours)."""
    return min(net.nodes[0].rf_chains, len(net.enb_neighbors()))


def _pool(net: Network) -> set[int]:
    """Non-eNB nodes the eNB could serve directly: all mmBSs plus UEs it links to."""
    ue_direct = {net.links[k].dst for k in net.out_links[0] if net.nodes[net.links[k].dst].role is NodeRole.UE}
    return set(net.mmbs) | ue_direct


class _LinkTimeLP:
    """Variables: link times, then tk[1..nu] (all but the multi-RF variant), then theta."""

    def __init__(self, net: Network, variant: ConstraintVariant):
        net = net.original
        if variant is ConstraintVariant.ACCESS and not net.access_mode:
            raise Infeasible("the access variant needs UEs")
        reach = reachable_from_enb(net)
        missing = [v for v in net.destinations if v not in reach]
        if missing:
            raise Infeasible(f"destinations {missing} are unreachable from the eNB")
        self.net = net
        self.variant = variant
        n_links = net.n_links
        self.R = net.nodes[0].rf_chains
        self.R_eff = effective_enb_rf(net)
        if self.R_eff < self.R:
            logger.info("eNB chains clamped from %d to %d (eNB degree)", self.R, self.R_eff)
        pool = _pool(net)
        use_tk = variant is not ConstraintVariant.MULTI_RF
        self.nu = len(pool) // 2 if use_tk else 0
        self.n_vars = n_links + self.nu + 1
        theta = self.n_vars - 1
        caps = net.capacities

        ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []

        def row() -> np.ndarray:
            return np.zeros(self.n_vars)

        # flow: theta - (in - out) <= 0 at destinations, in - out = 0 at relays
        for v in net.destinations:
            r = row()
            r[theta] = 1.0
            for k in net.in_links[v]:
                r[k] -= caps[k]
            for k in net.out_links[v]:
                r[k] += caps[k]
            ub_rows.append(r)
            ub_rhs.append(0.0)
        for v in net.relays:
            r = row()
            for k in net.in_links[v]:
                r[k] += caps[k]
            for k in net.out_links[v]:
                r[k] -= caps[k]
            eq_rows.append(r)
            eq_rhs.append(0.0)

        if use_tk:
            tk = slice(n_links, n_links + self.nu)
            W = len(pool)
            r = row()
            r[tk] = 1.0
            ub_rows.append(r)
            ub_rhs.append(1.0)
            r = row()
            r[tk] = np.arange(1, self.nu + 1)
            for k, e in enumerate(net.links):
                if e.src in pool and e.dst in pool:
                    r[k] -= 1.0
            eq_rows.append(r)
            eq_rhs.append(0.0)
            r = row()
            for k in net.out_links[0]:
                r[k] = 1.0
            r[tk] = np.maximum(0, self.R_eff - W + 2 * np.arange(1, self.nu + 1))
            ub_rows.append(r)
            ub_rhs.append(float(self.R_eff))
            limits = [(v, 1.0) for v in range(1, net.n_nodes)]
        else:
            limits = [(v, float(net.nodes[v].rf_chains)) for v in range(net.n_nodes)]
        for v, cap in limits:
            r = row()
            for k in net.in_links[v] + net.out_links[v]:
                r[k] = 1.0
            ub_rows.append(r)
            ub_rhs.append(cap)

        self.A_ub = np.array(ub_rows)
        self.b_ub = np.array(ub_rhs)
        self.A_eq = np.array(eq_rows) if eq_rows else None
        self.b_eq = np.array(eq_rhs) if eq_rows else None
        self.bounds = [(0, None)] * (self.n_vars - 1) + [(None, None)]

    def maxmin(self) -> tuple[float, LinkTimeVector]:
        c = np.zeros(self.n_vars)
        c[-1] = 1.0
        res = solve_dense_lp(c, self.A_ub, self.b_ub, self.A_eq, self.b_eq, sense="max", bounds=self.bounds)
        return res.objective, LinkTimeVector(np.maximum(res.x[: self.net.n_links], 0.0))

    def throughput(self, theta: float) -> LinkTimeVector:
        net = self.net
        c = np.zeros(self.n_vars)
        for k in net.out_links[0]:
            c[k] = net.capacities[k]
        floor = theta - 1e-9 * max(1.0, abs(theta))
        bounds = self.bounds[:-1] + [(floor, None)]
        res = solve_dense_lp(c, self.A_ub, self.b_ub, self.A_eq, self.b_eq, sense="max", bounds=bounds)
        return LinkTimeVector(np.maximum(res.x[: net.n_links], 0.0))


def ec_maxmin_link_time(net: Network, cfg: EcConfig = EcConfig()) -> tuple[float, LinkTimeVector]:
    """Upper bound on the max-min throughput and link times attaining it."""
    return _LinkTimeLP(net, cfg.variant_for(net)).maxmin()


def ec_tput_link_time(net: Network, theta: float, cfg: EcConfig = EcConfig()) -> LinkTimeVector:
    """Link times maximizing eNB egress with every destination kept at ``theta``."""
    return _LinkTimeLP(net, cfg.variant_for(net)).throughput(theta)


def ec_multirf_link_time(net: Network, cfg: EcConfig = EcConfig()) -> tuple[float, LinkTimeVector]:
    """Max-min link times under per-node RF budgets only."""
    return _LinkTimeLP(net, ConstraintVariant.MULTI_RF).maxmin()


def ec_access_link_time(net: Network, cfg: EcConfig = EcConfig()) -> tuple[float, LinkTimeVector]:
    """Max-min link times when UEs are the destinations and mmBSs only relay."""
    return _LinkTimeLP(net, ConstraintVariant.ACCESS).maxmin()


def reduce_link_times(net: Network, t: LinkTimeVector, drop_tolerance: float = 1e-9) -> LinkTimeVector:
    """Zero negligible link times and cancel flow running both ways on a node pair.

    Cancelling keeps every net flow unchanged and only shortens link times,
    so the result still meets all constraints; it also leaves at most one
    direction per pair, which the degree bound of the multigraph relies on.
    """
    net = net.original
    times = np.where(t.times > drop_tolerance, t.times, 0.0)
    caps = net.capacities
    index = {(e.src, e.dst): k for k, e in enumerate(net.links)}
    for k, e in enumerate(net.links):
        back = index.get((e.dst, e.src))
        if back is None or back < k or times[k] == 0 or times[back] == 0:
            continue
        f = min(caps[k] * times[k], caps[back] * times[back])
        times[k] = max(0.0, times[k] - f / caps[k])
        times[back] = max(0.0, times[back] - f / caps[back])
    times = np.where(times > drop_tolerance, times, 0.0)
    return LinkTimeVector(times)


@dataclass(frozen=True)
class EcSchedule:
    schedule: Schedule  # indices refer to ``expanded`` links
    kappa: int
    multigraph: ColoringMultigraph
    expanded: Network
    expanded_times: np.ndarray  # link times on ``expanded`` before quantization
    scale: float  # 1 / (kappa * t_g) when that is below one, else 1


def _quanta(t: float, t_g: float) -> list[float]:
    if t <= 0:
        return []
    n_full = math.floor(t / t_g + 1e-9)
    rem = t - n_full * t_g
    if rem > 1e-12:
        return [t_g] * n_full + [rem]
    return [t_g] * n_full


def build_ec_schedule(net: Network, t: LinkTimeVector, cfg: EcConfig = EcConfig()) -> EcSchedule:
    """Reduce, expand, quantize, color and scale (see the module docstring)."""
    net = net.original
    t_g = cfg.granularity
    reduced = reduce_link_times(net, t, cfg.drop_tolerance)
    if cfg.variant_for(net) is ConstraintVariant.MULTI_RF:
        exp = expand_nodes(net)
        share = lambda e: net.nodes[e.src].rf_chains * net.nodes[e.dst].rf_chains  # noqa: E731
    else:
        r = max(1, effective_enb_rf(net))
        exp = expand_enb(net, rf=r)
        share = lambda e: r if e.src == 0 else 1  # noqa: E731
    exp_t = np.array([reduced.times[e.origin] / share(net.links[e.origin]) for e in exp.links])

    edges, link, dur = [], [], []
    for k, e in enumerate(exp.links):
        for q in _quanta(float(exp_t[k]), t_g):
            edges.append((e.src, e.dst))
            link.append(k)
            dur.append(q)
    gm = ColoringMultigraph(exp.n_nodes, tuple(edges), tuple(link), tuple(dur))
    colors, kappa = color_multigraph(gm)

    members: list[list[tuple[int, float]]] = [[] for _ in range(kappa)]
    for i, c in enumerate(colors):
        members[c].append((link[i], dur[i]))
    slots = []
    for pairs in members:
        pairs.sort()
        links = tuple(p[0] for p in pairs)
        active = tuple(p[1] for p in pairs)
        slots.append(Slot(links, t_g, None if all(a == t_g for a in active) else active))
    sched = Schedule(tuple(slots))
    used = kappa * t_g
    scale = 1.0
    if used > 1.0:
        scale = 1.0 / used
        sched = sched.scaled(scale)
    elif 1.0 - used > 1e-12:
        sched = Schedule(sched.slots + (Slot((), 1.0 - used),))
    return EcSchedule(sched, kappa, gm, exp, exp_t, scale)


def ec_schedule(net: Network, t: LinkTimeVector, cfg: EcConfig = EcConfig()) -> tuple[Schedule, int]:
    """Schedule on the eNB-expanded network realizing ``min(t_e/(kappa t_g), t_e)``."""
    out = build_ec_schedule(net, t, cfg)
    return out.schedule, out.kappa


@dataclass(frozen=True)
class StructureReport:
    max_degree: int
    degree_bound: float
    n_vertices: int
    vertex_bound: int
    n_edges: int
    edge_bound: float

    @property
    def ok(self) -> bool:
        return (
            self.max_degree <= self.degree_bound + 1e-9
            and self.n_vertices <= self.vertex_bound
            and self.n_edges < self.edge_bound
        )


def ec_structure_bounds(
    gm: ColoringMultigraph, net: Network, cfg: EcConfig = EcConfig(), strict: bool = True
) -> StructureReport:
    """Compare the multigraph against its proven size limits.

    With W non-eNB nodes and R eNB chains: max degree <= W + R + 1/t_g - 1,
    at most W + R vertices and fewer than (W^2 + (2R-1)W + (W+R)/t_g)/2 edges.
    Raises BoundViolated when ``strict`` and a limit fails.
    """
    net = net.original
    W = net.n_nodes - 1
    R = net.nodes[0].rf_chains
    t_g = cfg.granularity
    report = StructureReport(
        max_degree=gm.max_degree,
        degree_bound=W + R + 1.0 / t_g - 1.0,
        n_vertices=gm.n_vertices,
        vertex_bound=W + R,
        n_edges=gm.n_edges,
        edge_bound=0.5 * (W * W + (2 * R - 1) * W + (W + R) / t_g),
    )
    if gm.n_edges == 0:
        return report
    if strict and not report.ok:
        raise BoundViolated(f"multigraph exceeds its structural bounds: {report}")
    return report


@dataclass
class EcResult:
    theta_relaxed: float
    theta: float  # realized max-min throughput
    network_throughput: float
    kappa: int
    max_degree: int
    n_edges: int
    schedule: Schedule
    expanded: Network
    throughput: ThroughputVector
    link_times: LinkTimeVector  # LP link times on the original network
    realized_times: LinkTimeVector  # on the original network
    variant: ConstraintVariant
    enb_rf_used: int
    bounds: Optional[StructureReport] = None
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def wall_time(self) -> float:
        return sum(self.timings.values())


def solve_ec(net: Network, cfg: EcConfig = EcConfig()) -> EcResult:
    """Both LPs followed by the coloring schedule; reports realized throughput."""
    net = net.original
    variant = cfg.variant_for(net)
    timings = {}
    start = time.perf_counter()
    lp = _LinkTimeLP(net, variant)
    theta_relaxed, _ = lp.maxmin()
    t = lp.throughput(theta_relaxed)
    timings["lp"] = time.perf_counter() - start

    start = time.perf_counter()
    built = build_ec_schedule(net, t, cfg)
    timings["coloring"] = time.perf_counter() - start

    tput = throughput_of_schedule(built.expanded, built.schedule)
    exp_times = link_time_of_schedule(built.schedule, built.expanded.n_links).times
    realized = np.zeros(net.n_links)
    for k, e in enumerate(built.expanded.links):
        realized[e.origin] += exp_times[k]
    bounds = None
    if variant is not ConstraintVariant.MULTI_RF:
        bounds = ec_structure_bounds(built.multigraph, net, cfg)
    logger.info(
        "EC: theta_relaxed=%.6g realized=%.6g kappa=%d", theta_relaxed, tput.min, built.kappa
    )
    return EcResult(
        theta_relaxed=theta_relaxed,
        theta=tput.min,
        network_throughput=tput.total,
        kappa=built.kappa,
        max_degree=built.multigraph.max_degree,
        n_edges=built.multigraph.n_edges,
        schedule=built.schedule,
        expanded=built.expanded,
        throughput=tput,
        link_times=t,
        realized_times=LinkTimeVector(realized),
        variant=variant,
        enb_rf_used=lp.R_eff,
        bounds=bounds,
        timings=timings,
    )
