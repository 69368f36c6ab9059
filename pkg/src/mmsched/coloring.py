"""Proper edge coloring of multigraphs with at most 3*ceil(Delta/2) colors.

The edges are first oriented along an Euler partition so every vertex has in-
and out-degree at most D = ceil(Delta/2). The bipartite out/in graph is then
D-edge-colorable (Koenig), and each of its color classes is a union of paths
and cycles in the original multigraph, which needs at most three colors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence


@dataclass(frozen=True)
class ColoringMultigraph:
    """Undirected multigraph whose edges are copies of network links.

    ``edges[i] = (u, v)``; ``link[i]`` names the link the copy came from and
    ``duration[i]`` its active time within a slot.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    link: tuple[int, ...] = ()
    duration: tuple[float, ...] = ()
    _degree: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        deg = [0] * self.n_vertices
        for u, v in self.edges:
            if u == v:
                raise ValueError("self-loops cannot be edge colored")
            deg[u] += 1
            deg[v] += 1
        object.__setattr__(self, "_degree", tuple(deg))
        if not self.link:
            object.__setattr__(self, "link", tuple(range(len(self.edges))))
        if not self.duration:
            object.__setattr__(self, "duration", (1.0,) * len(self.edges))
        if not len(self.link) == len(self.duration) == len(self.edges):
            raise ValueError("edges, link and duration must have equal length")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def degree(self) -> tuple[int, ...]:
        return self._degree

    @property
    def max_degree(self) -> int:
        return max(self._degree, default=0)

    @property
    def n_active_vertices(self) -> int:
        return sum(1 for d in self._degree if d)


def is_proper(edges: Sequence[tuple[int, int]], colors: Sequence[int]) -> bool:
    seen = set()
    for (u, v), c in zip(edges, colors):
        for x in (u, v):
            if (x, c) in seen:
                return False
            seen.add((x, c))
    return True


def euler_orientation(n: int, edges: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Orient edges so that in- and out-degree differ by at most one everywhere.

    Odd-degree vertices are joined to a dummy vertex, the resulting even graph
    is split into closed trails, and each edge takes its trail direction.
    """
    dummy = n
    ends = [tuple(e) for e in edges]
    deg = [0] * n
    for u, v in ends:
        deg[u] += 1
        deg[v] += 1
    ends += [(v, dummy) for v in range(n) if deg[v] % 2]
    adj: list[list[int]] = [[] for _ in range(n + 1)]
    for i, (u, v) in enumerate(ends):
        adj[u].append(i)
        adj[v].append(i)
    used = [False] * len(ends)
    ptr = [0] * (n + 1)
    out = [(0, 0)] * len(edges)
    for start in range(n + 1):
        while True:
            # skip exhausted incidences at the trail start
            while ptr[start] < len(adj[start]) and used[adj[start][ptr[start]]]:
                ptr[start] += 1
            if ptr[start] == len(adj[start]):
                break
            v = start
            while True:
                while ptr[v] < len(adj[v]) and used[adj[v][ptr[v]]]:
                    ptr[v] += 1
                if ptr[v] == len(adj[v]):
                    break
                i = adj[v][ptr[v]]
                used[i] = True
                a, b = ends[i]
                w = b if a == v else a
                if i < len(edges):
                    out[i] = (v, w)
                v = w
    return out


def _bipartite_coloring(n: int, arcs: Sequence[tuple[int, int]], D: int) -> list[int]:
    """Color arcs (u -> v) with D colors so no two share a tail or a head."""
    # bipartite vertices: tails are 0..n-1, heads are n..2n-1
    at: list[dict[int, int]] = [dict() for _ in range(2 * n)]
    free: list[set[int]] = [set(range(D)) for _ in range(2 * n)]
    color = [-1] * len(arcs)
    ends = [(u, n + v) for u, v in arcs]

    def set_color(i: int, c: int) -> None:
        for x in ends[i]:
            at[x][c] = i
            free[x].discard(c)

    def clear_color(i: int, c: int) -> None:
        for x in ends[i]:
            if at[x].get(c) == i:
                del at[x][c]
                free[x].add(c)

    for i, (x, y) in enumerate(ends):
        common = free[x] & free[y]
        if common:
            c = min(common)
            color[i] = c
            set_color(i, c)
            continue
        a = min(free[x])
        b = min(free[y])
        # a is used at y: flip the a/b alternating path from y, which cannot reach x
        path = []
        z, want = y, a
        while want in at[z]:
            j = at[z][want]
            path.append(j)
            u, w = ends[j]
            z = w if u == z else u
            want = b if want == a else a
        for j in path:
            clear_color(j, color[j])
        for j in path:
            color[j] = b if color[j] == a else a
            set_color(j, color[j])
        color[i] = a
        set_color(i, a)
    return color


def _class_walks(arcs: Sequence[tuple[int, int]], members: list[int]) -> list[tuple[list[int], bool]]:
    """Split a class with in/out degree <= 1 into (edge list, is_cycle) walks."""
    succ = {}
    has_pred = set()
    for i in members:
        u, v = arcs[i]
        succ[u] = i
        has_pred.add(v)
    walks = []
    seen = set()
    starts = sorted(u for u in succ if u not in has_pred)
    for s in starts:
        walk, u = [], s
        while u in succ:
            i = succ[u]
            walk.append(i)
            seen.add(i)
            u = arcs[i][1]
        walks.append((walk, False))
    for i in members:
        if i in seen:
            continue
        walk, j = [], i
        while j not in seen:
            walk.append(j)
            seen.add(j)
            j = succ[arcs[j][1]]
        walks.append((walk, True))
    return walks


def _compact(colors: list[int]) -> tuple[list[int], int]:
    ids = {c: k for k, c in enumerate(sorted(set(colors)))}
    return [ids[c] for c in colors], len(ids)


def color_multigraph(gm: ColoringMultigraph) -> tuple[list[int], int]:
    """Proper edge coloring; returns (color per edge, number of colors kappa).

    kappa <= 3 * ceil(Delta / 2) always holds.
    """
    if gm.n_edges == 0:
        return [], 0
    D = math.ceil(gm.max_degree / 2)
    arcs = euler_orientation(gm.n_vertices, gm.edges)
    base = _bipartite_coloring(gm.n_vertices, arcs, D)
    classes: list[list[int]] = [[] for _ in range(D)]
    for i, c in enumerate(base):
        classes[c].append(i)

    # A: three private colors per class
    # B: two per class, odd-cycle leftovers placed greedily afterwards
    col_a = [-1] * gm.n_edges
    col_b = [-1] * gm.n_edges
    leftovers = []
    for c, members in enumerate(classes):
        for walk, cycle in _class_walks(arcs, members):
            for pos, i in enumerate(walk):
                col_a[i] = col_b[i] = 2 * c + pos % 2
            if cycle and len(walk) % 2:
                col_a[walk[-1]] = 2 * D + c
                col_b[walk[-1]] = -1
                leftovers.append(walk[-1])

    if leftovers:
        busy: list[set[int]] = [set() for _ in range(gm.n_vertices)]
        for i, c in enumerate(col_b):
            if c >= 0:
                u, v = gm.edges[i]
                busy[u].add(c)
                busy[v].add(c)
        n_colors = 2 * D
        for i in leftovers:
            u, v = gm.edges[i]
            taken = busy[u] | busy[v]
            c = next((k for k in range(n_colors) if k not in taken), n_colors)
            n_colors = max(n_colors, c + 1)
            col_b[i] = c
            busy[u].add(c)
            busy[v].add(c)

    a, ka = _compact(col_a)
    b, kb = _compact(col_b)
    return (b, kb) if kb <= ka else (a, ka)
