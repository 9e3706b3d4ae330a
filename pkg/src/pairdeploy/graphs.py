"""Key graphs induced by a pairing table, and their deployment-phase views.

Nodes i and j are adjacent iff either selected the other, so they share at
least one pairwise key.  A phase view restricts the graph to the first
floor(gamma*n) nodes (the nodes deployed so far) and keeps only edges with
both endpoints deployed; it is a view, never a copy.

Connectivity is decided by union-find with path halving; a breadth-first
search route is kept alongside as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .scheme import PairingTable, phase_size

__all__ = [
    "KeyGraph",
    "PhaseView",
    "UnionFind",
    "build_graph",
    "restrict",
    "is_connected",
    "count_isolated",
    "is_connected_bfs",
    "write_edge_list",
]


class UnionFind:
    """Disjoint sets over 0..n-1 with union by size and path halving."""

    __slots__ = ("parent", "size", "components")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.components = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of a and b; True if they were distinct."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.components -= 1
        return True


@dataclass(frozen=True)
class KeyGraph:
    """Undirected key graph: n nodes, deduplicated edge arrays (u < v)."""

    n: int
    edge_u: np.ndarray = field(repr=False)
    edge_v: np.ndarray = field(repr=False)

    @property
    def edge_count(self) -> int:
        return len(self.edge_u)

    def edges(self) -> set[tuple[int, int]]:
        """Edge set as 1-based (i, j) tuples with i < j."""
        return {(int(u) + 1, int(v) + 1) for u, v in zip(self.edge_u, self.edge_v)}

    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edge_u, minlength=self.n)
        deg += np.bincount(self.edge_v, minlength=self.n)
        return deg


@dataclass(frozen=True)
class PhaseView:
    """The key graph restricted to the first m = floor(gamma*n) nodes."""

    parent: KeyGraph
    gamma: float
    m: int

    def masked_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edges with both endpoints deployed (0-based arrays)."""
        keep = (self.parent.edge_u < self.m) & (self.parent.edge_v < self.m)
        return self.parent.edge_u[keep], self.parent.edge_v[keep]


def build_graph(table: PairingTable) -> KeyGraph:
    """Build the key graph of a pairing table.

    Mutual selections collapse to a single edge; every node has degree at
    least k, so the full graph never has isolated nodes.
    """
    n, k = table.n, table.k
    rows = np.repeat(np.arange(n, dtype=np.int64), k)
    cols = table.partners.ravel()
    lo = np.minimum(rows, cols)
    hi = np.maximum(rows, cols)
    packed = np.unique(lo * n + hi)
    u = packed // n
    v = packed % n
    u.flags.writeable = False
    v.flags.writeable = False
    return KeyGraph(n, u, v)


def restrict(graph: KeyGraph, gamma: float) -> PhaseView:
    """View of the graph at deployment fraction gamma in (0, 1]."""
    return PhaseView(graph, gamma, phase_size(graph.n, gamma))


def is_connected(view: PhaseView) -> bool:
    """True iff the deployed subgraph is connected (m = 1 counts as connected)."""
    if view.m == 1:
        return True
    u, v = view.masked_edges()
    return _edges_connected(view.m, u, v)


def _edges_connected(m: int, u: np.ndarray, v: np.ndarray) -> bool:
    uf = UnionFind(m)
    for a, b in zip(u.tolist(), v.tolist()):
        if uf.union(a, b) and uf.components == 1:
            return True
    return uf.components == 1


def count_isolated(view: PhaseView) -> int:
    """Deployed nodes with no deployed neighbor; always 0 at gamma = 1."""
    u, v = view.masked_edges()
    touched = np.zeros(view.m, dtype=bool)
    touched[u] = True
    touched[v] = True
    return int(view.m - touched.sum())


def is_connected_bfs(view: PhaseView) -> bool:
    """Breadth-first search route to the same answer as is_connected."""
    m = view.m
    if m == 1:
        return True
    u, v = view.masked_edges()
    adj: list[list[int]] = [[] for _ in range(m)]
    for a, b in zip(u.tolist(), v.tolist()):
        adj[a].append(b)
        adj[b].append(a)
    seen = [False] * m
    seen[0] = True
    frontier = [0]
    reached = 1
    while frontier:
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    reached += 1
                    nxt.append(y)
        frontier = nxt
    return reached == m


def write_edge_list(graph: KeyGraph, fp: IO[str]) -> None:
    """Write one "i j" line per edge, 1-based, i < j, sorted by (i, j)."""
    for u, v in zip(graph.edge_u, graph.edge_v):
        fp.write(f"{int(u) + 1} {int(v) + 1}\n")


# -- array-level fast paths -------------------------------------------------
#
# The Monte Carlo harness evaluates thousands of tables; these operate on a
# table's partner array directly and skip KeyGraph construction.  They must
# agree exactly with the public route above (tested).

def connected_at(partners: np.ndarray, m: int) -> bool:
    """is_connected of the m-node view, straight from a partner array.

    Feeds edges to union-find a selection-column at a time, so a connected
    instance usually early-exits after about m merges.
    """
    if m == 1:
        return True
    uf = UnionFind(m)
    union = uf.union
    sub = partners[:m]
    for col in range(partners.shape[1]):
        js = sub[:, col]
        keep = js < m
        for a, b in zip(np.nonzero(keep)[0].tolist(), js[keep].tolist()):
            if union(a, b) and uf.components == 1:
                return True
    return uf.components == 1


def isolated_count_at(partners: np.ndarray, m: int) -> int:
    """count_isolated of the m-node view, straight from a partner array."""
    sub = partners[:m]
    keep = sub < m
    touched = np.zeros(m, dtype=bool)
    touched[np.nonzero(keep.any(axis=1))[0]] = True
    touched[sub[keep]] = True
    return int(m - touched.sum())
