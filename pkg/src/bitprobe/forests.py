"""Dense cores and two-forest edge partitions for the quantum adaptive scheme."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .errors import NotLocallySparse, NotTwoForests, PreconditionError
from .graphs import Graph

__all__ = [
    "DenseCore",
    "ForestPartition",
    "UnionFind",
    "grow_dense_core",
    "two_forest_partition",
    "is_forest",
]


class UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the classes of a and b; False if they were already merged."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def is_forest(g: Graph, subset: Iterable[int]) -> bool:
    """True iff the given edges of ``g`` contain no cycle."""
    uf = UnionFind()
    return all(uf.union(*g.edges[ei]) for ei in subset)


@dataclass(frozen=True)
class DenseCore:
    vertices: frozenset
    # (added vertex, edge indices joining it to the core at that moment)
    growth_trace: tuple[tuple[int, tuple[int, ...]], ...] = ()

    @property
    def added(self) -> list[int]:
        return [v for v, _ in self.growth_trace]


@dataclass(frozen=True)
class ForestPartition:
    forest1: frozenset = field(default_factory=frozenset)
    forest2: frozenset = field(default_factory=frozenset)

    def verify(self, g: Graph, edges: Iterable[int]) -> bool:
        edges = set(edges)
        return (
            not (self.forest1 & self.forest2)
            and (self.forest1 | self.forest2) == edges
            and is_forest(g, self.forest1)
            and is_forest(g, self.forest2)
        )


def grow_dense_core(g: Graph, seed_vertices: Iterable[int], n: int) -> DenseCore:
    """Close ``seed_vertices`` under "add a vertex with two edges into the set".

    Each round adds the lowest-index eligible vertex.  On a
    ``(4n, 5/4)``-locally sparse graph fewer than ``2n`` vertices are ever
    added; reaching ``2n`` additions raises :class:`NotLocallySparse`.
    """
    core = set(seed_vertices)
    if len(core) > 2 * n:
        raise PreconditionError(f"{len(core)} seed vertices exceed 2n = {2 * n}")
    adj = g.adjacency
    into = [0] * g.vertex_count
    for v in core:
        for w, _ in adj[v]:
            into[w] += 1
    trace = []
    while True:
        v = next(
            (v for v in range(g.vertex_count) if into[v] >= 2 and v not in core), None
        )
        if v is None:
            break
        if len(trace) + 1 >= 2 * n:
            raise NotLocallySparse(
                f"dense core grew by {len(trace) + 1} >= 2n = {2 * n} vertices"
            )
        witness = tuple(ei for w, ei in adj[v] if w in core)
        trace.append((v, witness))
        core.add(v)
        for w, _ in adj[v]:
            into[w] += 1
    return DenseCore(frozenset(core), tuple(trace))


def _forest_path(g: Graph, forest: set[int], s: int, t: int) -> list[int] | None:
    """Edge indices of the s-t path inside ``forest``, or None."""
    if s == t:
        return []
    nbrs: dict[int, list[tuple[int, int]]] = {}
    for ei in forest:
        u, v = g.edges[ei]
        nbrs.setdefault(u, []).append((v, ei))
        nbrs.setdefault(v, []).append((u, ei))
    if s not in nbrs or t not in nbrs:
        return None
    back = {s: None}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        for y, ei in nbrs[x]:
            if y not in back:
                back[y] = (x, ei)
                if y == t:
                    path = []
                    while back[y] is not None:
                        y, ei = back[y]
                        path.append(ei)
                    return path
                queue.append(y)
    return None


def _insert(g: Graph, e: int, forests: list[set[int]], where: dict[int, int]) -> bool:
    # Breadth-first search for a shortest exchange chain: e enters a forest
    # and displaces y1, which enters the other forest and displaces y2, ...
    # until some edge can be added without closing a cycle.
    displaced_by = {e: None}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        u, v = g.edges[x]
        for i in (0, 1):
            if where.get(x) == i:
                continue
            path = _forest_path(g, forests[i], u, v)
            if path is None:
                cur, target = x, i
                while cur is not None:
                    old = where.get(cur)
                    if old is not None:
                        forests[old].discard(cur)
                    forests[target].add(cur)
                    where[cur] = target
                    cur, target = displaced_by[cur], old
                return True
            for y in path:
                if y not in displaced_by:
                    displaced_by[y] = x
                    queue.append(y)
    return False


def two_forest_partition(g: Graph, subset: Iterable[int] | None = None) -> ForestPartition:
    """Split the edges induced by ``subset`` (default: all vertices) into two forests.

    Edges are inserted one at a time with shortest exchange chains
    (matroid partitioning), which succeeds whenever a partition exists,
    i.e. whenever every vertex set X induces at most ``2(|X|-1)`` edges.
    Raises :class:`NotTwoForests` otherwise.
    """
    vs = range(g.vertex_count) if subset is None else subset
    edges = g.induced_edges(vs)
    forests: list[set[int]] = [set(), set()]
    where: dict[int, int] = {}
    for e in edges:
        if not _insert(g, e, forests, where):
            raise NotTwoForests(f"edge {g.edges[e]} cannot be placed in either forest")
    part = ForestPartition(frozenset(forests[0]), frozenset(forests[1]))
    if not part.verify(g, edges):
        raise RuntimeError("internal error: exchange chain produced an invalid partition")
    return part
