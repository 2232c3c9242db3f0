"""
Graphs, girth, local sparsity and the explicit graph families.

All schemes in this package are parameterised by an undirected simple
graph with a canonical vertex order ``0 .. N-1`` and a canonical edge
order (edges stored as ``(u, v)`` with ``u < v``, sorted).  An edge is
referred to everywhere by its position in that sorted list.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InfeasibleCheck, InvalidParameter

__all__ = [
    "INFINITE",
    "Graph",
    "GirthCertificate",
    "SparsityReport",
    "girth",
    "complete_bipartite",
    "projective_plane_incidence",
    "wenger_graph",
    "prune_to_girth",
    "random_locally_sparse",
    "gnp_random_graph",
    "random_bipartite_graph",
    "check_local_sparsity",
    "check_nash_williams_condition",
    "connected_subsets",
    "is_prime",
    "next_prime",
    "read_graph",
    "write_graph",
    "format_graph",
    "parse_graph",
]

#: Girth of an acyclic graph.
INFINITE = math.inf

EXACT = "exact"
SAMPLED = "sampled"
DEFAULT_SUBSET_CAP = 10


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0 .. vertex_count-1``.

    Use :meth:`from_edges` to build one from an arbitrary edge iterable;
    the constructor itself only accepts an already canonical edge tuple.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        n = self.vertex_count
        if n < 0:
            raise InvalidParameter(f"vertex_count must be >= 0, got {n}")
        prev = None
        for e in self.edges:
            u, v = e
            if not (0 <= u < v < n):
                raise InvalidParameter(f"bad edge {e} for {n} vertices")
            if prev is not None and e <= prev:
                raise InvalidParameter("edge list must be sorted and duplicate-free")
            prev = e

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Sequence[int]]) -> "Graph":
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvalidParameter(f"self-loop at {u}")
            e = (u, v) if u < v else (v, u)
            if e in canon:
                raise InvalidParameter(f"duplicate edge {e}")
            canon.add(e)
        return cls(int(vertex_count), tuple(sorted(canon)))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    # Convenience aliases matching the usual N / M notation.
    @property
    def N(self) -> int:
        return self.vertex_count

    @property
    def M(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex, the ``(neighbour, edge_index)`` pairs in edge order."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for i, (u, v) in enumerate(self.edges):
            adj[u].append((v, i))
            adj[v].append((u, i))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def edge_ids(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def endpoints(self) -> np.ndarray:
        """``(M, 2)`` integer array of edge endpoints, smaller first."""
        arr = np.asarray(self.edges, dtype=np.int64)
        return arr.reshape(len(self.edges), 2)

    def edge_index(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        try:
            return self.edge_ids[key]
        except KeyError:
            raise KeyError(f"no edge {key}") from None

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def induced_edges(self, vertices: Iterable[int]) -> list[int]:
        vs = set(vertices)
        return [i for i, (u, v) in enumerate(self.edges) if u in vs and v in vs]

    def edge_subgraph(self, edge_indices: Iterable[int]) -> "Graph":
        """Subgraph on the same vertex set keeping only the given edges."""
        keep = sorted(set(edge_indices))
        return Graph(self.vertex_count, tuple(self.edges[i] for i in keep))

    def is_bipartite(self) -> bool:
        side = [-1] * self.vertex_count
        for s in range(self.vertex_count):
            if side[s] >= 0:
                continue
            side[s] = 0
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for w, _ in self.adjacency[v]:
                    if side[w] < 0:
                        side[w] = 1 - side[v]
                        queue.append(w)
                    elif side[w] == side[v]:
                        return False
        return True

    @cached_property
    def girth_certificate(self) -> "GirthCertificate":
        return girth(self)

    @property
    def girth(self) -> float:
        return self.girth_certificate.girth

    def __repr__(self) -> str:
        return f"Graph(N={self.vertex_count}, M={len(self.edges)})"


@dataclass(frozen=True)
class GirthCertificate:
    girth: float  # int value, or INFINITE
    witness_cycle: tuple[int, ...] = ()

    @property
    def is_finite(self) -> bool:
        return self.girth != INFINITE

    def verify(self, g: Graph) -> bool:
        """Check that the witness is a simple cycle of the stated length."""
        if not self.is_finite:
            return self.witness_cycle == ()
        cyc = self.witness_cycle
        if len(cyc) != self.girth or len(set(cyc)) != len(cyc) or len(cyc) < 3:
            return False
        return all(
            (min(a, b), max(a, b)) in g.edge_ids
            for a, b in zip(cyc, cyc[1:] + cyc[:1])
        )


@dataclass(frozen=True)
class SparsityReport:
    satisfied: bool
    violating_set: frozenset = field(default_factory=frozenset)
    induced_edge_count: int = 0
    mode: str = EXACT
    trials: int | None = None
    seed: int | None = None


# ---------------------------------------------------------------------------
# girth
# ---------------------------------------------------------------------------


def _tree_cycle(parent, a: int, b: int) -> list[int]:
    """Cycle closed by non-tree edge (a, b) through their lowest common ancestor."""
    up_a = [a]
    while parent[up_a[-1]] >= 0:
        up_a.append(parent[up_a[-1]])
    pos = {v: i for i, v in enumerate(up_a)}
    up_b = [b]
    while up_b[-1] not in pos:
        up_b.append(parent[up_b[-1]])
    lca = up_b[-1]
    down_a = up_a[: pos[lca] + 1][::-1]  # lca .. a
    return down_a + up_b[:-1]  # lca .. a, b .. (child of lca)


def girth(g: Graph) -> GirthCertificate:
    """Shortest cycle length with a witness cycle, or INFINITE for forests.

    BFS from every vertex; a non-tree edge ``(u, w)`` closes a cycle of
    length at most ``d(u) + d(w) + 1`` and the exact cycle through the
    lowest common ancestor is extracted from parent pointers.  When the
    root lies on a shortest cycle the bound is attained, so the minimum
    over all roots is the girth.
    """
    n = g.vertex_count
    adj = g.adjacency
    best = INFINITE
    witness: list[int] = []
    for root in range(n):
        if not adj[root]:
            continue
        dist = [-1] * n
        parent = [-1] * n
        parent_edge = [-1] * n
        dist[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            if 2 * dist[v] >= best:
                break
            for w, ei in adj[v]:
                if ei == parent_edge[v]:
                    continue
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    parent_edge[w] = ei
                    queue.append(w)
                elif dist[v] + dist[w] + 1 < best:
                    cyc = _tree_cycle(parent, v, w)
                    if len(cyc) < best:
                        best = len(cyc)
                        witness = cyc
        if best == 3:
            break
    if best == INFINITE:
        return GirthCertificate(INFINITE, ())
    return GirthCertificate(int(best), tuple(witness))


# ---------------------------------------------------------------------------
# primes
# ---------------------------------------------------------------------------


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def next_prime(x: float) -> int:
    """Smallest prime ``>= x`` (trial division)."""
    p = max(2, math.ceil(x))
    while not is_prime(p):
        p += 1
    return p


# ---------------------------------------------------------------------------
# explicit families
# ---------------------------------------------------------------------------


def complete_bipartite(a: int) -> Graph:
    """K_{a,a}: left side ``0..a-1``, right side ``a..2a-1``; girth 4."""
    if a < 2:
        raise InvalidParameter(f"complete_bipartite needs a >= 2, got {a}")
    return Graph(2 * a, tuple((u, a + v) for u in range(a) for v in range(a)))


def _projective_points(q: int) -> list[tuple[int, int, int]]:
    # Normalised homogeneous coordinates: first non-zero entry is 1.
    pts = [(1, y, z) for y in range(q) for z in range(q)]
    pts += [(0, 1, z) for z in range(q)]
    pts.append((0, 0, 1))
    return pts


def projective_plane_incidence(q: int) -> Graph:
    """Point-line incidence graph of PG(2, q) for prime q.

    Points are vertices ``0 .. P-1`` and lines ``P .. 2P-1`` with
    ``P = q^2 + q + 1``; each vertex has degree ``q + 1`` and the girth is 6.
    """
    if not is_prime(q):
        raise InvalidParameter(f"projective_plane_incidence needs a prime q, got {q}")
    pts = _projective_points(q)
    P = len(pts)
    arr = np.array(pts, dtype=np.int64)
    incident = (arr @ arr.T) % q == 0
    pi, li = np.nonzero(incident)
    return Graph(2 * P, tuple(zip(pi.tolist(), (li + P).tolist())))


def wenger_graph(k: int, p: int) -> Graph:
    """Wenger's bipartite graph on ``2 p^k`` vertices.

    Points and lines are both ``k``-tuples over Z_p.  Point ``(a_1..a_k)``
    is joined to line ``[b_1..b_k]`` iff ``a_j + b_j = a_1 * b_{j-1}
    (mod p)`` for ``j = 2..k``.  Every vertex has degree ``p`` so there are
    ``p^(k+1)`` edges.  Tuples are numbered in base ``p`` with ``a_1`` as
    the most significant digit; points come first.
    """
    if k < 1:
        raise InvalidParameter(f"wenger_graph needs k >= 1, got {k}")
    if not is_prime(p):
        raise InvalidParameter(f"wenger_graph needs a prime p, got {p}")
    size = p**k
    weights = [p ** (k - 1 - j) for j in range(k)]
    edges = []
    for point in np.ndindex(*([p] * k)):
        a1 = point[0]
        for b1 in range(p):
            line = [b1]
            for j in range(1, k):
                line.append((a1 * line[j - 1] - point[j]) % p)
            pi = sum(c * w for c, w in zip(point, weights))
            li = sum(c * w for c, w in zip(line, weights))
            edges.append((pi, size + li))
    return Graph.from_edges(2 * size, edges)


def prune_to_girth(g: Graph, target_girth: int, seed: int = 0) -> Graph:
    """Delete edges until no cycle shorter than ``target_girth`` remains.

    Vertices are processed in a seeded random order.  From each vertex a
    BFS looks for a short cycle through a non-tree edge; the
    lexicographically smallest edge of that cycle is deleted and the BFS
    repeated.  Deletions never create cycles, so one pass suffices.
    """
    if target_girth < 4:
        raise InvalidParameter(f"target_girth must be >= 4, got {target_girth}")
    n = g.vertex_count
    alive_adj = [dict(g.adjacency[v]) for v in range(n)]  # nbr -> edge index
    removed: set[int] = set()
    order = list(range(n))
    random.Random(seed).shuffle(order)
    for root in order:
        while True:
            cyc = _short_cycle_from(alive_adj, root, target_girth)
            if cyc is None:
                break
            pairs = [(min(a, b), max(a, b)) for a, b in zip(cyc, cyc[1:] + cyc[:1])]
            u, v = min(pairs)
            removed.add(alive_adj[u].pop(v))
            del alive_adj[v][u]
    return g.edge_subgraph(i for i in range(g.edge_count) if i not in removed)


def _short_cycle_from(adj: list[dict[int, int]], root: int, target: int):
    n = len(adj)
    dist = {root: 0}
    parent = [-1] * n
    parent_edge = {root: -1}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        if 2 * dist[v] >= target:
            return None
        for w, ei in adj[v].items():
            if ei == parent_edge[v]:
                continue
            if w not in dist:
                dist[w] = dist[v] + 1
                parent[w] = v
                parent_edge[w] = ei
                queue.append(w)
            elif dist[v] + dist[w] + 1 < target:
                return _tree_cycle(parent, v, w)
    return None


# ---------------------------------------------------------------------------
# random families
# ---------------------------------------------------------------------------


def _pairs_bernoulli(n: int, p: float, rng: np.random.Generator) -> list[tuple[int, int]]:
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return list(zip(iu[keep].tolist(), ju[keep].tolist()))


def random_locally_sparse(N: int, seed: int, scale: float = 1 / 50) -> Graph:
    """Random graph with edge probability ``scale * N**(-5/6)``.

    With the default ``scale = 1/50`` this is the generator whose output is
    ``(4 N^(1/6), 5/4)``-locally sparse with high probability.  Each of the
    ``C(N, 2)`` pairs is decided independently, in lexicographic order,
    from ``numpy.random.default_rng(seed)``.
    """
    if N < 16:
        raise InvalidParameter(f"random_locally_sparse needs N >= 16, got {N}")
    p = scale * N ** (-5 / 6)
    return Graph(N, tuple(_pairs_bernoulli(N, p, np.random.default_rng(seed))))


def gnp_random_graph(N: int, p: float, seed: int) -> Graph:
    return Graph(N, tuple(_pairs_bernoulli(N, p, np.random.default_rng(seed))))


def random_bipartite_graph(a: int, b: int, p: float, seed: int) -> Graph:
    """Random subgraph of K_{a,b}; left ``0..a-1``, right ``a..a+b-1``."""
    rng = np.random.default_rng(seed)
    keep = rng.random((a, b)) < p
    li, ri = np.nonzero(keep)
    return Graph(a + b, tuple(zip(li.tolist(), (ri + a).tolist())))


# ---------------------------------------------------------------------------
# sparsity
# ---------------------------------------------------------------------------


def connected_subsets(g: Graph, max_size: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield every connected vertex set of size ``<= max_size`` once.

    Each item is ``(vertices, induced_edge_count)``.  Sets are grown from
    their smallest vertex using an exclusive extension set, so no set is
    produced twice.
    """
    adj = [[w for w, _ in nbrs] for nbrs in g.adjacency]

    def extend(current, members, ext, edges):
        yield tuple(current), edges
        if len(current) == max_size:
            return
        ext = list(ext)
        root = current[0]
        while ext:
            w = ext.pop()
            new_edges = edges + sum(1 for x in adj[w] if x in members)
            fresh = [
                x
                for x in adj[w]
                if x > root and x not in members and x not in ext
                and not any(y in members for y in adj[x])
            ]
            current.append(w)
            members.add(w)
            yield from extend(current, members, ext + fresh, new_edges)
            current.pop()
            members.discard(w)

    for v in range(g.vertex_count):
        ext = [w for w in adj[v] if w > v]
        yield from extend([v], {v}, ext, 0)


def _as_fraction(alpha) -> Fraction:
    return alpha if isinstance(alpha, Fraction) else Fraction(str(alpha))


def check_local_sparsity(
    g: Graph,
    k: int,
    alpha=Fraction(5, 4),
    mode: str = EXACT,
    *,
    trials: int = 10_000,
    seed: int = 0,
    cap: int = DEFAULT_SUBSET_CAP,
) -> SparsityReport:
    """Is every vertex set of size ``4..k`` inducing at most ``alpha*|set|`` edges?

    ``mode="exact"`` is a complete search and refuses ``k > cap``.  For
    ``alpha >= 1`` a violating set always has a violating connected
    component of size at least 4 (smaller graphs have at most as many
    edges as vertices), so only connected sets are enumerated; for
    ``alpha < 1`` every subset is tried.  ``mode="sampled"`` grows random
    connected sets; a reported violation is genuine but ``satisfied`` is
    only evidence.
    """
    if k < 4:
        raise InvalidParameter(f"k must be >= 4, got {k}")
    alpha = _as_fraction(alpha)
    num, den = alpha.numerator, alpha.denominator
    k = min(k, g.vertex_count)

    if mode == EXACT:
        if k > cap:
            raise InfeasibleCheck(
                f"exact sparsity check with k={k} exceeds cap {cap}; use mode='sampled'"
            )
        if alpha >= 1:
            for vs, e in connected_subsets(g, k):
                if len(vs) >= 4 and e * den > num * len(vs):
                    return SparsityReport(False, frozenset(vs), e, EXACT)
        else:
            for size in range(4, k + 1):
                for vs in combinations(range(g.vertex_count), size):
                    e = len(g.induced_edges(vs))
                    if e * den > num * size:
                        return SparsityReport(False, frozenset(vs), e, EXACT)
        return SparsityReport(True, frozenset(), 0, EXACT)

    if mode != SAMPLED:
        raise InvalidParameter(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    adj = [[w for w, _ in nbrs] for nbrs in g.adjacency]
    starts = [v for v in range(g.vertex_count) if adj[v]]
    for _ in range(trials if starts else 0):
        target = rng.randint(4, max(4, k))
        members = [rng.choice(starts)]
        in_set = {members[0]}
        edges = 0
        while len(members) < target:
            frontier = [w for v in members for w in adj[v] if w not in in_set]
            if not frontier:
                break
            w = rng.choice(frontier)
            edges += sum(1 for x in adj[w] if x in in_set)
            members.append(w)
            in_set.add(w)
            if len(members) >= 4 and edges * den > num * len(members):
                return SparsityReport(False, frozenset(members), edges, SAMPLED, trials, seed)
    return SparsityReport(True, frozenset(), 0, SAMPLED, trials, seed)


def check_nash_williams_condition(
    g: Graph,
    mode: str = EXACT,
    *,
    trials: int = 10_000,
    seed: int = 0,
    cap: int = 20,
) -> SparsityReport:
    """Does every non-empty vertex set X induce at most ``2(|X|-1)`` edges?

    A violating set has a violating connected component, so the exact
    mode enumerates connected sets only.  Exact mode refuses graphs with
    more than ``cap`` vertices.
    """
    if mode == EXACT:
        if g.vertex_count > cap:
            raise InfeasibleCheck(
                f"exact Nash-Williams check on {g.vertex_count} vertices exceeds cap {cap}"
            )
        for vs, e in connected_subsets(g, g.vertex_count):
            if e > 2 * (len(vs) - 1):
                return SparsityReport(False, frozenset(vs), e, EXACT)
        return SparsityReport(True, frozenset(), 0, EXACT)
    if mode != SAMPLED:
        raise InvalidParameter(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    adj = [[w for w, _ in nbrs] for nbrs in g.adjacency]
    starts = [v for v in range(g.vertex_count) if adj[v]]
    for _ in range(trials if starts else 0):
        members = [rng.choice(starts)]
        in_set = {members[0]}
        edges = 0
        target = rng.randint(2, g.vertex_count)
        while len(members) < target:
            frontier = [w for v in members for w in adj[v] if w not in in_set]
            if not frontier:
                break
            w = rng.choice(frontier)
            edges += sum(1 for x in adj[w] if x in in_set)
            members.append(w)
            in_set.add(w)
            if edges > 2 * (len(members) - 1):
                return SparsityReport(False, frozenset(members), edges, SAMPLED, trials, seed)
    return SparsityReport(True, frozenset(), 0, SAMPLED, trials, seed)


# ---------------------------------------------------------------------------
# file format:  "N M" then M lines "u v", sorted
# ---------------------------------------------------------------------------


def format_graph(g: Graph) -> str:
    lines = [f"{g.vertex_count} {g.edge_count}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise InvalidParameter("graph file must start with 'N M'")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise InvalidParameter(f"header promises {m} edges, found {len(body)}")
    edges = tuple((int(u), int(v)) for u, v in body)
    return Graph(n, edges)


def write_graph(g: Graph, path) -> None:
    Path(path).write_text(format_graph(g))


def read_graph(path) -> Graph:
    return parse_graph(Path(path).read_text())
