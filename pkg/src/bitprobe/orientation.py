"""
Safe orientation of RED/GREEN coloured graphs.

An orientation is *safe* when every vertex that receives a GREEN edge
receives no other edge.  :func:`safe_orient` finds one for any graph of
even girth ``g >= 4`` carrying at most ``floor(3g/4)`` GREEN edges by
repeatedly peeling off a vertex set ``V'`` whose incident edges can be
oriented into ``V'``:

* a constrained BFS (RED-reached vertices only follow GREEN edges) from
  the lowest live vertex; with no blocking edge the BFS tree is oriented
  away from the root and the remaining incident edges point at RED
  vertices;
* otherwise the blocking edge closes a GREEN-dominated cycle ``C``.  The
  BFS is rerun from ``V(C)`` with the edges of ``C`` removed.  Without a
  blocking edge, ``C`` becomes a directed cycle and the forest is handled
  as before.  With one, the two BFS trees and ``C`` form three paths
  between two roots (a theta graph) that hold every GREEN edge; the theta
  is oriented by hand and every other edge points away from it.

Each result is re-checked with :func:`is_safe`.  Should the constructive
step get stuck (only possible on a bug or a violated precondition) the
remaining subgraph is solved by exhaustive search and a warning is
logged; ``Orientation.method`` records which path was taken.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from enum import IntEnum
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleCheck, PreconditionError
from .graphs import INFINITE, Graph, _tree_cycle

__all__ = [
    "Mark",
    "ColoredGraph",
    "Orientation",
    "BFSForest",
    "constrained_bfs",
    "find_blocking_edge",
    "blocking_edges",
    "find_green_dominated_cycle",
    "is_green_dominated",
    "safe_orient",
    "is_safe",
    "brute_force_safe_orient",
    "OrientationFailure",
]

log = logging.getLogger(__name__)

BRUTE_FORCE_CAP = 24


class Mark(IntEnum):
    UNVISITED = 0
    RED = 1
    GREEN = 2


class OrientationFailure(RuntimeError):
    """Neither the constructive procedure nor the exhaustive fallback succeeded."""


@dataclass(frozen=True)
class ColoredGraph:
    graph: Graph
    green_edges: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "green_edges", frozenset(int(i) for i in self.green_edges))
        m = self.graph.edge_count
        bad = [i for i in self.green_edges if not 0 <= i < m]
        if bad:
            raise PreconditionError(f"green edge indices out of range: {bad}")

    @classmethod
    def from_pairs(cls, graph: Graph, pairs: Iterable[Sequence[int]]) -> "ColoredGraph":
        return cls(graph, frozenset(graph.edge_index(u, v) for u, v in pairs))

    @property
    def n_green(self) -> int:
        return len(self.green_edges)

    def green_mask(self) -> list[bool]:
        mask = [False] * self.graph.edge_count
        for i in self.green_edges:
            mask[i] = True
        return mask


@dataclass(frozen=True)
class Orientation:
    """One bit per edge: 0 points at the smaller endpoint, 1 at the larger."""

    bits: tuple[int, ...]
    method: str = "constructive"
    steps: tuple[str, ...] = ()

    def head(self, graph: Graph, e: int) -> int:
        return graph.edges[e][self.bits[e]]

    def tail(self, graph: Graph, e: int) -> int:
        return graph.edges[e][1 - self.bits[e]]

    @classmethod
    def from_heads(cls, graph: Graph, heads: Sequence[int], **kw) -> "Orientation":
        return cls(tuple(int(h == graph.edges[i][1]) for i, h in enumerate(heads)), **kw)


@dataclass(frozen=True)
class BFSForest:
    parent: tuple[int, ...]  # -1 for roots and unvisited vertices
    parent_edge: tuple[int, ...]
    vertex_mark: tuple[Mark, ...]
    tree_edges: frozenset
    roots: tuple[int, ...]
    visit_order: tuple[int, ...]
    root_of: tuple[int, ...]

    def visited(self) -> list[int]:
        return list(self.visit_order)

    def path_to_root(self, v: int) -> list[int]:
        path = [v]
        while self.parent[path[-1]] >= 0:
            path.append(self.parent[path[-1]])
        return path


# ---------------------------------------------------------------------------
# BFS and blocking edges on the live part of a graph
# ---------------------------------------------------------------------------


class _Forest:
    __slots__ = ("parent", "parent_edge", "mark", "root_of", "order", "tree")

    def __init__(self, n: int):
        self.parent = [-1] * n
        self.parent_edge = [-1] * n
        self.mark = [0] * n
        self.root_of = [-1] * n
        self.order: list[int] = []
        self.tree: set[int] = set()

    def freeze(self, roots) -> BFSForest:
        return BFSForest(
            tuple(self.parent),
            tuple(self.parent_edge),
            tuple(Mark(m) for m in self.mark),
            frozenset(self.tree),
            tuple(roots),
            tuple(self.order),
            tuple(self.root_of),
        )


def _bfs(adj, green, active, roots) -> _Forest:
    f = _Forest(len(adj))
    mark, parent, parent_edge, root_of = f.mark, f.parent, f.parent_edge, f.root_of
    queue = deque()
    for r in roots:
        if not mark[r]:
            mark[r] = Mark.GREEN
            root_of[r] = r
            queue.append(r)
    while queue:
        v = queue.popleft()
        f.order.append(v)
        explore_all = mark[v] == Mark.GREEN
        for w, ei in adj[v]:
            if not active[ei] or mark[w]:
                continue
            if green[ei]:
                mark[w] = Mark.GREEN
            elif explore_all:
                mark[w] = Mark.RED
            else:
                continue
            parent[w] = v
            parent_edge[w] = ei
            root_of[w] = root_of[v]
            f.tree.add(ei)
            queue.append(w)
    return f


def _blocking(adj, green, active, f: _Forest) -> int | None:
    best = None
    mark = f.mark
    for v in f.order:
        for w, ei in adj[v]:
            if not active[ei] or ei in f.tree or not mark[w]:
                continue
            if green[ei] or (mark[v] == Mark.GREEN and mark[w] == Mark.GREEN):
                if best is None or ei < best:
                    best = ei
    return best


def constrained_bfs(h: ColoredGraph, roots: Iterable[int]) -> BFSForest:
    """BFS in which a vertex reached over a RED edge only follows GREEN edges.

    Roots are enqueued in ascending order and marked GREEN.  A newly
    reached vertex is marked with the colour of the edge that reached it
    and that edge becomes a tree edge, so no root-to-leaf path contains
    two consecutive RED edges.
    """
    roots = sorted(set(roots))
    if not roots:
        raise PreconditionError("constrained_bfs needs at least one root")
    g = h.graph
    f = _bfs(g.adjacency, h.green_mask(), [True] * g.edge_count, roots)
    return f.freeze(roots)


def blocking_edges(h: ColoredGraph, f: BFSForest) -> list[int]:
    """Non-tree edges that are GREEN with both ends visited, or RED with
    both ends marked GREEN, in index order."""
    green = h.green_mask()
    out = []
    for ei, (u, v) in enumerate(h.graph.edges):
        if ei in f.tree_edges:
            continue
        mu, mv = f.vertex_mark[u], f.vertex_mark[v]
        if not mu or not mv:
            continue
        if green[ei] or (mu == Mark.GREEN and mv == Mark.GREEN):
            out.append(ei)
    return out


def find_blocking_edge(h: ColoredGraph, f: BFSForest) -> int | None:
    """Lowest-index blocking edge of ``f``, or None."""
    found = blocking_edges(h, f)
    return found[0] if found else None


def is_green_dominated(h: ColoredGraph, cycle: Sequence[int]) -> bool:
    """Simple cycle in which at most one RED edge is followed by a RED edge.

    The count of cyclically adjacent RED-RED pairs does not depend on the
    traversal direction, so neither does the answer.
    """
    g = h.graph
    k = len(cycle)
    if k < 3 or len(set(cycle)) != k:
        return False
    try:
        ids = [g.edge_index(a, b) for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]])]
    except KeyError:
        return False
    red = [i not in h.green_edges for i in ids]
    return sum(red[j] and red[(j + 1) % k] for j in range(k)) <= 1


def find_green_dominated_cycle(h: ColoredGraph) -> tuple[int, ...] | None:
    """Run the constrained BFS from every vertex in turn; the first blocking
    edge found closes a GREEN-dominated cycle through the tree paths to the
    lowest common ancestor of its endpoints."""
    g = h.graph
    adj = g.adjacency
    green = h.green_mask()
    active = [True] * g.edge_count
    for root in range(g.vertex_count):
        if not adj[root]:
            continue
        f = _bfs(adj, green, active, [root])
        be = _blocking(adj, green, active, f)
        if be is None:
            continue
        a, b = g.edges[be]
        cycle = tuple(_tree_cycle(f.parent, a, b))
        if is_green_dominated(h, cycle):
            return cycle
    return None


# ---------------------------------------------------------------------------
# safety checks
# ---------------------------------------------------------------------------


def is_safe(h: ColoredGraph, o: Orientation) -> bool:
    """True iff every vertex with an incoming GREEN edge has in-degree exactly 1."""
    g = h.graph
    if len(o.bits) != g.edge_count:
        raise PreconditionError("orientation does not cover every edge")
    indeg = [0] * g.vertex_count
    green_in = [False] * g.vertex_count
    for ei, (e, b) in enumerate(zip(g.edges, o.bits)):
        head = e[b]
        indeg[head] += 1
        if ei in h.green_edges:
            green_in[head] = True
    return all(indeg[v] == 1 for v in range(g.vertex_count) if green_in[v])


def brute_force_safe_orient(
    h: ColoredGraph, cap: int = BRUTE_FORCE_CAP, *, edges: Sequence[int] | None = None
) -> Orientation | None:
    """First safe orientation in lexicographic order of the bit vector, or None.

    ``edges`` restricts the search to a sub-list of edge indices (the
    other edges are ignored entirely); the returned orientation then
    carries bits only for those edges, in the given order.
    """
    g = h.graph
    idx = list(range(g.edge_count)) if edges is None else list(edges)
    M = len(idx)
    if M > cap:
        raise InfeasibleCheck(f"brute force over {M} edges exceeds cap {cap}")
    if M == 0:
        return Orientation((), method="brute-force")
    ends = g.endpoints[idx]
    n = g.vertex_count
    lo = np.zeros((M, n), dtype=np.int32)
    hi = np.zeros((M, n), dtype=np.int32)
    lo[np.arange(M), ends[:, 0]] = 1
    hi[np.arange(M), ends[:, 1]] = 1
    green = np.array([i in h.green_edges for i in idx], dtype=np.int32)[:, None]
    shifts = np.arange(M - 1, -1, -1, dtype=np.int64)
    chunk = 1 << min(M, 14)
    for start in range(0, 1 << M, chunk):
        codes = np.arange(start, start + chunk, dtype=np.int64)
        bits = ((codes[:, None] >> shifts) & 1).astype(np.int32)
        indeg = bits @ hi + (1 - bits) @ lo
        green_in = bits @ (hi * green) + (1 - bits) @ (lo * green)
        ok = np.all((green_in == 0) | (indeg == 1), axis=1)
        if ok.any():
            first = int(np.argmax(ok))
            return Orientation(tuple(int(b) for b in bits[first]), method="brute-force")
    return None


# ---------------------------------------------------------------------------
# constructive safe orientation
# ---------------------------------------------------------------------------


class _Stuck(Exception):
    pass


class _Orienter:
    def __init__(self, h: ColoredGraph):
        self.h = h
        g = h.graph
        self.g = g
        self.adj = g.adjacency
        self.green = h.green_mask()
        self.active = [True] * g.edge_count
        self.heads = [-1] * g.edge_count
        self.live_deg = [len(a) for a in self.adj]
        self.steps: list[str] = []
        self.method = "constructive"

    # -- bookkeeping ------------------------------------------------------

    def _commit(self, heads: dict[int, int], removed: Iterable[int]):
        for v in removed:
            for _, ei in self.adj[v]:
                if self.active[ei] and ei not in heads:
                    raise _Stuck(f"edge {ei} at removed vertex {v} left unoriented")
        for ei, hd in heads.items():
            self.heads[ei] = hd
            if self.active[ei]:
                self.active[ei] = False
                u, v = self.g.edges[ei]
                self.live_deg[u] -= 1
                self.live_deg[v] -= 1

    def _orient_forest_part(self, f: _Forest, active, out: dict[int, int]):
        """Tree edges away from the roots; other live edges at visited vertices
        point at a RED-marked endpoint."""
        mark = f.mark
        for v in f.order:
            for w, ei in self.adj[v]:
                if not active[ei] or ei in out:
                    continue
                if ei in f.tree:
                    out[ei] = w if f.parent_edge[w] == ei else v
                    continue
                if self.green[ei]:
                    raise _Stuck(f"GREEN non-tree edge {ei} with a visited endpoint")
                cands = [x for x in (v, w) if mark[x] == Mark.RED]
                if not cands:
                    raise _Stuck(f"non-tree RED edge {ei} has no RED endpoint")
                out[ei] = min(cands)

    # -- the two peeling steps -------------------------------------------

    def step(self, v0: int) -> None:
        adj, green, active = self.adj, self.green, self.active
        f = _bfs(adj, green, active, [v0])
        be = _blocking(adj, green, active, f)
        if be is None:
            out: dict[int, int] = {}
            self._orient_forest_part(f, active, out)
            self.steps.append("forest")
            self._commit(out, f.order)
            return
        a, b = self.g.edges[be]
        cycle = _tree_cycle(f.parent, a, b)
        if not is_green_dominated(self.h, cycle):
            raise _Stuck("blocking edge did not close a GREEN-dominated cycle")
        self._cycle_step(cycle)

    def _cycle_step(self, cycle: list[int]) -> None:
        g, adj, green = self.g, self.adj, self.green
        k = len(cycle)
        cyc_edges = [g.edge_index(cycle[j], cycle[(j + 1) % k]) for j in range(k)]
        active2 = list(self.active)
        for ei in cyc_edges:
            active2[ei] = False
        f = _bfs(adj, green, active2, sorted(cycle))
        be = _blocking(adj, green, active2, f)
        if be is None:
            out = {ei: cycle[(j + 1) % k] for j, ei in enumerate(cyc_edges)}
            self._orient_forest_part(f, active2, out)
            self.steps.append("cycle-forest")
            self._commit(out, f.order)
            return

        a, b = g.edges[be]
        r1, r2 = f.root_of[a], f.root_of[b]
        if r1 == r2:
            raise _Stuck("blocking edge inside a single tree of the cycle forest")
        p3 = _root_path(f, a)[::-1] + _root_path(f, b)  # r1 .. a, b .. r2
        i1, i2 = cycle.index(r1), cycle.index(r2)
        if i2 > i1:
            p1 = cycle[i1 : i2 + 1]
            p2 = (cycle[i2:] + cycle[: i1 + 1])[::-1]
        else:
            p1 = cycle[i1:] + cycle[: i2 + 1]
            p2 = cycle[i2 : i1 + 1][::-1]
        paths = [p1, p2, p3]
        theta = set()
        for p in paths:
            theta.update(g.edge_index(x, y) for x, y in zip(p, p[1:]))
        vstar = set(p1) | set(p2) | set(p3)

        out: dict[int, int] = {}
        chords = []
        for ei in range(g.edge_count):
            if not self.active[ei] or ei in theta:
                continue
            u, v = g.edges[ei]
            if green[ei]:
                raise _Stuck(f"GREEN edge {ei} outside the three paths")
            if u in vstar and v in vstar:
                chords.append(ei)
                continue
            out[ei] = v if u in vstar else u if v in vstar else v
        if not chords:
            out.update(self._orient_theta(paths))
            self.steps.append("theta")
        else:
            # Only reachable at girth 4, where a chord of a cycle of length
            # <= 2n+1 can close a 4-cycle.  The region holds at most 3 GREEN
            # edges, so an exhaustive head assignment is cheap.
            region = sorted(theta) + chords
            heads = _head_search(g, green, region)
            if heads is None:
                raise _Stuck("three paths with chords admit no safe orientation")
            out.update(heads)
            self.steps.append("theta-search")
        live = {x for ei in range(g.edge_count) if self.active[ei] for x in g.edges[ei]}
        self._commit(out, live)

    def _orient_theta(self, paths: list[list[int]]) -> dict[int, int]:
        g, green = self.g, self.green
        pedges = [[g.edge_index(x, y) for x, y in zip(p, p[1:])] for p in paths]
        all_edges = [ei for pe in pedges for ei in pe]

        # Two consecutive RED edges on one path: point both at their middle
        # vertex, the rest is a cycle with two dangling paths.
        for p, pe in zip(paths, pedges):
            for j in range(len(pe) - 1):
                if not green[pe[j]] and not green[pe[j + 1]]:
                    sink = p[j + 1]
                    rest = [ei for ei in all_edges if ei not in (pe[j], pe[j + 1])]
                    out = _orient_pseudoforest(g, rest, sink)
                    out[pe[j]] = out[pe[j + 1]] = sink
                    return out

        # Two paths leaving the same end with RED edges: point both at that
        # end, the rest is a tree rooted there.
        for end, pick in ((paths[0][0], 0), (paths[0][-1], -1)):
            reds = [pe[pick] for pe in pedges if not green[pe[pick]]]
            if len(reds) >= 2:
                e1, e2 = reds[:2]
                rest = [ei for ei in all_edges if ei not in (e1, e2)]
                out = _orient_pseudoforest(g, rest, end)
                out[e1] = out[e2] = end
                return out
        raise _Stuck("three-path configuration admits none of the known orientations")

    # -- driver -----------------------------------------------------------

    def run(self) -> Orientation:
        v0 = 0
        n = self.g.vertex_count
        while True:
            while v0 < n and self.live_deg[v0] == 0:
                v0 += 1
            if v0 >= n:
                break
            try:
                self.step(v0)
            except _Stuck as exc:
                self._fallback(str(exc))
                break
        return Orientation.from_heads(
            self.g, self.heads, method=self.method, steps=tuple(self.steps)
        )

    def _fallback(self, reason: str) -> None:
        rest = [ei for ei in range(self.g.edge_count) if self.active[ei]]
        log.warning(
            "safe_orient: constructive step failed (%s); exhaustive search over %d edges",
            reason,
            len(rest),
        )
        heads = _head_search(self.g, self.green, rest)
        if heads is None:
            raise OrientationFailure(f"no safe orientation of the remaining subgraph ({reason})")
        for ei, hd in heads.items():
            self.heads[ei] = hd
            self.active[ei] = False
        self.steps.append("brute-force")
        self.method = "brute-force"


HEAD_SEARCH_CAP = 22


def _head_search(g: Graph, green, edges: Sequence[int]) -> dict[int, int] | None:
    """Exhaustive search over the heads of the GREEN edges in ``edges``.

    An orientation is safe exactly when the GREEN edges get pairwise
    distinct heads and no RED edge joins two of those heads: the RED edges
    touching a head then point away from it and all other RED edges are
    free.  Costs ``2^(#GREEN)`` rather than ``2^(#edges)``.
    """
    greens = [ei for ei in edges if green[ei]]
    reds = [ei for ei in edges if not green[ei]]
    if len(greens) > HEAD_SEARCH_CAP:
        raise InfeasibleCheck(f"{len(greens)} GREEN edges exceed head search cap")
    red_pairs = [g.edges[ei] for ei in reds]
    for choice in product((0, 1), repeat=len(greens)):
        heads = [g.edges[ei][c] for ei, c in zip(greens, choice)]
        tset = set(heads)
        if len(tset) != len(heads):
            continue
        if any(u in tset and v in tset for u, v in red_pairs):
            continue
        out = dict(zip(greens, heads))
        for ei, (u, v) in zip(reds, red_pairs):
            out[ei] = v if u in tset else u if v in tset else v
        return out
    return None


def _root_path(f: _Forest, v: int) -> list[int]:
    path = [v]
    while f.parent[path[-1]] >= 0:
        path.append(f.parent[path[-1]])
    return path


def _orient_pseudoforest(g: Graph, edges: list[int], root: int) -> dict[int, int]:
    """Give every vertex in-degree at most one on a graph whose components
    have at most one cycle; trees are rooted at ``root`` when they contain
    it, otherwise at their smallest vertex."""
    nbrs: dict[int, list[tuple[int, int]]] = {}
    for ei in edges:
        u, v = g.edges[ei]
        nbrs.setdefault(u, []).append((v, ei))
        nbrs.setdefault(v, []).append((u, ei))
    out: dict[int, int] = {}
    seen: set[int] = set()
    for start in sorted(nbrs):
        if start in seen:
            continue
        comp, comp_edges = [], set()
        stack = [start]
        seen.add(start)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y, ei in nbrs[x]:
                comp_edges.add(ei)
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(comp_edges) == len(comp) - 1:
            sources = [root if root in comp else min(comp)]
        elif len(comp_edges) == len(comp):
            if root in comp:
                raise _Stuck("sink lies on the cycle of a unicyclic remainder")
            sources = _orient_unique_cycle(nbrs, comp, out)
        else:
            raise _Stuck("remainder has a component with two cycles")
        reached = set(sources)
        queue = deque(sources)
        while queue:
            x = queue.popleft()
            for y, ei in nbrs[x]:
                if ei in out:
                    continue
                out[ei] = y
                if y in reached:
                    raise _Stuck("pseudoforest orientation revisited a vertex")
                reached.add(y)
                queue.append(y)
    return out


def _orient_unique_cycle(nbrs, comp, out) -> list[int]:
    deg = {x: len(nbrs[x]) for x in comp}
    leaves = deque(x for x in comp if deg[x] == 1)
    gone = set()
    while leaves:
        x = leaves.popleft()
        gone.add(x)
        for y, _ in nbrs[x]:
            if y not in gone:
                deg[y] -= 1
                if deg[y] == 1:
                    leaves.append(y)
    on_cycle = [x for x in comp if x not in gone]
    cyc_set = set(on_cycle)
    start = min(on_cycle)
    prev, x = None, start
    while True:
        step = next((y, ei) for y, ei in nbrs[x] if y in cyc_set and ei != prev and ei not in out)
        y, ei = step
        out[ei] = y
        prev, x = ei, y
        if x == start:
            break
    return on_cycle


def safe_orient(h: ColoredGraph) -> Orientation:
    """Safe orientation of a graph with even girth and few GREEN edges.

    Requires even girth ``g >= 4`` (or an acyclic graph) and at most
    ``floor(3g/4)`` GREEN edges; raises :class:`PreconditionError`
    otherwise.
    """
    g = h.graph
    gi = g.girth
    if gi != INFINITE:
        if gi % 2:
            raise PreconditionError(f"girth {gi} is odd")
        if h.n_green > (3 * gi) // 4:
            raise PreconditionError(
                f"{h.n_green} GREEN edges exceed floor(3*{gi}/4) = {(3 * gi) // 4}"
            )
    o = _Orienter(h).run()
    if not is_safe(h, o):
        raise OrientationFailure("internal error: produced orientation is not safe")
    return o
