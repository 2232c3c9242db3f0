"""
Static membership schemes: construction (store) and querying.

Every scheme stores a set ``S`` of at most ``n`` elements of the universe
``[m] = {0, ..., m-1}`` in a :class:`~bitprobe.memory.BitStore` and answers
``x in S`` with a fixed number of probes and no error.

=======  ==========================================  =====  ==============
id       layout                                      probes class
=======  ==========================================  =====  ==============
``ca``   edge bits A, vertex slices B (N x K)        2      adaptive
``qa``   edge bits A, vertex slices B0, B1           2      adaptive
``qn22`` X1, X2, Y1, Y2 over the two side sets       2      non-adaptive
``qn23`` X1, X2, Y1, Y3, Z2, Z3 over three sides     3      non-adaptive
``appx`` edge bits A, vertex slices B                2      non-adaptive
``cv``   characteristic vector                       1      non-adaptive
=======  ==========================================  =====  ==============

The graph schemes pack ``x`` as the pair ``(edge x // K, slice x % K)``.
Queries run against a prober (see :mod:`bitprobe.memory`), and each scheme
also has a vectorised ``sweep`` answering all ``m`` queries at once without
probe accounting; the two agree by construction and are cross-checked in
the tests.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    CapacityError,
    ConfigurationError,
    DomainError,
    InvalidParameter,
    SubstrateError,
)
from .forests import grow_dense_core, is_forest, two_forest_partition
from .graphs import (
    INFINITE,
    Graph,
    complete_bipartite,
    next_prime,
    projective_plane_incidence,
    prune_to_girth,
    random_bipartite_graph,
    wenger_graph,
)
from .memory import (
    ADAPTIVE,
    NON_ADAPTIVE,
    AuditVerdict,
    BitStore,
    ProbeTranscript,
    ReplayProber,
    StoreProber,
    audit_transcript,
)
from .orientation import ColoredGraph, Orientation, safe_orient

__all__ = [
    "SCHEME_IDS",
    "ElementCode",
    "SchemeInstance",
    "g_min",
    "isqrt_ceil",
    "icbrt_ceil",
    "select_graph",
    "solve_parities",
    "classical_adaptive_store",
    "classical_adaptive_query",
    "quantum_adaptive_store",
    "quantum_adaptive_query",
    "qn22_store",
    "qn22_query",
    "qn23_store",
    "qn23_query",
    "appendix_nonadaptive_store",
    "appendix_nonadaptive_query",
    "charvec_store",
    "charvec_query",
    "default_graph",
    "build",
    "replay",
    "query",
    "sweep",
    "audit_query",
    "save_instance",
    "load_instance",
]

SCHEME_IDS = ("ca", "qa", "qn22", "qn23", "appx", "cv")
PROBES = {"ca": 2, "qa": 2, "qn22": 2, "qn23": 3, "appx": 2, "cv": 1}
PROBE_CLASS = {
    "ca": ADAPTIVE,
    "qa": ADAPTIVE,
    "qn22": NON_ADAPTIVE,
    "qn23": NON_ADAPTIVE,
    "appx": NON_ADAPTIVE,
    "cv": NON_ADAPTIVE,
}


# ---------------------------------------------------------------------------
# small arithmetic helpers
# ---------------------------------------------------------------------------


def g_min(n: int) -> int:
    """Smallest even girth g with ``n <= floor(3g/4)``."""
    if n < 2:
        raise InvalidParameter(f"g_min needs n >= 2, got {n}")
    c = -(-n // 3)
    return 4 * c - 2 if n % 3 == 1 else 4 * c


def isqrt_ceil(m: int) -> int:
    r = math.isqrt(m)
    return r if r * r == m else r + 1


def icbrt_ceil(m: int) -> int:
    r = round(m ** (1 / 3))
    while r**3 < m:
        r += 1
    while r > 0 and (r - 1) ** 3 >= m:
        r -= 1
    return r


@dataclass(frozen=True)
class ElementCode:
    """Packing of ``[m]`` into ``edges x [K]``: ``x <-> (x // K, x % K)``."""

    M: int
    K: int
    m: int

    def __post_init__(self):
        if self.K < 1:
            raise ConfigurationError(f"K must be positive, got {self.K}")
        if self.M * self.K < self.m:
            raise ConfigurationError(f"M*K = {self.M}*{self.K} < m = {self.m}")

    def decode(self, x: int) -> tuple[int, int]:
        return divmod(x, self.K)

    def encode(self, edge: int, slice_: int) -> int:
        x = edge * self.K + slice_
        if not (0 <= slice_ < self.K and 0 <= x < self.m):
            raise DomainError(f"(edge {edge}, slice {slice_}) is not a universe element")
        return x


@dataclass
class SchemeInstance:
    scheme_id: str
    m: int
    n: int
    store: BitStore
    graph: Graph | None = None
    K: int | None = None
    side: int | None = None
    info: dict = field(default_factory=dict)

    @property
    def t(self) -> int:
        return PROBES[self.scheme_id]

    @property
    def probe_class(self) -> str:
        return PROBE_CLASS[self.scheme_id]

    @property
    def space_bits(self) -> int:
        return self.store.total_bits

    @property
    def code(self) -> ElementCode:
        return ElementCode(self.graph.edge_count, self.K, self.m)

    def formula_bits(self) -> int:
        """Closed-form space for this scheme's parameters."""
        sid = self.scheme_id
        if sid in ("ca", "appx"):
            return self.graph.M + self.graph.N * self.K
        if sid == "qa":
            return self.graph.M + 2 * self.graph.N * self.K
        if sid == "qn22":
            return 4 * self.side
        if sid == "qn23":
            return 6 * self.side
        return self.m

    def query(self, x: int, transcript: ProbeTranscript | None = None) -> bool:
        return query(self, x, transcript)

    def sweep(self) -> np.ndarray:
        return sweep(self)


def _check_set(m: int, S: Iterable[int], n: int | None) -> tuple[list[int], int]:
    if m < 1:
        raise InvalidParameter(f"universe size must be positive, got {m}")
    elems = sorted(set(int(x) for x in S))
    bad = [x for x in elems if not 0 <= x < m]
    if bad:
        raise DomainError(f"elements outside [0, {m}): {bad[:5]}")
    if n is None:
        n = len(elems)
    if len(elems) > n:
        raise CapacityError(f"|S| = {len(elems)} exceeds capacity n = {n}")
    return elems, n


def _check_x(m: int, x: int) -> int:
    if not (isinstance(x, (int, np.integer)) and 0 <= x < m):
        raise DomainError(f"query {x!r} is outside the universe [0, {m})")
    return int(x)


def _graph_code(graph: Graph, K: int | None, m: int) -> ElementCode:
    if graph.edge_count == 0:
        raise ConfigurationError("graph has no edges")
    if K is None:
        K = -(-m // graph.edge_count)
    return ElementCode(graph.edge_count, K, m)


# ---------------------------------------------------------------------------
# parity constraint solving
# ---------------------------------------------------------------------------


def solve_parities(
    graph: Graph, K: int, edges: Iterable[int], targets: dict[int, np.ndarray]
) -> np.ndarray:
    """Vertex labels ``B`` (N x K bits) with ``B[u] ^ B[v] = targets[e]`` on ``edges``.

    Edges missing from ``targets`` require parity 0.  Each component of the
    constraint graph is rooted at its lowest vertex, labelled all-zero, and
    labels are propagated breadth-first; every constraint is checked at the
    end and an inconsistent system raises :class:`SubstrateError`.
    """
    edges = list(edges)
    N = graph.vertex_count
    B = np.zeros((N, K), dtype=np.uint8)
    zero = np.zeros(K, dtype=np.uint8)
    nbrs: dict[int, list[tuple[int, int]]] = {}
    for e in edges:
        u, v = graph.edges[e]
        nbrs.setdefault(u, []).append((v, e))
        nbrs.setdefault(v, []).append((u, e))
    seen = set()
    for root in sorted(nbrs):
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, e in nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    B[y] = B[x] ^ targets.get(e, zero)
                    queue.append(y)
    for e in edges:
        u, v = graph.edges[e]
        if not np.array_equal(B[u] ^ B[v], targets.get(e, zero)):
            raise SubstrateError(f"parity constraints are inconsistent around edge {graph.edges[e]}")
    return B


def _slice_targets(code: ElementCode, elems: Sequence[int]) -> dict[int, np.ndarray]:
    targets: dict[int, np.ndarray] = {}
    for x in elems:
        e, i = code.decode(x)
        targets.setdefault(e, np.zeros(code.K, dtype=np.uint8))[i] = 1
    return targets


# ---------------------------------------------------------------------------
# classical adaptive
# ---------------------------------------------------------------------------


def classical_adaptive_store(
    graph: Graph,
    K: int | None,
    m: int,
    S: Iterable[int],
    n: int | None = None,
    orienter: Callable[[ColoredGraph], Orientation] = safe_orient,
) -> SchemeInstance:
    """Edge bits hold a safe orientation; each element's bit sits at its edge's head."""
    elems, n = _check_set(m, S, n)
    code = _graph_code(graph, K, m)
    gi = graph.girth
    if gi != INFINITE:
        if gi % 2:
            raise ConfigurationError(f"graph girth {gi} is odd")
        if n > (3 * gi) // 4:
            raise ConfigurationError(
                f"capacity n = {n} needs girth >= {g_min(n)}, graph has girth {gi}"
            )
    green = frozenset(code.decode(x)[0] for x in elems)
    o = orienter(ColoredGraph(graph, green))
    store = BitStore([("A", graph.M), ("B", graph.N * code.K)])
    store.region("A")[:] = o.bits
    B = store.region("B")
    for x in elems:
        e, i = code.decode(x)
        B[o.head(graph, e) * code.K + i] = 1
    store.freeze()
    return SchemeInstance(
        "ca", m, n, store, graph, code.K, info={"orientation": o.method, "green": len(green)}
    )


def _ca_probe(inst: SchemeInstance, x: int, probe) -> bool:
    e, i = divmod(x, inst.K)
    a = probe.read(("A", e))
    w = inst.graph.edges[e][a]
    return bool(probe.read(("B", w * inst.K + i)))


def _ca_sweep(inst: SchemeInstance) -> np.ndarray:
    e, i = np.divmod(np.arange(inst.m), inst.K)
    A = inst.store.region("A")
    B = inst.store.region("B").reshape(inst.graph.N, inst.K)
    heads = inst.graph.endpoints[e, A[e]]
    return B[heads, i].astype(bool)


def classical_adaptive_query(
    inst: SchemeInstance, x: int, transcript: ProbeTranscript | None = None
) -> bool:
    return _ca_probe(inst, _check_x(inst.m, x), StoreProber(inst.store, transcript))


# ---------------------------------------------------------------------------
# quantum adaptive
# ---------------------------------------------------------------------------


def quantum_adaptive_store(
    graph: Graph,
    K: int | None,
    m: int,
    S: Iterable[int],
    n: int | None = None,
) -> SchemeInstance:
    """Two parity tables selected by an edge bit.

    The GREEN endpoints are grown into a dense core ``D``; the edges inside
    ``D`` split into forests F1 and F2.  Edges of F1 and edges leaving ``D``
    select table B0, all other edges select B1, and each table is solved so
    that every selecting edge carries the parity of its stored slices.
    Raises :class:`SubstrateError` when the graph is not sparse enough.
    """
    elems, n = _check_set(m, S, n)
    code = _graph_code(graph, K, m)
    targets = _slice_targets(code, elems)
    seeds = {v for e in targets for v in graph.edges[e]}
    core = grow_dense_core(graph, seeds, max(n, 1))
    part = two_forest_partition(graph, core.vertices)
    A = np.ones(graph.M, dtype=np.uint8)
    for e, (u, v) in enumerate(graph.edges):
        if e in part.forest1 or ((u in core.vertices) != (v in core.vertices)):
            A[e] = 0
    sel0 = np.flatnonzero(A == 0).tolist()
    sel1 = np.flatnonzero(A == 1).tolist()
    if not is_forest(graph, sel0):
        raise SubstrateError("edges selecting B0 contain a cycle")
    B0 = solve_parities(graph, code.K, sel0, targets)
    B1 = solve_parities(graph, code.K, sel1, targets)
    store = BitStore([("A", graph.M), ("B0", graph.N * code.K), ("B1", graph.N * code.K)])
    store.region("A")[:] = A
    store.region("B0")[:] = B0.ravel()
    store.region("B1")[:] = B1.ravel()
    store.freeze()
    return SchemeInstance(
        "qa", m, n, store, graph, code.K,
        info={"core_size": len(core.vertices), "core_added": len(core.growth_trace)},
    )


def _qa_probe(inst: SchemeInstance, x: int, probe) -> bool:
    e, i = divmod(x, inst.K)
    u, v = inst.graph.edges[e]
    arr = "B1" if probe.read(("A", e)) else "B0"
    return bool(probe.xor((arr, u * inst.K + i), (arr, v * inst.K + i)))


def _qa_sweep(inst: SchemeInstance) -> np.ndarray:
    e, i = np.divmod(np.arange(inst.m), inst.K)
    N, K = inst.graph.N, inst.K
    A = inst.store.region("A")[e]
    ends = inst.graph.endpoints[e]
    B0 = inst.store.region("B0").reshape(N, K)
    B1 = inst.store.region("B1").reshape(N, K)
    p0 = B0[ends[:, 0], i] ^ B0[ends[:, 1], i]
    p1 = B1[ends[:, 0], i] ^ B1[ends[:, 1], i]
    return np.where(A == 0, p0, p1).astype(bool)


def quantum_adaptive_query(
    inst: SchemeInstance, x: int, transcript: ProbeTranscript | None = None
) -> bool:
    return _qa_probe(inst, _check_x(inst.m, x), StoreProber(inst.store, transcript))


# ---------------------------------------------------------------------------
# non-adaptive algebraic schemes
# ---------------------------------------------------------------------------

# Each factor of the query polynomial is the parity of two arrays, one per
# coordinate of a pair of coordinates.  Array names by (pair, coordinate):
_QN22_NAMES = {(0, 0): "X1", (0, 1): "Y1", (1, 0): "X2", (1, 1): "Y2"}
_QN23_PAIRS = ((0, 1), (0, 2), (1, 2))
_QN23_NAMES = {
    ((0, 1), 0): "X1",
    ((0, 1), 1): "Y1",
    ((0, 2), 0): "X2",
    ((0, 2), 2): "Z2",
    ((1, 2), 1): "Y3",
    ((1, 2), 2): "Z3",
}


def _digits(x: int, side: int, arity: int) -> tuple[int, ...]:
    out = []
    for _ in range(arity):
        x, d = divmod(x, side)
        out.append(d)
    return tuple(reversed(out))


def _alg_store(scheme_id: str, m: int, S, side: int, layout, fill) -> SchemeInstance:
    elems, n = _check_set(m, S, 2)
    store = BitStore([(name, side) for name in layout])
    fill(store, elems)
    store.freeze()
    return SchemeInstance(scheme_id, m, n, store, side=side)


def qn22_store(m: int, S: Iterable[int]) -> SchemeInstance:
    """Degree-two scheme for ``|S| <= 2`` on a ``side x side`` grid, ``side = ceil(sqrt m)``."""
    side = isqrt_ceil(m)

    def fill(store: BitStore, elems):
        def flip(name, idx):
            store.region(name)[idx] ^= 1

        pts = [_digits(x, side, 2) for x in elems]
        if len(pts) == 1:
            (a, b), = pts
            flip("X1", a)
            flip("Y2", b)
        elif len(pts) == 2:
            (a, b), (a2, b2) = pts
            if b == b2:
                flip("X1", a), flip("X1", a2), flip("Y2", b)
            elif a == a2:
                flip("X1", a), flip("Y2", b), flip("Y2", b2)
            else:
                flip("X1", a), flip("Y1", b2), flip("X2", a2), flip("Y2", b)

    return _alg_store("qn22", m, S, side, ("X1", "X2", "Y1", "Y2"), fill)


def _qn23_assign(pts: list[tuple[int, int, int]]) -> list[tuple[tuple[int, int], int, tuple[int, ...], int]]:
    """Assignments ``(pair, coordinate, delta points, constant)`` for the stored points.

    The query polynomial is invariant under permuting coordinates together
    with the arrays, so each case is written for a canonical role order and
    mapped onto the actual coordinates.
    """
    if not pts:
        return []
    p = pts[0]
    q = pts[-1]
    agree = [k for k in range(3) if p[k] == q[k]]
    if len(agree) == 3:
        # single point: delta_a(x) delta_c(z) delta_b(y)
        roles, spec = (0, 1, 2), [((0, 1), 0, "p", 0), ((0, 2), 2, "p", 0), ((1, 2), 1, "p", 0)]
    elif len(agree) == 2:
        d = next(k for k in range(3) if k not in agree)
        roles = (agree[0], agree[1], d)
        spec = [((0, 1), 0, "p", 0), ((0, 2), 2, "pq", 0), ((1, 2), 1, "p", 0)]
    elif len(agree) == 1:
        r0 = agree[0]
        roles = (r0,) + tuple(k for k in range(3) if k != r0)
        spec = [
            ((0, 1), 0, "p", 1), ((0, 1), 1, "pq", 0),
            ((0, 2), 0, "p", 1), ((0, 2), 2, "pq", 0),
            ((1, 2), 1, "p", 0), ((1, 2), 2, "q", 0),
        ]
    else:
        roles = (0, 1, 2)
        spec = [
            ((0, 1), 0, "p", 0), ((0, 1), 1, "q", 0),
            ((0, 2), 0, "q", 0), ((0, 2), 2, "p", 0),
            ((1, 2), 1, "p", 0), ((1, 2), 2, "q", 0),
        ]
    out = []
    for (r, s), role, which, const in spec:
        coord = roles[role]
        pair = tuple(sorted((roles[r], roles[s])))
        vals = tuple({"p": p, "q": q}[w][coord] for w in which)
        out.append((pair, coord, vals, const))
    return out


def qn23_store(m: int, S: Iterable[int]) -> SchemeInstance:
    """Degree-three scheme for ``|S| <= 2`` on a cube of side ``ceil(m^(1/3))``."""
    side = icbrt_ceil(m)

    def fill(store: BitStore, elems):
        pts = [_digits(x, side, 3) for x in elems]
        for pair, coord, vals, const in _qn23_assign(pts):
            arr = store.region(_QN23_NAMES[(pair, coord)])
            arr ^= const
            for v in vals:
                arr[v] ^= 1

    return _alg_store("qn23", m, S, side, ("X1", "X2", "Y1", "Y3", "Z2", "Z3"), fill)


def _qn22_probe(inst: SchemeInstance, x: int, probe) -> bool:
    a, b = divmod(x, inst.side)
    p1 = probe.xor(("X1", a), ("Y1", b))
    p2 = probe.xor(("X2", a), ("Y2", b))
    return bool(p1 & p2)


def _qn23_probe(inst: SchemeInstance, x: int, probe) -> bool:
    c = _digits(x, inst.side, 3)
    bits = [
        probe.xor((_QN23_NAMES[(pr, pr[0])], c[pr[0]]), (_QN23_NAMES[(pr, pr[1])], c[pr[1]]))
        for pr in _QN23_PAIRS
    ]
    return bool(bits[0] & bits[1] & bits[2])


def _qn22_sweep(inst: SchemeInstance) -> np.ndarray:
    a, b = np.divmod(np.arange(inst.m), inst.side)
    r = inst.store.region
    return ((r("X1")[a] ^ r("Y1")[b]) & (r("X2")[a] ^ r("Y2")[b])).astype(bool)


def _qn23_sweep(inst: SchemeInstance) -> np.ndarray:
    s = inst.side
    xs = np.arange(inst.m)
    c = (xs // (s * s), (xs // s) % s, xs % s)
    r = inst.store.region
    out = np.ones(inst.m, dtype=np.uint8)
    for i, j in _QN23_PAIRS:
        out &= r(_QN23_NAMES[((i, j), i)])[c[i]] ^ r(_QN23_NAMES[((i, j), j)])[c[j]]
    return out.astype(bool)


def qn22_query(inst: SchemeInstance, x: int, transcript: ProbeTranscript | None = None) -> bool:
    return _qn22_probe(inst, _check_x(inst.m, x), StoreProber(inst.store, transcript))


def qn23_query(inst: SchemeInstance, x: int, transcript: ProbeTranscript | None = None) -> bool:
    return _qn23_probe(inst, _check_x(inst.m, x), StoreProber(inst.store, transcript))


# ---------------------------------------------------------------------------
# non-adaptive graph scheme
# ---------------------------------------------------------------------------


def appendix_nonadaptive_store(
    graph: Graph, K: int | None, m: int, S: Iterable[int], n: int | None = None
) -> SchemeInstance:
    """``A`` marks the GREEN edges; ``B`` carries the stored slices as edge parities.

    Needs ``n`` below the girth so that the GREEN edges form a forest.
    """
    elems, n = _check_set(m, S, n)
    code = _graph_code(graph, K, m)
    if n >= graph.girth:
        raise ConfigurationError(f"capacity n = {n} must be below the girth {graph.girth}")
    targets = _slice_targets(code, elems)
    B = solve_parities(graph, code.K, sorted(targets), targets)
    store = BitStore([("A", graph.M), ("B", graph.N * code.K)])
    store.region("A")[sorted(targets)] = 1
    store.region("B")[:] = B.ravel()
    store.freeze()
    return SchemeInstance("appx", m, n, store, graph, code.K)


def _appx_probe(inst: SchemeInstance, x: int, probe) -> bool:
    e, i = divmod(x, inst.K)
    u, v = inst.graph.edges[e]
    a = probe.read(("A", e))
    p = probe.xor(("B", u * inst.K + i), ("B", v * inst.K + i))
    return bool(a & p)


def _appx_sweep(inst: SchemeInstance) -> np.ndarray:
    e, i = np.divmod(np.arange(inst.m), inst.K)
    B = inst.store.region("B").reshape(inst.graph.N, inst.K)
    ends = inst.graph.endpoints[e]
    return (inst.store.region("A")[e] & (B[ends[:, 0], i] ^ B[ends[:, 1], i])).astype(bool)


def appendix_nonadaptive_query(
    inst: SchemeInstance, x: int, transcript: ProbeTranscript | None = None
) -> bool:
    return _appx_probe(inst, _check_x(inst.m, x), StoreProber(inst.store, transcript))


# ---------------------------------------------------------------------------
# characteristic vector
# ---------------------------------------------------------------------------


def charvec_store(m: int, S: Iterable[int]) -> SchemeInstance:
    elems, n = _check_set(m, S, None)
    store = BitStore([("C", m)])
    store.region("C")[elems] = 1
    store.freeze()
    return SchemeInstance("cv", m, max(n, m), store)


def _cv_probe(inst: SchemeInstance, x: int, probe) -> bool:
    return bool(probe.read(("C", x)))


def _cv_sweep(inst: SchemeInstance) -> np.ndarray:
    return inst.store.region("C").astype(bool)


def charvec_query(inst: SchemeInstance, x: int, transcript: ProbeTranscript | None = None) -> bool:
    return _cv_probe(inst, _check_x(inst.m, x), StoreProber(inst.store, transcript))


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

_PROBE_FN = {
    "ca": _ca_probe,
    "qa": _qa_probe,
    "qn22": _qn22_probe,
    "qn23": _qn23_probe,
    "appx": _appx_probe,
    "cv": _cv_probe,
}
_SWEEP_FN = {
    "ca": _ca_sweep,
    "qa": _qa_sweep,
    "qn22": _qn22_sweep,
    "qn23": _qn23_sweep,
    "appx": _appx_sweep,
    "cv": _cv_sweep,
}


def query(inst: SchemeInstance, x: int, transcript: ProbeTranscript | None = None) -> bool:
    x = _check_x(inst.m, x)
    return _PROBE_FN[inst.scheme_id](inst, x, StoreProber(inst.store, transcript))


def sweep(inst: SchemeInstance) -> np.ndarray:
    """Answers to every query ``0..m-1`` as a boolean array."""
    return _SWEEP_FN[inst.scheme_id](inst)


def replay(inst: SchemeInstance, x: int, results: Sequence[int]) -> ProbeTranscript:
    """Rerun the query for ``x`` with injected probe results."""
    prober = ReplayProber(results, inst.probe_class)
    _PROBE_FN[inst.scheme_id](inst, _check_x(inst.m, x), prober)
    return prober.transcript


def audit_query(inst: SchemeInstance, x: int) -> AuditVerdict:
    """Probe-budget and adaptivity audit of one query against the scheme's class."""
    t = ProbeTranscript(inst.probe_class)
    query(inst, x, t)
    return audit_transcript(t, inst.t, inst.probe_class, lambda r: replay(inst, x, r))


# ---------------------------------------------------------------------------
# graph selection and one-call construction
# ---------------------------------------------------------------------------


def _tau(girth: int) -> float:
    return 1.0 / (girth // 2 - 1)


def select_graph(m: int, n: int, seed: int = 0, girth: int | None = None) -> Graph:
    """Graph from the family matching the needed girth, sized so that ``N ~ m^(1/(1+2 tau))``.

    The girth defaults to ``g_min(n)``; ``tau`` is the density exponent of
    the family (``M ~ N^(1+tau)``).
    """
    g = girth if girth is not None else g_min(max(n, 2))
    target_n = m ** (1 / (1 + 2 * _tau(g)))
    if g <= 4:
        return complete_bipartite(max(2, round(target_n / 2)))
    if g <= 6:
        q = 2
        while 2 * (q * q + q + 1) < target_n:
            q = next_prime(q + 1)
        return projective_plane_incidence(q)
    if g <= 8:
        p = 2
        while 2 * p**3 < target_n:
            p = next_prime(p + 1)
        return wenger_graph(3, p)
    a = max(4, math.ceil(target_n / 2))
    deg = max(2.0, a ** _tau(g))
    base = random_bipartite_graph(a, a, min(1.0, deg / a), seed)
    return prune_to_girth(base, g + (g % 2), seed)


def default_graph(scheme_id: str, m: int, n: int, seed: int = 0) -> Graph | None:
    """Graph used by :func:`build` when none is supplied (None for gridded schemes).

    ``ca`` takes the family of girth ``g_min(n)``; ``appx`` the smallest
    even girth above ``n``; ``qa`` a bipartite graph of girth above ``4n``,
    in which any ``4n`` vertices induce a forest, so dense-core growth from
    the GREEN endpoints never adds a vertex.
    """
    if scheme_id == "ca":
        return select_graph(m, n, seed)
    if scheme_id == "appx":
        return select_graph(m, n, seed, girth=max(4, n + 1 + (n + 1) % 2))
    if scheme_id == "qa":
        return select_graph(m, n, seed, girth=4 * max(n, 1) + 2)
    if scheme_id in ("qn22", "qn23", "cv"):
        return None
    raise InvalidParameter(f"unknown scheme {scheme_id!r}; expected one of {SCHEME_IDS}")


def build(
    scheme_id: str,
    m: int,
    S: Iterable[int],
    n: int | None = None,
    graph: Graph | None = None,
    K: int | None = None,
    seed: int = 0,
    orienter: Callable[[ColoredGraph], Orientation] = safe_orient,
) -> SchemeInstance:
    """Construct any scheme by id, choosing a graph with :func:`default_graph` when none is given."""
    S = list(S)
    if scheme_id == "cv":
        return charvec_store(m, S)
    if scheme_id == "qn22":
        return qn22_store(m, S)
    if scheme_id == "qn23":
        return qn23_store(m, S)
    n = len(set(S)) if n is None else n
    if graph is None:
        graph = default_graph(scheme_id, m, n, seed)
    if scheme_id == "ca":
        return classical_adaptive_store(graph, K, m, S, n, orienter)
    if scheme_id == "appx":
        return appendix_nonadaptive_store(graph, K, m, S, n)
    return quantum_adaptive_store(graph, K, m, S, n)


# ---------------------------------------------------------------------------
# state files: one JSON header line, then the packed bits
# ---------------------------------------------------------------------------


def save_instance(inst: SchemeInstance, path) -> None:
    header = {
        "scheme": inst.scheme_id,
        "m": inst.m,
        "n": inst.n,
        "t": inst.t,
        "probe_class": inst.probe_class,
        "K": inst.K,
        "side": inst.side,
        "regions": [[name, length] for name, length in inst.store.layout],
        "graph": None
        if inst.graph is None
        else {"N": inst.graph.N, "edges": [list(e) for e in inst.graph.edges]},
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, separators=(",", ":")).encode() + b"\n")
        fh.write(inst.store.to_bytes())


def load_instance(path) -> SchemeInstance:
    raw = Path(path).read_bytes()
    cut = raw.index(b"\n")
    header = json.loads(raw[:cut])
    store = BitStore.from_bytes([tuple(r) for r in header["regions"]], raw[cut + 1 :])
    g = header["graph"]
    graph = None if g is None else Graph(g["N"], tuple(tuple(e) for e in g["edges"]))
    if header["scheme"] not in SCHEME_IDS:
        raise ConfigurationError(f"unknown scheme {header['scheme']!r} in state file")
    return SchemeInstance(
        header["scheme"], header["m"], header["n"], store, graph, header["K"], header["side"]
    )
