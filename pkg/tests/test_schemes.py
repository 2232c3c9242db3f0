import itertools
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bitprobe.errors import CapacityError, ConfigurationError, DomainError, InvalidParameter, SubstrateError
from bitprobe.forests import is_forest
from bitprobe.graphs import (
    Graph,
    complete_bipartite,
    gnp_random_graph,
    projective_plane_incidence,
    random_locally_sparse,
    wenger_graph,
)
from bitprobe.memory import ADAPTIVE, CLASSICAL_READ, NON_ADAPTIVE, QUANTUM_XOR, ProbeTranscript
from bitprobe.schemes import (
    SCHEME_IDS,
    ElementCode,
    appendix_nonadaptive_query,
    appendix_nonadaptive_store,
    audit_query,
    build,
    charvec_query,
    charvec_store,
    classical_adaptive_query,
    classical_adaptive_store,
    default_graph,
    g_min,
    icbrt_ceil,
    isqrt_ceil,
    load_instance,
    qn22_query,
    qn22_store,
    qn23_query,
    qn23_store,
    quantum_adaptive_query,
    quantum_adaptive_store,
    save_instance,
    select_graph,
    solve_parities,
)

K44 = complete_bipartite(4)


def indicator(m, S):
    v = np.zeros(m, dtype=bool)
    v[list(S)] = True
    return v


def answers_by_query(inst):
    return np.array([inst.query(x) for x in range(inst.m)])


def delta(side, *points):
    v = np.zeros(side, dtype=np.uint8)
    for p in points:
        v[p] ^= 1
    return v


# -- helpers -------------------------------------------------------------------


def test_g_min_table():
    assert [g_min(n) for n in range(2, 10)] == [4, 4, 6, 8, 8, 10, 12, 12]


@pytest.mark.parametrize("n", range(2, 40))
def test_g_min_is_smallest_even_girth(n):
    g = g_min(n)
    assert g % 2 == 0 and n <= 3 * g // 4 and n > 3 * (g - 2) // 4


def test_g_min_rejects_small():
    with pytest.raises(InvalidParameter):
        g_min(1)


@given(st.integers(1, 10**7))
def test_integer_roots(m):
    s, c = isqrt_ceil(m), icbrt_ceil(m)
    assert (s - 1) ** 2 < m <= s * s
    assert (c - 1) ** 3 < m <= c**3


@given(st.integers(1, 50), st.integers(1, 20), st.data())
def test_element_code_bijection(M, K, data):
    m = data.draw(st.integers(1, M * K))
    code = ElementCode(M, K, m)
    for x in range(m):
        e, i = code.decode(x)
        assert 0 <= e < M and 0 <= i < K and code.encode(e, i) == x


def test_element_code_needs_room():
    with pytest.raises(ConfigurationError):
        ElementCode(4, 2, 9)


def test_solve_parities_tree():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (1, 3)])
    targets = {0: np.array([1, 0], np.uint8), 2: np.array([1, 1], np.uint8)}
    B = solve_parities(g, 2, range(3), targets)
    assert B[0].tolist() == [0, 0]
    for e, (u, v) in enumerate(g.edges):
        assert (B[u] ^ B[v]).tolist() == targets.get(e, np.zeros(2)).tolist()


def test_solve_parities_inconsistent_cycle():
    g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    with pytest.raises(SubstrateError):
        solve_parities(g, 1, range(3), {0: np.array([1], np.uint8)})


# -- classical adaptive ------------------------------------------------------------


def test_ca_empty_set():
    inst = classical_adaptive_store(K44, 6, 96, [], 3)
    assert not inst.store.region("B").any()
    assert not inst.sweep().any()
    assert inst.space_bits == 16 + 8 * 6 == 64


def test_ca_single_element_exactly_one_yes():
    for x in range(0, 96, 7):
        inst = classical_adaptive_store(K44, 6, 96, [x], 3)
        assert answers_by_query(inst).sum() == 1 and inst.query(x)


def test_ca_triples_on_k44(rng):
    for _ in range(300):
        S = rng.sample(range(96), 3)
        inst = classical_adaptive_store(K44, 6, 96, S, 3)
        assert (answers_by_query(inst) == indicator(96, S)).all()


def test_ca_transcript_is_adaptive():
    inst = classical_adaptive_store(K44, 6, 96, [10, 50], 3)
    t = ProbeTranscript(ADAPTIVE)
    classical_adaptive_query(inst, 10, t)
    assert t.kinds == [CLASSICAL_READ, CLASSICAL_READ]
    assert t.entries[0].addresses == (("A", 1),)
    v = audit_query(inst, 10)
    assert v.passed and v.adaptive_detected


def test_ca_errors():
    with pytest.raises(DomainError):
        classical_adaptive_query(classical_adaptive_store(K44, 6, 96, [], 3), 96)
    with pytest.raises(ConfigurationError):
        classical_adaptive_store(K44, 6, 96, [1], 4)
    with pytest.raises(CapacityError):
        classical_adaptive_store(K44, 6, 96, [1, 2, 3, 4], 3)
    with pytest.raises(ConfigurationError):
        classical_adaptive_store(K44, 5, 96, [1], 3)
    odd = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    with pytest.raises(ConfigurationError):
        classical_adaptive_store(odd, 2, 10, [1], 2)


def test_ca_default_k():
    inst = classical_adaptive_store(K44, None, 50, [3], 3)
    assert inst.K == 4


@pytest.mark.parametrize("graph,n", [(projective_plane_incidence(3), 4), (wenger_graph(3, 3), 6)])
def test_ca_higher_girth(graph, n, rng):
    m = graph.M * 3
    for _ in range(100):
        S = rng.sample(range(m), n)
        inst = classical_adaptive_store(graph, 3, m, S, n)
        assert (inst.sweep() == indicator(m, S)).all()


# -- quantum adaptive --------------------------------------------------------------


def small_sparse():
    # first seed whose 16-vertex graph has a few edges
    for s in range(100):
        g = gnp_random_graph(16, 0.12, s)
        if g.M >= 8:
            return g


def test_qa_empty_set():
    g = small_sparse()
    inst = quantum_adaptive_store(g, 2, 2 * g.M, [], 2)
    assert not inst.store.region("B0").any() and not inst.store.region("B1").any()
    assert not inst.sweep().any()


def test_qa_single_element_exactly_one_yes():
    g = small_sparse()
    m = 2 * g.M
    for x in range(m):
        inst = quantum_adaptive_store(g, 2, m, [x], 2)
        assert answers_by_query(inst).tolist() == indicator(m, [x]).tolist()


def test_qa_transcript():
    g = small_sparse()
    inst = quantum_adaptive_store(g, 2, 2 * g.M, [3], 2)
    t = ProbeTranscript(ADAPTIVE)
    assert quantum_adaptive_query(inst, 3, t)
    assert t.kinds == [CLASSICAL_READ, QUANTUM_XOR]
    assert audit_query(inst, 3).passed
    assert inst.space_bits == g.M + 2 * g.N * 2


@given(st.integers(0, 10**9))
def test_qa_randomised_invariants(seed):
    rng = random.Random(seed)
    g = gnp_random_graph(rng.randint(8, 24), rng.choice([0.1, 0.2, 0.3]), seed)
    if g.M == 0:
        return
    n = rng.randint(1, 4)
    m = g.M * rng.randint(1, 3)
    S = rng.sample(range(m), min(n, m))
    try:
        inst = quantum_adaptive_store(g, None, m, S, n)
    except SubstrateError:
        return
    assert (inst.sweep() == indicator(m, S)).all()
    A = inst.store.region("A")
    assert is_forest(g, np.flatnonzero(A == 0).tolist())
    # B1 is zero on every row outside the dense core
    B1 = inst.store.region("B1").reshape(g.N, inst.K)
    touched = {v for e in np.flatnonzero(A == 1) for v in g.edges[e]}
    core_edges_only = all(
        not B1[v].any() for v in range(g.N) if v not in touched
    )
    assert core_edges_only


def test_qa_on_locally_sparse_generator(rng):
    for seed in range(1, 40):
        g = random_locally_sparse(256, seed, scale=1.0)
        m = 4 * g.M
        for _ in range(20):
            S = rng.sample(range(m), 4)
            inst = quantum_adaptive_store(g, None, m, S, 4)
            assert (inst.sweep() == indicator(m, S)).all()


def test_qa_dense_graph_reports_substrate_error():
    g = Graph.from_edges(8, itertools.combinations(range(8), 2))
    with pytest.raises(SubstrateError):
        quantum_adaptive_store(g, 1, g.M, [0, 27], 2)


# -- qn22 --------------------------------------------------------------------------


def test_qn22_case_two_components_arrays():
    side = 16
    a, b, a2, b2 = 3, 5, 9, 12
    inst = qn22_store(256, [a * side + b, a2 * side + b2])
    r = inst.store.region
    assert (r("X1") == delta(side, a)).all() and (r("Y1") == delta(side, b2)).all()
    assert (r("X2") == delta(side, a2)).all() and (r("Y2") == delta(side, b)).all()
    assert np.flatnonzero(inst.sweep()).tolist() == sorted([a * side + b, a2 * side + b2])


def test_qn22_singleton_arrays():
    inst = qn22_store(256, [2 * 16 + 7])
    r = inst.store.region
    assert (r("X1") == delta(16, 2)).all() and (r("Y2") == delta(16, 7)).all()
    assert not r("X2").any() and not r("Y1").any()
    assert np.flatnonzero(inst.sweep()).tolist() == [39]


def test_qn22_shared_coordinate():
    a, a2, b, b3 = 1, 4, 6, 11
    inst = qn22_store(256, [a * 16 + b, a2 * 16 + b])
    assert inst.query(a * 16 + b) and inst.query(a2 * 16 + b) and not inst.query(a * 16 + b3)
    inst = qn22_store(256, [a * 16 + b, a * 16 + b3])
    assert np.flatnonzero(inst.sweep()).tolist() == [a * 16 + b, a * 16 + b3]


def test_qn22_empty_and_capacity():
    assert not qn22_store(256, []).sweep().any()
    with pytest.raises(CapacityError):
        qn22_store(256, [1, 2, 3])


def test_qn22_transcript():
    inst = qn22_store(256, [17, 200])
    t = ProbeTranscript(NON_ADAPTIVE)
    qn22_query(inst, 17, t)
    assert t.kinds == [QUANTUM_XOR, QUANTUM_XOR]
    assert t.entries[0].addresses == (("X1", 1), ("Y1", 1))
    v = audit_query(inst, 17)
    assert v.passed and not v.adaptive_detected


@pytest.mark.parametrize("m", [2, 10, 50, 99])
def test_qn22_non_square_all_sets(m):
    for k in range(3):
        for S in itertools.combinations(range(m), k):
            assert (qn22_store(m, S).sweep() == indicator(m, S)).all()
    with pytest.raises(DomainError):
        qn22_query(qn22_store(m, []), m)


# -- qn23 --------------------------------------------------------------------------


def test_qn23_distinct_everywhere_arrays():
    s = 6
    (a, b, c), (a2, b2, c2) = (1, 2, 3), (4, 5, 0)
    x, y = (a * s + b) * s + c, (a2 * s + b2) * s + c2
    inst = qn23_store(216, [x, y])
    r = inst.store.region
    expect = {"X1": delta(s, a), "Y1": delta(s, b2), "X2": delta(s, a2),
              "Z2": delta(s, c), "Y3": delta(s, b), "Z3": delta(s, c2)}
    for name, v in expect.items():
        assert (r(name) == v).all(), name
    assert np.flatnonzero(inst.sweep()).tolist() == sorted([x, y])


def test_qn23_singleton_and_empty():
    inst = qn23_store(216, [100])
    assert np.flatnonzero(inst.sweep()).tolist() == [100]
    assert not qn23_store(216, []).sweep().any()


def test_qn23_one_free_coordinate():
    s = 6
    x, y = (2 * s + 3) * s + 1, (2 * s + 3) * s + 4
    inst = qn23_store(216, [x, y])
    assert np.flatnonzero(inst.sweep()).tolist() == [x, y]


def test_qn23_shared_first_coordinate_constant_offset():
    s = 6
    x, y = (2 * s + 3) * s + 1, (2 * s + 4) * s + 5
    inst = qn23_store(216, [x, y])
    assert inst.store.region("X1").sum() == s - 1  # 1 + delta_a
    assert np.flatnonzero(inst.sweep()).tolist() == [x, y]


@pytest.mark.parametrize("m", [8, 27, 30])
def test_qn23_all_small_sets(m):
    for k in range(3):
        for S in itertools.combinations(range(m), k):
            assert (qn23_store(m, S).sweep() == indicator(m, S)).all()


def test_qn23_transcript():
    inst = qn23_store(216, [5, 77])
    t = ProbeTranscript(NON_ADAPTIVE)
    qn23_query(inst, 77, t)
    assert t.kinds == [QUANTUM_XOR] * 3
    assert audit_query(inst, 77).passed
    assert inst.space_bits == 36


# -- non-adaptive graph scheme -------------------------------------------------------


def test_appx_empty():
    g = projective_plane_incidence(2)
    inst = appendix_nonadaptive_store(g, 2, 2 * g.M, [], 3)
    assert not inst.store.region("A").any() and not inst.sweep().any()


def test_appx_single_and_red_edges():
    g = projective_plane_incidence(2)
    m = 2 * g.M
    inst = appendix_nonadaptive_store(g, 2, m, [9], 3)
    assert answers_by_query(inst).tolist() == indicator(m, [9]).tolist()
    # element 9 sits on edge 4; every other edge is RED and answers No
    assert inst.store.region("A").tolist() == [int(e == 4) for e in range(g.M)]


def test_appx_transcript_and_space():
    g = projective_plane_incidence(3)
    inst = appendix_nonadaptive_store(g, 4, 4 * g.M, [1, 50, 100], 3)
    t = ProbeTranscript(NON_ADAPTIVE)
    appendix_nonadaptive_query(inst, 50, t)
    assert t.kinds == [CLASSICAL_READ, QUANTUM_XOR]
    v = audit_query(inst, 50)
    assert v.passed and not v.adaptive_detected
    assert inst.space_bits == g.M + g.N * 4


def test_appx_needs_n_below_girth():
    with pytest.raises(ConfigurationError):
        appendix_nonadaptive_store(K44, 2, 32, [1], 4)
    inst = appendix_nonadaptive_store(K44, 2, 32, [1, 5, 9], 3)
    assert (inst.sweep() == indicator(32, [1, 5, 9])).all()


# -- characteristic vector -------------------------------------------------------------


def test_charvec():
    inst = charvec_store(8, [3])
    assert inst.store.region("C").tolist() == [0, 0, 0, 1, 0, 0, 0, 0]
    assert charvec_query(inst, 3) and not charvec_query(inst, 5)
    t = ProbeTranscript()
    charvec_query(inst, 3, t)
    assert len(t) == 1 and inst.space_bits == 8
    with pytest.raises(DomainError):
        charvec_query(inst, 8)


# -- cross-scheme properties ------------------------------------------------------------

CONFIGS = {
    "ca": dict(m=96, n=3, graph=K44, K=6),
    "qa": dict(m=120, n=3, graph=None, K=None),
    "qn22": dict(m=200, n=2, graph=None, K=None),
    "qn23": dict(m=200, n=2, graph=None, K=None),
    "appx": dict(m=104, n=3, graph=projective_plane_incidence(2), K=None),
    "cv": dict(m=64, n=5, graph=None, K=None),
}


@st.composite
def scheme_and_set(draw):
    sid = draw(st.sampled_from(SCHEME_IDS))
    cfg = CONFIGS[sid]
    S = draw(st.lists(st.integers(0, cfg["m"] - 1), max_size=cfg["n"], unique=True))
    return sid, cfg, S


def _build(sid, cfg, S):
    return build(sid, cfg["m"], S, n=cfg["n"], graph=cfg["graph"], K=cfg["K"])


@given(scheme_and_set())
def test_zero_error_and_sweep_agrees_with_queries(args):
    sid, cfg, S = args
    inst = _build(sid, cfg, S)
    truth = indicator(cfg["m"], S)
    assert (inst.sweep() == truth).all()
    assert (answers_by_query(inst) == truth).all()


@given(scheme_and_set(), st.data())
def test_probe_budget_and_class(args, data):
    sid, cfg, S = args
    inst = _build(sid, cfg, S)
    x = data.draw(st.integers(0, cfg["m"] - 1))
    t = ProbeTranscript(inst.probe_class)
    inst.query(x, t)
    assert len(t) == inst.t
    assert audit_query(inst, x).passed


@given(scheme_and_set(), st.data())
def test_monotone_safety(args, data):
    sid, cfg, S = args
    sub = data.draw(st.lists(st.sampled_from(S), unique=True)) if S else []
    _build(sid, cfg, S)
    inst = _build(sid, cfg, sub)
    assert (inst.sweep() == indicator(cfg["m"], sub)).all()


@given(scheme_and_set())
def test_space_formula(args):
    sid, cfg, S = args
    inst = _build(sid, cfg, S)
    assert inst.space_bits == inst.formula_bits()


@pytest.mark.parametrize("sid", SCHEME_IDS)
def test_state_file_roundtrip(sid, tmp_path):
    cfg = CONFIGS[sid]
    S = list(range(1, cfg["m"], cfg["m"] // 2))[: cfg["n"]]
    inst = _build(sid, cfg, S)
    path = tmp_path / "state.bin"
    save_instance(inst, path)
    back = load_instance(path)
    assert back.scheme_id == sid and back.m == inst.m
    assert (back.store.bits == inst.store.bits).all()
    assert (back.sweep() == inst.sweep()).all()
    header, payload = path.read_bytes().split(b"\n", 1)
    assert payload == inst.store.to_bytes()


@pytest.mark.parametrize("n,girth", [(2, 4), (3, 4), (4, 6), (5, 8), (7, 10)])
def test_select_graph_girth(n, girth):
    g = select_graph(3000, n, seed=1)
    assert g.girth >= girth and g.girth % 2 == 0


def test_default_graphs():
    assert default_graph("qn22", 100, 2) is None
    assert default_graph("appx", 500, 5).girth > 5
    assert default_graph("qa", 500, 2).girth > 8
    with pytest.raises(InvalidParameter):
        default_graph("nope", 10, 2)
