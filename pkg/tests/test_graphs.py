import itertools
import math
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bitprobe.errors import InfeasibleCheck, InvalidParameter
from bitprobe.graphs import (
    EXACT,
    INFINITE,
    SAMPLED,
    Graph,
    check_local_sparsity,
    check_nash_williams_condition,
    complete_bipartite,
    connected_subsets,
    format_graph,
    girth,
    is_prime,
    next_prime,
    parse_graph,
    projective_plane_incidence,
    prune_to_girth,
    random_bipartite_graph,
    random_locally_sparse,
    read_graph,
    wenger_graph,
    write_graph,
)


def nx_girth(g: Graph) -> float:
    G = nx.Graph()
    G.add_nodes_from(range(g.N))
    G.add_edges_from(g.edges)
    return nx.girth(G)


@st.composite
def graphs(draw, max_n=9, max_m=16):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=max_m, unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


def cycle_graph(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


# -- representation ---------------------------------------------------------


def test_edges_are_canonicalised():
    g = Graph.from_edges(4, [(3, 1), (0, 2), (1, 0)])
    assert g.edges == ((0, 1), (0, 2), (1, 3))
    assert g.M == 3 and g.N == 4
    assert g.edge_index(3, 1) == 2


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 5)], [(0, 1), (1, 0)]])
def test_bad_edge_lists_rejected(edges):
    with pytest.raises(ValueError):
        Graph.from_edges(3, edges)


def test_unsorted_tuple_rejected():
    with pytest.raises(ValueError):
        Graph(3, ((1, 2), (0, 1)))


def test_file_roundtrip(tmp_path):
    g = wenger_graph(2, 3)
    path = tmp_path / "w.graph"
    write_graph(g, path)
    assert read_graph(path) == g
    assert format_graph(g).splitlines()[0] == f"{g.N} {g.M}"


def test_parse_rejects_wrong_count():
    with pytest.raises(InvalidParameter):
        parse_graph("3 2\n0 1\n")


# -- girth -------------------------------------------------------------------


def test_girth_small_cases():
    assert complete_bipartite(4).girth == 4
    assert cycle_graph(6).girth == 6
    tree = Graph.from_edges(5, [(0, 1), (0, 2), (2, 3), (2, 4)])
    cert = girth(tree)
    assert cert.girth == INFINITE and cert.witness_cycle == () and cert.verify(tree)


@given(graphs())
def test_girth_matches_networkx(g):
    cert = girth(g)
    assert cert.girth == nx_girth(g)
    assert cert.verify(g)


# -- families ------------------------------------------------------------------


@pytest.mark.parametrize("a", [2, 3, 4, 7])
def test_complete_bipartite_counts(a):
    g = complete_bipartite(a)
    assert (g.N, g.M, g.girth) == (2 * a, a * a, 4)


def test_complete_bipartite_16_girth():
    assert complete_bipartite(16).girth == 4


def test_complete_bipartite_rejects_small():
    with pytest.raises(InvalidParameter):
        complete_bipartite(1)


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_projective_plane(q):
    g = projective_plane_incidence(q)
    P = q * q + q + 1
    assert (g.N, g.M) == (2 * P, P * (q + 1))
    assert g.girth == 6
    assert all(g.degree(v) == q + 1 for v in range(g.N))


@pytest.mark.parametrize("k,p,want", [(2, 3, 6), (2, 5, 6), (3, 2, 8), (3, 3, 8), (3, 5, 8)])
def test_wenger(k, p, want):
    g = wenger_graph(k, p)
    assert (g.N, g.M) == (2 * p**k, p ** (k + 1))
    assert g.girth == want == nx_girth(g)
    assert g.is_bipartite()


def test_primes():
    assert [p for p in range(20) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert next_prime(8) == 11 and next_prime(2) == 2


@pytest.mark.parametrize("target,seed", [(6, 0), (8, 1), (10, 2), (12, 3)])
def test_prune_reaches_target(target, seed):
    base = random_bipartite_graph(20, 20, 0.3, seed)
    g = prune_to_girth(base, target, seed)
    assert g.girth >= target
    assert set(g.edges) <= set(base.edges)
    assert g.M > 0


def test_prune_is_deterministic():
    base = random_bipartite_graph(15, 15, 0.3, 7)
    assert prune_to_girth(base, 8, 4) == prune_to_girth(base, 8, 4)


def test_random_locally_sparse_deterministic():
    a, b = random_locally_sparse(200, 5), random_locally_sparse(200, 5)
    assert a == b
    with pytest.raises(InvalidParameter):
        random_locally_sparse(8, 0)


def test_random_locally_sparse_density():
    # expected edge count is C(N,2) * N^(-5/6) / 50
    N = 4000
    g = random_locally_sparse(N, 1)
    expected = math.comb(N, 2) * N ** (-5 / 6) / 50
    assert abs(g.M - expected) < 6 * math.sqrt(expected)


# -- connected sets and sparsity ------------------------------------------------


def _connected_oracle(g: Graph, max_size: int):
    G = nx.Graph()
    G.add_nodes_from(range(g.N))
    G.add_edges_from(g.edges)
    out = set()
    for k in range(1, max_size + 1):
        for vs in itertools.combinations(range(g.N), k):
            if nx.is_connected(G.subgraph(vs)):
                out.add((vs, len(g.induced_edges(vs))))
    return out


@given(graphs(max_n=7, max_m=12), st.integers(1, 7))
def test_connected_subsets_exact(g, k):
    got = [(tuple(sorted(vs)), e) for vs, e in connected_subsets(g, k)]
    assert len(got) == len(set(got))
    assert set(got) == _connected_oracle(g, k)


def _sparsity_oracle(g, k, alpha):
    for size in range(4, min(k, g.N) + 1):
        for vs in itertools.combinations(range(g.N), size):
            if len(g.induced_edges(vs)) > alpha * size:
                return False
    return True


@given(graphs(max_n=8, max_m=16), st.sampled_from([Fraction(1), Fraction(5, 4), Fraction(3, 2), Fraction(3, 4)]))
def test_local_sparsity_exact_vs_oracle(g, alpha):
    r = check_local_sparsity(g, 8, alpha, EXACT)
    assert r.satisfied == _sparsity_oracle(g, 8, alpha)
    if not r.satisfied:
        assert len(r.violating_set) >= 4
        assert len(g.induced_edges(r.violating_set)) == r.induced_edge_count > alpha * len(r.violating_set)


def test_k4_violates_five_quarters():
    g = Graph.from_edges(4, itertools.combinations(range(4), 2))
    r = check_local_sparsity(g, 4, Fraction(5, 4))
    assert not r.satisfied and r.induced_edge_count == 6


def test_sparsity_exact_cap():
    with pytest.raises(InfeasibleCheck):
        check_local_sparsity(complete_bipartite(8), 12, mode=EXACT)


def test_sparsity_sampled_finds_dense_set_and_records_seed():
    r = check_local_sparsity(complete_bipartite(6), 12, mode=SAMPLED, trials=200, seed=3)
    assert not r.satisfied and r.mode == SAMPLED and r.seed == 3
    assert r.induced_edge_count > Fraction(5, 4) * len(r.violating_set)


def test_sampled_on_sparse_graph_reports_satisfied():
    r = check_local_sparsity(cycle_graph(12), 10, mode=SAMPLED, trials=300, seed=1)
    assert r.satisfied


def _nw_oracle(g):
    for k in range(1, g.N + 1):
        for vs in itertools.combinations(range(g.N), k):
            if len(g.induced_edges(vs)) > 2 * (k - 1):
                return False
    return True


@given(graphs(max_n=7, max_m=21))
def test_nash_williams_condition_vs_oracle(g):
    assert check_nash_williams_condition(g).satisfied == _nw_oracle(g)


def test_random_bipartite_is_bipartite():
    g = random_bipartite_graph(10, 12, 0.4, 2)
    assert g.is_bipartite() and g.N == 22
    assert all(u < 10 <= v for u, v in g.edges)
