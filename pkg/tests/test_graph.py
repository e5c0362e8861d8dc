import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxlinear_ttt.errors import (
    BlockNotComplete,
    BlockNotTransitive,
    DirectedCycle,
    DuplicateOrReversedEdge,
    EmptyGraph,
    NotConnected,
    PathBudgetExceeded,
    TttError,
    UnknownNode,
)
from maxlinear_ttt.generators import random_multi_source_ttt, random_ttt
from maxlinear_ttt.graph import APEX, BACKWARD, FORWARD, build_ttt, sources, v_structures


# -- construction ------------------------------------------------------------

def test_fig1_has_four_tournaments(fig1):
    blocks = sorted(sorted(t.nodes) for t in fig1.tournaments)
    assert blocks == [[1, 2, 3], [3, 4], [3, 5, 6, 7], [7, 8]]


def test_tournament_nodes_ordered_by_out_degree(fig1):
    for t in fig1.tournaments:
        outdeg = [sum(1 for a, _ in t.edges if a == v) for v in t.nodes]
        assert outdeg == list(range(len(t) - 1, -1, -1))


def test_single_edge():
    g = build_ttt([1, 2], [(1, 2)])
    assert len(g.tournaments) == 1 and g.tournaments[0].source == 1


def test_single_node_has_no_tournaments():
    g = build_ttt([5], [])
    assert g.tournaments == () and g.sources() == {5}


def test_square_is_not_a_block_graph():
    with pytest.raises(BlockNotComplete):
        build_ttt([1, 2, 3, 4], [(1, 2), (2, 3), (1, 4), (4, 3)])


def test_cyclic_triangle_is_not_transitive():
    with pytest.raises(BlockNotTransitive):
        build_ttt([1, 2, 3], [(1, 2), (2, 3), (3, 1)])


def test_disconnected():
    with pytest.raises(NotConnected):
        build_ttt([1, 2, 3], [(1, 2)])


@pytest.mark.parametrize("edges", [[(1, 2), (2, 1)], [(1, 2), (1, 2)], [(1, 1)]])
def test_duplicate_reversed_or_loop(edges):
    with pytest.raises(DuplicateOrReversedEdge):
        build_ttt([1, 2], edges)


def test_unknown_and_empty():
    with pytest.raises(UnknownNode):
        build_ttt([1, 2], [(1, 3)])
    with pytest.raises(EmptyGraph):
        build_ttt([], [])


def test_directed_four_cycle_rejected():
    # a directed 4-cycle is caught either as a cycle or as a non-clique block
    with pytest.raises((DirectedCycle, BlockNotComplete)):
        build_ttt([1, 2, 3, 4], [(1, 2), (2, 3), (3, 4), (4, 1)])


# -- brute-force oracle over small DAGs -------------------------------------

def _oracle_is_ttt(n, edges):
    """Connected, acyclic, and every induced subgraph check of a block graph.

    Block graphs are exactly the chordal, diamond-free graphs; both are
    checked by brute force over vertex subsets.  Acyclic complete blocks
    are automatically transitive tournaments.
    """
    adj = {v: set() for v in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    # connected
    seen, stack = {0}, [0]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != n:
        return False
    # acyclic: repeatedly strip nodes without incoming edges
    rest, E = set(range(n)), set(edges)
    while rest:
        free = [v for v in rest if not any(b == v and a in rest for a, b in E)]
        if not free:
            return False
        rest -= set(free)
    for k in range(4, n + 1):
        for S in itertools.combinations(range(n), k):
            m = sum(1 for a, b in itertools.combinations(S, 2) if b in adj[a])
            degs = sorted(sum(1 for y in S if y in adj[x]) for x in S)
            if degs == [2] * k:  # induced chordless cycle
                return False
            if k == 4 and m == 5:  # diamond
                return False
    return True


def _all_dags(n):
    pairs = list(itertools.combinations(range(n), 2))
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = []
        for (a, b), c in zip(pairs, choice):
            if c == 1:
                edges.append((a, b))
            elif c == 2:
                edges.append((b, a))
        yield edges


def _accepts(n, edges):
    try:
        build_ttt(range(n), edges)
        return True
    except TttError:
        return False


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_build_matches_oracle_exhaustively(n):
    for edges in _all_dags(n):
        assert _accepts(n, edges) == _oracle_is_ttt(n, edges), edges


def test_build_matches_oracle_on_five_nodes():
    rng = np.random.default_rng(5)
    all5 = list(_all_dags(5))
    picks = rng.choice(len(all5), size=6000, replace=False)
    accepted = 0
    for k in picks:
        edges = all5[k]
        ok = _oracle_is_ttt(5, edges)
        accepted += ok
        assert _accepts(5, edges) == ok, edges
    assert accepted > 0


# -- predicates ---------------------------------------------------------------

def test_sources_and_v_structures(fig1, fig2):
    assert sources(fig1) == {1, 4, 8}
    assert sorted(v_structures(fig1)) == [(1, 4, 3), (3, 8, 7), (5, 8, 7)]
    assert sources(fig2) == {4}
    assert v_structures(fig2) == []


def test_canonical_v_structure():
    g = build_ttt([1, 2, 3], [(1, 3), (2, 3)])
    assert g.v_structures() == [(1, 2, 3)]


def test_relatives(fig2):
    r = fig2.relatives(3)
    assert r.pa == {4}
    assert r.Desc == {1, 2, 3, 5, 6, 7, 8}
    assert fig2.relatives(4).an == frozenset()
    with pytest.raises(UnknownNode):
        fig2.relatives(42)


def test_relatives_chain(chain):
    assert chain.graph.relatives(3).An == {1, 2, 3}


# -- paths and trails ---------------------------------------------------------

def test_shortest_path(fig1, fig2):
    assert fig2.shortest_path(4, 8).nodes == (4, 3, 7, 8)
    assert len(fig2.shortest_path(5, 5)) == 0
    assert fig1.shortest_path(8, 4) is None


def test_all_paths_tournament(tour3):
    paths = tour3.graph.all_paths(1, 3)
    assert sorted(paths) == sorted([((1, 3),), ((1, 2), (2, 3))])


def test_all_paths_chain(chain):
    g = chain.graph
    assert g.all_paths(1, 3) == [((1, 2), (2, 3))]
    assert g.all_paths(3, 1) == []


def test_path_budget():
    n = 7
    edges = [(a, b) for a in range(n) for b in range(a + 1, n)]
    g = build_ttt(range(n), edges)
    with pytest.raises(PathBudgetExceeded):
        g.all_paths(0, n - 1, budget=10)
    assert len(g.all_paths(0, n - 1)) == 2 ** (n - 2)


def test_trail_2_8_on_fig2(fig2):
    # the text places this trail on the figure whose edges are 3->2, 3->7, 7->8
    t = fig2.shortest_trail(2, 8)
    assert set(t.edges) == {(3, 2), (3, 7), (7, 8)}
    assert t.nodes == (2, 3, 7, 8)
    assert t.shape == APEX and t.apex == 3


def test_trail_shapes(fig2):
    t = fig2.shortest_trail(1, 8)
    assert t.shape == APEX and t.apex == 3
    assert fig2.shortest_trail(4, 8).shape == FORWARD
    assert fig2.shortest_trail(8, 4).shape == BACKWARD
    assert len(fig2.shortest_trail(3, 7)) == 1


def test_edges_away_from(fig3):
    assert fig3.edges_away_from(8) == {(8, 7), (7, 3), (7, 6), (7, 5), (3, 1), (3, 2), (3, 4)}
    g = build_ttt([1, 2], [(1, 2)])
    assert g.edges_away_from(2) == {(2, 1)}
    g = build_ttt([1, 2, 3], [(1, 2), (2, 3)])
    assert g.edges_away_from(2) == {(2, 1), (2, 3)}


def test_closest_tournament_node(fig2, fig3):
    tau1 = next(t for t in fig3.tournaments if set(t.nodes) == {1, 2, 3})
    assert fig3.closest_tournament_node(8, tau1) == 3
    assert fig3.closest_tournament_node(2, tau1) == 2
    tau4 = next(t for t in fig2.tournaments if set(t.nodes) == {7, 8})
    assert fig2.closest_tournament_node(1, tau4) == 7


# -- structural properties on random graphs ------------------------------------

graphs = st.builds(
    lambda seed, n, uniq: random_ttt(np.random.default_rng(seed), n, unique_source=uniq),
    st.integers(0, 2**32 - 1),
    st.integers(1, 8),
    st.booleans(),
)


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_unique_source_iff_no_v_structure(g):
    assert (len(g.sources()) == 1) == (not g.v_structures())


@settings(max_examples=40, deadline=None)
@given(graphs)
def test_descendant_sets_nested_or_disjoint(g):
    if not g.has_unique_source:
        return
    for i, j in itertools.combinations(g.nodes, 2):
        a, b = g.descendants(i, True), g.descendants(j, True)
        assert not (a & b) or a <= b or b <= a


@settings(max_examples=40, deadline=None)
@given(graphs)
def test_shortest_paths_pass_through_sources(g):
    if not g.has_unique_source:
        return
    for i in g.nodes:
        for v in g.descendants(i):
            p = g.shortest_path(i, v)
            assert p.edges in g.all_paths(i, v)
            for a, b in p.edges[1:]:
                assert g.tournament_of_edge(a, b).source == a


@settings(max_examples=40, deadline=None)
@given(graphs)
def test_trails_are_unique_shortest(g):
    import networkx as nx

    sk = nx.Graph()
    sk.add_nodes_from(g.nodes)
    sk.add_edges_from(g.edges)
    for u, v in itertools.permutations(g.nodes, 2):
        t = g.shortest_trail(u, v)
        assert list(nx.all_shortest_paths(sk, u, v)) == [list(t.nodes)]
        if g.has_unique_source:
            assert t.shape in (FORWARD, BACKWARD, APEX)


def test_multi_source_generator():
    g = random_multi_source_ttt(np.random.default_rng(1), 6)
    assert len(g.sources()) > 1
