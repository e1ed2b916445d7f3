import math

import numpy as np
from hypothesis import given, settings, strategies as st
from scipy.sparse.csgraph import dijkstra

from gicomplex.builders import build_rips
from gicomplex.core import PointCloud
from gicomplex.graph import (
    ball,
    build_neighborhood_graph,
    graph_distances,
    pairwise_within,
    shortest_path_tree,
    write_edge_list,
)


def test_inclusive_threshold():
    P = PointCloud([[0.0, 0.0], [1.0, 0.0]])
    assert build_neighborhood_graph(P, 1.0).n_edges == 1
    assert build_neighborhood_graph(P, 0.999).n_edges == 0


def test_unit_square_sides_only():
    P = PointCloud([[0, 0], [1, 0], [1, 1], [0, 1]])
    G = build_neighborhood_graph(P, 1.0)
    assert G.edge_set() == {(0, 1), (1, 2), (2, 3), (0, 3)}


def test_path_distances():
    P = PointCloud([[0.0], [1.0], [2.0]])
    G = build_neighborhood_graph(P, 1.0)
    assert graph_distances(G, 0) == [0.0, 1.0, 2.0]


def test_isolated_vertex_is_unreachable():
    P = PointCloud([[0.0], [1.0], [10.0]])
    G = build_neighborhood_graph(P, 1.0)
    assert math.isinf(graph_distances(G, 0)[2])
    assert G.components() == [0, 0, 2]


def test_four_cycle():
    P = PointCloud([[0, 0], [1, 0], [1, 1], [0, 1]])
    G = build_neighborhood_graph(P, 1.0)
    d = graph_distances(G, 0)
    assert d[2] == 2.0 and d[1] == d[3] == 1.0


def test_ball_and_tree():
    P = PointCloud([[0.0], [1.0], [2.0], [3.0]])
    G = build_neighborhood_graph(P, 1.0)
    assert ball(G, 0, 2.0) == {0: 0.0, 1: 1.0, 2: 2.0}
    dist, parent = shortest_path_tree(G, 0)
    assert parent == [-1, 0, 1, 2] and dist == [0.0, 1.0, 2.0, 3.0]


def test_edge_list(tmp_path):
    P = PointCloud([[0.0], [0.5], [3.0]])
    G = build_neighborhood_graph(P, 1.0)
    write_edge_list(tmp_path / "e.txt", G)
    assert (tmp_path / "e.txt").read_text().split() == ["0", "1", "0.5"]


def _cloud(seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(0, 1, size=(rng.integers(2, 120), 3))


clouds = st.integers(0, 10_000).map(_cloud)


@given(clouds, st.floats(0.05, 0.6))
@settings(max_examples=40, deadline=None)
def test_kdtree_matches_brute_force(X, r):
    a = pairwise_within(X, r, "brute")
    b = pairwise_within(X, r, "kdtree")
    for u, v in zip(a, b):
        assert np.array_equal(u, v)
    # reference: full distance matrix
    D = np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1))
    i, j = np.nonzero(np.triu(D <= r, 1))
    assert set(zip(i.tolist(), j.tolist())) == set(zip(a[0].tolist(), a[1].tolist()))


@given(clouds, st.floats(0.1, 0.5))
@settings(max_examples=30, deadline=None)
def test_distances_match_scipy_and_bound_euclidean(X, alpha):
    P = PointCloud(X, warn_duplicates=False)
    G = build_neighborhood_graph(P, alpha)
    for u, v, w in G.edges():
        assert w <= alpha and math.isclose(w, P.distance(u, v))
        assert u in G.adjacency[v] and u != v
    ref = dijkstra(G.to_csgraph(), directed=False)
    srcs = range(0, len(P), max(1, len(P) // 5))
    for s in srcs:
        d = np.array(graph_distances(G, s))
        assert np.allclose(d, ref[s], equal_nan=False)
        reach = np.isfinite(d)
        eu = np.sqrt(((X - X[s]) ** 2).sum(1))
        assert np.all(d[reach] >= eu[reach] - 1e-12)
    # triangle inequality on sampled triples
    rng = np.random.default_rng(len(P))
    for _ in range(30):
        a, b, c = rng.integers(0, len(P), 3)
        assert ref[a, c] <= ref[a, b] + ref[b, c] + 1e-12


@given(clouds, st.floats(0.1, 0.5))
@settings(max_examples=20, deadline=None)
def test_graph_is_rips_one_skeleton(X, alpha):
    P = PointCloud(X, warn_duplicates=False)
    G = build_neighborhood_graph(P, alpha)
    K = build_rips(P, alpha, 1)
    assert set(K.simplices(1)) == G.edge_set()
