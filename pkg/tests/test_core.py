import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import gf2_rank_dense
from gicomplex.core import (
    ComplexFormatError,
    DuplicatePointsWarning,
    EmptyInputError,
    MetricChoice,
    PointCloud,
    PointFormatError,
    SimplexDimensionError,
    SimplexTree,
    Z2Matrix,
    load_complex,
    load_points,
    save_complex,
    save_points,
    z2_rank,
)
from gicomplex.graph import build_neighborhood_graph


# -- points -----------------------------------------------------------------


def test_load_three_rows(tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("0 0 0\n1 0 0\n0 1 0\n")
    P = load_points(f)
    assert len(P) == 3 and P.dim == 3
    assert np.array_equal(P.points[1], [1, 0, 0])


def test_load_single_row(tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("0 0\n")
    P = load_points(f)
    assert (len(P), P.dim) == (1, 2)


def test_load_ragged_rows(tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("0 0\n1 2 3\n")
    with pytest.raises(PointFormatError):
        load_points(f)


def test_load_empty(tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("# only a comment\n\n")
    with pytest.raises(EmptyInputError):
        load_points(f)


def test_load_commas_and_comments(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("# x,y\n1.5,2\n\n-3e-1, 4\n")
    P = load_points(f)
    assert np.allclose(P.points, [[1.5, 2], [-0.3, 4]])


def test_non_numeric(tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("1 a\n")
    with pytest.raises(PointFormatError):
        load_points(f)


def test_points_roundtrip(tmp_path, rng):
    X = rng.normal(size=(20, 3))
    save_points(tmp_path / "x.txt", X)
    assert np.array_equal(load_points(tmp_path / "x.txt").points, X)


def test_duplicates_kept_and_flagged():
    with pytest.warns(DuplicatePointsWarning):
        P = PointCloud([[0, 0], [1, 1], [0, 0]])
    assert len(P) == 3
    assert P.duplicates == [(0, 2)]


def test_points_read_only():
    P = PointCloud([[0.0, 1.0]])
    with pytest.raises(ValueError):
        P.points[0, 0] = 5


def test_graph_metric_needs_matching_graph():
    P = PointCloud(np.arange(6.0).reshape(3, 2))
    G = build_neighborhood_graph(PointCloud(np.zeros((1, 2))), 1.0)
    with pytest.raises(ValueError):
        MetricChoice.graph_distance(G).validate(P)
    MetricChoice.euclidean().validate(P)


# -- simplex tree -----------------------------------------------------------


def test_insert_triangle_closure():
    K = SimplexTree(2).insert([2, 0, 1])
    assert K.counts() == [3, 3, 1]
    assert (0, 1, 2) in K and (0, 2) in K


def test_insert_idempotent():
    K = SimplexTree(2).insert([0, 1])
    L = K.copy()
    K.insert([1, 0])
    assert K == L


def test_insert_over_cap():
    with pytest.raises(SimplexDimensionError):
        SimplexTree(2).insert([0, 1, 2, 3])


def test_remove_takes_cofaces():
    K = SimplexTree(3).insert([0, 1, 2, 3])
    n = K.remove([0, 1])
    # (0,1), (0,1,2), (0,1,3), (0,1,2,3)
    assert n == 4
    assert (0, 1) not in K and (0, 2, 3) in K
    assert not K.find([0, 1, 2])


def test_maximal_simplices():
    K = SimplexTree.from_simplices([[0, 1, 2], [2, 3], [4]])
    assert K.maximal_simplices() == [(4,), (2, 3), (0, 1, 2)]


def test_complex_roundtrip(tmp_path):
    K = SimplexTree.from_simplices([[0, 1, 2], [2, 3], [5]], 3)
    save_complex(tmp_path / "k.txt", K, ["hello"])
    L = load_complex(tmp_path / "k.txt")
    assert L == K


def test_complex_file_errors(tmp_path):
    f = tmp_path / "k.txt"
    f.write_text("")
    with pytest.raises(EmptyInputError):
        load_complex(f)
    f.write_text("0 1 x\n")
    with pytest.raises(ComplexFormatError):
        load_complex(f)
    f.write_text("0 0\n")
    with pytest.raises(ComplexFormatError):
        load_complex(f)


simplex_lists = st.lists(st.lists(st.integers(0, 9), min_size=1, max_size=4, unique=True), max_size=12)


@given(simplex_lists)
@settings(max_examples=60, deadline=None)
def test_face_closure_and_enumeration(simplices):
    K = SimplexTree.from_simplices(simplices, 3)
    listed = K.simplices()
    walked = list(K.walk())
    assert len(listed) == len(set(listed)) == len(walked) == len(set(walked)) == len(K)
    assert set(listed) == set(walked)
    for s in listed:
        assert list(s) == sorted(set(s))
        assert K.find(s)
        for f in itertools.combinations(s, len(s) - 1):
            if f:
                assert f in K
    expected = set()
    for s in simplices:
        s = sorted(s)
        for k in range(1, len(s) + 1):
            expected.update(itertools.combinations(s, k))
    assert set(listed) == expected


# -- Z2 ---------------------------------------------------------------------


def test_rank_examples():
    assert z2_rank(Z2Matrix.identity(3)) == 3
    assert z2_rank(Z2Matrix.zeros(4, 5)) == 0
    assert z2_rank(Z2Matrix.from_dense([[1, 1], [1, 1]])) == 1


def test_dense_roundtrip_and_product(rng):
    A = rng.integers(0, 2, size=(5, 7))
    B = rng.integers(0, 2, size=(7, 3))
    MA, MB = Z2Matrix.from_dense(A), Z2Matrix.from_dense(B)
    assert np.array_equal(MA.to_dense(), A)
    assert np.array_equal((MA @ MB).to_dense(), (A @ B) % 2)
    assert np.array_equal(MA.transpose().to_dense(), A.T)
    assert np.array_equal((MA + MA).to_dense(), np.zeros_like(A))


matrices = st.tuples(st.integers(1, 8), st.integers(1, 8)).flatmap(
    lambda rc: st.tuples(
        st.lists(st.lists(st.integers(0, 1), min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0]),
        st.lists(st.lists(st.integers(0, 1), min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0]),
    )
)


@given(matrices, st.randoms(use_true_random=False))
@settings(max_examples=80, deadline=None)
def test_rank_properties(pair, rnd):
    A, B = (np.array(m) for m in pair)
    MA, MB = Z2Matrix.from_dense(A), Z2Matrix.from_dense(B)
    ra = z2_rank(MA)
    assert ra == gf2_rank_dense(A)
    assert ra <= min(A.shape)
    assert z2_rank(MA + MB) <= ra + z2_rank(MB)
    rows = list(range(A.shape[0]))
    cols = list(range(A.shape[1]))
    rnd.shuffle(rows)
    rnd.shuffle(cols)
    assert z2_rank(Z2Matrix.from_dense(A[np.ix_(rows, cols)])) == ra
    assert z2_rank(MA.transpose()) == ra
