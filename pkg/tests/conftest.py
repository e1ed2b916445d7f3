import itertools

import numpy as np
import pytest

from gicomplex.core import SimplexTree, Z2Matrix

ACCEPTANCE_LINES: list[str] = []


def gf2_rank_dense(A) -> int:
    """Naive row reduction of a 0/1 numpy array, independent of the bitset code."""
    M = (np.array(A, dtype=np.uint8) & 1).copy()
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        hit = np.nonzero(M[r:, c])[0]
        if len(hit) == 0:
            continue
        p = r + hit[0]
        M[[r, p]] = M[[p, r]]
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] ^= M[r]
        r += 1
        if r == rows:
            break
    return r


def dense_boundary(simplices_k, simplices_km1) -> np.ndarray:
    idx = {s: i for i, s in enumerate(simplices_km1)}
    B = np.zeros((len(simplices_km1), len(simplices_k)), dtype=np.uint8)
    for j, s in enumerate(simplices_k):
        for f in itertools.combinations(s, len(s) - 1):
            B[idx[f], j] = 1
    return B


def brute_betti(simplex_lists: list[list[tuple]]) -> list[int]:
    """β_k = n_k - rank ∂_k - rank ∂_{k+1} with dense elimination; ``simplex_lists[k]`` lists k-simplices."""
    top = len(simplex_lists) - 1
    ranks = [0] * (top + 2)
    for k in range(1, top + 1):
        if simplex_lists[k] and simplex_lists[k - 1]:
            ranks[k] = gf2_rank_dense(dense_boundary(simplex_lists[k], simplex_lists[k - 1]))
    return [len(simplex_lists[k]) - ranks[k] - ranks[k + 1] for k in range(top + 1)]


def closure(simplices, max_dim=None) -> list[list[tuple]]:
    """Face closure as per-dimension sorted lists, computed with plain sets."""
    out: set[tuple] = set()
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            out.update(itertools.combinations(s, k))
    top = max((len(s) for s in out), default=1) - 1
    if max_dim is not None:
        top = max(top, max_dim)
    return [sorted(s for s in out if len(s) == k + 1) for k in range(top + 1)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_graph(n, edges, alpha=1.0):
    """NeighborhoodGraph from an explicit edge list with unit weights."""
    from gicomplex.graph import NeighborhoodGraph

    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    nb = tuple(tuple(sorted(a)) for a in adj)
    return NeighborhoodGraph(alpha, nb, tuple(tuple(1.0 for _ in a) for a in nb))


def make_subsample(nu, delta=1.0):
    from gicomplex.core import MetricChoice
    from gicomplex.sampling import Subsample

    nu = np.asarray(nu, dtype=np.int64)
    return Subsample(sorted(set(nu.tolist())), nu, np.zeros(len(nu)), delta, MetricChoice.euclidean())


def random_graph_and_nu(rng, n_max=25):
    n = int(rng.integers(1, n_max + 1))
    p = rng.uniform(0.15, 0.7)
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    Q = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist())
    nu = [u if u in Q else int(rng.choice(Q)) for u in range(n)]
    return make_graph(n, edges), nu


def gic_by_definition(n, edges, nu, max_dim):
    """Simplices {q_0..q_k} such that some (k+1)-clique (p_0..p_k) has nu(p_i) = q_i.

    Plain enumeration over products of cells, no clique search and no sparsification.
    """
    E = {frozenset(e) for e in edges}
    cells: dict[int, list[int]] = {}
    for p, q in enumerate(nu):
        cells.setdefault(q, []).append(p)
    Q = sorted(cells)
    out = {(q,) for q in Q}
    for k in range(1, max_dim + 1):
        for sigma in itertools.combinations(Q, k + 1):
            for pts in itertools.product(*(cells[q] for q in sigma)):
                if all(frozenset(e) in E for e in itertools.combinations(pts, 2)):
                    out.add(sigma)
                    break
    return out


def random_small_complex(rng):
    n = int(rng.integers(3, 13))
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < rng.uniform(0.2, 0.6)]
    E = set(edges)
    tris = [t for t in itertools.combinations(range(n), 3)
            if {(t[0], t[1]), (t[0], t[2]), (t[1], t[2])} <= E and rng.random() < 0.4]
    return SimplexTree.from_simplices([list(e) for e in edges] + [list(t) for t in tris] + [[v] for v in range(n)])


def gf2_inverse(T):
    n = len(T)
    A = np.concatenate([T % 2, np.eye(n, dtype=np.uint8)], axis=1).astype(np.uint8)
    for c in range(n):
        p = c + np.nonzero(A[c:, c])[0][0]
        A[[c, p]] = A[[p, c]]
        for i in range(n):
            if i != c and A[i, c]:
                A[i] ^= A[c]
    return A[:, n:]


def random_invertible(rng, n):
    while True:
        T = rng.integers(0, 2, size=(n, n)).astype(np.uint8)
        if gf2_rank_dense(T) == n:
            return T


def constructed_chain(rng):
    """Five composable maps with rank(A->F) = rank(C->D), hidden by random changes of basis."""
    r = int(rng.integers(0, 4))
    dims = [r + int(rng.integers(0, 4)) for _ in range(6)]
    blocks = []
    for i in range(5):
        M = np.zeros((dims[i + 1], dims[i]), dtype=np.uint8)
        M[:r, :r] = np.eye(r, dtype=np.uint8)
        if i != 2:
            M[r:, r:] = rng.integers(0, 2, size=(dims[i + 1] - r, dims[i] - r))
        blocks.append(M)
    Ts = [random_invertible(rng, d) if d else np.zeros((0, 0), np.uint8) for d in dims]
    out = []
    for i, M in enumerate(blocks):
        Ti = gf2_inverse(Ts[i]) if dims[i] else Ts[i]
        out.append(Z2Matrix.from_dense((Ts[i + 1].astype(int) @ M @ Ti) % 2))
    return out


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
