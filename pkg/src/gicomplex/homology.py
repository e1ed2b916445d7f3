"""Z2 simplicial homology: boundary matrices, Betti numbers, induced-map ranks, hlfs."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .builders import VertexMap
from .core import GICError, Simplex, SimplexTree, Z2Matrix, reduce_columns, reduce_vector, z2_rank
from .graph import INF


class ContractError(GICError):
    """An operation was handed an object that violates its precondition."""


def simplex_index(K: SimplexTree, k: int) -> dict[Simplex, int]:
    return {s: i for i, s in enumerate(K.simplices(k))}


def _boundary_columns(K: SimplexTree, k: int, row_index: dict[Simplex, int] | None = None) -> list[int]:
    if row_index is None:
        row_index = simplex_index(K, k - 1)
    cols = []
    for s in K.simplices(k):
        c = 0
        for i in range(len(s)):
            c |= 1 << row_index[s[:i] + s[i + 1:]]
        cols.append(c)
    return cols


def boundary_matrix(K: SimplexTree, k: int) -> Z2Matrix:
    """∂_k over Z2: rows are (k-1)-simplices, columns k-simplices, both in lexicographic order."""
    if not 1 <= k <= K.max_dim:
        raise ValueError(f"boundary dimension {k} outside 1..{K.max_dim}")
    return Z2Matrix(K.num_simplices(k - 1), K.num_simplices(k), _boundary_columns(K, k))


@dataclass
class HomologyResult:
    betti: list[int]
    cycle_basis: list[list[list[Simplex]]] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)
    boundary_ranks: list[int] = field(default_factory=list)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.betti))

    def as_dict(self) -> dict:
        return {
            "counts": self.counts,
            "betti": self.betti,
            "boundary_ranks": self.boundary_ranks,
            "euler": sum((-1) ** k * n for k, n in enumerate(self.counts)),
        }


class _Reduction:
    """Column reduction of ∂_k with optional kernel tracking and cleared columns."""

    def __init__(self, columns: list[int], track: bool, cleared: set[int] = frozenset()):
        self.pivots: dict[int, int] = {}
        self.kernel: list[int] = []
        if track:
            # pivot row -> (reduced column, combination of original columns)
            comb: dict[int, int] = {}
            for j, c in enumerate(columns):
                v = 1 << j
                while c:
                    p = c.bit_length() - 1
                    other = self.pivots.get(p)
                    if other is None:
                        self.pivots[p] = c
                        comb[p] = v
                        break
                    c ^= other
                    v ^= comb[p]
                if not c:
                    self.kernel.append(v)
        else:
            todo = (c for j, c in enumerate(columns) if j not in cleared)
            reduce_columns(todo, self.pivots)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def pivot_rows(self) -> set[int]:
        return set(self.pivots)


def _bits(v: int) -> list[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def betti_numbers(K: SimplexTree, max_k: int | None = None, cycles: bool = True) -> HomologyResult:
    """β_0..β_max_k from the rank formula, with representative cycles when ``cycles``.

    Each representative is a list of k-simplices; together the β_k of them are
    independent modulo boundaries.
    """
    if max_k is None:
        max_k = max(K.dimension, 0)
    top = min(max_k + 1, K.max_dim)
    counts = [K.num_simplices(k) for k in range(max_k + 1)]
    ranks = [0] * (max_k + 2)
    reductions: dict[int, _Reduction] = {}
    cleared: set[int] = set()
    # high dimension first so pivot rows can clear columns one dimension down
    for k in range(top, 0, -1):
        cols = _boundary_columns(K, k)
        track = cycles and k <= max_k
        red = _Reduction(cols, track, set() if track else cleared)
        reductions[k] = red
        ranks[k] = red.rank
        cleared = red.pivot_rows()
    betti = [counts[k] - ranks[k] - ranks[k + 1] for k in range(max_k + 1)]

    basis: list[list[list[Simplex]]] = []
    if cycles:
        for k in range(max_k + 1):
            simplices = K.simplices(k)
            if k == 0:
                kernel = [1 << i for i in range(len(simplices))]
            else:
                kernel = reductions[k].kernel
            bnd = dict(reductions[k + 1].pivots) if k + 1 in reductions else {}
            reps = []
            for z in kernel:
                if reduce_vector(z, bnd):
                    reduce_columns([z], bnd)
                    reps.append([simplices[i] for i in _bits(z)])
            basis.append(reps)
            if len(reps) != betti[k]:
                raise AssertionError(f"found {len(reps)} representatives for β_{k} = {betti[k]}")
    return HomologyResult(betti, basis, counts, ranks[1:max_k + 2])


def betti(K: SimplexTree, max_k: int | None = None) -> list[int]:
    return betti_numbers(K, max_k, cycles=False).betti


def is_cycle(K: SimplexTree, chain: Sequence[Simplex]) -> bool:
    acc: dict[Simplex, int] = {}
    for s in chain:
        if len(s) == 1:
            continue
        for i in range(len(s)):
            f = s[:i] + s[i + 1:]
            acc[f] = acc.get(f, 0) ^ 1
    return not any(acc.values())


# ---------------------------------------------------------------------------
# induced maps
# ---------------------------------------------------------------------------


@dataclass
class InducedMapRank:
    k: int
    rank: int
    domain_betti: int
    codomain_betti: int


def pushforward(m: VertexMap, chain: Sequence[Simplex], k: int, index: dict[Simplex, int]) -> int:
    """h_# of a k-chain as a bitmask over the codomain's k-simplices; collapsed simplices vanish."""
    out = 0
    for s in chain:
        img = m.image(s)
        if len(img) == k + 1:
            out ^= 1 << index[img]
    return out


def induced_map_rank(m: VertexMap, k: int) -> InducedMapRank:
    """rank of h_*: H_k(K1) -> H_k(K2) as rank([B2 | h_# z]) - rank(B2)."""
    if not getattr(m, "verified", False):
        raise ContractError("vertex map has not been verified simplicial; build it with induced_vertex_map")
    dom = betti_numbers(m.domain, k)
    cod_betti = betti(m.codomain, k)
    K2 = m.codomain
    index = simplex_index(K2, k)
    piv: dict[int, int] = {}
    if k + 1 <= K2.max_dim:
        reduce_columns(_boundary_columns(K2, k + 1, index), piv)
    r0 = len(piv)
    images = [pushforward(m, z, k, index) for z in dom.cycle_basis[k]]
    reduce_columns(images, piv)
    return InducedMapRank(k, len(piv) - r0, dom.betti[k], cod_betti[k])


# ---------------------------------------------------------------------------
# homological loop feature size
# ---------------------------------------------------------------------------


def edge_lengths(K: SimplexTree, points: np.ndarray) -> dict[tuple[int, int], float]:
    X = np.asarray(points, dtype=float)
    return {(u, v): float(np.linalg.norm(X[u] - X[v])) for u, v in K.simplices(1)}


def _weight_fn(weights) -> Callable[[int, int], float]:
    if callable(weights):
        return weights
    if weights is None:
        return lambda u, v: 1.0
    return lambda u, v: weights[(u, v)]


def horton_candidates(K: SimplexTree, weights=None) -> list[tuple[float, int]]:
    """Candidate cycles (weight, edge bitmask): for every root r and non-tree edge uv,
    the tree path r->u, the edge uv and the tree path v->r, reduced over Z2."""
    w = _weight_fn(weights)
    edges = K.simplices(1)
    eidx = {e: i for i, e in enumerate(edges)}
    verts = K.vertices()
    adj: dict[int, list[tuple[int, float]]] = {v: [] for v in verts}
    ew = []
    for u, v in edges:
        x = float(w(u, v))
        if x < 0:
            raise ValueError("edge weights must be non-negative")
        ew.append(x)
        adj[u].append((v, x))
        adj[v].append((u, x))
    seen: dict[int, float] = {}
    for r in verts:
        dist = {r: 0.0}
        parent = {r: None}
        done = set()
        heap = [(0.0, r)]
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for v, x in adj[u]:
                nd = d + x
                if v not in dist or nd < dist[v] or (nd == dist[v] and v not in done and u < parent[v]):
                    dist[v] = nd
                    parent[v] = u
                    heapq.heappush(heap, (nd, v))
        path_mask: dict[int, int] = {r: 0}

        def to_root(v: int) -> int:
            chain = []
            while v not in path_mask:
                chain.append(v)
                v = parent[v]
            acc = path_mask[v]
            for x in reversed(chain):
                p = parent[x]
                acc ^= 1 << eidx[(p, x) if p < x else (x, p)]
                path_mask[x] = acc
            return acc

        for (u, v), i in eidx.items():
            if u not in done or v not in done:
                continue
            if parent.get(v) == u or parent.get(u) == v:
                continue
            mask = to_root(u) ^ to_root(v) ^ (1 << i)
            if mask and mask not in seen:
                seen[mask] = sum(ew[j] for j in _bits(mask))
    return sorted(((wt, m) for m, wt in seen.items()), key=lambda t: (t[0], t[1]))


def _boundary_pivots(K: SimplexTree) -> dict[int, int]:
    if K.max_dim < 2:
        return {}
    return reduce_columns(_boundary_columns(K, 2))


def hlfs_bruteforce(K: SimplexTree, weights=None, method: str = "horton") -> float:
    """Half the least weight of a 1-cycle that is not null-homologous; inf if none.

    ``weights`` maps sorted edges to non-negative lengths (or is a callable ``w(u, v)``);
    unit weights by default. ``method="exhaustive"`` enumerates every simple cycle
    instead of the Horton candidates and is meant for small complexes.
    """
    if K.num_simplices(1) == 0:
        return INF
    piv = _boundary_pivots(K)
    if method == "horton":
        cands = horton_candidates(K, weights)
    elif method == "exhaustive":
        cands = simple_cycle_masks(K, weights)
    else:
        raise ValueError(f"unknown method {method!r}")
    for wt, mask in cands:
        if reduce_vector(mask, piv):
            return wt / 2.0
    return INF


def simple_cycle_masks(K: SimplexTree, weights=None) -> list[tuple[float, int]]:
    """Every simple cycle of the 1-skeleton as (weight, edge bitmask). Exponential."""
    w = _weight_fn(weights)
    edges = K.simplices(1)
    eidx = {e: i for i, e in enumerate(edges)}
    adj: dict[int, list[int]] = {v: [] for v in K.vertices()}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    found: dict[int, float] = {}
    # each cycle is rooted at its smallest vertex and found from both directions
    for root in sorted(adj):
        stack = [(root, [root], 0)]
        while stack:
            u, path, mask = stack.pop()
            for v in adj[u]:
                if v < root:
                    continue
                e = (u, v) if u < v else (v, u)
                bit = 1 << eidx[e]
                if v == root and len(path) >= 3:
                    m = mask | bit
                    if m not in found:
                        found[m] = sum(float(w(*edges[j])) for j in _bits(m))
                elif v not in path:
                    stack.append((v, path + [v], mask | bit))
    return sorted(((wt, m) for m, wt in found.items()), key=lambda t: (t[0], t[1]))


# ---------------------------------------------------------------------------
# six-term rank lemma
# ---------------------------------------------------------------------------


@dataclass
class SixTermRanks:
    a_to_f: int
    b_to_e: int
    c_to_d: int

    @property
    def hypothesis(self) -> bool:
        return self.a_to_f == self.c_to_d

    @property
    def conclusion(self) -> bool:
        return self.b_to_e == self.c_to_d


def six_term_ranks(maps: Sequence[Z2Matrix]) -> SixTermRanks:
    """Ranks of A->F, B->E and C->D for five composable maps A->B->C->D->E->F.

    ``maps[i]`` is a matrix acting on column vectors, so maps[i+1].cols == maps[i].rows.
    """
    if len(maps) != 5:
        raise ValueError("need exactly five maps A->B->C->D->E->F")
    for i in range(4):
        if maps[i + 1].cols != maps[i].rows:
            raise ValueError(f"maps {i} and {i + 1} are not composable: {maps[i].shape} then {maps[i + 1].shape}")
    f1, f2, f3, f4, f5 = maps
    return SixTermRanks(
        z2_rank(f5 @ f4 @ f3 @ f2 @ f1),
        z2_rank(f4 @ f3 @ f2),
        z2_rank(f3),
    )


def six_term_rank_check(maps: Sequence[Z2Matrix]) -> bool | None:
    """Whether rank(B->E) = rank(C->D) holds, given rank(A->F) = rank(C->D).

    Returns None when the hypothesis fails (the check does not apply).
    """
    r = six_term_ranks(maps)
    if not r.hypothesis:
        return None
    return r.conclusion
