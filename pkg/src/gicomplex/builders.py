"""Rips complexes, graph induced complexes and simplicial maps between them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import DEFAULT_MAX_DIM, GICError, MetricChoice, PointCloud, Simplex, SimplexTree
from .graph import NeighborhoodGraph, build_neighborhood_graph
from .sampling import Subsample, greedy_subsample


class SimplicialityError(GICError):
    """A vertex map sends some simplex to a vertex set that is not a simplex of the target."""

    def __init__(self, simplex: Simplex, image: Simplex):
        self.simplex = simplex
        self.image = image
        super().__init__(f"image {image} of simplex {simplex} is not in the codomain")


# ---------------------------------------------------------------------------
# clique enumeration
# ---------------------------------------------------------------------------


def bron_kerbosch(adj: Sequence[set[int]], vertices: Iterable[int] | None = None) -> Iterator[tuple[int, ...]]:
    """Maximal cliques via Bron-Kerbosch with Tomita pivoting.

    ``adj[v]`` is the neighbor set of v. Isolated vertices come out as 1-cliques.
    """
    verts = set(range(len(adj))) if vertices is None else set(vertices)
    stack: list[tuple[list[int], set[int], set[int]]] = [([], verts, set())]
    while stack:
        R, Pset, X = stack.pop()
        if not Pset:
            if not X:
                yield tuple(sorted(R))
            continue
        # pivot maximizing |P ∩ N(u)|
        u = max(itertools.chain(Pset, X), key=lambda w: len(Pset & adj[w]))
        for v in sorted(Pset - adj[u], reverse=True):
            Nv = adj[v]
            stack.append((R + [v], Pset & Nv, X & Nv))
            Pset = Pset - {v}
            X = X | {v}


def expand_cliques(adj: Sequence[Iterable[int]], max_size: int) -> Iterator[tuple[int, ...]]:
    """Every clique with at most ``max_size`` vertices, each exactly once, lexicographic order.

    Cliques are grown by intersecting the sorted higher-neighbor lists.
    """
    if max_size < 1:
        return
    higher = [sorted(w for w in a if w > v) for v, a in enumerate(adj)]
    higher_sets = [set(h) for h in higher]
    for v in range(len(adj)):
        stack = [((v,), higher[v])]
        while stack:
            clique, cand = stack.pop()
            yield clique
            if len(clique) == max_size:
                continue
            for w in reversed(cand):
                hw = higher_sets[w]
                stack.append((clique + (w,), [x for x in cand if x > w and x in hw]))


# ---------------------------------------------------------------------------
# Rips
# ---------------------------------------------------------------------------


def clique_complex(adj: Sequence[Iterable[int]], max_dim: int = DEFAULT_MAX_DIM) -> SimplexTree:
    K = SimplexTree(max_dim)
    for c in expand_cliques(adj, max_dim + 1):
        # the expansion emits every clique, so adding without per-insert closure keeps K closed
        K._add(c)
    return K


def build_rips(P: PointCloud, alpha: float, max_dim: int = DEFAULT_MAX_DIM, graph: NeighborhoodGraph | None = None) -> SimplexTree:
    """Clique complex of G^alpha(P), truncated at ``max_dim``."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    G = graph if graph is not None else build_neighborhood_graph(P, alpha)
    return clique_complex(G.adjacency, max_dim)


def rips_on_subsample(P: PointCloud, S: Subsample, alpha: float, max_dim: int = 2) -> SimplexTree:
    """Rips complex on Q with Euclidean edge threshold alpha + 2*delta, labelled by point id."""
    Q = sorted(S.q_indices)
    sub = P.subset(Q)
    K = build_rips(sub, alpha + 2 * S.delta, max_dim)
    return K.relabel(Q)


# ---------------------------------------------------------------------------
# graph induced complex
# ---------------------------------------------------------------------------


@dataclass
class GicResult:
    complex: SimplexTree
    alpha: float
    subsample: Subsample
    sparsified_edge_count: int
    graph: NeighborhoodGraph | None = field(default=None, repr=False)

    @property
    def nu(self) -> np.ndarray:
        return self.subsample.nu


def sparsify(G: NeighborhoodGraph, nu: Sequence[int]) -> list[set[int]]:
    """Adjacency of G with every edge pp' such that nu(p) = nu(p') removed."""
    nu = list(nu)
    return [{v for v in nbrs if nu[v] != nu[u]} for u, nbrs in enumerate(G.adjacency)]


def _colorful_simplices(adj: list[set[int]], nu: list[int], colors: Sequence[int], max_size: int) -> Iterator[tuple[int, ...]]:
    """Color sets (sorted) spanned by some clique with pairwise distinct colors.

    Candidates at each size come from extending the previous level through the
    colored 1-skeleton; each candidate is confirmed by a search for a witnessing clique.
    """
    cells: dict[int, set[int]] = {c: set() for c in colors}
    for p, c in enumerate(nu):
        cells[c].add(p)
    by_color: list[dict[int, set[int]]] = []
    for p, nbrs in enumerate(adj):
        d: dict[int, set[int]] = {}
        for w in nbrs:
            d.setdefault(nu[w], set()).add(w)
        by_color.append(d)

    level = [(c,) for c in sorted(cells)]
    yield from level
    if max_size < 2:
        return
    cnbr: dict[int, set[int]] = {c: set() for c in cells}
    for p, d in enumerate(by_color):
        cnbr[nu[p]].update(d)
    level = sorted((a, b) for a in cnbr for b in cnbr[a] if a < b)
    yield from level

    def witnessed(sig: tuple[int, ...]) -> bool:
        def rec(cands: list[set[int]]) -> bool:
            if len(cands) == 1:
                return bool(cands[0])
            first, rest = cands[0], cands[1:]
            for p in first:
                nb = by_color[p]
                nxt = []
                for c_set, c in zip(rest, sig[len(sig) - len(rest):]):
                    s = c_set & nb.get(c, _EMPTY)
                    if not s:
                        break
                    nxt.append(s)
                else:
                    if rec(nxt):
                        return True
            return False

        return rec([cells[c] for c in sig])

    size = 2
    while level and size < max_size:
        present = set(level)
        nxt_level = []
        for sig in level:
            common = set.intersection(*(cnbr[c] for c in sig))
            for c in sorted(w for w in common if w > sig[-1]):
                cand = sig + (c,)
                if all(f in present for f in _facets_containing_last(cand)) and witnessed(cand):
                    nxt_level.append(cand)
        level = nxt_level
        yield from level
        size += 1


_EMPTY: set[int] = set()


def _facets_containing_last(s: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    for i in range(len(s) - 1):
        yield s[:i] + s[i + 1:]


def build_gic(G: NeighborhoodGraph, S: Subsample, max_dim: int = DEFAULT_MAX_DIM, method: str = "colorful") -> GicResult:
    """Graph induced complex of G on Q under the vertex map nu.

    Edges inside a single cell are deleted first; every remaining clique then has
    pairwise distinct images and contributes the simplex of its images.
    ``method`` picks the clique search: ``"colorful"`` (search driven by candidate
    image simplices; the default, and far faster on dense graphs), ``"bk"``
    (maximal cliques, truncated) or ``"expand"`` (all cliques up to max_dim+1
    vertices). All three produce the same complex.
    """
    nu = [int(x) for x in S.nu]
    if len(nu) != G.n_vertices:
        raise ValueError("subsample and graph are over different vertex sets")
    adj = sparsify(G, nu)
    n_sparse = sum(len(a) for a in adj) // 2
    K = SimplexTree(max_dim)
    for q in sorted(set(nu)):
        K._add((q,))
    m = max_dim + 1
    if method == "bk":
        seen: set[tuple[int, ...]] = set()
        for c in bron_kerbosch(adj):
            img = tuple(sorted(nu[p] for p in c))
            if img in seen:
                continue
            seen.add(img)
            K.insert_clique_truncated(img)
    elif method == "expand":
        for c in expand_cliques(adj, m):
            img = tuple(sorted(nu[p] for p in c))
            if img not in K:
                K.insert(img)
    elif method == "colorful":
        for sig in _colorful_simplices(adj, nu, sorted(set(nu)), m):
            K._add(sig)
    else:
        raise ValueError(f"unknown method {method!r}")
    return GicResult(K, G.alpha, S, n_sparse, G)


def gic(P: PointCloud, alpha: float, delta: float, metric: str = "euclidean", max_dim: int = DEFAULT_MAX_DIM,
        seed: int = 0, method: str = "colorful") -> GicResult:
    """Convenience wrapper: G^alpha(P), a delta-subsample, and the GIC."""
    G = build_neighborhood_graph(P, alpha)
    m = MetricChoice.graph_distance(G) if metric == "graph" else MetricChoice.euclidean()
    S = greedy_subsample(P, m, delta, seed)
    return build_gic(G, S, max_dim, method)


# ---------------------------------------------------------------------------
# vertex maps
# ---------------------------------------------------------------------------


@dataclass
class VertexMap:
    domain: SimplexTree
    codomain: SimplexTree
    table: dict[int, int]
    verified: bool = False

    def image(self, simplex: Iterable[int]) -> Simplex:
        t = self.table
        return tuple(sorted({t[v] for v in simplex}))

    def compose(self, other: "VertexMap") -> "VertexMap":
        """``other ∘ self``."""
        return induced_vertex_map(self.domain, other.codomain, {v: other.table[w] for v, w in self.table.items()})


def induced_vertex_map(K1: SimplexTree, K2: SimplexTree, assignment) -> VertexMap:
    """Extend a vertex assignment to a simplicial map, checking every simplex of K1.

    ``assignment`` is a mapping or an array indexed by vertex id.
    """
    table = {v: int(assignment[v]) for v in K1.vertices()}
    m = VertexMap(K1, K2, table)
    for s in K1.walk():
        img = m.image(s)
        if img not in K2:
            raise SimplicialityError(s, img)
    m.verified = True
    return m


def nearest_in(S: Subsample, points: Iterable[int]) -> dict[int, int]:
    """q -> nearest point of another subsample, read off that subsample's nu table."""
    return {int(q): int(S.nu[q]) for q in points}


@dataclass
class GicPair:
    small: GicResult
    large: GicResult
    map: VertexMap
    multiplier: float

    def __iter__(self):
        return iter((self.small, self.large, self.map))


def build_gic_pair(P: PointCloud, alpha: float, delta: float, delta2: float, metric: str = "euclidean",
                   max_dim: int = 2, multiplier: float = 4.0, seed: int = 0) -> GicPair:
    """K1 = GIC at scale alpha on a delta-sample, K2 = GIC at scale multiplier*(alpha + 2 delta)
    on an independent delta2-sample, and the map q -> nearest q' between them.

    Under the graph metric both subsamples use shortest paths in G^alpha(P).
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if not delta2 > delta:
        raise ValueError(f"delta2 ({delta2}) must exceed delta ({delta})")
    G1 = build_neighborhood_graph(P, alpha)
    m = MetricChoice.graph_distance(G1) if metric == "graph" else MetricChoice.euclidean()
    S1 = greedy_subsample(P, m, delta, seed)
    K1 = build_gic(G1, S1, max_dim)
    alpha2 = multiplier * (alpha + 2 * delta)
    G2 = build_neighborhood_graph(P, alpha2)
    S2 = greedy_subsample(P, m, delta2, seed)
    K2 = build_gic(G2, S2, max_dim)
    h = induced_vertex_map(K1.complex, K2.complex, nearest_in(S2, S1.q_indices))
    return GicPair(K1, K2, h, multiplier)
