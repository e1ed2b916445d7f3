"""The alpha-neighborhood graph G^alpha(P) and shortest-path distances on it."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .core import PointCloud

INF = math.inf


@dataclass(frozen=True)
class NeighborhoodGraph:
    """Undirected graph on point ids with Euclidean edge weights.

    ``adjacency[u]`` is the ascending tuple of neighbors of u and
    ``weights[u]`` the matching edge lengths.
    """

    alpha: float
    adjacency: tuple[tuple[int, ...], ...]
    weights: tuple[tuple[float, ...], ...]

    @property
    def n_vertices(self) -> int:
        return len(self.adjacency)

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int, float]]:
        """All edges as ``(u, v, weight)`` with u < v, in lexicographic order."""
        out = []
        for u, (nbrs, ws) in enumerate(zip(self.adjacency, self.weights)):
            for v, w in zip(nbrs, ws):
                if u < v:
                    out.append((u, v, w))
        return out

    def edge_set(self) -> set[tuple[int, int]]:
        return {(u, v) for u, v, _ in self.edges()}

    def neighbor_sets(self) -> list[set[int]]:
        return [set(a) for a in self.adjacency]

    def weight(self, u: int, v: int) -> float:
        nbrs = self.adjacency[u]
        i = _bisect(nbrs, v)
        if i < len(nbrs) and nbrs[i] == v:
            return self.weights[u][i]
        raise KeyError((u, v))

    def components(self) -> list[int]:
        """Component label per vertex (label = smallest vertex id in the component)."""
        n = self.n_vertices
        label = [-1] * n
        for s in range(n):
            if label[s] >= 0:
                continue
            label[s] = s
            stack = [s]
            while stack:
                u = stack.pop()
                for v in self.adjacency[u]:
                    if label[v] < 0:
                        label[v] = s
                        stack.append(v)
        return label

    def to_csgraph(self):
        """Symmetric scipy CSR matrix of edge weights."""
        from scipy.sparse import csr_matrix

        n = self.n_vertices
        indptr = np.zeros(n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in self.adjacency])
        indices = np.fromiter((v for a in self.adjacency for v in a), dtype=np.int64, count=indptr[-1])
        data = np.fromiter((w for ws in self.weights for w in ws), dtype=np.float64, count=indptr[-1])
        # explicit zero-length edges (duplicate points) must survive as stored entries
        data = np.where(data == 0.0, np.finfo(float).tiny, data)
        return csr_matrix((data, indices, indptr), shape=(n, n))


def _bisect(seq, x) -> int:
    lo, hi = 0, len(seq)
    while lo < hi:
        mid = (lo + hi) // 2
        if seq[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def pairwise_within(X: np.ndarray, r: float, method: str = "auto") -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All pairs i < j with ||X[i] - X[j]|| <= r (inclusive), with their distances.

    The KD-tree path prefilters with a slightly inflated radius and then applies the
    same exact test as the brute-force path, so both return identical pairs.
    """
    n = len(X)
    if n < 2 or r < 0:
        z = np.zeros(0, dtype=np.intp)
        return z, z, np.zeros(0)
    if method == "auto":
        method = "brute" if n <= 400 else "kdtree"
    if method == "brute":
        I, J, D = [], [], []
        for i in range(n - 1):
            d = np.sqrt(((X[i + 1:] - X[i]) ** 2).sum(axis=1))
            k = np.flatnonzero(d <= r)
            I.append(np.full(len(k), i, dtype=np.intp))
            J.append(k + i + 1)
            D.append(d[k])
        return np.concatenate(I), np.concatenate(J).astype(np.intp), np.concatenate(D)
    if method != "kdtree":
        raise ValueError(f"unknown method {method!r}")
    tree = cKDTree(X)
    pairs = tree.query_pairs(r * (1 + 1e-9) + 1e-300, output_type="ndarray")
    if len(pairs) == 0:
        z = np.zeros(0, dtype=np.intp)
        return z, z, np.zeros(0)
    pairs = np.sort(pairs, axis=1)
    d = np.sqrt(((X[pairs[:, 1]] - X[pairs[:, 0]]) ** 2).sum(axis=1))
    keep = d <= r
    pairs, d = pairs[keep], d[keep]
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order, 0].astype(np.intp), pairs[order, 1].astype(np.intp), d[order]


def build_neighborhood_graph(P: PointCloud, alpha: float, method: str = "auto") -> NeighborhoodGraph:
    """Connect every pair of points at Euclidean distance <= alpha."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    X = P.points
    I, J, D = pairwise_within(X, alpha, method)
    n = len(P)
    adj: list[list[int]] = [[] for _ in range(n)]
    wts: list[list[float]] = [[] for _ in range(n)]
    for i, j, d in zip(I.tolist(), J.tolist(), D.tolist()):
        adj[i].append(j)
        wts[i].append(d)
        adj[j].append(i)
        wts[j].append(d)
    adjacency = []
    weights = []
    for a, w in zip(adj, wts):
        order = sorted(range(len(a)), key=a.__getitem__)
        adjacency.append(tuple(a[k] for k in order))
        weights.append(tuple(w[k] for k in order))
    return NeighborhoodGraph(float(alpha), tuple(adjacency), tuple(weights))


def graph_distances(G: NeighborhoodGraph, source: int, limit: float = INF) -> list[float]:
    """Dijkstra from ``source``; unreachable vertices (or those beyond ``limit``) get inf."""
    n = G.n_vertices
    if not 0 <= source < n:
        raise IndexError(f"source {source} out of range for {n} vertices")
    dist = [INF] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    adjacency, weights = G.adjacency, G.weights
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in zip(adjacency[u], weights[u]):
            nd = d + w
            if nd < dist[v] and nd <= limit:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def ball(G: NeighborhoodGraph, source: int, radius: float) -> dict[int, float]:
    """Vertices within graph distance ``radius`` (inclusive) of ``source``, with distances."""
    done: dict[int, float] = {}
    best = {source: 0.0}
    heap = [(0.0, source)]
    adjacency, weights = G.adjacency, G.weights
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done[u] = d
        for v, w in zip(adjacency[u], weights[u]):
            nd = d + w
            if nd <= radius and v not in done and nd < best.get(v, INF):
                best[v] = nd
                heapq.heappush(heap, (nd, v))
    return done


def shortest_path_tree(G: NeighborhoodGraph, source: int) -> tuple[list[float], list[int]]:
    """Distances and parent pointers (-1 for the root and unreachable vertices).

    Ties between equal-length paths go to the smaller parent id so the tree is
    deterministic.
    """
    n = G.n_vertices
    dist = [INF] * n
    parent = [-1] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = [False] * n
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in zip(G.adjacency[u], G.weights[u]):
            nd = d + w
            if nd < dist[v] or (nd == dist[v] and not done[v] and u < parent[v]):
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, parent


def write_edge_list(path, G: NeighborhoodGraph) -> None:
    with open(path, "w") as fh:
        for u, v, w in G.edges():
            fh.write(f"{u} {v} {w:.17g}\n")
