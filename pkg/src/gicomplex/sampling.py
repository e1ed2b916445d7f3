"""delta-sparse delta-samples of (P, d) via the iterative delta-cover algorithm."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from .core import GICError, MetricChoice, PointCloud
from .graph import INF, ball

log = logging.getLogger(__name__)


class SubsampleContractError(GICError):
    """A subsample failed its sparsity, cover or nearest-point check."""


@dataclass
class Subsample:
    """Q together with the nearest-point assignment nu: P -> Q.

    ``q_indices`` lists point ids in selection order; ``nu[p]`` is the point id of
    the q assigned to p and ``nu_dist[p]`` the distance d(p, nu(p)).
    """

    q_indices: list[int]
    nu: np.ndarray
    nu_dist: np.ndarray
    delta: float
    metric: MetricChoice
    seed: int = 0
    n_components: int = 1

    def __len__(self) -> int:
        return len(self.q_indices)

    @property
    def q_set(self) -> set[int]:
        return set(self.q_indices)

    def cells(self) -> dict[int, list[int]]:
        """Point ids grouped by their assigned q (the sets P_q)."""
        out: dict[int, list[int]] = {q: [] for q in self.q_indices}
        for p, q in enumerate(self.nu.tolist()):
            out[q].append(p)
        return out

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"{self.delta:.17g} {self.metric.kind}\n")
            for p, (q, d) in enumerate(zip(self.nu.tolist(), self.nu_dist.tolist())):
                fh.write(f"{p} {q} {d:.17g}\n")


def load_subsample(path, metric: MetricChoice | None = None) -> Subsample:
    with open(path) as fh:
        head = fh.readline().split()
        delta, kind = float(head[0]), head[1]
        rows = [line.split() for line in fh if line.strip()]
    nu = np.array([int(r[1]) for r in rows], dtype=np.intp)
    dist = np.array([float(r[2]) for r in rows])
    qs = sorted({int(q) for q in nu.tolist()})
    if metric is None:
        if kind != "euclidean":
            raise ValueError("graph-metric subsample needs its MetricChoice supplied")
        metric = MetricChoice.euclidean()
    return Subsample(qs, nu, dist, delta, metric)


class _EuclideanCover:
    def __init__(self, P: PointCloud):
        self.X = P.points
        self.tree = cKDTree(self.X) if len(P) > 64 else None

    def ball(self, q: int, r: float) -> dict[int, float]:
        x = self.X[q]
        if self.tree is None:
            cand = np.arange(len(self.X))
        else:
            cand = np.asarray(self.tree.query_ball_point(x, r * (1 + 1e-9) + 1e-300), dtype=np.intp)
        d = np.sqrt(((self.X[cand] - x) ** 2).sum(axis=1))
        keep = d <= r
        return dict(zip(cand[keep].tolist(), d[keep].tolist()))


class _GraphCover:
    def __init__(self, graph):
        self.graph = graph

    def ball(self, q: int, r: float) -> dict[int, float]:
        return ball(self.graph, q, r)


def _cover_for(P: PointCloud, metric: MetricChoice):
    metric.validate(P)
    if metric.kind == "euclidean":
        return _EuclideanCover(P)
    return _GraphCover(metric.graph)


def greedy_subsample(
    P: PointCloud,
    metric: MetricChoice,
    delta: float,
    seed: int = 0,
    strategy: str = "scan",
) -> Subsample:
    """Grow Q one point at a time from ``seed`` until the delta-covers reach every point.

    A new point is only ever chosen outside the closed delta-balls of the points
    already in Q, so Q stays delta-sparse. After each selection, every point in the
    new ball is reassigned if the new point is strictly closer (or equally close
    with a lower point id). ``strategy="scan"`` picks the first uncovered point in
    ascending id order; ``"farthest"`` picks the uncovered point farthest from Q
    (ties to the lowest id), with points unreachable in the graph metric counted
    as infinitely far.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    n = len(P)
    if n == 0:
        raise ValueError("empty point cloud")
    if not 0 <= seed < n:
        raise IndexError(f"seed {seed} out of range")
    if strategy not in ("scan", "farthest"):
        raise ValueError(f"unknown strategy {strategy!r}")
    cover = _cover_for(P, metric)

    nu = np.full(n, -1, dtype=np.intp)
    nu_dist = np.full(n, INF)
    Q: list[int] = []

    def add(q: int) -> None:
        Q.append(q)
        for p, d in cover.ball(q, delta).items():
            cur = nu[p]
            if cur < 0 or d < nu_dist[p] or (d == nu_dist[p] and q < cur):
                nu[p] = q
                nu_dist[p] = d

    add(seed)
    if strategy == "scan":
        nxt = 0
        while True:
            while nxt < n and nu[nxt] >= 0:
                nxt += 1
            if nxt == n:
                break
            add(nxt)
    else:
        # farthest point: track d(p, Q) for every p (not just within delta)
        far = _distance_to_set_tracker(P, metric, seed)
        while True:
            cand = far.farthest_uncovered(nu)
            if cand is None:
                break
            add(cand)
            far.update(cand)

    n_comp = 1
    if metric.kind == "graph":
        labels = metric.graph.components()
        n_comp = len(set(labels))
        if n_comp > 1:
            log.warning("graph metric: %d connected components; subsampled per component", n_comp)
    return Subsample(Q, nu, nu_dist, float(delta), metric, seed, n_comp)


class _distance_to_set_tracker:
    def __init__(self, P: PointCloud, metric: MetricChoice, seed: int):
        self.P = P
        self.metric = metric
        self.d = np.full(len(P), INF)
        self.csgraph = metric.graph.to_csgraph() if metric.kind == "graph" else None
        self.update(seed)

    def _dist_from(self, q: int) -> np.ndarray:
        if self.metric.kind == "euclidean":
            X = self.P.points
            return np.sqrt(((X - X[q]) ** 2).sum(axis=1))
        return dijkstra(self.csgraph, indices=q, directed=False)

    def update(self, q: int) -> None:
        np.minimum(self.d, self._dist_from(q), out=self.d)

    def farthest_uncovered(self, nu: np.ndarray):
        mask = nu < 0
        if not mask.any():
            return None
        idx = np.flatnonzero(mask)
        vals = self.d[idx]
        return int(idx[int(np.argmax(vals))])


@dataclass
class SubsampleReport:
    ok: bool
    checked_points: int
    violation: str | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def _q_distance_matrix(P: PointCloud, S: Subsample, rows: np.ndarray, graph_d=None) -> np.ndarray:
    """d(rows[i], Q[j]) computed independently of the greedy loop."""
    Q = np.asarray(S.q_indices, dtype=np.intp)
    if graph_d is not None:
        return graph_d[:, rows].T
    if S.metric.kind == "euclidean":
        X = P.points
        out = np.empty((len(rows), len(Q)))
        step = max(1, 2_000_000 // max(1, len(Q)))
        for a in range(0, len(rows), step):
            blk = X[rows[a:a + step]]
            out[a:a + step] = np.sqrt(((blk[:, None, :] - X[Q][None, :, :]) ** 2).sum(axis=2))
        return out
    D = dijkstra(S.metric.graph.to_csgraph(), indices=Q, directed=False)
    return D[:, rows].T


def verify_subsample(S: Subsample, P: PointCloud, rtol: float = 1e-9) -> SubsampleReport:
    """Exhaustively check delta-sparsity, the delta-cover and the nearest-point map."""
    n = len(P)
    delta = S.delta
    tol = rtol * max(1.0, delta)
    Q = np.asarray(S.q_indices, dtype=np.intp)
    qset = set(Q.tolist())
    if len(qset) != len(Q):
        return SubsampleReport(False, 0, "duplicate entries in Q")
    if len(S.nu) != n:
        return SubsampleReport(False, 0, f"nu has {len(S.nu)} entries for {n} points")
    for q in Q.tolist():
        if S.nu[q] != q:
            return SubsampleReport(False, 0, f"nu({q}) = {S.nu[q]} but {q} is in Q")
    bad = [p for p in range(n) if int(S.nu[p]) not in qset]
    if bad:
        return SubsampleReport(False, 0, f"nu({bad[0]}) = {S.nu[bad[0]]} is not in Q")

    graph_d = None
    if S.metric.kind == "graph":
        graph_d = dijkstra(S.metric.graph.to_csgraph(), indices=Q, directed=False)

    # sparsity
    DQ = _q_distance_matrix(P, S, Q, graph_d)
    np.fill_diagonal(DQ, INF)
    i, j = np.unravel_index(np.argmin(DQ), DQ.shape) if len(Q) > 1 else (0, 0)
    if len(Q) > 1 and DQ[i, j] < delta - tol:
        return SubsampleReport(
            False, 0, f"sparsity: d(q{Q[i]}, q{Q[j]}) = {DQ[i, j]:.6g} < delta = {delta:.6g}",
            {"pair": (int(Q[i]), int(Q[j])), "distance": float(DQ[i, j])},
        )

    # cover and nearest map, in blocks
    if S.metric.kind == "graph":
        labels = S.metric.graph.components()
        comp_has_q = {labels[q] for q in Q.tolist()}
    col = {q: k for k, q in enumerate(Q.tolist())}
    step = 4096
    for a in range(0, n, step):
        rows = np.arange(a, min(n, a + step))
        D = _q_distance_matrix(P, S, rows, graph_d)
        best = D.min(axis=1)
        assigned = D[np.arange(len(rows)), [col[int(q)] for q in S.nu[rows]]]
        for r, p in enumerate(rows.tolist()):
            if S.metric.kind == "graph" and labels[p] not in comp_has_q:
                return SubsampleReport(False, p, f"cover: point {p}'s component has no sample")
            if assigned[r] > delta + tol:
                return SubsampleReport(
                    False, p, f"cover: d({p}, nu({p})) = {assigned[r]:.6g} > delta = {delta:.6g}"
                )
            if not math.isclose(assigned[r], S.nu_dist[p], rel_tol=1e-9, abs_tol=1e-12):
                return SubsampleReport(
                    False, p, f"nu_dist({p}) = {S.nu_dist[p]:.6g} but d({p}, nu({p})) = {assigned[r]:.6g}"
                )
            if assigned[r] > best[r] + tol:
                k = int(np.argmin(D[r]))
                return SubsampleReport(
                    False, p,
                    f"nearest map: nu({p}) = {int(S.nu[p])} at {assigned[r]:.6g} "
                    f"but q{Q[k]} is at {best[r]:.6g}",
                )
            if assigned[r] == best[r]:
                exact = Q[np.flatnonzero(D[r] == best[r])]
                if int(S.nu[p]) != int(exact.min()):
                    return SubsampleReport(
                        False, p,
                        f"nearest map tie: nu({p}) = {int(S.nu[p])} but lower id {int(exact.min())} is equidistant",
                    )
    return SubsampleReport(True, n)
