"""Surface reconstruction in R^3 from a graph induced complex.

Pipeline: remove one triangle from every improperly intersecting pair using a
Delaunay test on the pair's vertices, drop triangles with circumradius above
2*delta, strip sharp edges, then walk the outside of what is left.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .builders import build_gic
from .core import GICError, MetricChoice, PointCloud, SimplexTree
from .graph import build_neighborhood_graph
from .sampling import SubsampleContractError, greedy_subsample, verify_subsample

log = logging.getLogger(__name__)

TOL = 1e-10


class DegenerateTriangleError(GICError, ValueError):
    """A triangle's vertices are (numerically) collinear."""


class DimensionError(GICError, ValueError):
    """Reconstruction needs points in R^3."""


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------


def normalize_coordinates(X: np.ndarray) -> np.ndarray:
    """Translate and uniformly scale into the unit bounding box."""
    X = np.asarray(X, dtype=float)
    if len(X) == 0:
        return X.copy()
    lo = X.min(axis=0)
    ext = float((X.max(axis=0) - lo).max())
    return (X - lo) / (ext if ext > 0 else 1.0)


# Small fixed-size geometry is done on float tuples: numpy's per-call overhead
# dominates on 3-vectors.


def _sub(u, v):
    return (u[0] - v[0], u[1] - v[1], u[2] - v[2])


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _axpy(t, d, p):
    return (p[0] + t * d[0], p[1] + t * d[1], p[2] + t * d[2])


def _vec(p):
    return (float(p[0]), float(p[1]), float(p[2]))


def _unit_normal(a, b, c, tol=TOL):
    ab, ac, bc = _sub(b, a), _sub(c, a), _sub(c, b)
    n = _cross(ab, ac)
    L = max(_dot(ab, ab), _dot(ac, ac), _dot(bc, bc))
    nn = math.sqrt(_dot(n, n))
    if L == 0 or nn <= tol * L:
        raise DegenerateTriangleError("collinear triangle")
    return (n[0] / nn, n[1] / nn, n[2] / nn)


def _edge_normals(tri, n):
    """In-plane unit normals of the triangle's edges, pointing inward."""
    out = []
    for u, v, w in ((tri[0], tri[1], tri[2]), (tri[1], tri[2], tri[0]), (tri[2], tri[0], tri[1])):
        m = _cross(n, _sub(v, u))
        if _dot(m, _sub(w, u)) < 0:
            m = (-m[0], -m[1], -m[2])
        mm = math.sqrt(_dot(m, m))
        out.append((u, (m[0] / mm, m[1] / mm, m[2] / mm)))
    return out


def _clip_segment(p0, p1, tri, n, tol, edge_normals=None):
    """Part of the closed segment p0p1 inside the closed triangle (None, a point, or two points)."""
    a = tri[0]
    en = edge_normals or _edge_normals(tri, n)
    d0 = _dot(n, _sub(p0, a))
    d1 = _dot(n, _sub(p1, a))
    if abs(d0) <= tol and abs(d1) <= tol:
        t0, t1 = 0.0, 1.0
        for u, m in en:
            f0 = _dot(m, _sub(p0, u))
            f1 = _dot(m, _sub(p1, u))
            # f(t) = f0 + t (f1 - f0) >= -tol
            if abs(f1 - f0) <= 1e-300:
                if f0 < -tol:
                    return None
                continue
            t = (-tol - f0) / (f1 - f0)
            if f1 > f0:
                t0 = max(t0, t)
            else:
                t1 = min(t1, t)
            if t0 > t1:
                return None
        d = _sub(p1, p0)
        return [_axpy(t0, d, p0), _axpy(t1, d, p0)]
    if (d0 > tol and d1 > tol) or (d0 < -tol and d1 < -tol):
        return None
    if abs(d0) <= tol:
        x = p0
    elif abs(d1) <= tol:
        x = p1
    else:
        x = _axpy(d0 / (d0 - d1), _sub(p1, p0), p0)
    for u, m in en:
        if _dot(m, _sub(x, u)) < -tol:
            return None
    return [x]


def _dist_to_face(x, face) -> float:
    if not face:
        return math.inf
    if len(face) == 1:
        d = _sub(x, face[0])
        return math.sqrt(_dot(d, d))
    u, v = face
    d = _sub(v, u)
    t = min(1.0, max(0.0, _dot(_sub(x, u), d) / _dot(d, d)))
    r = _sub(x, _axpy(t, d, u))
    return math.sqrt(_dot(r, r))


def triangles_intersect(t1, t2, tol: float = TOL) -> bool:
    """True iff the closed triangles meet anywhere outside their common face.

    ``t1``/``t2`` are 3x3 coordinate arrays; vertices with identical coordinates
    are treated as shared. The pair is rescaled to a unit bounding box first.
    """
    A = np.asarray(t1, dtype=float)
    B = np.asarray(t2, dtype=float)
    if A.shape != (3, 3) or B.shape != (3, 3):
        raise ValueError("triangles must be 3x3 coordinate arrays in R^3")
    A = [_vec(p) for p in A]
    B = [_vec(p) for p in B]
    shared = [i for i in range(3) if A[i] in B]
    if len(shared) == 3:
        return False
    pts = A + B
    lo = [min(p[k] for p in pts) for k in range(3)]
    ext = max(max(p[k] for p in pts) - lo[k] for k in range(3)) or 1.0
    A = [((p[0] - lo[0]) / ext, (p[1] - lo[1]) / ext, (p[2] - lo[2]) / ext) for p in A]
    B = [((p[0] - lo[0]) / ext, (p[1] - lo[1]) / ext, (p[2] - lo[2]) / ext) for p in B]
    nA = _unit_normal(*A, tol)
    nB = _unit_normal(*B, tol)
    face = [A[i] for i in shared]
    slack = max(1e3 * tol, 1e-9)
    for src, tri, n in ((A, B, nB), (B, A, nA)):
        en = _edge_normals(tri, n)
        for i, j in ((0, 1), (1, 2), (2, 0)):
            hit = _clip_segment(src[i], src[j], tri, n, tol, en)
            if not hit:
                continue
            for x in hit:
                if _dist_to_face(x, face) > slack:
                    return True
    return False


def circumradius(a, b, c) -> float:
    """Circumradius of a triangle in R^n; inf when degenerate."""
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    la = math.sqrt(float(np.dot(b - c, b - c)))
    lb = math.sqrt(float(np.dot(c - a, c - a)))
    lc = math.sqrt(float(np.dot(a - b, a - b)))
    # Heron in the numerically stable ordering
    x, y, z = sorted((la, lb, lc), reverse=True)
    prod = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z))
    if x == 0 or prod <= (TOL * x * x) ** 2:
        return math.inf
    return la * lb * lc / math.sqrt(prod)


def _circumcenter(a, b, c):
    ab, ac = _sub(b, a), _sub(c, a)
    n = _cross(ab, ac)
    nn = _dot(n, n)
    if nn == 0:
        raise DegenerateTriangleError("collinear triangle")
    u = _cross(n, ab)
    v = _cross(ac, n)
    sa, sb = _dot(ac, ac), _dot(ab, ab)
    return tuple(a[k] + (sa * u[k] + sb * v[k]) / (2 * nn) for k in range(3))


def circumcenter(a, b, c) -> np.ndarray:
    return np.array(_circumcenter(_vec(a), _vec(b), _vec(c)))


def delaunay_margin(tri, others, span: float = 1.0) -> float:
    """Best clearance max_s min_o (|c(s) - o|^2 - r(s)^2) over spheres through ``tri``.

    The spheres through a triangle's vertices are centred on the line
    c(s) = cc + s*n through the circumcentre along the unit normal, and the
    clearance of each other point o is linear in s: A_o - s*B_o. The maximum of
    the lower envelope is taken over |s| <= span (coordinates are expected in a
    unit box). Positive means some sphere has every other point strictly outside,
    negative means none has them all outside or on it; 0 is the cospherical case.
    """
    a, b, c = (_vec(v) for v in tri)
    cc = _circumcenter(a, b, c)
    n = _unit_normal(a, b, c)
    ra = _sub(a, cc)
    r2 = _dot(ra, ra)
    lines = []
    for o in others:
        d = _sub(_vec(o), cc)
        lines.append((_dot(d, d) - r2, 2.0 * _dot(n, d)))
    if not lines:
        return math.inf
    cand = [-span, span]
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            (A1, B1), (A2, B2) = lines[i], lines[j]
            if B1 != B2:
                s = (A1 - A2) / (B1 - B2)
                if -span < s < span:
                    cand.append(s)
    return max(min(A - s * B for A, B in lines) for s in cand)


def locally_delaunay(tri, others, tol: float = TOL) -> bool:
    """Whether some sphere through ``tri``'s vertices has every point of ``others`` strictly outside.

    Requiring strict clearance resolves cospherical configurations the way a small
    perturbation would: a triangle whose circumsphere is forced through another
    point with points on both sides of its plane is not Delaunay.
    """
    return delaunay_margin(tri, others) > tol


# ---------------------------------------------------------------------------
# pruning
# ---------------------------------------------------------------------------


@dataclass
class PruneResult:
    complex: SimplexTree
    removed: list[tuple[int, ...]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def _triangle_complex(K: SimplexTree, keep: set) -> SimplexTree:
    """Vertices and edges of K plus the kept triangles; higher simplices dropped."""
    out = SimplexTree(2)
    for s in K.simplices(0) + K.simplices(1):
        out._add(s)
    for t in sorted(keep):
        out._add(t)
    return out


def candidate_pairs(tris: list[tuple[int, ...]], Y: np.ndarray, tol: float = TOL) -> list[tuple[int, int]]:
    """Index pairs of triangles whose bounding spheres and supporting planes do not separate them."""
    if len(tris) < 2:
        return []
    T = np.asarray(tris, dtype=np.intp)
    V = Y[T]  # (m, 3, 3)
    cen = V.mean(axis=1)
    rad = np.sqrt(((V - cen[:, None, :]) ** 2).sum(axis=2)).max(axis=1)
    tree = cKDTree(cen)
    pairs = tree.query_pairs(2 * float(rad.max()) + 10 * tol, output_type="ndarray")
    if len(pairs) == 0:
        return []
    i, j = pairs[:, 0], pairs[:, 1]
    close = np.sqrt(((cen[i] - cen[j]) ** 2).sum(axis=1)) <= rad[i] + rad[j] + 10 * tol
    i, j = i[close], j[close]
    n = np.cross(V[:, 1] - V[:, 0], V[:, 2] - V[:, 0])
    nl = np.linalg.norm(n, axis=1)
    nl[nl == 0] = 1.0
    n = n / nl[:, None]

    def separated(a, b):
        s = np.einsum("pk,pvk->pv", n[a], V[b] - V[a][:, None, 0, :])
        return np.all(s > tol, axis=1) | np.all(s < -tol, axis=1)

    keep = ~(separated(i, j) | separated(j, i))
    out = sorted(zip(np.minimum(i, j)[keep].tolist(), np.maximum(i, j)[keep].tolist()))
    return out


def find_intersections(K: SimplexTree, X: np.ndarray, tol: float = TOL) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All improperly intersecting triangle pairs of K (broad phase, then the exact predicate)."""
    Y = normalize_coordinates(X)
    tris = K.simplices(2)
    out = []
    for a, b in candidate_pairs(tris, Y, tol):
        if triangles_intersect(Y[list(tris[a])], Y[list(tris[b])], tol):
            out.append((tris[a], tris[b]))
    return out


def prune_intersections(K: SimplexTree, X: np.ndarray, tol: float = TOL) -> PruneResult:
    """Drop triangles until no two intersect other than in a shared face.

    Pairs are resolved in index order. For each pair still alive, a triangle is
    removed if it is not Delaunay with respect to the (at most six) vertices of the
    pair; both go if both fail. If neither fails, the one with the smaller
    Delaunay margin goes; an exact tie falls back to the larger circumradius and
    is noted.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != 3:
        raise DimensionError("surface reconstruction needs points in R^3")
    Y = normalize_coordinates(X)
    tris = K.simplices(2)
    alive = [True] * len(tris)
    res = PruneResult(K)
    degenerate = set()
    for idx, t in enumerate(tris):
        try:
            _unit_normal(*Y[list(t)], tol)
        except DegenerateTriangleError:
            degenerate.add(idx)
    for idx in sorted(degenerate):
        alive[idx] = False
        res.removed.append(tris[idx])
        res.notes.append(f"degenerate triangle {tris[idx]} removed")
    for a, b in candidate_pairs(tris, Y, tol):
        if not (alive[a] and alive[b]):
            continue
        ta, tb = tris[a], tris[b]
        if not triangles_intersect(Y[list(ta)], Y[list(tb)], tol):
            continue
        V = sorted(set(ta) | set(tb))
        ma = delaunay_margin(Y[list(ta)], Y[[v for v in V if v not in ta]])
        mb = delaunay_margin(Y[list(tb)], Y[[v for v in V if v not in tb]])
        ok_a, ok_b = ma > tol, mb > tol
        if ok_a and ok_b:
            if abs(ma - mb) > tol:
                loser = a if ma < mb else b
            else:
                ra = circumradius(*Y[list(ta)])
                rb = circumradius(*Y[list(tb)])
                loser = a if (ra, a) > (rb, b) else b
                res.notes.append(f"pair {ta} / {tb}: tie in Delaunay test; removed {tris[loser]}")
            alive[loser] = False
            res.removed.append(tris[loser])
            continue
        if not ok_a:
            alive[a] = False
            res.removed.append(ta)
        if not ok_b:
            alive[b] = False
            res.removed.append(tb)
    res.complex = _triangle_complex(K, {t for t, keep in zip(tris, alive) if keep})
    return res


def prune_by_circumradius(K: SimplexTree, X: np.ndarray, delta: float) -> PruneResult:
    """Drop triangles whose circumradius exceeds 2*delta (degenerate ones count as infinite)."""
    X = np.asarray(X, dtype=float)
    keep = set()
    res = PruneResult(K)
    for t in K.simplices(2):
        r = circumradius(*X[list(t)])
        if r <= 2 * delta:
            keep.add(t)
        else:
            res.removed.append(t)
            if math.isinf(r):
                res.notes.append(f"degenerate triangle {t} removed")
    res.complex = _triangle_complex(K, keep)
    return res


# ---------------------------------------------------------------------------
# manifold extraction
# ---------------------------------------------------------------------------


@dataclass
class TriangleMesh:
    vertices: list[int]
    triangles: list[tuple[int, int, int]]
    coordinates: np.ndarray

    def edges(self) -> dict[tuple[int, int], int]:
        count: dict[tuple[int, int], int] = defaultdict(int)
        for a, b, c in self.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                count[(u, v) if u < v else (v, u)] += 1
        return dict(count)

    def as_complex(self) -> SimplexTree:
        return SimplexTree.from_simplices(self.triangles, 2) if self.triangles else SimplexTree(2)

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges()) + len(self.triangles)

    def is_watertight(self) -> bool:
        return bool(self.triangles) and all(c == 2 for c in self.edges().values())

    def write_off(self, path) -> None:
        pos = {v: i for i, v in enumerate(self.vertices)}
        with open(path, "w") as fh:
            fh.write("OFF\n")
            fh.write(f"{len(self.vertices)} {len(self.triangles)} {len(self.edges())}\n")
            for v in self.vertices:
                x, y, z = self.coordinates[v]
                fh.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
            for a, b, c in self.triangles:
                fh.write(f"3 {pos[a]} {pos[b]} {pos[c]}\n")


def read_off(path) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    with open(path) as fh:
        tokens = [ln.split() for ln in fh if ln.strip() and not ln.startswith("#")]
    if tokens[0][0] != "OFF":
        raise ValueError("not an OFF file")
    nv, nf = int(tokens[1][0]), int(tokens[1][1])
    V = np.array([[float(x) for x in r[:3]] for r in tokens[2:2 + nv]], dtype=float).reshape(-1, 3)
    F = [tuple(int(x) for x in r[1:4]) for r in tokens[2 + nv:2 + nv + nf]]
    return V, F


@dataclass
class DefectReport:
    boundary_edges: list[tuple[int, int]] = field(default_factory=list)
    nonmanifold_edges: list[tuple[int, int]] = field(default_factory=list)
    nonmanifold_vertices: list[int] = field(default_factory=list)
    orientation_conflicts: int = 0
    sharp_removed: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.boundary_edges or self.nonmanifold_edges or self.nonmanifold_vertices
                    or self.orientation_conflicts or self.notes)

    def __str__(self) -> str:
        lines = [
            f"boundary edges: {len(self.boundary_edges)}",
            f"non-manifold edges: {len(self.nonmanifold_edges)}",
            f"non-manifold vertices: {len(self.nonmanifold_vertices)}",
            f"orientation conflicts: {self.orientation_conflicts}",
            f"triangles removed by sharp-edge pruning: {self.sharp_removed}",
        ]
        for e in self.boundary_edges[:20]:
            lines.append(f"  boundary edge {e[0]} {e[1]}")
        for e in self.nonmanifold_edges[:20]:
            lines.append(f"  non-manifold edge {e[0]} {e[1]}")
        for v in self.nonmanifold_vertices[:20]:
            lines.append(f"  non-manifold vertex {v}")
        lines.extend(self.notes)
        return "\n".join(lines)


def _edge_map(tris) -> dict[tuple[int, int], set]:
    em: dict[tuple[int, int], set] = defaultdict(set)
    for t in tris:
        a, b, c = t
        em[(a, b)].add(t)
        em[(a, c)].add(t)
        em[(b, c)].add(t)
    return em


def _wing(X, e0, e1, x):
    """Unit direction from edge e0e1 to vertex x, perpendicular to the edge; and the edge axis."""
    axis = X[e1] - X[e0]
    axis = axis / np.linalg.norm(axis)
    w = X[x] - X[e0]
    w = w - np.dot(w, axis) * axis
    nw = np.linalg.norm(w)
    return (w / nw if nw > 0 else w), axis


def _is_sharp(X, edge, tris, max_gap: float) -> bool:
    if len(tris) < 2:
        return True
    u, v = edge
    thirds = [next(x for x in t if x != u and x != v) for t in tris]
    w0, axis = _wing(X, u, v, thirds[0])
    n0 = np.cross(axis, w0)
    angles = sorted(math.atan2(float(np.dot(n0, w)), float(np.dot(w0, w))) % (2 * math.pi)
                    for w in (_wing(X, u, v, x)[0] for x in thirds))
    gaps = [b - a for a, b in zip(angles, angles[1:])] + [angles[0] + 2 * math.pi - angles[-1]]
    return max(gaps) > max_gap


def sharp_edge_prune(X: np.ndarray, tris: set, sharp_angle: float = 60.0) -> tuple[set, int]:
    """Repeatedly delete the triangles on sharp edges until none remain.

    An edge is sharp when it borders a single triangle, or when some angular gap
    between consecutive triangles around it exceeds 360 - ``sharp_angle`` degrees.
    """
    max_gap = 2 * math.pi - math.radians(sharp_angle)
    tris = set(tris)
    em = _edge_map(tris)
    queue = deque(sorted(em))
    queued = set(queue)
    removed = 0
    while queue:
        e = queue.popleft()
        queued.discard(e)
        ts = em.get(e)
        if not ts or not _is_sharp(X, e, ts, max_gap):
            continue
        for t in sorted(ts):
            tris.discard(t)
            removed += 1
            a, b, c = t
            for f in ((a, b), (a, c), (b, c)):
                em[f].discard(t)
                if f not in queued and em[f]:
                    queue.append(f)
                    queued.add(f)
    return tris, removed


def _seed_triangle(X, tris, em):
    verts = sorted({v for t in tris for v in t})
    top = max(verts, key=lambda v: (X[v, 0], -v))
    best, best_score = None, -1.0
    for t in sorted(tris):
        if top not in t:
            continue
        a, b, c = t
        n = np.cross(X[b] - X[a], X[c] - X[a])
        n = n / np.linalg.norm(n)
        if abs(n[0]) > best_score:
            best_score = abs(n[0])
            best = (a, b, c) if n[0] > 0 else (a, c, b)
    return best


def outside_walk(X: np.ndarray, tris: set) -> tuple[list[tuple[int, int, int]], int]:
    """Oriented triangles reached by walking the outer side of the complex.

    Starting from an outward-oriented triangle at the extreme vertex in x, each edge
    is crossed to the first triangle met when rotating about that edge through the
    outside. Returns the triangles and the number of orientation conflicts seen.
    """
    if not tris:
        return [], 0
    em = _edge_map(tris)
    seed = _seed_triangle(X, tris, em)
    oriented: dict[tuple[int, ...], tuple[int, int, int]] = {tuple(sorted(seed)): seed}
    queue = deque([seed])
    conflicts = 0
    while queue:
        a, b, c = queue.popleft()
        for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
            key = (u, v) if u < v else (v, u)
            cands = [t for t in em[key] if w not in t]
            if not cands:
                continue
            w_t, axis = _wing(X, u, v, w)
            n_t = np.cross(axis, w_t)
            best, best_ang = None, math.inf
            for t in sorted(cands):
                x = next(y for y in t if y != u and y != v)
                wx = _wing(X, u, v, x)[0]
                ang = math.atan2(float(np.dot(n_t, wx)), float(np.dot(w_t, wx)))
                if ang <= 0:
                    ang += 2 * math.pi
                if ang < best_ang:
                    best, best_ang = (v, u, x), ang
            k = tuple(sorted(best))
            if k in oriented:
                o = oriented[k]
                directed = {(o[0], o[1]), (o[1], o[2]), (o[2], o[0])}
                if (v, u) not in directed:
                    conflicts += 1
                continue
            oriented[k] = best
            queue.append(best)
    return sorted(oriented.values(), key=lambda t: tuple(sorted(t))), conflicts


def _nonmanifold_vertices(tris) -> list[int]:
    link: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for a, b, c in tris:
        link[a].append((b, c))
        link[b].append((a, c))
        link[c].append((a, b))
    bad = []
    for v, edges in link.items():
        adj: dict[int, list[int]] = defaultdict(list)
        for x, y in edges:
            adj[x].append(y)
            adj[y].append(x)
        if any(len(n) != 2 for n in adj.values()):
            bad.append(v)
            continue
        start = next(iter(adj))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(adj):
            bad.append(v)
    return sorted(bad)


def extract_manifold(K: SimplexTree, X: np.ndarray, sharp_angle: float = 60.0) -> tuple[TriangleMesh, DefectReport]:
    """Sharp-edge pruning followed by the outside walk; defects are reported, never raised."""
    X = np.asarray(X, dtype=float)
    report = DefectReport()
    tris, report.sharp_removed = sharp_edge_prune(X, set(K.simplices(2)), sharp_angle)
    if not tris:
        report.notes.append("no closed surface found: sharp-edge pruning removed every triangle")
        return TriangleMesh([], [], X), report
    walked, report.orientation_conflicts = outside_walk(X, tris)
    mesh = TriangleMesh(sorted({v for t in walked for v in t}), walked, X)
    for e, c in sorted(mesh.edges().items()):
        if c == 1:
            report.boundary_edges.append(e)
        elif c > 2:
            report.nonmanifold_edges.append(e)
    report.nonmanifold_vertices = _nonmanifold_vertices(walked)
    return mesh, report


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


@dataclass
class Reconstruction:
    mesh: TriangleMesh
    defects: DefectReport
    gic_counts: list[int]
    q_size: int
    stages: dict[str, int]
    subsample_ok: bool


def reconstruct(P: PointCloud, alpha: float, delta: float, seed: int = 0, sharp_angle: float = 60.0,
                max_dim: int = 2) -> Reconstruction:
    if P.dim != 3:
        raise DimensionError(f"surface reconstruction needs points in R^3, got R^{P.dim}")
    G = build_neighborhood_graph(P, alpha)
    S = greedy_subsample(P, MetricChoice.euclidean(), delta, seed)
    check = verify_subsample(S, P)
    if not check:
        raise SubsampleContractError(f"subsample check failed: {check.violation}")
    g = build_gic(G, S, max_dim)
    X = P.points
    stage1 = prune_intersections(g.complex, X)
    stage2 = prune_by_circumradius(stage1.complex, X, delta)
    mesh, defects = extract_manifold(stage2.complex, X, sharp_angle)
    defects.notes.extend(stage1.notes + stage2.notes)
    stages = {
        "gic_triangles": g.complex.num_simplices(2),
        "after_intersection_pruning": stage1.complex.num_simplices(2),
        "after_circumradius_pruning": stage2.complex.num_simplices(2),
        "mesh_triangles": len(mesh.triangles),
    }
    return Reconstruction(mesh, defects, g.complex.counts(), len(S), stages, bool(check))
