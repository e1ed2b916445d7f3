"""Foundational types: point clouds, metric choice, simplex trees and Z2 matrices."""

from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

import numpy as np

if TYPE_CHECKING:
    from .graph import NeighborhoodGraph

DEFAULT_MAX_DIM = 3

Simplex = tuple[int, ...]


class GICError(Exception):
    """Base class for errors raised by this package."""


class PointFormatError(GICError, ValueError):
    """A points file has ragged rows or non-numeric entries."""


class EmptyInputError(GICError, ValueError):
    """An input file held no data rows."""


class SimplexDimensionError(GICError, ValueError):
    """A simplex exceeds the complex's dimension cap."""


class ComplexFormatError(GICError, ValueError):
    """A complex file could not be parsed."""


class DuplicatePointsWarning(UserWarning):
    pass


# ---------------------------------------------------------------------------
# point clouds
# ---------------------------------------------------------------------------


class PointCloud:
    """N points in R^d. Row index is the point's identity."""

    def __init__(self, points, *, warn_duplicates: bool = True):
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim == 1:
            if arr.size == 0:
                arr = arr.reshape(0, 1)
            else:
                arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise PointFormatError(f"expected an (N, d) array with d >= 1, got shape {arr.shape}")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self._points = arr
        self.duplicates = self._find_duplicates()
        if warn_duplicates and self.duplicates:
            warnings.warn(
                f"{len(self.duplicates)} duplicate point(s) retained; "
                f"first duplicate pair {self.duplicates[0]}",
                DuplicatePointsWarning,
                stacklevel=2,
            )

    def _find_duplicates(self) -> list[tuple[int, int]]:
        if len(self._points) < 2:
            return []
        _, first, inverse = np.unique(self._points, axis=0, return_index=True, return_inverse=True)
        inverse = np.asarray(inverse).reshape(-1)
        dups = []
        for i, g in enumerate(inverse):
            if first[g] != i:
                dups.append((int(first[g]), i))
        return dups

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    def __len__(self) -> int:
        return self._points.shape[0]

    def __getitem__(self, idx):
        return self._points[idx]

    def __repr__(self) -> str:
        return f"PointCloud(N={len(self)}, d={self.dim})"

    def distance(self, i: int, j: int) -> float:
        return euclidean(self._points[i], self._points[j])

    def subset(self, indices: Sequence[int]) -> "PointCloud":
        return PointCloud(self._points[np.asarray(indices, dtype=np.intp)], warn_duplicates=False)


def euclidean(a: np.ndarray, b: np.ndarray) -> float:
    d = a - b
    return float(np.sqrt(np.dot(d, d)))


_SPLIT = re.compile(r"[,\s]+")


def load_points(path, format: str = "auto") -> PointCloud:
    """Read a points file: one point per row, whitespace or comma delimited.

    Lines starting with ``#`` and blank lines are skipped. ``format`` is accepted
    for forward compatibility; only the plain-text row format is understood.
    """
    if format not in ("auto", "txt", "csv", "xyz"):
        raise PointFormatError(f"unknown points format {format!r}")
    rows: list[list[float]] = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            fields = [f for f in _SPLIT.split(s) if f]
            try:
                row = [float(f) for f in fields]
            except ValueError as exc:
                raise PointFormatError(f"{path}:{lineno}: non-numeric entry ({exc})") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise PointFormatError(
                    f"{path}:{lineno}: expected {width} columns, found {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise EmptyInputError(f"{path}: no points")
    return PointCloud(np.array(rows, dtype=np.float64))


def save_points(path, P: PointCloud | np.ndarray) -> None:
    arr = P.points if isinstance(P, PointCloud) else np.asarray(P)
    np.savetxt(path, arr, fmt="%.17g")


# ---------------------------------------------------------------------------
# metric choice
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricChoice:
    """Euclidean distance, or shortest-path distance in a neighborhood graph."""

    kind: str = "euclidean"
    graph: "NeighborhoodGraph | None" = None

    def __post_init__(self):
        if self.kind not in ("euclidean", "graph"):
            raise ValueError(f"metric kind must be 'euclidean' or 'graph', not {self.kind!r}")
        if self.kind == "graph" and self.graph is None:
            raise ValueError("graph metric requires a NeighborhoodGraph")

    @classmethod
    def euclidean(cls) -> "MetricChoice":
        return cls("euclidean")

    @classmethod
    def graph_distance(cls, graph: "NeighborhoodGraph") -> "MetricChoice":
        return cls("graph", graph)

    def validate(self, P: PointCloud) -> None:
        if self.kind == "graph" and self.graph.n_vertices != len(P):
            raise ValueError(
                f"graph has {self.graph.n_vertices} vertices but the point cloud has {len(P)}"
            )

    def __str__(self) -> str:
        return self.kind


# ---------------------------------------------------------------------------
# simplex tree
# ---------------------------------------------------------------------------


def as_simplex(verts: Iterable[int]) -> Simplex:
    s = tuple(sorted({int(v) for v in verts}))
    if not s:
        raise ValueError("empty simplex")
    return s


def faces(simplex: Simplex) -> Iterator[Simplex]:
    """Codimension-one faces of a sorted simplex."""
    for i in range(len(simplex)):
        yield simplex[:i] + simplex[i + 1:]


class SimplexTree:
    """Simplicial complex stored as a trie over sorted vertex lists.

    Each simplex is a path from the root; the node reached by ``(v0, ..., vk)``
    holds the children ``v > vk`` that extend it. A flat per-dimension set
    mirrors the trie for O(1) membership.
    """

    def __init__(self, max_dim: int = DEFAULT_MAX_DIM):
        if max_dim < 0:
            raise ValueError("max_dim must be >= 0")
        self.max_dim = max_dim
        self._root: dict[int, dict] = {}
        self._flat: list[set[Simplex]] = [set() for _ in range(max_dim + 1)]

    @classmethod
    def from_simplices(cls, simplices: Iterable[Iterable[int]], max_dim: int = DEFAULT_MAX_DIM):
        K = cls(max_dim)
        for s in simplices:
            K.insert(s)
        return K

    # -- mutation (construction only) ---------------------------------------

    def _add(self, s: Simplex) -> None:
        node = self._root
        for v in s:
            child = node.get(v)
            if child is None:
                child = node[v] = {}
            node = child
        self._flat[len(s) - 1].add(s)

    def insert(self, verts: Iterable[int]) -> "SimplexTree":
        """Insert a simplex and all of its faces. Idempotent."""
        s = as_simplex(verts)
        if len(s) - 1 > self.max_dim:
            raise SimplexDimensionError(
                f"simplex {s} has dimension {len(s) - 1} > max_dim {self.max_dim}"
            )
        if s in self._flat[len(s) - 1]:
            return self
        n = len(s)
        for k in range(1, n + 1):
            bucket = self._flat[k - 1]
            for sub in itertools.combinations(s, k):
                if sub not in bucket:
                    self._add(sub)
        return self

    def insert_clique_truncated(self, verts: Iterable[int]) -> None:
        """Insert every face of ``verts`` of dimension at most ``max_dim``."""
        s = as_simplex(verts)
        if len(s) - 1 <= self.max_dim:
            self.insert(s)
        else:
            for sub in itertools.combinations(s, self.max_dim + 1):
                self.insert(sub)

    def remove(self, verts: Iterable[int]) -> int:
        """Remove a simplex together with all its cofaces; returns the number removed."""
        s = as_simplex(verts)
        if s not in self:
            return 0
        sset = set(s)
        doomed = [
            t
            for k in range(len(s) - 1, self.max_dim + 1)
            for t in self._flat[k]
            if sset.issubset(t)
        ]
        doomed.sort(key=len, reverse=True)
        for t in doomed:
            self._flat[len(t) - 1].discard(t)
            parent = self._root
            for v in t[:-1]:
                parent = parent[v]
            del parent[t[-1]]
        return len(doomed)

    # -- queries ------------------------------------------------------------

    def __contains__(self, verts) -> bool:
        s = tuple(verts)
        if not s or len(s) - 1 > self.max_dim:
            return False
        return s in self._flat[len(s) - 1]

    def find(self, verts: Iterable[int]) -> bool:
        """Trie lookup, independent of the flat index."""
        node = self._root
        for v in as_simplex(verts):
            node = node.get(v)
            if node is None:
                return False
        return True

    @property
    def dimension(self) -> int:
        for k in range(self.max_dim, -1, -1):
            if self._flat[k]:
                return k
        return -1

    def num_simplices(self, k: int | None = None) -> int:
        if k is None:
            return sum(len(b) for b in self._flat)
        if k < 0 or k > self.max_dim:
            return 0
        return len(self._flat[k])

    def __len__(self) -> int:
        return self.num_simplices()

    def counts(self) -> list[int]:
        """Number of simplices per dimension, 0..max_dim."""
        return [len(b) for b in self._flat]

    def simplices(self, k: int | None = None) -> list[Simplex]:
        """Simplices in lexicographic order, optionally restricted to dimension k."""
        if k is not None:
            if k < 0 or k > self.max_dim:
                return []
            return sorted(self._flat[k])
        return sorted(itertools.chain.from_iterable(self._flat), key=lambda s: (len(s), s))

    def walk(self) -> Iterator[Simplex]:
        """Depth-first trie traversal with children visited in ascending vertex order."""
        stack: list[tuple[Simplex, dict]] = [((v,), self._root[v]) for v in sorted(self._root, reverse=True)]
        while stack:
            s, node = stack.pop()
            yield s
            for v in sorted(node, reverse=True):
                stack.append((s + (v,), node[v]))

    def vertices(self) -> list[int]:
        return sorted(self._root)

    def maximal_simplices(self) -> list[Simplex]:
        covered: set[Simplex] = set()
        for k in range(1, self.max_dim + 1):
            for s in self._flat[k]:
                covered.update(faces(s))
        out = [s for b in self._flat for s in b if s not in covered]
        return sorted(out, key=lambda s: (len(s), s))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.counts()))

    def copy(self, max_dim: int | None = None) -> "SimplexTree":
        md = self.max_dim if max_dim is None else max_dim
        K = SimplexTree(md)
        for s in self.walk():
            if len(s) - 1 <= md:
                K._add(s)
        return K

    def relabel(self, mapping: Sequence[int] | dict) -> "SimplexTree":
        """Return the complex with vertex v renamed to mapping[v] (must be injective)."""
        K = SimplexTree(self.max_dim)
        for s in self.walk():
            K._add(tuple(sorted(int(mapping[v]) for v in s)))
        return K

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplexTree):
            return NotImplemented
        a = [b for b in self._flat if b]
        c = [b for b in other._flat if b]
        return a == c

    def __repr__(self) -> str:
        return f"SimplexTree(counts={self.counts()}, max_dim={self.max_dim})"


# ---------------------------------------------------------------------------
# complex files
# ---------------------------------------------------------------------------


def save_complex(path, K: SimplexTree, header: Iterable[str] = ()) -> None:
    """Write maximal simplices, one per line, as space-separated sorted ids."""
    with open(path, "w") as fh:
        for h in header:
            fh.write(f"# {h}\n")
        for s in K.maximal_simplices():
            fh.write(" ".join(map(str, s)) + "\n")


def load_complex(path, max_dim: int | None = None) -> SimplexTree:
    """Read a complex file and rebuild face closure.

    ``max_dim`` defaults to the larger of the stored dimension and the library default.
    """
    rows: list[Simplex] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            try:
                verts = [int(f) for f in s.split()]
            except ValueError:
                raise ComplexFormatError(f"{path}:{lineno}: vertex ids must be integers") from None
            if any(v < 0 for v in verts):
                raise ComplexFormatError(f"{path}:{lineno}: negative vertex id")
            if len(set(verts)) != len(verts):
                raise ComplexFormatError(f"{path}:{lineno}: repeated vertex in simplex")
            rows.append(tuple(sorted(verts)))
    if not rows:
        raise EmptyInputError(f"{path}: no simplices")
    top = max(len(r) for r in rows) - 1
    md = max(top, DEFAULT_MAX_DIM) if max_dim is None else max_dim
    return SimplexTree.from_simplices(rows, md)


# ---------------------------------------------------------------------------
# Z2 matrices
# ---------------------------------------------------------------------------


class Z2Matrix:
    """Matrix over the two-element field, stored as one int bitmask per column.

    Bit i of ``cols[j]`` is entry (i, j).
    """

    __slots__ = ("rows", "cols", "columns")

    def __init__(self, rows: int, cols: int, columns: Sequence[int] | None = None):
        self.rows = int(rows)
        self.cols = int(cols)
        if columns is None:
            columns = [0] * self.cols
        if len(columns) != self.cols:
            raise ValueError("column count mismatch")
        limit = 1 << self.rows
        for c in columns:
            if c < 0 or c >= limit:
                raise ValueError("column has bits outside the row range")
        self.columns = list(columns)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Z2Matrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Z2Matrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_dense(cls, a) -> "Z2Matrix":
        arr = np.asarray(a, dtype=np.int64) & 1
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        r, c = arr.shape
        cols = []
        for j in range(c):
            v = 0
            for i in np.flatnonzero(arr[:, j]):
                v |= 1 << int(i)
            cols.append(v)
        return cls(r, c, cols)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for j, c in enumerate(self.columns):
            while c:
                low = c & -c
                out[low.bit_length() - 1, j] = 1
                c ^= low
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij) -> int:
        i, j = ij
        return (self.columns[j] >> i) & 1

    def __add__(self, other: "Z2Matrix") -> "Z2Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Z2Matrix(self.rows, self.cols, [a ^ b for a, b in zip(self.columns, other.columns)])

    def __matmul__(self, other: "Z2Matrix") -> "Z2Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        mine = self.columns
        for c in other.columns:
            acc = 0
            while c:
                low = c & -c
                acc ^= mine[low.bit_length() - 1]
                c ^= low
            out.append(acc)
        return Z2Matrix(self.rows, other.cols, out)

    def transpose(self) -> "Z2Matrix":
        rows = [0] * self.rows
        for j, c in enumerate(self.columns):
            while c:
                low = c & -c
                rows[low.bit_length() - 1] |= 1 << j
                c ^= low
        return Z2Matrix(self.cols, self.rows, rows)

    def hstack(self, other: "Z2Matrix") -> "Z2Matrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return Z2Matrix(self.rows, self.cols + other.cols, self.columns + other.columns)

    def is_zero(self) -> bool:
        return not any(self.columns)

    def rank(self) -> int:
        return z2_rank(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Z2Matrix):
            return NotImplemented
        return self.shape == other.shape and self.columns == other.columns

    def __repr__(self) -> str:
        return f"Z2Matrix({self.rows}x{self.cols})"


def reduce_columns(columns: Iterable[int], pivots: dict[int, int] | None = None) -> dict[int, int]:
    """Gaussian column elimination keyed on the highest set bit.

    Returns (and extends) ``pivots``: highest-bit row -> reduced column.
    """
    if pivots is None:
        pivots = {}
    for c in columns:
        while c:
            p = c.bit_length() - 1
            other = pivots.get(p)
            if other is None:
                pivots[p] = c
                break
            c ^= other
    return pivots


def reduce_vector(c: int, pivots: dict[int, int]) -> int:
    while c:
        other = pivots.get(c.bit_length() - 1)
        if other is None:
            return c
        c ^= other
    return 0


def z2_rank(M: Z2Matrix) -> int:
    return len(reduce_columns(M.columns))
