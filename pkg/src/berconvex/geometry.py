"""Minimum-distance decision regions as convex polyhedra.

Each region is kept in half-space form ``{x : A x <= b}`` in a frame whose
origin is one of the constellation points. Redundant half-spaces are removed
with small linear programs; boundedness is certified by a recession-direction
search, and the farthest boundary point is found by vertex enumeration for
``n <= 3`` and by directional support maximisation above that.
"""

from __future__ import annotations

import functools
import itertools
import math
import weakref
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import linprog

from .constellation import Constellation

LP_TOL = 1e-9
DUP_TOL = 1e-12
EXACT_VERTEX_DIM = 3
N_SUPPORT_DIRECTIONS = 512


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """Convex polyhedron ``{x : normals @ x <= offsets}``.

    ``frame`` is the index of the constellation point sitting at the origin
    and ``sources`` records which competing point generated each half-space.
    """

    normals: np.ndarray
    offsets: np.ndarray
    frame: int = -1
    sources: tuple[int, ...] = ()
    dim: int = field(default=0)

    def __post_init__(self):
        A = np.array(self.normals, dtype=float)
        b = np.array(self.offsets, dtype=float).ravel()
        if A.size == 0:
            if self.dim < 1:
                raise ValueError("an unconstrained polyhedron needs an explicit dim")
            A = np.zeros((0, self.dim))
        if A.ndim != 2 or A.shape[0] != b.shape[0]:
            raise ValueError("normals must be (m, n) with one offset per row")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "normals", A)
        object.__setattr__(self, "offsets", b)
        object.__setattr__(self, "dim", A.shape[1])
        if not self.sources:
            object.__setattr__(self, "sources", tuple(range(A.shape[0])))

    @property
    def n_constraints(self) -> int:
        return self.normals.shape[0]

    def contains(self, x, tol: float = 0.0) -> np.ndarray:
        """Vectorised membership test; ``x`` has shape ``(..., n)``."""
        x = np.asarray(x, dtype=float)
        if self.n_constraints == 0:
            return np.ones(x.shape[:-1], dtype=bool)
        return np.all(x @ self.normals.T <= self.offsets + tol, axis=-1)

    def translate(self, t) -> "Polyhedron":
        """The set ``{x + t : x in self}``."""
        t = np.asarray(t, dtype=float)
        return Polyhedron(self.normals, self.offsets + self.normals @ t, self.frame, self.sources, self.dim)

    def subset(self, keep) -> "Polyhedron":
        keep = list(keep)
        return Polyhedron(
            self.normals[keep], self.offsets[keep], self.frame,
            tuple(self.sources[k] for k in keep), self.dim,
        )

    @functools.cached_property
    def empty(self) -> bool:
        return self.is_empty()

    def is_empty(self) -> bool:
        if self.n_constraints == 0:
            return False
        res = linprog(
            np.zeros(self.dim), A_ub=self.normals, b_ub=self.offsets,
            bounds=[(None, None)] * self.dim, method="highs",
        )
        return res.status == 2

    def to_dict(self) -> dict[str, Any]:
        return {
            "frame": self.frame,
            "normals": self.normals.tolist(),
            "offsets": self.offsets.tolist(),
            "sources": list(self.sources),
        }


def decision_region(c: Constellation, i: int) -> Polyhedron:
    """All ``M - 1`` bisector half-spaces of point ``i``, origin at ``s_i``.

    Half-space ``j`` is ``a_j . x <= b_j`` with ``a_j`` the unit vector from
    ``s_i`` towards ``s_j`` and ``b_j = |s_j - s_i| / 2``.
    """
    if not 0 <= i < c.M:
        raise IndexError(f"point index {i} out of range for M={c.M}")
    others = [j for j in range(c.M) if j != i]
    delta = c.points[others] - c.points[i]
    dist = np.linalg.norm(delta, axis=1)
    return Polyhedron(delta / dist[:, None], dist / 2, frame=i, sources=tuple(others))


def _drop_duplicates(p: Polyhedron) -> list[int]:
    keep: list[int] = []
    for k in range(p.n_constraints):
        dup = False
        for r in keep:
            if (p.normals[k] @ p.normals[r] >= 1 - DUP_TOL
                    and abs(p.offsets[k] - p.offsets[r]) <= DUP_TOL):
                dup = True
                break
        if not dup:
            keep.append(k)
    return keep


def prune_redundant(p: Polyhedron) -> Polyhedron:
    """Drop half-spaces that do not support a facet.

    A half-space is redundant when maximising its normal over the remaining
    constraints cannot exceed its offset. Constraints are tested one at a
    time against the currently retained set, so the point set is unchanged.
    """
    keep = _drop_duplicates(p)
    for k in list(keep):
        rest = [r for r in keep if r != k]
        a, b = p.normals[k], p.offsets[k]
        # cap at b + 1 so the LP stays bounded when the rest are unbounded along a
        A_ub = np.vstack([p.normals[rest], a]) if rest else a[None, :]
        b_ub = np.append(p.offsets[rest], b + 1.0) if rest else np.array([b + 1.0])
        res = linprog(-a, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * p.dim, method="highs")
        if res.status == 2:
            # infeasible: region is empty, nothing further to certify
            return p.subset(keep)
        if -res.fun <= b + LP_TOL * max(1.0, abs(b)):
            keep.remove(k)
    return p.subset(keep)


def recession_direction(p: Polyhedron) -> np.ndarray | None:
    """A unit ``d`` with ``A d <= 0`` if the polyhedron is unbounded, else None."""
    n = p.dim
    if p.n_constraints == 0:
        d = np.zeros(n)
        d[0] = 1.0
        return d
    for axis, sign in itertools.product(range(n), (1.0, -1.0)):
        cost = np.zeros(n)
        cost[axis] = -sign
        res = linprog(
            cost, A_ub=p.normals, b_ub=np.zeros(p.n_constraints),
            bounds=[(-1.0, 1.0)] * n, method="highs",
        )
        if res.status == 0 and -res.fun > LP_TOL:
            d = res.x / np.linalg.norm(res.x)
            if np.all(p.normals @ d <= LP_TOL):
                return d
    return None


@dataclass(frozen=True)
class MaxDistance:
    """Farthest distance from the origin to a point of a region.

    ``value`` is ``inf`` for unbounded regions, in which case ``certificate``
    holds a unit recession direction. ``approximate`` marks a certified lower
    bound (bounded regions with ``n > 3``).
    """

    value: float
    approximate: bool = False
    certificate: np.ndarray | None = None

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.value)


def _vertices(p: Polyhedron) -> np.ndarray:
    A, b, n = p.normals, p.offsets, p.dim
    verts = []
    for combo in itertools.combinations(range(p.n_constraints), n):
        sub = A[list(combo)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, b[list(combo)])
        if np.all(A @ x <= b + 1e-9):
            verts.append(x)
    return np.array(verts).reshape(-1, n)


def _support_points(p: Polyhedron) -> np.ndarray:
    n = p.dim
    rng = np.random.default_rng(20240601)
    dirs = rng.standard_normal((N_SUPPORT_DIRECTIONS, n))
    dirs = np.vstack([np.eye(n), -np.eye(n), dirs / np.linalg.norm(dirs, axis=1, keepdims=True)])
    pts = []
    for u in dirs:
        res = linprog(-u, A_ub=p.normals, b_ub=p.offsets, bounds=[(None, None)] * n, method="highs")
        if res.status == 0:
            pts.append(res.x)
    return np.array(pts)


def farthest_point_distance(p: Polyhedron) -> MaxDistance:
    """Maximum norm over the region (the farthest boundary point from the origin)."""
    d = recession_direction(p)
    if d is not None:
        return MaxDistance(math.inf, certificate=d)
    if p.dim <= EXACT_VERTEX_DIM:
        verts = _vertices(p)
        return MaxDistance(float(np.max(np.linalg.norm(verts, axis=1))))
    pts = _support_points(p)
    return MaxDistance(float(np.max(np.linalg.norm(pts, axis=1))), approximate=True)


def min_boundary_distance(c: Constellation, i: int) -> float:
    """Half the distance from ``s_i`` to its nearest neighbour."""
    return float(summarize(c).d_min_per_point[i])


def max_boundary_distance(c: Constellation, i: int) -> MaxDistance:
    """Farthest point of the decision region of ``s_i``, measured from ``s_i``."""
    return summarize(c).max_distances[i]


def pairwise_distances(c: Constellation) -> np.ndarray:
    delta = c.points[:, None, :] - c.points[None, :, :]
    return np.sqrt(np.sum(delta**2, axis=2))


@dataclass(frozen=True, eq=False)
class GeometrySummary:
    """Distance quantities of a constellation plus its pruned regions."""

    d_pair: np.ndarray
    d_min_per_point: np.ndarray
    max_distances: tuple[MaxDistance, ...]
    regions: tuple[Polyhedron, ...]
    points: np.ndarray
    _frames: dict = field(default_factory=dict, repr=False)

    @property
    def d_max_per_point(self) -> np.ndarray:
        return np.array([m.value for m in self.max_distances])

    @property
    def d_min(self) -> float:
        return float(self.d_min_per_point.min())

    @property
    def approximate(self) -> bool:
        return any(m.approximate for m in self.max_distances)

    def region_in_frame(self, j: int, i: int) -> Polyhedron:
        """Pruned region of ``s_j`` expressed in the frame centred at ``s_i``."""
        if i == j:
            return self.regions[j]
        if (j, i) not in self._frames:
            shifted = self.regions[j].translate(self.points[j] - self.points[i])
            self._frames[(j, i)] = Polyhedron(shifted.normals, shifted.offsets, i, shifted.sources, shifted.dim)
        return self._frames[(j, i)]

    def to_dict(self) -> dict[str, Any]:
        def enc(v):
            return v if math.isfinite(v) else "inf"

        return {
            "d_pair": self.d_pair.tolist(),
            "d_min_per_point": self.d_min_per_point.tolist(),
            "d_max_per_point": [enc(float(v)) for v in self.d_max_per_point],
            "d_max_approximate": [m.approximate for m in self.max_distances],
            "d_min": self.d_min,
        }


_CACHE: "weakref.WeakKeyDictionary[Constellation, GeometrySummary]" = weakref.WeakKeyDictionary()


def summarize(c: Constellation) -> GeometrySummary:
    """Compute (once per constellation) pruned regions and distance quantities."""
    cached = _CACHE.get(c)
    if cached is not None:
        return cached
    d_pair = pairwise_distances(c)
    off = d_pair + np.diag(np.full(c.M, np.inf))
    d_min_i = off.min(axis=1) / 2
    regions = tuple(prune_redundant(decision_region(c, i)) for i in range(c.M))
    maxd = tuple(farthest_point_distance(r) for r in regions)
    summary = GeometrySummary(d_pair, d_min_i, maxd, regions, c.points)
    _CACHE[c] = summary
    return summary
