"""Vertex-represented convex polytopes in low dimension.

The vertex list is the primary representation; the facet list (unit outer
normals and offsets, ``<normal, x> <= offset``) is derived once at
construction.  Hulls are computed by a monotone chain in the plane and by
Qhull (``scipy.spatial``) in dimension three and above.  Lower-dimensional
point sets are reduced to their affine hull first and carry no facets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize, spatial

from . import _json
from .estimates import Budget, IntegrationResult, shard_generators
from .means import MeanSpec, WeightVector, eval_mean_pairs

__all__ = [
    "Polytope",
    "DirectionSet",
    "LpBody",
    "DifferenceBody",
    "DegeneratePolytopeError",
    "volume",
    "support_function",
    "affine_combination",
    "lp_combination",
    "linear_image_sum",
    "shift_image",
    "difference_body",
    "contains",
    "symmetry_class",
]

HULL_TOL = 1e-12
SET_TOL = 1e-9
EXACT_TUPLE_LIMIT = 10**6


class DegeneratePolytopeError(ValueError):
    """Facet data requested from a lower-dimensional polytope."""


def _dedupe(points: np.ndarray, tol: float) -> np.ndarray:
    if len(points) <= 1:
        return points
    scale = max(1.0, float(np.abs(points).max()))
    keys = np.round(points / (tol * scale)).astype(np.int64)
    _, idx = np.unique(keys, axis=0, return_index=True)
    return points[np.sort(idx)]


def _chain_2d(pts: np.ndarray) -> np.ndarray:
    """Counter-clockwise hull vertices, collinear points dropped."""
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    p = pts[order]
    scale = max(1.0, float(np.abs(p).max()))
    eps = HULL_TOL * scale * scale

    def half(seq):
        out: list[np.ndarray] = []
        for q in seq:
            while len(out) >= 2:
                a, b = out[-2], out[-1]
                cross = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
                if cross <= eps:
                    out.pop()
                else:
                    break
            out.append(q)
        return out

    lower = half(p)
    upper = half(p[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _merge_facets(normals: np.ndarray, offsets: np.ndarray):
    keep_n: list[np.ndarray] = []
    keep_o: list[float] = []
    for nrm, off in zip(normals, offsets):
        for kn, ko in zip(keep_n, keep_o):
            if np.abs(kn - nrm).max() < SET_TOL and abs(ko - off) < SET_TOL * max(1.0, abs(off)):
                break
        else:
            keep_n.append(nrm)
            keep_o.append(off)
    return np.array(keep_n), np.array(keep_o)


@dataclass(frozen=True)
class _Hull:
    vertices: np.ndarray
    normals: np.ndarray | None
    offsets: np.ndarray | None
    rank: int
    triangles: np.ndarray | None = None  # Qhull simplices, indices into vertices


def _hull(points: np.ndarray) -> _Hull:
    n = points.shape[1]
    pts = _dedupe(points, HULL_TOL)
    if len(pts) == 1:
        return _Hull(pts, None, None, 0)
    center = pts.mean(axis=0)
    centered = pts - center
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    scale = max(1.0, float(s[0]))
    rank = int(np.sum(s > 1e-10 * scale))
    if rank < n:
        basis = vt[:rank]
        sub = _hull(centered @ basis.T) if rank > 0 else None
        if sub is None:
            return _Hull(pts[:1], None, None, 0)
        verts = sub.vertices @ basis + center
        return _Hull(verts, None, None, rank)
    if n == 1:
        lo, hi = float(pts.min()), float(pts.max())
        return _Hull(np.array([[lo], [hi]]), np.array([[-1.0], [1.0]]), np.array([-lo, hi]), 1)
    if n == 2:
        verts = _chain_2d(pts)
        nxt = np.roll(verts, -1, axis=0)
        edge = nxt - verts
        normals = np.stack([edge[:, 1], -edge[:, 0]], axis=1)
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        offsets = np.einsum("ij,ij->i", normals, verts)
        return _Hull(verts, normals, offsets, 2)
    hull = spatial.ConvexHull(pts)
    vidx = np.asarray(hull.vertices)
    verts = pts[vidx]
    remap = -np.ones(len(pts), dtype=np.int64)
    remap[vidx] = np.arange(len(vidx))
    tris = remap[hull.simplices]
    eq = hull.equations
    normals, offsets = _merge_facets(eq[:, :n], -eq[:, n])
    return _Hull(verts, normals, offsets, n, tris)


class Polytope:
    """Convex hull of finitely many points in R^n.

    Parameters
    ----------
    points : array_like, shape (k, n)
        Any generating point set; the stored vertex list is its extreme points.
    """

    __slots__ = ("_hull", "dim")

    def __init__(self, points, dim: int | None = None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if dim == 1 else pts.reshape(1, -1)
        if pts.size == 0:
            raise ValueError("a polytope needs at least one point")
        if dim is not None and pts.shape[1] != dim:
            raise ValueError(f"points have dimension {pts.shape[1]}, expected {dim}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("polytope coordinates must be finite")
        self.dim = pts.shape[1]
        self._hull = _hull(pts)

    # -- constructors -----------------------------------------------------
    @classmethod
    def box(cls, lo, hi) -> "Polytope":
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        corners = [np.where(bits, hi, lo) for bits in itertools.product([0, 1], repeat=lo.size)]
        return cls(np.array(corners, dtype=float))

    @classmethod
    def symmetric_box(cls, half_sides) -> "Polytope":
        h = np.atleast_1d(np.asarray(half_sides, dtype=float))
        return cls.box(-h, h)

    @classmethod
    def cross_polytope(cls, n: int, radius: float = 1.0) -> "Polytope":
        eye = np.eye(n) * radius
        return cls(np.vstack([eye, -eye]))

    @classmethod
    def regular_polygon(cls, k: int, radius: float = 1.0, phase: float = 0.0) -> "Polytope":
        ang = phase + 2 * np.pi * np.arange(k) / k
        return cls(radius * np.stack([np.cos(ang), np.sin(ang)], axis=1))

    @classmethod
    def simplex(cls, n: int) -> "Polytope":
        return cls(np.vstack([np.zeros(n), np.eye(n)]))

    @classmethod
    def segment(cls, a: float, b: float) -> "Polytope":
        return cls(np.array([[a], [b]], dtype=float))

    # -- data ---------------------------------------------------------------
    @property
    def vertices(self) -> np.ndarray:
        v = self._hull.vertices
        v.flags.writeable = False
        return v

    @property
    def normals(self) -> np.ndarray:
        if self._hull.normals is None:
            raise DegeneratePolytopeError("lower-dimensional polytope has no facet cache")
        return self._hull.normals

    @property
    def offsets(self) -> np.ndarray:
        if self._hull.offsets is None:
            raise DegeneratePolytopeError("lower-dimensional polytope has no facet cache")
        return self._hull.offsets

    @property
    def is_full_dimensional(self) -> bool:
        return self._hull.rank == self.dim

    @property
    def affine_rank(self) -> int:
        return self._hull.rank

    def __len__(self):
        return len(self._hull.vertices)

    def __repr__(self):
        return f"Polytope(dim={self.dim}, vertices={len(self)})"

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        v = self._hull.vertices
        return v.min(axis=0), v.max(axis=0)

    # -- transforms -----------------------------------------------------------
    def translate(self, v) -> "Polytope":
        return Polytope(self._hull.vertices + np.asarray(v, dtype=float))

    def scale(self, c: float) -> "Polytope":
        return Polytope(self._hull.vertices * float(c))

    def linear_map(self, matrix) -> "Polytope":
        m = np.atleast_2d(np.asarray(matrix, dtype=float))
        return Polytope(self._hull.vertices @ m.T)

    def negate(self) -> "Polytope":
        return self.scale(-1.0)

    # -- queries ------------------------------------------------------------
    def support(self, directions) -> np.ndarray:
        d = np.atleast_2d(np.asarray(directions, dtype=float))
        return (self._hull.vertices @ d.T).max(axis=0)

    def support_point(self, directions) -> np.ndarray:
        d = np.atleast_2d(np.asarray(directions, dtype=float))
        idx = np.argmax(self._hull.vertices @ d.T, axis=0)
        return self._hull.vertices[idx]

    def contains_points(self, points, margin: float = SET_TOL) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        if self._hull.normals is None:
            return self._flat_contains(x, margin)
        N, b = self.normals, self.offsets + margin
        step = max(1024, 4_000_000 // max(1, len(N)))
        if len(x) <= step:
            return np.all(x @ N.T <= b, axis=1)
        return np.concatenate([np.all(x[i:i + step] @ N.T <= b, axis=1) for i in range(0, len(x), step)])

    def _flat_contains(self, x, margin):
        # lower-dimensional: distance to the affine hull, then a hull test inside it
        V = self._hull.vertices
        base = V[0]
        k = self._hull.rank
        if k == 0:
            return np.linalg.norm(x - base, axis=1) <= margin
        _, _, vt = np.linalg.svd(V - base)
        basis = vt[:k]
        rel = x - base
        coords = rel @ basis.T
        off = np.linalg.norm(rel - coords @ basis, axis=1)
        inner = Polytope((V - base) @ basis.T)
        return (off <= margin) & inner.contains_points(coords, margin)

    def contains(self, x, margin: float = SET_TOL) -> bool:
        return bool(self.contains_points(np.asarray(x, dtype=float).reshape(1, -1), margin)[0])

    def contains_polytope(self, other: "Polytope", margin: float = SET_TOL) -> bool:
        return bool(np.all(self.contains_points(other.vertices, margin)))

    def interior_margin(self, x) -> float:
        """Distance from ``x`` to the boundary; negative outside."""
        x = np.asarray(x, dtype=float)
        return float(np.min(self.offsets - self.normals @ x))

    def same_set(self, other: "Polytope", tol: float = SET_TOL) -> bool:
        if self.dim != other.dim or len(self) != len(other):
            return False
        return _same_point_set(self._hull.vertices, other._hull.vertices, tol)

    def validate(self, tol: float = SET_TOL) -> bool:
        """Cross-check the facet cache against the vertices."""
        if self._hull.normals is None:
            return True
        res = self._hull.vertices @ self._hull.normals.T - self._hull.offsets
        if res.max() > tol:
            return False
        touching = np.sum(np.abs(res) <= tol * max(1.0, np.abs(self._hull.offsets).max()), axis=0)
        return bool(np.all(touching >= self.dim))

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {"dim": self.dim, "vertices": self._hull.vertices.tolist()}

    def dumps(self) -> str:
        return _json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj: dict) -> "Polytope":
        return cls(np.asarray(obj["vertices"], dtype=float).reshape(-1, int(obj["dim"])),
                   dim=int(obj["dim"]))


def _same_point_set(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    if a.shape != b.shape:
        return False
    d = np.abs(a[:, None, :] - b[None, :, :]).max(axis=2)
    return bool(np.all(d.min(axis=1) <= tol) and np.all(d.min(axis=0) <= tol))


# --------------------------------------------------------------------------
# volume


def _exact_volume(P: Polytope) -> float:
    if not P.is_full_dimensional:
        return 0.0
    v = P._hull.vertices
    if P.dim == 1:
        return float(v[1, 0] - v[0, 0])
    if P.dim == 2:
        x, y = v[:, 0], v[:, 1]
        return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
    if P.dim == 3:
        c = v.mean(axis=0)
        tri = v[P._hull.triangles] - c
        return float(np.abs(np.einsum("ij,ij->i", tri[:, 0], np.cross(tri[:, 1], tri[:, 2]))).sum() / 6.0)
    raise ValueError("exact volume is available only for n <= 3")


def volume(P: Polytope, budget: Budget | None = None) -> IntegrationResult:
    """Lebesgue volume; exact for ``n <= 3`` or Monte Carlo over the bounding box.

    Lower-dimensional polytopes have volume 0 and are flagged ``degenerate``.
    """
    budget = budget or Budget.exact()
    if len(P) == 0:
        raise ValueError("empty polytope")
    if not P.is_full_dimensional:
        return IntegrationResult(0.0, 0.0, 0, degenerate=True)
    if budget.is_exact:
        return IntegrationResult(_exact_volume(P))
    lo, hi = P.bounding_box()
    box = float(np.prod(hi - lo))
    hits = 0
    for rng, k in shard_generators(budget):
        done = 0
        while done < k:
            m = min(k - done, 1 << 18)
            x = lo + (hi - lo) * rng.random((m, P.dim))
            hits += int(P.contains_points(x, margin=0.0).sum())
            done += m
    N = budget.samples
    frac = hits / N
    return IntegrationResult(box * frac, box * math.sqrt(max(frac * (1 - frac), 0.0) / N), N)


# --------------------------------------------------------------------------
# combinations


def support_function(P: Polytope, theta) -> float:
    return float(P.support(np.asarray(theta, dtype=float).reshape(1, -1))[0])


def contains(P: Polytope, x, margin: float = SET_TOL) -> bool:
    return P.contains(x, margin)


def _minkowski(A_pts: np.ndarray, B_pts: np.ndarray) -> np.ndarray:
    return (A_pts[:, None, :] + B_pts[None, :, :]).reshape(-1, A_pts.shape[1])


def affine_combination(A: Polytope, B: Polytope, t: float) -> Polytope:
    """``(1 - t) A + t B``, exact."""
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    return Polytope(_minkowski((1.0 - t) * A.vertices, t * B.vertices))


def linear_image_sum(maps: Sequence, weights: Sequence[float], bodies: Sequence[Polytope]) -> Polytope:
    """Hull of ``sum_i c_i B_i^* v_i`` over vertex tuples; ``maps[i]`` is ``n x n_i``."""
    if not (len(maps) == len(weights) == len(bodies)) or not maps:
        raise ValueError("maps, weights and bodies must have equal non-zero length")
    mats = [np.atleast_2d(np.asarray(m, dtype=float)) for m in maps]
    n = mats[0].shape[0]
    acc = np.zeros((1, n))
    for M, c, K in zip(mats, weights, bodies):
        if M.shape != (n, K.dim):
            raise ValueError(f"map of shape {M.shape} does not fit a body of dimension {K.dim} into R^{n}")
        img = float(c) * K.vertices @ M.T
        acc = Polytope(_minkowski(acc, img)).vertices
    return Polytope(acc, dim=n)


# --------------------------------------------------------------------------
# directions and L_p sums


@dataclass(frozen=True)
class DirectionSet:
    """Unit vectors on the sphere with the rule that produced them.

    ``mesh_angle`` bounds the angle from any unit vector to the nearest member
    (exact for the planar and icosphere rules, a sampled estimate otherwise).
    """

    vectors: np.ndarray
    rule: str
    mesh_angle: float

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.vectors)

    @classmethod
    def planar(cls, k: int = 720) -> "DirectionSet":
        k += k % 2  # closed under negation
        ang = 2 * np.pi * np.arange(k) / k
        return cls(np.stack([np.cos(ang), np.sin(ang)], axis=1), "uniform_angles", math.pi / k)

    @classmethod
    def icosphere(cls, level: int = 4) -> "DirectionSet":
        phi = (1 + 5**0.5) / 2
        verts = [(-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
                 (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
                 (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1)]
        faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
                 (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
                 (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
                 (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
        pts = [np.array(v, float) / np.linalg.norm(v) for v in verts]
        for _ in range(level):
            cache: dict[tuple[int, int], int] = {}

            def mid(i, j):
                key = (min(i, j), max(i, j))
                if key not in cache:
                    m = pts[i] + pts[j]
                    pts.append(m / np.linalg.norm(m))
                    cache[key] = len(pts) - 1
                return cache[key]

            new = []
            for a, b, c in faces:
                ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
                new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
            faces = new
        P = np.array(pts)
        F = np.array(faces)
        a, b, c = P[F[:, 0]], P[F[:, 1]], P[F[:, 2]]
        nrm = np.cross(b - a, c - a)
        nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
        nrm *= np.sign(np.einsum("ij,ij->i", nrm, a))[:, None]
        cover = float(np.arccos(np.clip(np.einsum("ij,ij->i", nrm, a), -1, 1)).max())
        return cls(P, f"icosphere_level_{level}", cover)

    @classmethod
    def random(cls, n: int, k: int, seed: int) -> "DirectionSet":
        rng = np.random.default_rng(seed)
        v = rng.standard_normal((k, n))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        probe = rng.standard_normal((4096, n))
        probe /= np.linalg.norm(probe, axis=1, keepdims=True)
        cover = float(np.arccos(np.clip((probe @ v.T).max(axis=1), -1, 1)).max())
        return cls(v, "seeded_uniform", cover)

    @classmethod
    def default(cls, n: int, seed: int = 0) -> "DirectionSet":
        if n == 1:
            return cls(np.array([[-1.0], [1.0]]), "signs", 0.0)
        if n == 2:
            return cls.planar(720)
        if n == 3:
            return cls.icosphere(4)
        return cls.random(n, 4000, seed)


@dataclass(frozen=True)
class LpBody:
    """Inner and outer polytopes sandwiching an L_p combination."""

    inner: Polytope
    outer: Polytope
    exact: bool
    mesh_angle: float

    def bracket_width(self) -> float:
        vi, vo = _exact_volume(self.inner), _exact_volume(self.outer)
        return (vo - vi) / vi


def _halfspace_body(normals: np.ndarray, offsets: np.ndarray) -> Polytope:
    n = normals.shape[1]
    if n == 1:
        hi = offsets[normals[:, 0] > 0].min()
        lo = -offsets[normals[:, 0] < 0].min()
        return Polytope(np.array([[lo], [hi]]))
    hs = np.hstack([normals, -offsets[:, None]])
    inter = spatial.HalfspaceIntersection(hs, np.zeros(n))
    return Polytope(inter.intersections)


def lp_combination(A: Polytope, B: Polytope, t: float, p: float,
                   directions: DirectionSet | None = None) -> LpBody:
    """The L_p combination ``(1-t) . A +_p t . B`` as the Wulff shape of ``M_p(h_A, h_B)``.

    For ``p in [0, 1]`` the power mean is concave, so on each cone of the common
    normal fan the Wulff constraint is tight only at extreme rays: the shape is
    exactly the intersection over the facet normals of ``A + B`` and is
    returned with ``inner == outer``.  For ``p > 1`` the outer body intersects
    the sampled halfspaces and the inner body is the hull of the true contact
    points, the gradients of the support function ``M_p(h_A, h_B)``.
    """
    if A.dim != B.dim:
        raise ValueError("dimension mismatch")
    if p < 0:
        raise ValueError("p must be >= 0")
    origin = np.zeros(A.dim)
    for K in (A, B):
        if not K.is_full_dimensional or K.interior_margin(origin) <= SET_TOL:
            raise ValueError("both bodies must contain the origin in their interior")
    if directions is None:
        directions = DirectionSet.default(A.dim)
    if len(directions) == 0:
        raise ValueError("empty direction set")
    if t <= 0.0:
        return LpBody(A, A, True, 0.0)
    if t >= 1.0:
        return LpBody(B, B, True, 0.0)
    if p == 1.0:
        C = affine_combination(A, B, t)
        return LpBody(C, C, True, 0.0)
    mean = MeanSpec(p, WeightVector.convex_pair(t))
    if p < 1.0:
        fan = Polytope(_minkowski(A.vertices, B.vertices)).normals
        U = np.vstack([fan, directions.vectors])
        g = eval_mean_pairs(mean, A.support(U), B.support(U))
        C = _halfspace_body(U, g)
        return LpBody(C, C, True, 0.0)
    # the fan normals make every vertex of A and B a contact point
    U = np.vstack([Polytope(_minkowski(A.vertices, B.vertices)).normals, directions.vectors])
    hA, hB = A.support(U), B.support(U)
    g = eval_mean_pairs(mean, hA, hB)
    outer = _halfspace_body(U, g)
    a, b = A.support_point(U), B.support_point(U)
    coef_a = (1 - t) * (hA / g) ** (p - 1)
    coef_b = t * (hB / g) ** (p - 1)
    inner = Polytope(coef_a[:, None] * a + coef_b[:, None] * b)
    return LpBody(inner, outer, False, directions.mesh_angle)


# --------------------------------------------------------------------------
# difference bodies


def shift_image(bodies: Sequence[Polytope]) -> Polytope:
    """``{(x - y_1, ..., x - y_m) : x in K_0, y_i in K_i}`` as an exact polytope in R^{nm}."""
    K0, rest = bodies[0], list(bodies[1:])
    n, m = K0.dim, len(rest)
    if m == 0:
        raise ValueError("need at least two bodies")
    if any(K.dim != n for K in rest):
        raise ValueError("all bodies must share a dimension")
    count = math.prod(len(K) for K in bodies)
    if count > EXACT_TUPLE_LIMIT:
        raise ValueError(f"{count} vertex tuples exceed the exact-mode limit {EXACT_TUPLE_LIMIT}")
    acc = np.tile(K0.vertices, (1, m))  # diagonal embedding of K0
    for i, K in enumerate(rest):
        block = np.zeros((len(K), n * m))
        block[:, i * n:(i + 1) * n] = -K.vertices
        acc = Polytope(_minkowski(acc, block)).vertices
    return Polytope(acc, dim=n * m)


class DifferenceBody:
    """The m-th order difference body with an exact polytope and an LP membership oracle."""

    def __init__(self, K: Polytope | Sequence[Polytope], m: int | None = None):
        if isinstance(K, Polytope):
            if m is None or m < 1:
                raise ValueError("m must be a positive integer")
            bodies = [K] * (m + 1)
        else:
            bodies = list(K)
            m = len(bodies) - 1
        if len(bodies[0]) == 0:
            raise ValueError("empty body")
        self.bodies = bodies
        self.m = m
        self.n = bodies[0].dim
        self._poly: Polytope | None = None

    @property
    def dim(self) -> int:
        return self.n * self.m

    @property
    def exact_available(self) -> bool:
        return math.prod(len(K) for K in self.bodies) <= EXACT_TUPLE_LIMIT

    @property
    def polytope(self) -> Polytope:
        if self._poly is None:
            self._poly = shift_image(self.bodies)
        return self._poly

    def oracle_contains(self, z, margin: float = SET_TOL) -> bool:
        """Feasibility of ``x in K_0 and x - z_i in K_i`` for all ``i``."""
        z = np.asarray(z, dtype=float).reshape(self.m, self.n)
        rows, rhs = [self.bodies[0].normals], [self.bodies[0].offsets + margin]
        for i, K in enumerate(self.bodies[1:]):
            rows.append(K.normals)
            rhs.append(K.offsets + K.normals @ z[i] + margin)
        res = optimize.linprog(np.zeros(self.n), A_ub=np.vstack(rows), b_ub=np.concatenate(rhs),
                               bounds=[(None, None)] * self.n, method="highs")
        return res.status == 0

    def contains_points(self, Z, margin: float = SET_TOL) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if self.exact_available:
            return self.polytope.contains_points(Z, margin)
        return np.array([self.oracle_contains(z, margin) for z in Z])

    def bounding_box(self):
        if self.exact_available:
            return self.polytope.bounding_box()
        lo0, hi0 = self.bodies[0].bounding_box()
        los, his = [], []
        for K in self.bodies[1:]:
            lo, hi = K.bounding_box()
            los.append(lo0 - hi)
            his.append(hi0 - lo)
        return np.concatenate(los), np.concatenate(his)


def difference_body(K: Polytope, m: int) -> DifferenceBody:
    return DifferenceBody(K, m)


# --------------------------------------------------------------------------
# symmetry


def symmetry_class(P: Polytope) -> str:
    """``"unconditional"``, ``"origin_symmetric"`` or ``"general"``."""
    v = P.vertices
    if not _same_point_set(v, -v, SET_TOL):
        return "general"
    for signs in itertools.product([1.0, -1.0], repeat=P.dim):
        if not _same_point_set(v, v * np.array(signs), SET_TOL):
            return "origin_symmetric"
    return "unconditional"
