"""Sup-convolutions over constraint families.

For a family with constraint sets ``C(z)`` and a mean ``M``, the
sup-convolution of ``f = (f_1, ..., f_k)`` is

    h(z) = sup { M(f_1(x_1), ..., f_k(x_k)) : x in C(z) }.

On layered inputs the supremum is attained level by level: every tuple of
superlevel sets ``(A_1, ..., A_k)`` contributes the value ``M(c_1, ..., c_k)``
on the set of targets ``z`` reachable from ``A_1 x ... x A_k``.  The result is
a maximum of finitely many weighted regions (``MaxLayerFunction``).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from . import _json, kernels
from .estimates import Budget, IntegrationResult
from .means import MeanSpec, WeightVector, eval_mean
from .measure import Lebesgue, MeasureSpec, mc_integrate
from .polytope import (
    DirectionSet,
    Polytope,
    affine_combination,
    linear_image_sum,
    lp_combination,
    shift_image,
    volume,
)
from .stepfn import LayeredFunction

__all__ = [
    "ConstraintFamily",
    "AffineCombination",
    "GeneralLinear",
    "LevelSetLp",
    "LpUnion",
    "SchneiderShift",
    "HeisenbergProduct",
    "SupConvolutionSpec",
    "Piece",
    "MaxLayerFunction",
    "GridFunction",
    "HeisenbergPoint",
    "HeisenbergProductRegion",
    "HypothesisError",
    "heisenberg_op",
    "heisenberg_box_product_volume",
    "combined_set",
    "supconv_layered",
    "integrate_supconv",
    "supconv_grid_oracle",
    "grid_volume",
    "rasterize",
    "family_from_json",
]

PIECE_BUDGET = 10**5
GRID_PAIR_BUDGET = 4 * 10**9


class HypothesisError(ValueError):
    """Inputs do not meet the class hypothesis of the constraint family."""


# --------------------------------------------------------------------------
# Heisenberg group, polarized coordinates


class HeisenbergPoint(NamedTuple):
    x1: float
    x2: float
    x3: float


def heisenberg_op(kind: str, x, y=None) -> HeisenbergPoint:
    """``x . y`` or ``x^{-1}`` in the polarized model."""
    x = HeisenbergPoint(*map(float, x))
    if kind == "inverse":
        return HeisenbergPoint(-x.x1, -x.x2, -x.x3)
    if kind != "product":
        raise ValueError(f"unknown operation {kind!r}")
    if y is None:
        raise ValueError("product needs two points")
    y = HeisenbergPoint(*map(float, y))
    return HeisenbergPoint(x.x1 + y.x1, x.x2 + y.x2,
                           x.x3 + y.x3 + 0.5 * (x.x1 * y.x2 - x.x2 * y.x1))


def _as_box(P: Polytope):
    lo, hi = P.bounding_box()
    if P.dim == 3 and len(P) == 8 and P.same_set(Polytope.box(lo, hi)):
        return lo, hi
    return None


def heisenberg_box_product_volume(A: Polytope, B: Polytope) -> float:
    """Closed-form Haar measure of ``A . B`` for two axis-aligned boxes.

    For fixed ``(z1, z2)`` the admissible ``z3`` form an interval of length
    ``L3 + (|z1| w2 + |z2| w1) / 2`` where ``w_i`` is the overlap length in
    coordinate ``i``; integrating the separable pieces gives the formula below.
    """
    ba, bb = _as_box(A), _as_box(B)
    if ba is None or bb is None:
        raise ValueError("closed form needs axis-aligned boxes")
    (al, ah), (bl, bh) = ba, bb
    a, b = ah - al, bh - bl
    lo, hi = al + bl, ah + bh

    def abs_int(l, h):
        return 0.5 * (np.sign(h) * h * h - np.sign(l) * l * l)

    S = a + b
    return float((a[2] + b[2]) * S[0] * S[1]
                 + 0.5 * (abs_int(lo[0], hi[0]) * a[1] * b[1] + abs_int(lo[1], hi[1]) * a[0] * b[0]))


class HeisenbergProductRegion:
    """Membership oracle for the product set ``A . B``.

    Axis-aligned boxes are decided exactly: ``z`` is in ``A . B`` iff the
    rectangle of admissible ``(x1, x2)`` is non-empty and the range of the
    twist term over it meets the interval allowed by the third coordinate.
    Other polytopes use a grid of points of ``A`` (an inner approximation).
    """

    def __init__(self, A: Polytope, B: Polytope, grid: int = 24):
        if A.dim != 3 or B.dim != 3:
            raise ValueError("the Heisenberg group here is three-dimensional")
        self.A, self.B = A, B
        self._boxes = (_as_box(A), _as_box(B))
        self.exact = all(b is not None for b in self._boxes)
        self._xs = None
        if not self.exact:
            lo, hi = A.bounding_box()
            axes = [np.linspace(l, h, grid) for l, h in zip(lo, hi)]
            pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
            self._xs = pts[A.contains_points(pts)]
        self.dim = 3

    def bounding_box(self):
        al, ah = self.A.bounding_box()
        bl, bh = self.B.bounding_box()
        corners = np.array(list(itertools.product(*zip(al[:2], ah[:2]))))
        ycorn = np.array(list(itertools.product(*zip(bl[:2], bh[:2]))))
        tw = 0.5 * (corners[:, None, 0] * ycorn[None, :, 1] - corners[:, None, 1] * ycorn[None, :, 0])
        lo = np.array([al[0] + bl[0], al[1] + bl[1], al[2] + bl[2] + tw.min()])
        hi = np.array([ah[0] + bh[0], ah[1] + bh[1], ah[2] + bh[2] + tw.max()])
        return lo, hi

    def contains_points(self, Z, margin: float = 1e-9) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if self.exact:
            return self._box_membership(Z, margin)
        out = np.zeros(len(Z), dtype=bool)
        for k, z in enumerate(Z):
            y = z - self._xs
            y[:, 2] += 0.5 * (self._xs[:, 1] * z[0] - self._xs[:, 0] * z[1])
            out[k] = bool(self.B.contains_points(y, margin).any())
        return out

    def _box_membership(self, Z, margin):
        (al, ah), (bl, bh) = self._boxes
        l1 = np.maximum(al[0], Z[:, 0] - bh[0])
        u1 = np.minimum(ah[0], Z[:, 0] - bl[0])
        l2 = np.maximum(al[1], Z[:, 1] - bh[1])
        u2 = np.minimum(ah[1], Z[:, 1] - bl[1])
        ok = (l1 <= u1 + margin) & (l2 <= u2 + margin)
        # twist s = (x2 z1 - x1 z2) / 2 is linear on the rectangle
        half1, half2 = 0.5 * np.abs(Z[:, 0]), 0.5 * np.abs(Z[:, 1])
        mid = 0.5 * (0.5 * (l2 + u2) * Z[:, 0] - 0.5 * (l1 + u1) * Z[:, 1])
        rad = half1 * 0.5 * np.abs(u2 - l2) + half2 * 0.5 * np.abs(u1 - l1)
        smin, smax = mid - rad, mid + rad
        lo3 = al[2] + bl[2] - Z[:, 2]
        hi3 = ah[2] + bh[2] - Z[:, 2]
        return ok & (smax >= lo3 - margin) & (smin <= hi3 + margin)

    def volume(self) -> float:
        return heisenberg_box_product_volume(self.A, self.B)

    def to_json(self):
        return {"kind": "heisenberg_product", "A": self.A.to_json(), "B": self.B.to_json()}


def grid_volume(region, resolution: int = 64, margin: float = 0.0) -> tuple[float, float]:
    """Volume of a membership-oracle region by counting grid cells.

    The bounding box is cut into ``resolution^d`` cells; a cell counts when its
    center is inside.  The returned error is the volume of the cells whose
    corners disagree, the cells the boundary passes through.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    lo, hi = (np.asarray(v, dtype=float) for v in region.bounding_box())
    d = len(lo)
    h = (hi - lo) / resolution
    cell = float(np.prod(h))
    centers = [a + w * (np.arange(resolution) + 0.5) for a, w in zip(lo, h)]
    C = np.stack(np.meshgrid(*centers, indexing="ij"), axis=-1).reshape(-1, d)
    count = int(region.contains_points(C, margin).sum())
    nodes = [np.linspace(a, b, resolution + 1) for a, b in zip(lo, hi)]
    N = np.stack(np.meshgrid(*nodes, indexing="ij"), axis=-1).reshape(-1, d)
    inside = region.contains_points(N, margin).reshape((resolution + 1,) * d)
    all_in = np.ones((resolution,) * d, dtype=bool)
    any_in = np.zeros((resolution,) * d, dtype=bool)
    for corner in itertools.product((0, 1), repeat=d):
        sl = tuple(slice(c, c + resolution) for c in corner)
        all_in &= inside[sl]
        any_in |= inside[sl]
    boundary = int((any_in & ~all_in).sum())
    return count * cell, boundary * cell


# --------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class ConstraintFamily:
    kind = "abstract"
    requires = "general"

    @property
    def arity(self) -> int:
        raise NotImplementedError

    def region(self, sets: Sequence[Polytope]):
        raise NotImplementedError

    def target_dim(self, n: int) -> int:
        return n

    def to_json(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class AffineCombination(ConstraintFamily):
    """``C(z) = {(x, y) : (1 - t) x + t y = z}``."""

    t: float = 0.5
    kind = "affine"

    def __post_init__(self):
        if not 0.0 < self.t < 1.0:
            raise ValueError("t must lie in (0, 1)")

    @property
    def arity(self):
        return 2

    def region(self, sets):
        return affine_combination(sets[0], sets[1], self.t)

    def to_json(self):
        return {"kind": self.kind, "t": self.t}


@dataclass(frozen=True)
class GeneralLinear(ConstraintFamily):
    """``C(z) = {x : sum_i c_i B_i^* x_i = z}`` with ``B_i^*`` given as ``n x n_i`` matrices."""

    maps: tuple = ()
    coeffs: tuple = ()
    kind = "general_linear"

    def __post_init__(self):
        maps = tuple(np.atleast_2d(np.asarray(M, dtype=float)) for M in self.maps)
        if not maps or len(maps) != len(self.coeffs):
            raise ValueError("need one coefficient per map")
        if any(M.shape[0] != maps[0].shape[0] for M in maps):
            raise ValueError("all maps must land in the same space")
        if any(c <= 0 for c in self.coeffs):
            raise ValueError("coefficients must be positive")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @classmethod
    def affine(cls, n: int, t: float) -> "GeneralLinear":
        return cls((np.eye(n), np.eye(n)), (1.0 - t, t))

    @property
    def arity(self):
        return len(self.maps)

    def target_dim(self, n):
        return self.maps[0].shape[0]

    def region(self, sets):
        return linear_image_sum(self.maps, self.coeffs, sets)

    def to_json(self):
        return {"kind": self.kind, "maps": [M.tolist() for M in self.maps], "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class LevelSetLp(ConstraintFamily):
    """``C_p(z; f) = {(x, y) : z in (1-t).{f0 >= f0(x)} +_p t.{f1 >= f1(y)}}`` for ``p in [0, 1]``.

    Regions are the inner bodies of the L_p combination, so integrals are
    certified lower bounds (exact for ``p in [0, 1]`` polytopes).
    """

    p: float = 0.0
    t: float = 0.5
    directions: int | None = None
    kind = "level_set_lp"
    requires = "even_unimodal"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if not 0.0 < self.t < 1.0:
            raise ValueError("t must lie in (0, 1)")

    @property
    def arity(self):
        return 2

    def _dirs(self, n):
        if self.directions and n == 2:
            return DirectionSet.planar(self.directions)
        return DirectionSet.default(n)

    def lp_body(self, A, B):
        return lp_combination(A, B, self.t, self.p, self._dirs(A.dim))

    def region(self, sets):
        return self.lp_body(*sets).inner

    def to_json(self):
        return {"kind": self.kind, "p": self.p, "t": self.t, "directions": self.directions}


@dataclass(frozen=True)
class LpUnion(ConstraintFamily):
    """``C_p(z) = {(x, y) : z = (1-t)^{1/p} (1-l)^{1/q} x + t^{1/p} l^{1/q} y, l in [0, 1]}``, ``p > 1``.

    For convex layers with the origin inside this set agrees with the Wulff
    construction; regions are the certified inner bodies.
    """

    p: float = 2.0
    t: float = 0.5
    kind = "lp_union"
    requires = "even_unimodal"

    def __post_init__(self):
        if not self.p > 1.0:
            raise ValueError("p must exceed 1")
        if not 0.0 < self.t < 1.0:
            raise ValueError("t must lie in (0, 1)")

    @property
    def arity(self):
        return 2

    def region(self, sets):
        return lp_combination(sets[0], sets[1], self.t, self.p).inner

    def to_json(self):
        return {"kind": self.kind, "p": self.p, "t": self.t}


@dataclass(frozen=True)
class SchneiderShift(ConstraintFamily):
    """Targets ``z = (x - y_1, ..., x - y_m)`` in ``(R^n)^m``; inputs ``(f_0, f_1, ..., f_m)``."""

    m: int = 1
    kind = "schneider_shift"

    def __post_init__(self):
        if int(self.m) < 1:
            raise ValueError("m must be a positive integer")

    @property
    def arity(self):
        return self.m + 1

    def target_dim(self, n):
        return n * self.m

    def region(self, sets):
        return shift_image(sets)

    def to_json(self):
        return {"kind": self.kind, "m": self.m}


@dataclass(frozen=True)
class HeisenbergProduct(ConstraintFamily):
    """``C(z) = {(x, y) : x . y = z}`` in the three-dimensional Heisenberg group."""

    grid: int = 24
    kind = "heisenberg"

    @property
    def arity(self):
        return 2

    def region(self, sets):
        return HeisenbergProductRegion(sets[0], sets[1], self.grid)

    def to_json(self):
        return {"kind": self.kind, "grid": self.grid}


def family_from_json(obj: dict) -> ConstraintFamily:
    kind = obj["kind"]
    if kind == "affine":
        return AffineCombination(float(obj["t"]))
    if kind == "general_linear":
        return GeneralLinear(tuple(np.asarray(M, dtype=float) for M in obj["maps"]), tuple(obj["coeffs"]))
    if kind == "level_set_lp":
        return LevelSetLp(float(obj["p"]), float(obj["t"]), obj.get("directions"))
    if kind == "lp_union":
        return LpUnion(float(obj["p"]), float(obj["t"]))
    if kind == "schneider_shift":
        return SchneiderShift(int(obj["m"]))
    if kind == "heisenberg":
        return HeisenbergProduct(int(obj.get("grid", 24)))
    raise ValueError(f"unknown family kind {kind!r}")


@dataclass(frozen=True)
class SupConvolutionSpec:
    family: ConstraintFamily
    mean: MeanSpec

    def __post_init__(self):
        if self.mean.exponent > 1:
            raise ValueError("the mean exponent must be at most 1")
        if self.mean.arity != self.family.arity:
            raise ValueError(f"mean has {self.mean.arity} weights, family arity is {self.family.arity}")

    @classmethod
    def standard(cls, family: ConstraintFamily, alpha: float) -> "SupConvolutionSpec":
        """Family with the ``alpha``-mean and its natural weights."""
        k = family.arity
        if isinstance(family, (AffineCombination, LevelSetLp, LpUnion)):
            w = WeightVector.convex_pair(family.t)
        elif isinstance(family, GeneralLinear):
            c = np.asarray(family.coeffs)
            w = WeightVector(c / c.sum())
        else:
            w = WeightVector.uniform(k)
        return cls(family, MeanSpec(alpha, w))

    def to_json(self):
        return {"family": self.family.to_json(), "mean": self.mean.to_json()}


def combined_set(family: ConstraintFamily, sets: Sequence[Polytope]):
    """Targets reachable from ``A_1 x ... x A_k``; a polytope or a membership oracle."""
    if len(sets) != family.arity:
        raise ValueError(f"family takes {family.arity} sets, got {len(sets)}")
    if isinstance(family, LevelSetLp):
        return family.lp_body(*sets)
    return family.region(sets)


# --------------------------------------------------------------------------
# layered evaluation


class Piece(NamedTuple):
    value: float
    region: object
    levels: tuple
    outer: object = None


class MaxLayerFunction:
    """``h(z) = max { v : z in region }`` over finitely many pieces (0 elsewhere)."""

    def __init__(self, pieces: Sequence[Piece], dim: int):
        for p in pieces:
            if not p.value > 0:
                raise ValueError("piece values must be positive")
        self.pieces = sorted(pieces, key=lambda p: -p.value)
        self.dim = dim

    def __len__(self):
        return len(self.pieces)

    def evaluate(self, Z, margin: float = 1e-9) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        out = np.zeros(len(Z))
        todo = np.ones(len(Z), dtype=bool)
        for p in self.pieces:  # descending values: first hit wins
            idx = np.flatnonzero(todo)
            if idx.size == 0:
                break
            hit = p.region.contains_points(Z[idx], margin)
            out[idx[hit]] = p.value
            todo[idx[hit]] = False
        return out

    def __call__(self, z) -> float:
        return float(self.evaluate(np.asarray(z, dtype=float).reshape(1, -1))[0])

    def outer_function(self) -> "MaxLayerFunction":
        """The same pieces over their outer regions (upper bracket)."""
        return MaxLayerFunction([Piece(p.value, p.outer if p.outer is not None else p.region, p.levels)
                                 for p in self.pieces], self.dim)

    def bounding_box(self):
        boxes = [p.region.bounding_box() for p in self.pieces]
        return np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0)

    @property
    def max_value(self) -> float:
        return self.pieces[0].value if self.pieces else 0.0

    def to_json(self) -> dict:
        out = []
        for p in self.pieces:
            reg = p.region.to_json() if hasattr(p.region, "to_json") else {"kind": type(p.region).__name__}
            out.append({"value": p.value, "levels": list(p.levels), "region": reg})
        return {"dim": self.dim, "pieces": out}


def supconv_layered(spec: SupConvolutionSpec, fs: Sequence[LayeredFunction],
                    piece_budget: int = PIECE_BUDGET) -> MaxLayerFunction:
    """Exact sup-convolution of layered inputs as a maximum of weighted regions."""
    fam = spec.family
    if len(fs) != fam.arity:
        raise ValueError(f"family takes {fam.arity} functions, got {len(fs)}")
    n = fs[0].dim
    if any(f.dim != n for f in fs):
        raise ValueError("all inputs must share a dimension")
    if isinstance(fam, GeneralLinear):
        for M, f in zip(fam.maps, fs):
            if M.shape[1] != f.dim:
                raise ValueError("map does not match input dimension")
        n = fam.maps[0].shape[1]
    for f in fs:
        if not f.satisfies(fam.requires):
            raise HypothesisError(f"{fam.kind} needs {fam.requires} inputs, got {f.tag}")
    tdim = fam.target_dim(fs[0].dim)
    if any(f.is_zero for f in fs):
        return MaxLayerFunction([], tdim)
    count = math.prod(len(f) for f in fs)
    if count > piece_budget:
        raise ValueError(f"{count} level tuples exceed the piece budget {piece_budget}")
    cums = [f.cumulative for f in fs]
    pieces = []
    for levels in itertools.product(*[range(len(f)) for f in fs]):
        value = eval_mean(spec.mean, [c[j] for c, j in zip(cums, levels)])
        if value <= 0:
            continue
        sets = [f.layers[j][1] for f, j in zip(fs, levels)]
        if isinstance(fam, LevelSetLp):
            body = fam.lp_body(*sets)
            pieces.append(Piece(value, body.inner, levels, body.outer))
        else:
            pieces.append(Piece(value, fam.region(sets), levels))
    return MaxLayerFunction(_prune(pieces), tdim)


def _prune(pieces):
    """Drop pieces whose region lies inside a region of a piece with a value at least as large."""
    pieces = sorted(pieces, key=lambda p: -p.value)
    kept = []
    for p in pieces:
        if isinstance(p.region, Polytope) and p.region.is_full_dimensional:
            if any(isinstance(q.region, Polytope) and q.region.is_full_dimensional
                   and q.region.contains_polytope(p.region, 0.0)
                   and (q.outer is None or p.outer is None or q.outer.contains_polytope(p.outer, 0.0))
                   for q in kept):
                continue
        kept.append(p)
    return kept


# --------------------------------------------------------------------------
# integration


def _union_measure_exact(regions, n):
    """Lebesgue measure of growing unions; ``None`` if no exact route applies."""
    if not all(isinstance(r, Polytope) for r in regions):
        return None
    if n == 1:
        out, ivs = [], []
        for r in regions:
            lo, hi = r.bounding_box()
            ivs.append((lo[0], hi[0]))
            merged, total = sorted(ivs), 0.0
            cur_lo, cur_hi = merged[0]
            for a, b in merged[1:]:
                if a > cur_hi:
                    total += cur_hi - cur_lo
                    cur_lo, cur_hi = a, b
                else:
                    cur_hi = max(cur_hi, b)
            out.append(total + cur_hi - cur_lo)
        return out
    if n == 2:
        from shapely.geometry import Polygon as _Poly

        out, union = [], None
        for r in regions:
            g = _Poly(r.vertices) if r.is_full_dimensional else None
            if g is not None:
                union = g if union is None else union.union(g)
            out.append(0.0 if union is None else float(union.area))
        return out
    # chains: every new region contains, or is contained in, the running union
    out, top = [], None
    for r in regions:
        if top is None or r.contains_polytope(top, 1e-12):
            top = r
        elif not top.contains_polytope(r, 1e-12):
            return None
        out.append(volume(top).value if n <= 3 else None)
    return None if any(v is None for v in out) else out


def integrate_supconv(h: MaxLayerFunction, m: MeasureSpec, budget: Budget | None = None) -> IntegrationResult:
    """``∫ h dm`` by the sweep ``sum_k (v_k - v_{k+1}) m(R_1 ∪ ... ∪ R_k)``.

    Lebesgue unions are measured exactly in dimensions 1 and 2 and for
    nested chains; anything else is sampled from the membership oracles.
    """
    budget = budget or Budget.monte_carlo(10**6)
    if not h.pieces:
        return IntegrationResult(0.0)
    if m.dim != h.dim:
        raise ValueError("measure and function dimensions differ")
    vals = np.array([p.value for p in h.pieces] + [0.0])
    if isinstance(m, Lebesgue):
        unions = _union_measure_exact([p.region for p in h.pieces], h.dim)
        if unions is not None:
            return IntegrationResult(float(np.dot(vals[:-1] - vals[1:], unions)))
        if budget.is_exact:
            raise ValueError("no exact route for these regions")
    elif budget.is_exact:
        raise ValueError(f"exact integration is not available for the {m.kind} measure")
    lo, hi = h.bounding_box()
    return mc_integrate(m, h.evaluate, lo, hi, budget)


# --------------------------------------------------------------------------
# grid oracle


@dataclass
class GridFunction:
    """Node values on a regular grid ``lo + i * spacing``, ``i < shape``."""

    lo: np.ndarray
    spacing: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        self.spacing = np.atleast_1d(np.asarray(self.spacing, dtype=float))
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != self.lo.size or self.spacing.size != self.lo.size:
            raise ValueError("grid dimension mismatch")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ValueError("grid values must be finite and non-negative")

    @property
    def shape(self):
        return self.values.shape

    @property
    def dim(self):
        return self.values.ndim

    @property
    def hi(self):
        return self.lo + self.spacing * (np.array(self.shape) - 1)

    def nodes(self) -> np.ndarray:
        axes = [self.lo[k] + self.spacing[k] * np.arange(self.shape[k]) for k in range(self.dim)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)

    def nonzero(self):
        idx = np.argwhere(self.values > 0).astype(np.int64)
        return np.ascontiguousarray(self.values[tuple(idx.T)]), np.ascontiguousarray(idx)

    def dump(self, path) -> None:
        header = {"lo": self.lo.tolist(), "spacing": self.spacing.tolist(), "shape": list(self.shape),
                  "dtype": "<f8", "order": "C"}
        with open(path, "wb") as fh:
            fh.write((_json.dumps(header) + "\n").encode())
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "GridFunction":
        with open(path, "rb") as fh:
            header = json.loads(fh.readline())
            data = np.frombuffer(fh.read(), dtype="<f8").reshape(header["shape"])
        return cls(np.array(header["lo"]), np.array(header["spacing"]), data.copy())


def rasterize(f, lo, spacing, shape) -> GridFunction:
    """Sample a layered (or any vectorized) function at grid nodes."""
    G = GridFunction(lo, spacing, np.zeros(tuple(shape)))
    vals = f.evaluate(G.nodes()) if hasattr(f, "evaluate") else f(G.nodes())
    G.values = np.asarray(vals, dtype=float).reshape(tuple(shape))
    return G


def _rational(t: float, max_den: int = 64) -> Fraction:
    fr = Fraction(t).limit_denominator(max_den)
    if abs(float(fr) - t) > 1e-12:
        raise ValueError(f"t = {t} is not a rational with denominator at most {max_den}")
    return fr


def _check_pairs(fs):
    pairs = math.prod(int(np.count_nonzero(f.values)) for f in fs)
    if pairs > GRID_PAIR_BUDGET:
        raise MemoryError(f"{pairs} grid pairs exceed the oracle budget")


def supconv_grid_oracle(spec: SupConvolutionSpec, fs: Sequence[GridFunction]) -> GridFunction:
    """Brute-force sup over all grid-realizable constraint pairs.

    Affine combinations need ``t = p/q`` with small ``q`` and equal input
    spacings ``s``; the output grid has spacing ``s/q`` and every pair lands
    exactly on a node.  The shift family (``m = 1``) uses the index difference.
    Heisenberg products are snapped to the nearest output node.
    """
    fam = spec.family
    if len(fs) != 2:
        raise ValueError("the grid oracle handles two-input families")
    f, g = fs
    if f.dim != g.dim:
        raise ValueError("grid dimensions differ")
    _check_pairs(fs)
    p = spec.mean.exponent
    w0, w1 = spec.mean.weights.weights
    fv, fi = f.nonzero()
    gv, gi = g.nonzero()
    if isinstance(fam, (AffineCombination, SchneiderShift)):
        if not np.allclose(f.spacing, g.spacing, rtol=1e-12, atol=0):
            raise ValueError("inputs must share the grid spacing")
        if isinstance(fam, SchneiderShift):
            if fam.m != 1:
                raise ValueError("the grid oracle supports the shift family with m = 1 only")
            cf, cg, q = 1, -1, 1
            offset = np.array(g.shape, dtype=np.int64) - 1
            lo = f.lo - g.hi
            shape = np.array(f.shape) + np.array(g.shape) - 1
        else:
            fr = _rational(fam.t)
            cf, cg, q = fr.denominator - fr.numerator, fr.numerator, fr.denominator
            offset = np.zeros(f.dim, dtype=np.int64)
            lo = (1 - fam.t) * f.lo + fam.t * g.lo
            shape = cf * (np.array(f.shape) - 1) + cg * (np.array(g.shape) - 1) + 1
        shape = np.asarray(shape, dtype=np.int64)
        out = kernels.affine_pair_max(fv, fi, gv, gi, cf, cg, offset, shape, float(p), w0, w1)
        return GridFunction(lo, f.spacing / q, out.reshape(tuple(shape)))
    if isinstance(fam, HeisenbergProduct):
        if f.dim != 3:
            raise ValueError("Heisenberg grids are three-dimensional")
        h = np.minimum(f.spacing, g.spacing)
        fx = np.ascontiguousarray(f.lo + fi * f.spacing)
        gy = np.ascontiguousarray(g.lo + gi * g.spacing)
        A = Polytope.box(f.lo, f.hi)
        B = Polytope.box(g.lo, g.hi)
        blo, bhi = HeisenbergProductRegion(A, B).bounding_box()
        shape = np.asarray(np.ceil((bhi - blo) / h).astype(np.int64) + 1, dtype=np.int64)
        out = kernels.heisenberg_pair_max(fv, fx, gv, gy, blo, h, shape, float(p), w0, w1)
        return GridFunction(blo, h, out.reshape(tuple(shape)))
    raise ValueError(f"the grid oracle does not support the {fam.kind} family")
