"""Nested step functions ``sum_j a_j 1_{A_j}`` and the layer-cake toolkit.

Layers are stored outermost first, ``A_1 ⊇ A_2 ⊇ ...``.  The value on
``A_j \\ A_{j+1}`` is the cumulative sum ``c_j = a_1 + ... + a_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _json
from .estimates import Budget
from .measure import MeasureSpec, layer_measures
from .polytope import SET_TOL, Polytope, symmetry_class

__all__ = [
    "LayeredFunction",
    "ProfileSpec",
    "Split",
    "CLASS_TAGS",
    "NestingError",
    "from_profile",
    "dyadic_approximation",
    "split_at_threshold",
    "solve_matching_threshold",
    "truncated_integral",
    "evaluate",
    "superlevel_set",
]

CLASS_TAGS = ("general", "even_unimodal", "unconditional", "star_unimodal")
MAX_LAYERS = 10**4

# which tags a given tag also satisfies
_IMPLIES = {
    "general": {"general"},
    "star_unimodal": {"general", "star_unimodal"},
    "even_unimodal": {"general", "star_unimodal", "even_unimodal"},
    "unconditional": {"general", "star_unimodal", "even_unimodal", "unconditional"},
}


class NestingError(ValueError):
    """Layer bodies are not nested or do not match the class tag."""


def _check_tag(tag: str, bodies: Sequence[Polytope]) -> None:
    if tag not in CLASS_TAGS:
        raise ValueError(f"unknown class tag {tag!r}")
    for A in bodies:
        if tag == "star_unimodal" and not A.contains(np.zeros(A.dim)):
            raise NestingError("star-unimodal layers must contain the origin")
        if tag in ("even_unimodal", "unconditional"):
            sym = symmetry_class(A)
            if sym == "general" or (tag == "unconditional" and sym != "unconditional"):
                raise NestingError(f"layer body is {sym}, incompatible with tag {tag!r}")


class LayeredFunction:
    """Additive nested step function with a verified class tag.

    Parameters
    ----------
    layers : sequence of (increment, Polytope)
        Outermost body first; increments must be positive.
    dim : int, optional
        Required when ``layers`` is empty.
    tag : str
        One of ``CLASS_TAGS``; checked against every layer.
    """

    __slots__ = ("layers", "dim", "tag", "_cum")

    def __init__(self, layers: Sequence, dim: int | None = None, tag: str = "general"):
        layers = [(float(a), A) for a, A in layers]
        if dim is None:
            if not layers:
                raise ValueError("dimension required for the zero function")
            dim = layers[0][1].dim
        for a, A in layers:
            if not (a > 0 and math.isfinite(a)):
                raise ValueError(f"increments must be positive and finite, got {a}")
            if A.dim != dim:
                raise ValueError("layer dimension mismatch")
            if not A.is_full_dimensional:
                raise ValueError("layer bodies must be full-dimensional")
        for (_, outer), (_, inner) in zip(layers, layers[1:]):
            if not outer.contains_polytope(inner, SET_TOL):
                raise NestingError("layers are not nested")
        _check_tag(tag, [A for _, A in layers])
        self.layers = tuple(self._merge(layers))
        self.dim = int(dim)
        self.tag = tag
        self._cum = np.cumsum([a for a, _ in self.layers]) if self.layers else np.zeros(0)

    @staticmethod
    def _merge(layers):
        out: list[tuple[float, Polytope]] = []
        for a, A in layers:
            if out and out[-1][1].same_set(A):
                out[-1] = (out[-1][0] + a, out[-1][1])
            else:
                out.append((a, A))
        return out

    @classmethod
    def _trusted(cls, layers, dim, tag) -> "LayeredFunction":
        # layers already known to be nested and tag-consistent
        obj = cls.__new__(cls)
        obj.layers = tuple(cls._merge([(float(a), A) for a, A in layers if a > 0]))
        obj.dim, obj.tag = int(dim), tag
        obj._cum = np.cumsum([a for a, _ in obj.layers]) if obj.layers else np.zeros(0)
        return obj

    @classmethod
    def indicator(cls, A: Polytope, value: float = 1.0, tag: str = "general") -> "LayeredFunction":
        return cls([(value, A)], tag=tag)

    @classmethod
    def zero(cls, dim: int, tag: str = "general") -> "LayeredFunction":
        return cls([], dim=dim, tag=tag)

    # -- basic data ----------------------------------------------------------
    @property
    def cumulative(self) -> np.ndarray:
        return self._cum.copy()

    @property
    def increments(self) -> np.ndarray:
        return np.array([a for a, _ in self.layers])

    @property
    def bodies(self) -> list[Polytope]:
        return [A for _, A in self.layers]

    @property
    def max_value(self) -> float:
        return float(self._cum[-1]) if len(self._cum) else 0.0

    @property
    def is_zero(self) -> bool:
        return not self.layers

    def satisfies(self, tag: str) -> bool:
        return tag in _IMPLIES[self.tag]

    def __len__(self):
        return len(self.layers)

    def __repr__(self):
        return f"LayeredFunction(dim={self.dim}, tag={self.tag!r}, values={self._cum.tolist()})"

    def canonical(self) -> "LayeredFunction":
        return LayeredFunction._trusted(self.layers, self.dim, self.tag)

    def same_as(self, other: "LayeredFunction", tol: float = 1e-12) -> bool:
        if self.dim != other.dim or len(self) != len(other):
            return False
        return all(abs(a - b) <= tol * max(1.0, abs(a)) and A.same_set(B)
                   for (a, A), (b, B) in zip(self.layers, other.layers))

    def scaled(self, c: float) -> "LayeredFunction":
        if c < 0:
            raise ValueError("scale must be non-negative")
        if c == 0:
            return LayeredFunction.zero(self.dim, self.tag)
        return LayeredFunction._trusted([(c * a, A) for a, A in self.layers], self.dim, self.tag)

    def map_bodies(self, fn) -> "LayeredFunction":
        """Apply a set map (e.g. a dilation) to every body; the caller vouches for nesting."""
        return LayeredFunction([(a, fn(A)) for a, A in self.layers], self.dim, self.tag)

    # -- evaluation -----------------------------------------------------------
    def evaluate(self, X, margin: float = SET_TOL) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros(len(X))
        alive = np.ones(len(X), dtype=bool)
        for a, A in self.layers:
            idx = np.flatnonzero(alive)
            if idx.size == 0:
                break
            hit = A.contains_points(X[idx], margin)
            out[idx[hit]] += a
            alive[idx[~hit]] = False
        return out

    def __call__(self, x) -> float:
        return float(self.evaluate(np.asarray(x, dtype=float).reshape(1, -1))[0])

    def superlevel_index(self, c: float) -> int | None:
        """Index of the layer equal to ``{f >= c}``; ``None`` when that set is empty."""
        if c <= 0:
            raise ValueError("only thresholds c > 0 are non-trivial")
        j = int(np.searchsorted(self._cum, c - 1e-15 * max(1.0, c), side="left"))
        return j if j < len(self.layers) else None

    def superlevel_set(self, c: float) -> Polytope | None:
        j = self.superlevel_index(c)
        return None if j is None else self.layers[j][1]

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {"dim": self.dim, "class": self.tag,
                "layers": [{"a": a, "body": A.to_json()} for a, A in self.layers]}

    def dumps(self) -> str:
        return _json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj: dict) -> "LayeredFunction":
        layers = [(float(L["a"]), Polytope.from_json(L["body"])) for L in obj["layers"]]
        return cls(layers, dim=int(obj["dim"]), tag=obj.get("class", "general"))


def evaluate(f: LayeredFunction, x) -> float:
    return f(x)


def superlevel_set(f: LayeredFunction, c: float) -> Polytope | None:
    return f.superlevel_set(c)


# --------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class ProfileSpec:
    """Unimodal step profile ``value v_k on the gauge ball r_k K``."""

    gauge: Polytope
    radii: tuple
    values: tuple

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.size == 0:
            raise ValueError("empty profile")
        if r.size != v.size:
            raise ValueError("radii and values differ in length")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValueError("radii must be positive and strictly increasing")
        if np.any(v <= 0) or np.any(np.diff(v) >= 0):
            raise ValueError("values must be positive and strictly decreasing")
        if not self.gauge.is_full_dimensional or self.gauge.interior_margin(np.zeros(self.gauge.dim)) <= 0:
            raise ValueError("gauge body must contain the origin in its interior")


def from_profile(spec: ProfileSpec) -> LayeredFunction:
    sym = symmetry_class(spec.gauge)
    tag = {"unconditional": "unconditional", "origin_symmetric": "even_unimodal"}.get(sym, "general")
    r = list(spec.radii)[::-1]
    v = list(spec.values)[::-1] + [0.0]
    layers = [(v[k] if k == 0 else v[k] - v[k - 1], spec.gauge.scale(r[k])) for k in range(len(r))]
    return LayeredFunction(layers, tag=tag)


# --------------------------------------------------------------------------
# layer-cake operations


def dyadic_approximation(f: LayeredFunction, m: int) -> LayeredFunction:
    """``sum_{k=1}^{4^m} 2^{-m} 1_{f >= k 2^{-m}}`` in layered form."""
    if not 1 <= m <= 30:
        raise ValueError("m must lie in [1, 30]")
    scale = float(2**m)
    cum = np.minimum(np.floor(f.cumulative * scale), float(4**m)) / scale
    inc = np.diff(np.concatenate([[0.0], cum]))
    layers = [(a, A) for a, (_, A) in zip(inc, f.layers) if a > 0]
    if len(layers) > MAX_LAYERS:
        raise ValueError("dyadic approximation exceeds the layer limit")
    return LayeredFunction._trusted(layers, f.dim, f.tag)


class Split(NamedTuple):
    minus: LayeredFunction
    plus: LayeredFunction
    trivial: bool


def split_at_threshold(f: LayeredFunction, t: float) -> Split:
    """``(min(f, t), max(f - t, 0))``; trivial outside ``0 < t < max f``."""
    zero = LayeredFunction.zero(f.dim, f.tag)
    if t >= f.max_value:
        return Split(f, zero, True)
    if t <= 0:
        return Split(zero, f, True)
    prev = np.concatenate([[0.0], f.cumulative[:-1]])
    minus, plus = [], []
    for (a, A), c0, c1 in zip(f.layers, prev, f.cumulative):
        if c0 < t:
            minus.append((min(a, t - c0), A))
        if c1 > t:
            plus.append((c1 - max(c0, t), A))
    return Split(LayeredFunction._trusted(minus, f.dim, f.tag),
                 LayeredFunction._trusted(plus, f.dim, f.tag), False)


def truncated_integral(f: LayeredFunction, t: float, masses: Sequence[float]) -> float:
    """``∫ min(f, t) dm`` given the layer measures ``m(A_j)``."""
    prev = np.concatenate([[0.0], f.cumulative[:-1]])
    caps = np.minimum(f.increments, np.maximum(t - prev, 0.0))
    return float(np.dot(caps, np.asarray(masses, dtype=float)))


def solve_matching_threshold(f: LayeredFunction, m: MeasureSpec, lam: float,
                             budget: Budget | None = None, masses: Sequence[float] | None = None) -> float:
    """Threshold ``t`` with ``∫ min(f, t) dm = lam ∫ f dm``.

    ``t -> ∫ min(f, t) dm`` is piecewise linear with breakpoints at the
    cumulative values, so the root is found on the right segment in closed
    form from the layer measures (computed once, exact or sampled).
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lam must lie in (0, 1)")
    if masses is None:
        budget = budget or Budget.exact()
        masses = [r.value for r in layer_measures(m, f, budget)]
    masses = np.asarray(masses, dtype=float)
    if not np.all(np.isfinite(masses)):
        raise ValueError("non-finite layer measure")
    total = float(np.dot(f.increments, masses))
    if not total > 0:
        raise ValueError("integral of f must be positive")
    target = lam * total
    prev = np.concatenate([[0.0], f.cumulative[:-1]])
    # on [c_{j-1}, c_j] the slope is m({f > t}) = m(A_j)
    acc = 0.0
    for a, c0, mass in zip(f.increments, prev, masses):
        seg = a * mass
        if acc + seg >= target and mass > 0:
            return float(c0 + (target - acc) / mass)
        acc += seg
    return f.max_value
