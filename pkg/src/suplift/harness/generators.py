"""Seeded random bodies and layered functions.

Every generator takes a ``numpy.random.Generator`` so callers control the
stream; the same seed always yields the same object bit for bit.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..polytope import Polytope, symmetry_class
from ..stepfn import LayeredFunction, ProfileSpec, from_profile

__all__ = [
    "random_polygon",
    "random_body",
    "random_box",
    "random_heisenberg_box",
    "nested_layers",
    "random_profile_function",
    "sign_flips",
]

KINDS = ("general", "origin", "symmetric", "unconditional")


def sign_flips(n: int) -> np.ndarray:
    return np.array(list(itertools.product([1.0, -1.0], repeat=n)))


def _close(points: np.ndarray, kind: str) -> np.ndarray:
    if kind == "symmetric":
        return np.vstack([points, -points])
    if kind == "unconditional":
        return np.vstack([points * s for s in sign_flips(points.shape[1])])
    if kind == "origin":
        return points - points.mean(axis=0)
    return points


def random_body(rng: np.random.Generator, n: int = 2, kind: str = "general",
                k: tuple[int, int] = (4, 12), scale: tuple[float, float] = (0.5, 1.5)) -> Polytope:
    """Hull of ``k`` uniform points in a random-size cube, closed under the symmetry ``kind``.

    ``origin`` recenters the points so the origin is interior.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown body kind {kind!r}")
    while True:
        count = int(rng.integers(k[0], k[1] + 1))
        s = rng.uniform(*scale)
        pts = _close(rng.uniform(-1.0, 1.0, (count, n)) * s, kind)
        P = Polytope(pts)
        if not P.is_full_dimensional:
            continue
        if kind != "general" and P.interior_margin(np.zeros(n)) < 1e-3 * s:
            continue
        return P


def random_polygon(rng: np.random.Generator, kind: str = "general") -> Polytope:
    return random_body(rng, 2, kind)


def random_box(rng: np.random.Generator, n: int = 2, symmetric: bool = True,
               lo: float = 0.2, hi: float = 2.0) -> Polytope:
    half = rng.uniform(lo, hi, n)
    if symmetric:
        return Polytope.symmetric_box(half)
    c = rng.uniform(-1.0, 1.0, n)
    return Polytope.box(c - half, c + half)


def random_heisenberg_box(rng: np.random.Generator, size: tuple[float, float] = (0.2, 1.0),
                          offset: float = 0.3) -> Polytope:
    """Axis-aligned box in R^3 with its center within ``offset`` of the identity."""
    side = rng.uniform(*size, 3)
    c = rng.uniform(-offset, offset, 3)
    return Polytope.box(c - side / 2, c + side / 2)


def _inner_points(rng, P: Polytope, count: int) -> np.ndarray:
    w = rng.dirichlet(np.full(len(P), 0.5), size=count)
    return w @ P.vertices


def nested_layers(rng: np.random.Generator, n: int = 2, kind: str = "general",
                  layers: tuple[int, int] = (1, 4), tag: str | None = None,
                  values: tuple[float, float] = (0.2, 1.5)) -> LayeredFunction:
    """Layered function with non-homothetic nested bodies.

    Each inner body is the hull of random points of the previous one (closed
    under the symmetry ``kind``), so nesting holds by convexity.  For ``origin``
    a shrunken copy of the previous body is added to keep the origin interior.
    """
    L = int(rng.integers(layers[0], layers[1] + 1))
    A = random_body(rng, n, kind)
    bodies = [A]
    while len(bodies) < L:
        prev = bodies[-1]
        for _ in range(50):
            pts = _close(_inner_points(rng, prev, int(rng.integers(n + 2, 9))), kind)
            if kind == "origin":
                pts = np.vstack([_inner_points(rng, prev, int(rng.integers(n + 2, 9))),
                                 prev.vertices * rng.uniform(0.2, 0.6)])
            B = Polytope(pts)
            if B.is_full_dimensional and prev.contains_polytope(B):
                bodies.append(B)
                break
        else:
            break
    inc = rng.uniform(*values, len(bodies))
    if tag is None:
        tag = {"symmetric": "even_unimodal", "unconditional": "unconditional",
               "origin": "star_unimodal"}.get(kind, "general")
    return LayeredFunction(list(zip(inc, bodies)), tag=tag)


def random_profile_function(rng: np.random.Generator, n: int = 2, kind: str = "symmetric",
                            layers: tuple[int, int] = (1, 4)) -> LayeredFunction:
    """``from_profile`` over a random gauge with 1-4 homothetic layers."""
    gauge = random_body(rng, n, kind)
    L = int(rng.integers(layers[0], layers[1] + 1))
    radii = np.cumsum(rng.uniform(0.3, 1.0, L))
    radii = radii / radii[-1] * rng.uniform(0.8, 1.5)
    vals = np.cumsum(rng.uniform(0.2, 1.0, L))[::-1]
    return from_profile(ProfileSpec(gauge, tuple(radii), tuple(vals)))


def body_class(P: Polytope) -> str:
    return symmetry_class(P)
