"""Measures on R^n: Lebesgue, Gaussian, and three density families.

Densities outside Lebesgue and Gaussian are built from a small named
catalog of profile functions so that every measure can be written to JSON:

========================  ==========================================
``w_power {a, p}``        radial profile ``w(r) = a r^p``
``w_softplus {a, p}``     radial profile ``w(r) = a log(1 + r^p)``
``V_norm_p {a, q, s}``    potential ``V(x) = a |x|_q^s``
``phi_linear_cap {R, q}`` weight ``R - |x|_q`` on ``{|x|_q <= R}``, q in {1, inf}
``phi_constant {c, R}``   weight ``c`` on the cube ``[-R, R]^n``
========================  ==========================================

Radial and potential densities are left unnormalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .estimates import Budget, IntegrationResult, shard_generators
from .polytope import Polytope, volume

__all__ = [
    "MeasureSpec",
    "Lebesgue",
    "Gaussian",
    "RadialLogConcave",
    "HomogeneousPotential",
    "WeightedConcave",
    "RadialProfile",
    "Potential",
    "ConcaveWeight",
    "MeasureConfigurationError",
    "density_at",
    "measure_of_polytope",
    "mc_integrate",
    "layer_measures",
    "integrate_layered",
    "total_mass",
    "measure_from_json",
]

_CHUNK = 1 << 17


class MeasureConfigurationError(ValueError):
    """A profile failed its construction-time shape check."""


# --------------------------------------------------------------------------
# profile catalog


@dataclass(frozen=True)
class RadialProfile:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("w_power", "w_softplus"):
            raise ValueError(f"unknown radial profile {self.kind!r}")
        a, p = float(self.params.get("a", 1.0)), float(self.params.get("p", 2.0))
        if a <= 0 or p <= 0:
            raise ValueError("radial profile needs a > 0 and p > 0")
        object.__setattr__(self, "params", {"a": a, "p": p})

    def __call__(self, r):
        a, p = self.params["a"], self.params["p"]
        r = np.asarray(r, dtype=float)
        if self.kind == "w_power":
            return a * r**p
        return a * np.log1p(r**p)

    def to_json(self) -> dict:
        return {"kind": self.kind, **self.params}


@dataclass(frozen=True)
class Potential:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind != "V_norm_p":
            raise ValueError(f"unknown potential {self.kind!r}")
        a = float(self.params.get("a", 1.0))
        q = float(self.params.get("q", 2.0))
        s = float(self.params.get("s", 2.0))
        if a <= 0 or q < 1 or s <= 1:
            raise ValueError("V_norm_p needs a > 0, q >= 1 and s > 1")
        object.__setattr__(self, "params", {"a": a, "q": q, "s": s})

    @property
    def degree(self) -> float:
        return self.params["s"]

    def __call__(self, X):
        X = np.atleast_2d(X)
        return self.params["a"] * np.linalg.norm(X, ord=self.params["q"], axis=1) ** self.params["s"]

    def to_json(self) -> dict:
        q = self.params["q"]
        return {"kind": self.kind, "a": self.params["a"], "q": "inf" if math.isinf(q) else q,
                "s": self.params["s"]}


@dataclass(frozen=True)
class ConcaveWeight:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == "phi_linear_cap":
            R = float(self.params.get("R", 1.0))
            q = self.params.get("q", 1)
            q = math.inf if q in ("inf", math.inf) else float(q)
            if R <= 0 or q not in (1.0, math.inf):
                raise ValueError("phi_linear_cap needs R > 0 and q in {1, inf}")
            object.__setattr__(self, "params", {"R": R, "q": q})
        elif self.kind == "phi_constant":
            c, R = float(self.params.get("c", 1.0)), float(self.params.get("R", 1.0))
            if c <= 0 or R <= 0:
                raise ValueError("phi_constant needs c > 0 and R > 0")
            object.__setattr__(self, "params", {"c": c, "R": R})
        else:
            raise ValueError(f"unknown concave weight {self.kind!r}")

    def support(self, n: int) -> Polytope:
        R = self.params["R"]
        if self.kind == "phi_linear_cap" and self.params["q"] == 1.0:
            return Polytope.cross_polytope(n, R)
        return Polytope.symmetric_box([R] * n)

    def __call__(self, X):
        X = np.atleast_2d(X)
        if self.kind == "phi_constant":
            return np.full(len(X), self.params["c"])
        return np.maximum(self.params["R"] - np.linalg.norm(X, ord=self.params["q"], axis=1), 0.0)

    def to_json(self) -> dict:
        out = {"kind": self.kind, **self.params}
        if out.get("q") == math.inf:
            out["q"] = "inf"
        return out


# --------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class MeasureSpec:
    dim: int

    kind = "abstract"

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("dimension must be positive")

    def density(self, X) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}


@dataclass(frozen=True)
class Lebesgue(MeasureSpec):
    kind = "lebesgue"

    def density(self, X):
        return np.ones(len(np.atleast_2d(X)))


@dataclass(frozen=True)
class Gaussian(MeasureSpec):
    """Standard Gaussian probability measure."""

    kind = "gaussian"

    def density(self, X):
        X = np.atleast_2d(X)
        return (2 * np.pi) ** (-self.dim / 2) * np.exp(-0.5 * np.einsum("ij,ij->i", X, X))


@dataclass(frozen=True)
class RadialLogConcave(MeasureSpec):
    """Density ``exp(-w(|x|))`` with ``w`` increasing and ``s -> w(e^s)`` convex."""

    profile: RadialProfile = field(default_factory=lambda: RadialProfile("w_power", {"a": 1.0, "p": 2.0}))
    kind = "radial_log_concave"

    def __post_init__(self):
        super().__post_init__()
        s = np.linspace(-8.0, 4.0, 241)
        vals = self.profile(np.exp(s))
        if np.any(np.diff(vals) < -1e-12):
            raise MeasureConfigurationError("radial profile is not increasing")
        second = vals[2:] - 2 * vals[1:-1] + vals[:-2]
        if np.any(second < -1e-9 * np.maximum(1.0, np.abs(vals[1:-1]))):
            raise MeasureConfigurationError("s -> w(e^s) is not convex")

    def density(self, X):
        return np.exp(-self.profile(np.linalg.norm(np.atleast_2d(X), axis=1)))

    def to_json(self):
        return {"kind": self.kind, "dim": self.dim, "w": self.profile.to_json()}


@dataclass(frozen=True)
class HomogeneousPotential(MeasureSpec):
    """Density ``exp(-V)`` with ``V`` convex and ``s``-homogeneous, ``s > 1``."""

    potential: Potential = field(default_factory=lambda: Potential("V_norm_p", {"a": 1.0, "q": 2.0, "s": 2.0}))
    kind = "homogeneous_potential"

    @property
    def degree(self) -> float:
        return self.potential.degree

    def density(self, X):
        return np.exp(-self.potential(X))

    def to_json(self):
        return {"kind": self.kind, "dim": self.dim, "V": self.potential.to_json()}


@dataclass(frozen=True)
class WeightedConcave(MeasureSpec):
    """``phi^beta`` times a base measure, supported on an origin-symmetric body."""

    base: MeasureSpec | None = None
    weight: ConcaveWeight = field(default_factory=lambda: ConcaveWeight("phi_linear_cap", {"R": 2.0, "q": 1}))
    beta: float = 1.0
    kind = "weighted_concave"

    def __post_init__(self):
        super().__post_init__()
        if self.base is None:
            object.__setattr__(self, "base", Lebesgue(self.dim))
        if self.base.dim != self.dim:
            raise ValueError("base measure dimension mismatch")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        # evenness and midpoint concavity on random support points
        rng = np.random.default_rng(12345)
        lo, hi = self.support.bounding_box()
        X = lo + (hi - lo) * rng.random((512, self.dim))
        Y = lo + (hi - lo) * rng.random((512, self.dim))
        inside = self.support.contains_points(X, 0.0) & self.support.contains_points(Y, 0.0)
        X, Y = X[inside], Y[inside]
        if np.max(np.abs(self.weight(X) - self.weight(-X)), initial=0.0) > 1e-12:
            raise MeasureConfigurationError("weight is not even")
        gap = self.weight((X + Y) / 2) - 0.5 * (self.weight(X) + self.weight(Y))
        if np.min(gap, initial=0.0) < -1e-12:
            raise MeasureConfigurationError("weight is not midpoint concave")

    @property
    def support(self) -> Polytope:
        return self.weight.support(self.dim)

    def density(self, X):
        X = np.atleast_2d(X)
        inside = self.support.contains_points(X, 0.0)
        return np.where(inside, self.weight(X) ** self.beta * self.base.density(X), 0.0)

    def to_json(self):
        return {"kind": self.kind, "dim": self.dim, "base": self.base.to_json(),
                "phi": self.weight.to_json(), "beta": self.beta}


def measure_from_json(obj: dict) -> MeasureSpec:
    kind, n = obj["kind"], int(obj["dim"])
    if kind == "lebesgue":
        return Lebesgue(n)
    if kind == "gaussian":
        return Gaussian(n)
    if kind == "radial_log_concave":
        w = dict(obj["w"])
        return RadialLogConcave(n, RadialProfile(w.pop("kind"), w))
    if kind == "homogeneous_potential":
        v = dict(obj["V"])
        if v.get("q") == "inf":
            v["q"] = math.inf
        return HomogeneousPotential(n, Potential(v.pop("kind"), v))
    if kind == "weighted_concave":
        phi = dict(obj["phi"])
        return WeightedConcave(n, measure_from_json(obj["base"]), ConcaveWeight(phi.pop("kind"), phi),
                               float(obj["beta"]))
    raise ValueError(f"unknown measure kind {kind!r}")


def density_at(m: MeasureSpec, x) -> float:
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if x.shape[1] != m.dim:
        raise ValueError(f"point has dimension {x.shape[1]}, measure has {m.dim}")
    return float(m.density(x)[0])


# --------------------------------------------------------------------------
# Monte Carlo


def _draw(m: MeasureSpec, lo, hi, rng, k):
    """Points and weights with ``E[w g(X)] = integral of g over the box`` (all of R^n for Gaussian)."""
    if isinstance(m, Gaussian):
        return rng.standard_normal((k, m.dim)), np.ones(k)
    if isinstance(m, WeightedConcave):
        slo, shi = m.support.bounding_box()
        lo, hi = np.maximum(lo, slo), np.minimum(hi, shi)
        if np.any(hi <= lo):
            return np.zeros((k, m.dim)), np.zeros(k)
        X, w = _draw(m.base, lo, hi, rng, k)
        inside = m.support.contains_points(X, 0.0)
        return X, np.where(inside, w * m.weight(X) ** m.beta, 0.0)
    X = lo + (hi - lo) * rng.random((k, m.dim))
    return X, m.density(X) * float(np.prod(hi - lo))


def mc_integrate(m: MeasureSpec, fn: Callable[[np.ndarray], np.ndarray], lo, hi,
                 budget: Budget) -> IntegrationResult:
    """Monte Carlo integral of a vectorized ``fn`` vanishing outside the box ``[lo, hi]``."""
    if budget.is_exact:
        raise ValueError("Monte Carlo integration needs a sampling budget")
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    s1 = s2 = 0.0
    for rng, k in shard_generators(budget):
        done = 0
        while done < k:
            c = min(_CHUNK, k - done)
            X, w = _draw(m, lo, hi, rng, c)
            y = w * fn(X)
            s1 += float(y.sum())
            s2 += float(np.dot(y, y))
            done += c
    N = budget.samples
    mean = s1 / N
    var = max(s2 / N - mean * mean, 0.0)
    return IntegrationResult(mean, math.sqrt(var / N), N)


def measure_of_polytope(m: MeasureSpec, P: Polytope, budget: Budget | None = None) -> IntegrationResult:
    """``m(P)``; exact only for Lebesgue in dimension at most 3."""
    budget = budget or Budget.monte_carlo(10**6)
    if P.dim != m.dim:
        raise ValueError("polytope and measure dimensions differ")
    if isinstance(m, Lebesgue):
        return volume(P, budget)
    if budget.is_exact:
        raise ValueError(f"exact integration is not available for the {m.kind} measure")
    if not P.is_full_dimensional:
        return IntegrationResult(0.0, 0.0, 0, degenerate=True)
    lo, hi = P.bounding_box()
    return mc_integrate(m, lambda X: P.contains_points(X, 0.0).astype(float), lo, hi, budget)


def total_mass(m: MeasureSpec, budget: Budget) -> IntegrationResult:
    if not isinstance(m, WeightedConcave):
        raise ValueError("total mass is only defined here for compactly supported measures")
    lo, hi = m.support.bounding_box()
    return mc_integrate(m, lambda X: np.ones(len(X)), lo, hi, budget)


def layer_measures(m: MeasureSpec, f, budget: Budget | None = None) -> list[IntegrationResult]:
    """``m(A_j)`` for every layer body of a layered function."""
    return [measure_of_polytope(m, A, budget) for _, A in f.layers]


def integrate_layered(m: MeasureSpec, f, budget: Budget | None = None) -> IntegrationResult:
    """``sum_j a_j m(A_j)``.

    Under sampling the layers share one sample stream, so the sum is estimated as
    a single Monte Carlo average of ``f`` (same value as summing per-layer hit
    counts, with a standard error that accounts for their correlation).
    """
    budget = budget or Budget.monte_carlo(10**6)
    if f.dim != m.dim:
        raise ValueError("function and measure dimensions differ")
    if not f.layers:
        return IntegrationResult(0.0)
    if isinstance(m, Lebesgue) and (budget.is_exact or f.dim <= 3):
        total = sum(a * volume(A).value for a, A in f.layers)
        return IntegrationResult(total)
    if budget.is_exact:
        raise ValueError(f"exact integration is not available for the {m.kind} measure")
    lo, hi = f.layers[0][1].bounding_box()
    return mc_integrate(m, f.evaluate, lo, hi, budget)
