"""Weighted power means and generalized mean triples.

The power mean of non-negative values ``u`` with positive weights ``t`` is

    M_p(u) = (sum_i t_i u_i**p) ** (1/p)

with the limiting cases ``min``, weighted geometric mean and ``max`` at
``p = -inf, 0, +inf``.  Every mean is extended by zero: if any coordinate of
``u`` vanishes the mean is 0, whatever the exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special

__all__ = [
    "WeightVector",
    "MeanSpec",
    "GaussianMean",
    "GeneralizedMeanTriple",
    "PropertyCheck",
    "TripleReport",
    "EhrhardWitness",
    "eval_mean",
    "holder_exponent",
    "holder_complement",
    "check_triple_properties",
    "gaussian_mean_eval",
    "find_ehrhard_violation",
    "parse_exponent",
    "format_exponent",
    "eval_mean_pairs",
    "power_mean_triple",
    "triple_from_json",
]

_NEAR_ZERO_P = 1e-10
_CLAMP = 1e-15


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[float, ...]

    def __init__(self, weights):
        w = tuple(float(x) for x in weights)
        if not w:
            raise ValueError("weight vector must be non-empty")
        if any(not (x > 0.0) or not math.isfinite(x) for x in w):
            raise ValueError(f"weights must be finite and strictly positive, got {w}")
        object.__setattr__(self, "weights", w)

    @property
    def normalized(self) -> bool:
        return abs(math.fsum(self.weights) - 1.0) <= 1e-12

    def __len__(self):
        return len(self.weights)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls([1.0 / n] * n)

    @classmethod
    def convex_pair(cls, t: float) -> "WeightVector":
        """Weights ``(1 - t, t)`` of a two-point convex combination."""
        return cls([1.0 - t, t])


def parse_exponent(p) -> float:
    if isinstance(p, str):
        key = p.strip().lower()
        if key in ("inf", "+inf", "infinity"):
            return math.inf
        if key in ("-inf", "-infinity"):
            return -math.inf
        return float(key)
    p = float(p)
    if math.isnan(p):
        raise ValueError("exponent must not be NaN")
    return p


def format_exponent(p: float):
    if p == math.inf:
        return "inf"
    if p == -math.inf:
        return "-inf"
    return p


@dataclass(frozen=True)
class MeanSpec:
    """Exponent plus weights; callable on a value vector."""

    exponent: float
    weights: WeightVector

    def __init__(self, exponent, weights):
        object.__setattr__(self, "exponent", parse_exponent(exponent))
        if not isinstance(weights, WeightVector):
            weights = WeightVector(weights)
        object.__setattr__(self, "weights", weights)

    def __call__(self, values) -> float:
        return eval_mean(self, values)

    @property
    def arity(self) -> int:
        return len(self.weights)

    def to_json(self) -> dict:
        return {"p": format_exponent(self.exponent), "weights": list(self.weights.weights)}

    @classmethod
    def from_json(cls, obj: dict) -> "MeanSpec":
        return cls(obj["p"], obj["weights"])


def eval_mean(spec: MeanSpec, values) -> float:
    """Evaluate the weighted power mean with zero-extension.

    Parameters
    ----------
    spec : MeanSpec
    values : sequence of non-negative floats, one per weight

    Returns
    -------
    float
    """
    u = np.asarray(values, dtype=float).ravel()
    t = spec.weights.as_array()
    if u.shape[0] != t.shape[0]:
        raise ValueError(f"expected {t.shape[0]} values, got {u.shape[0]}")
    if np.any(u < 0.0) or np.any(np.isnan(u)):
        raise ValueError(f"mean arguments must be non-negative, got {u}")
    if np.any(u == 0.0):
        return 0.0
    p = spec.exponent
    if p == math.inf:
        return float(u.max())
    if p == -math.inf:
        return float(u.min())
    if abs(p) < _NEAR_ZERO_P:
        return float(math.exp(math.fsum(t * np.log(u))))
    # after factoring out the scale every p*log(u/scale) is <= 0, so nothing overflows;
    # log1p/expm1 keep full precision as p approaches 0
    scale = u.max() if p > 0 else u.min()
    W = math.fsum(t)
    s = math.fsum((t / W) * np.expm1(p * np.log(u / scale)))
    return float(scale * math.exp((math.log(W) + math.log1p(s)) / p))


def eval_mean_pairs(spec: MeanSpec, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorized two-argument mean over arrays ``u`` and ``v``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    w0, w1 = spec.weights.weights
    p = spec.exponent
    out = np.zeros(np.broadcast(u, v).shape)
    pos = (u > 0) & (v > 0)
    uu, vv = np.broadcast_to(u, out.shape)[pos], np.broadcast_to(v, out.shape)[pos]
    if p == math.inf:
        out[pos] = np.maximum(uu, vv)
    elif p == -math.inf:
        out[pos] = np.minimum(uu, vv)
    elif abs(p) < _NEAR_ZERO_P:
        out[pos] = uu**w0 * vv**w1
    else:
        scale = np.maximum(uu, vv) if p > 0 else np.minimum(uu, vv)
        W = w0 + w1
        s = (w0 / W) * np.expm1(p * np.log(uu / scale)) + (w1 / W) * np.expm1(p * np.log(vv / scale))
        out[pos] = scale * np.exp((math.log(W) + np.log1p(s)) / p)
    return out


def holder_exponent(p: float, q: float) -> float:
    """Return ``r`` with ``1/r = 1/p + 1/q`` (reciprocals of infinities are 0).

    Raises ``ValueError`` when ``p + q = 0``: the reciprocal equation has no
    solution there.  The boundary inequality at ``p = -q`` is the limit
    ``r -> -inf`` and is requested explicitly by passing ``-inf``.
    """
    p, q = parse_exponent(p), parse_exponent(q)
    if math.isinf(p) and math.isinf(q) and p != q:
        raise ValueError("p + q is undefined for opposite infinities")
    if not math.isinf(p) and not math.isinf(q) and p + q == 0.0:
        raise ValueError(f"no Hölder exponent for p + q = 0 (p={p}, q={q})")
    if p == 0.0 or q == 0.0:
        return 0.0
    inv = (0.0 if math.isinf(p) else 1.0 / p) + (0.0 if math.isinf(q) else 1.0 / q)
    if inv == 0.0:
        return math.inf if p > 0 else -math.inf
    return 1.0 / inv


def holder_complement(r: float, p: float) -> float:
    """Return ``q`` with ``1/q = 1/r - 1/p``.

    Solves the Hölder relation for the missing factor exponent, so that
    ``M_p(u) M_q(v) >= M_r(uv)``.  ``holder_complement(alpha, -1/n)`` is the
    integral-side exponent ``alpha / (1 + n alpha)`` of a Borell-Brascamp-Lieb
    inequality.  A vanishing reciprocal returns the ``-inf`` limit.
    """
    r, p = parse_exponent(r), parse_exponent(p)
    if r == 0.0:
        return 0.0
    inv_r = 0.0 if math.isinf(r) else 1.0 / r
    inv_p = 0.0 if math.isinf(p) else (math.inf if p == 0.0 else 1.0 / p)
    inv = inv_r - inv_p
    if math.isinf(inv):
        return 0.0
    if abs(inv) < 1e-15:
        return -math.inf
    return 1.0 / inv


# --------------------------------------------------------------------------
# Generalized mean triples

Evaluator = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class GaussianMean:
    """Ehrhard-type mean ``Phi(t Phi^{-1}(a1) + (1-t) Phi^{-1}(a2))`` on [0,1]^2."""

    t: float

    def __post_init__(self):
        if not (0.0 < self.t < 1.0):
            raise ValueError("t must lie in (0, 1)")

    def __call__(self, a) -> float:
        a = np.asarray(a, dtype=float).ravel()
        return gaussian_mean_eval(self, a[0], a[1])


def _phi_inv(a: float) -> float:
    return float(special.ndtri(min(max(a, _CLAMP), 1.0 - _CLAMP)))


def gaussian_mean_eval(m: GaussianMean, a1: float, a2: float) -> float:
    if not (0.0 <= a1 <= 1.0 and 0.0 <= a2 <= 1.0):
        raise ValueError("Gaussian mean arguments must lie in [0, 1]")
    if a1 == 0.0 or a2 == 0.0:
        return 0.0
    if a1 == 1.0 and a2 == 1.0:
        return 1.0
    if a1 == a2:
        return float(a1)
    x = m.t * _phi_inv(a1) + (1.0 - m.t) * _phi_inv(a2)
    return float(special.ndtr(x))


@dataclass(frozen=True)
class GeneralizedMeanTriple:
    """Three means ``(W, M, N)``; ``W, M`` live on ``prod [0, m_i]``, ``N`` on ``prod [0, m_i^2]``."""

    W: Evaluator
    M: Evaluator
    N: Evaluator
    bounds: tuple[float, ...]

    @property
    def arity(self) -> int:
        return len(self.bounds)


@dataclass
class PropertyCheck:
    name: str
    holds: bool
    worst_margin: float
    witness: dict | None = None
    evaluations: int = 0


@dataclass
class TripleReport:
    checks: dict[str, PropertyCheck] = field(default_factory=dict)
    config_error: str | None = None

    @property
    def all_hold(self) -> bool:
        return self.config_error is None and all(c.holds for c in self.checks.values())

    def __getitem__(self, key) -> PropertyCheck:
        return self.checks[key]


class TripleConfigurationError(RuntimeError):
    """An evaluator raised on a point of its stated domain."""


def _safe(ev: Evaluator, x: np.ndarray) -> float:
    try:
        return float(ev(np.asarray(x, dtype=float)))
    except Exception as exc:  # noqa: BLE001 - reported, not a violation
        raise TripleConfigurationError(f"{ev!r} raised at {list(x)}: {exc}") from exc


def _sample_box(rng, hi: np.ndarray, size: int) -> np.ndarray:
    cap = np.where(np.isfinite(hi), hi, 10.0)
    return rng.uniform(0.0, 1.0, size=(size, hi.size)) * cap


def _dual_sup(triple, u, grid, cap):
    """Grid maximum, then local polish, of ``N(a u) / M(a)`` over ``a``."""
    k = triple.arity
    axis = np.linspace(cap / grid, cap, grid)
    best, best_a = -math.inf, None
    if k <= 3:
        mesh = np.stack(np.meshgrid(*([axis] * k), indexing="ij"), axis=-1).reshape(-1, k)
    else:
        mesh = np.random.default_rng(0).uniform(cap / grid, cap, size=(grid**2, k))
    for a in mesh:
        m = _safe(triple.M, a)
        if m <= 0:
            continue
        val = _safe(triple.N, a * u) / m
        if val > best:
            best, best_a = val, a
    grid_best = best

    def neg(loga):
        a = np.clip(np.exp(np.clip(loga, -30.0, 30.0)), 1e-12, cap)
        m = _safe(triple.M, a)
        return 0.0 if m <= 0 else -_safe(triple.N, a * u) / m

    res = optimize.minimize(neg, np.log(best_a), method="Nelder-Mead",
                            options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
    return grid_best, max(best, -res.fun)


def check_triple_properties(triple: GeneralizedMeanTriple, samples: int, seed: int,
                            tol: float = 1e-9, dual_grid: int = 100,
                            dual_rtol: float = 1e-6) -> TripleReport:
    """Randomized check of the four structural properties of a mean triple.

    ``reverse_minkowski``: ``M(u+v) >= M(u) + M(v)``.
    ``radial_superadditivity``: ``N(lu) + N((1-l)u) >= N(u)``.
    ``holder``: ``W(u) M(v) >= N(uv)``.
    ``duality``: ``sup_a N(au)/M(a) = W(u)``; the grid value may never exceed
    ``W(u)`` by more than ``tol`` and the polished value must reach it within
    ``dual_rtol`` (relative).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    hi = np.asarray(triple.bounds, dtype=float)
    hi_sq = hi**2
    report = TripleReport()
    try:
        # reverse Minkowski for M on pairs with u + v in I
        worst, wit = math.inf, None
        for _ in range(samples):
            u = _sample_box(rng, hi, 1)[0]
            v = _sample_box(rng, hi, 1)[0]
            s = u + v
            over = s > np.where(np.isfinite(hi), hi, math.inf)
            if np.any(over):
                fac = np.min(np.where(over, hi / s, 1.0))
                u, v, s = u * fac, v * fac, s * fac
            margin = _safe(triple.M, s) - _safe(triple.M, u) - _safe(triple.M, v)
            if margin < worst:
                worst, wit = margin, {"u": u.tolist(), "v": v.tolist()}
        report.checks["reverse_minkowski"] = PropertyCheck(
            "reverse_minkowski", worst >= -tol, worst, wit, samples)

        worst, wit = math.inf, None
        for _ in range(samples):
            u = _sample_box(rng, hi_sq, 1)[0]
            lam = rng.uniform(0.0, 1.0)
            lam = min(max(lam, 1e-6), 1 - 1e-6)
            margin = _safe(triple.N, lam * u) + _safe(triple.N, (1 - lam) * u) - _safe(triple.N, u)
            if margin < worst:
                worst, wit = margin, {"u": u.tolist(), "lambda": lam}
        report.checks["radial_superadditivity"] = PropertyCheck(
            "radial_superadditivity", worst >= -tol, worst, wit, samples)

        worst, wit = math.inf, None
        for _ in range(samples):
            u = _sample_box(rng, hi, 1)[0]
            v = _sample_box(rng, hi, 1)[0]
            margin = _safe(triple.W, u) * _safe(triple.M, v) - _safe(triple.N, u * v)
            if margin < worst:
                worst, wit = margin, {"u": u.tolist(), "v": v.tolist()}
        report.checks["holder"] = PropertyCheck("holder", worst >= -tol, worst, wit, samples)

        worst, wit, ok = math.inf, None, True
        cap = float(np.min(np.where(np.isfinite(hi), hi, 1.0)))
        n_dual = max(1, min(samples, 5))
        for _ in range(n_dual):
            u = _sample_box(rng, hi, 1)[0] + 1e-3
            w = _safe(triple.W, u)
            grid_best, polished = _dual_sup(triple, u, dual_grid, cap)
            over = grid_best - w
            under = w - polished
            bad = over > tol or under > dual_rtol * max(w, 1.0)
            margin = min(-over, -under)
            if margin < worst:
                worst, wit = margin, {"u": u.tolist(), "W": w, "grid_sup": grid_best,
                                      "polished_sup": polished}
            ok = ok and not bad
        report.checks["duality"] = PropertyCheck("duality", ok, worst, wit, n_dual)
    except TripleConfigurationError as exc:
        report.config_error = str(exc)
    return report


@dataclass
class EhrhardWitness:
    a: tuple[float, float]
    lam: float
    margin: float


def find_ehrhard_violation(t: float, grid_resolution: int,
                           threshold: float = 1e-6) -> EhrhardWitness | None:
    """Grid search for ``N(l a) + N((1-l) a) < N(a) - threshold`` with ``N`` the Gaussian mean.

    Coordinates equal to 0 are excluded: zero-extension makes both sides vanish.
    Returns the maximal-margin witness or ``None``.
    """
    if grid_resolution < 10:
        raise ValueError("grid_resolution must be >= 10")
    g = grid_resolution
    axis = (np.arange(g) + 0.5) / g
    a1, a2, lam = np.meshgrid(axis, axis, axis, indexing="ij")
    x = lambda a, b: t * special.ndtri(np.clip(a, _CLAMP, 1 - _CLAMP)) + \
        (1 - t) * special.ndtri(np.clip(b, _CLAMP, 1 - _CLAMP))
    full = special.ndtr(x(a1, a2))
    left = special.ndtr(x(lam * a1, lam * a2))
    right = special.ndtr(x((1 - lam) * a1, (1 - lam) * a2))
    margin = full - left - right
    idx = np.unravel_index(np.argmax(margin), margin.shape)
    best = float(margin[idx])
    if best <= threshold:
        return None
    return EhrhardWitness((float(a1[idx]), float(a2[idx])), float(lam[idx]), best)


def power_mean_triple(n: int, weights: Sequence[float]) -> GeneralizedMeanTriple:
    """The triple ``(M_{1/n}, M_{-1/n}, M_{-inf})`` with unbounded domain."""
    w = WeightVector(weights)
    W, M, N = MeanSpec(1.0 / n, w), MeanSpec(-1.0 / n, w), MeanSpec(-math.inf, w)
    return GeneralizedMeanTriple(W, M, N, tuple([math.inf] * len(w)))


def triple_from_json(obj: dict) -> GeneralizedMeanTriple:
    """``{"W": mean, "M": mean, "N": mean, "bounds": [...]}``.

    A mean is ``{"p": ..., "weights": [...]}`` or ``{"kind": "gaussian", "t": ...}``.
    """
    def build(m):
        if m.get("kind") == "gaussian":
            return GaussianMean(float(m["t"]))
        return MeanSpec.from_json(m)

    bounds = tuple(parse_exponent(b) for b in obj["bounds"])
    return GeneralizedMeanTriple(build(obj["W"]), build(obj["M"]), build(obj["N"]), bounds)
