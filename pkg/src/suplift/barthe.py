"""Reverse Brascamp-Lieb data and the Gaussian constant.

An instance is a list of surjections ``B_i : R^n -> R^{n_i}`` with weights
``c_i`` such that ``sum c_i n_i = n`` and the kernels meet only at 0.  The
constant ``E`` is the square root of

    inf det(sum_i c_i B_i^T M_i B_i) / prod_i det(M_i)^{c_i}

over positive-definite ``M_i``, minimized here over Cholesky factors.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from . import _json
from .estimates import Budget
from .polytope import Polytope, linear_image_sum, volume
from .report import VerificationReport

__all__ = [
    "BartheInstance",
    "PDPoint",
    "StartReport",
    "BartheResult",
    "objective_ratio",
    "log_objective",
    "constant_E",
    "random_pd_floor",
    "reverse_bl_geometric_check",
    "normalize_instance",
]

DIAG_FLOOR = 1e-8


@dataclass(frozen=True)
class BartheInstance:
    n: int
    maps: tuple  # B_i, shape (n_i, n)
    coeffs: tuple

    def __post_init__(self):
        maps = tuple(np.atleast_2d(np.asarray(B, dtype=float)) for B in self.maps)
        coeffs = tuple(float(c) for c in self.coeffs)
        if not maps or len(maps) != len(coeffs):
            raise ValueError("need one coefficient per map")
        for B in maps:
            if B.shape[1] != self.n:
                raise ValueError(f"map of shape {B.shape} does not start from R^{self.n}")
            # n_i = n is admitted so that one-dimensional examples (AM-GM) can be posed
            if not 1 <= B.shape[0] <= self.n:
                raise ValueError("block dimensions must satisfy 1 <= n_i <= n")
            if np.linalg.svd(B, compute_uv=False).min() <= 1e-9:
                raise ValueError("every map must be surjective")
        if any(c <= 0 for c in coeffs):
            raise ValueError("coefficients must be positive")
        if abs(sum(c * B.shape[0] for c, B in zip(coeffs, maps)) - self.n) > 1e-12 * self.n:
            raise ValueError("scaling condition sum c_i n_i = n fails")
        if np.linalg.matrix_rank(np.vstack(maps)) < self.n:
            raise ValueError("the kernels of the maps intersect non-trivially")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def m(self) -> int:
        return len(self.maps)

    @property
    def block_dims(self) -> list[int]:
        return [B.shape[0] for B in self.maps]

    @property
    def adjoints(self) -> list[np.ndarray]:
        return [B.T for B in self.maps]

    def is_geometric(self, tol: float = 1e-12) -> bool:
        S = sum(c * B.T @ B for c, B in zip(self.coeffs, self.maps))
        return bool(np.abs(S - np.eye(self.n)).max() <= tol)

    # -- catalog ----------------------------------------------------------
    @classmethod
    def coordinate_projections(cls, n: int = 2) -> "BartheInstance":
        return cls(n, tuple(np.eye(n)[i:i + 1] for i in range(n)), (1.0,) * n)

    @classmethod
    def lines_120(cls) -> "BartheInstance":
        ang = np.deg2rad([0.0, 120.0, 240.0])
        return cls(2, tuple(np.array([[math.cos(a), math.sin(a)]]) for a in ang), (2 / 3,) * 3)

    @classmethod
    def coordinate_planes(cls) -> "BartheInstance":
        maps = tuple(np.delete(np.eye(3), i, axis=0) for i in range(3))
        return cls(3, maps, (0.5,) * 3)

    @classmethod
    def random(cls, seed: int, n: int = 2, m: int = 3) -> "BartheInstance":
        rng = np.random.default_rng(seed)
        while True:
            maps = tuple(rng.standard_normal((1, n)) for _ in range(m))
            c = rng.uniform(0.3, 1.0, m)
            c *= n / c.sum()  # all blocks are lines, so sum c_i n_i = sum c_i
            try:
                return cls(n, maps, tuple(c))
            except ValueError:
                continue

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {"n": self.n, "blocks": [{"ni": B.shape[0], "ci": c, "Bi": B.tolist()}
                                        for B, c in zip(self.maps, self.coeffs)]}

    def dumps(self) -> str:
        return _json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj: dict) -> "BartheInstance":
        maps, coeffs = [], []
        for blk in obj["blocks"]:
            B = np.atleast_2d(np.asarray(blk["Bi"], dtype=float))
            if B.shape[0] != int(blk["ni"]):
                raise ValueError("block dimension does not match its matrix")
            maps.append(B)
            coeffs.append(float(blk["ci"]))
        return cls(int(obj["n"]), tuple(maps), tuple(coeffs))


@dataclass(frozen=True)
class PDPoint:
    """Lower-triangular factors ``L_i`` (positive diagonal) with ``M_i = L_i L_i^T``."""

    factors: tuple

    def __post_init__(self):
        fs = tuple(np.tril(np.atleast_2d(np.asarray(L, dtype=float))) for L in self.factors)
        for L in fs:
            if np.diag(L).min() < DIAG_FLOOR:
                raise ValueError("factor diagonals must be at least 1e-8")
        object.__setattr__(self, "factors", fs)

    @property
    def matrices(self) -> list[np.ndarray]:
        return [L @ L.T for L in self.factors]

    @classmethod
    def identity(cls, inst: BartheInstance) -> "PDPoint":
        return cls(tuple(np.eye(k) for k in inst.block_dims))

    @classmethod
    def from_matrices(cls, Ms: Sequence) -> "PDPoint":
        return cls(tuple(np.linalg.cholesky(np.atleast_2d(M)) for M in Ms))


def log_objective(inst: BartheInstance, point: PDPoint) -> float:
    S = np.zeros((inst.n, inst.n))
    log_den = 0.0
    for B, c, L in zip(inst.maps, inst.coeffs, point.factors):
        BL = B.T @ L
        S += c * BL @ BL.T
        log_den += c * 2.0 * float(np.log(np.diag(L)).sum())
    try:
        LS = np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        return math.inf
    return 2.0 * float(np.log(np.diag(LS)).sum()) - log_den


def objective_ratio(inst: BartheInstance, point: PDPoint) -> float:
    """``det(sum c_i B_i^T M_i B_i) / prod det(M_i)^{c_i}``; ``inf`` when the sum is singular."""
    lo = log_objective(inst, point)
    return math.inf if math.isinf(lo) else math.exp(lo)


# -- parametrization --------------------------------------------------------


def _layout(inst):
    return [(k, np.tril_indices(k)) for k in inst.block_dims]


def _unpack(theta, layout):
    out, pos = [], 0
    for k, (r, c) in layout:
        L = np.zeros((k, k))
        L[r, c] = theta[pos:pos + len(r)]
        d = np.arange(k)
        L[d, d] = np.exp(np.maximum(L[d, d], math.log(DIAG_FLOOR)))
        out.append(L)
        pos += len(r)
    return PDPoint(tuple(out))


def _pack(point, layout):
    parts = []
    for L, (k, (r, c)) in zip(point.factors, layout):
        L = L.copy()
        d = np.arange(k)
        L[d, d] = np.log(L[d, d])
        parts.append(L[r, c])
    return np.concatenate(parts)


def _fd_grad(fun, x, h=1e-5):
    g = np.empty_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g


@dataclass(frozen=True)
class StartReport:
    value: float
    grad_norm: float
    iterations: int
    converged: bool


@dataclass
class BartheResult:
    """``E`` with its bracket: ``objective`` bounds the infimum from above,
    ``sampling_floor`` is the best random point found (statistical evidence only)."""

    E: float
    objective: float
    point: PDPoint
    starts: list = field(default_factory=list)
    sampling_floor: float | None = None

    @property
    def bracket(self):
        return self.objective, self.sampling_floor


def _random_pd(rng, k):
    A = rng.standard_normal((k, k))
    return np.eye(k) + A @ A.T / k


def constant_E(inst: BartheInstance, starts: int = 8, seed: int = 0, gtol: float = 1e-8,
               maxiter: int = 500) -> BartheResult:
    """Multi-start BFGS on the log-objective over Cholesky factors."""
    if starts < 1:
        raise ValueError("starts must be positive")
    layout = _layout(inst)

    def fun(theta):
        v = log_objective(inst, _unpack(theta, layout))
        return v if math.isfinite(v) else 1e300

    reports, best = [], (math.inf, None)
    for s in range(starts):
        rng = np.random.default_rng([seed, s])
        if s == 0:
            p0 = PDPoint.identity(inst)
        else:
            p0 = PDPoint.from_matrices([_random_pd(rng, k) for k in inst.block_dims])
        res = optimize.minimize(fun, _pack(p0, layout), jac=lambda th: _fd_grad(fun, th),
                                method="BFGS", options={"gtol": gtol, "maxiter": maxiter})
        g = float(np.linalg.norm(_fd_grad(fun, res.x)))
        val = float(res.fun)
        reports.append(StartReport(math.exp(val) if val < 700 else math.inf, g, int(res.nit),
                                   bool(g < gtol or res.success)))
        if math.isfinite(val) and val < best[0]:
            best = (val, res.x)
    if best[1] is None:
        raise RuntimeError("every start diverged")
    obj = math.exp(best[0])
    return BartheResult(math.sqrt(obj), obj, _unpack(best[1], layout), reports)


def random_pd_floor(inst: BartheInstance, samples: int = 10**4, seed: int = 0) -> float:
    """Smallest objective over random positive-definite tuples."""
    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(samples):
        Ms = []
        for k in inst.block_dims:
            A = rng.standard_normal((k, k)) * math.exp(rng.normal(0.0, 1.0))
            Ms.append(A @ A.T + DIAG_FLOOR * np.eye(k))
        try:
            best = min(best, objective_ratio(inst, PDPoint.from_matrices(Ms)))
        except (np.linalg.LinAlgError, ValueError):
            continue
    return best


def normalize_instance(inst: BartheInstance):
    """Weights ``t_i = c_i / |c|_1`` and the power ``|c|_1`` that turns ``f_i`` into ``f_i^{|c|_1}``."""
    c = np.asarray(inst.coeffs)
    total = float(c.sum())
    return tuple(float(x) for x in c / total), total


def reverse_bl_geometric_check(inst: BartheInstance, bodies: Sequence[Polytope], E: float,
                               budget: Budget | None = None, tolerance: float = 1e-9,
                               seed: int = 0, case: str = "BartheReverseBL") -> VerificationReport:
    """``|sum c_i B_i^T A_i| >= E prod |A_i|^{c_i}``."""
    t0 = time.perf_counter()
    if len(bodies) != inst.m:
        raise ValueError("one body per block is required")
    for A, k in zip(bodies, inst.block_dims):
        if A.dim != k:
            raise ValueError("body dimension does not match its block")
    budget = budget or Budget.exact()
    lhs_set = linear_image_sum(inst.adjoints, inst.coeffs, bodies)
    lhs = volume(lhs_set, budget if inst.n > 3 else Budget.exact())
    vols = [volume(A, Budget.exact() if A.dim <= 3 else budget) for A in bodies]
    rhs = E * math.prod(v.value ** c for v, c in zip(vols, inst.coeffs))
    # delta method for sampled block volumes
    rhs_se = rhs * math.sqrt(sum((c * v.stderr / v.value) ** 2 for v, c in zip(vols, inst.coeffs) if v.value > 0))
    scale = max(1.0, abs(rhs))
    return VerificationReport(case, seed, lhs.value, rhs, lhs.stderr, rhs_se, tolerance * scale,
                              ms=1e3 * (time.perf_counter() - t0), detail={"E": E})
