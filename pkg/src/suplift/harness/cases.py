"""Inequality cases: parameters, seeded instances and one runner per inequality.

A case is a kind plus a frozen parameter set.  ``generate_instance`` turns
``(case, seed)`` into concrete bodies or functions; ``run_instance`` computes
both sides and returns a :class:`~suplift.report.VerificationReport` whose
margin is ``lhs - rhs`` (upper bounds are reported with the bound as ``lhs``).
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable

import numpy as np

from .. import _json
from ..barthe import BartheInstance, constant_E, reverse_bl_geometric_check
from ..estimates import Budget, IntegrationResult
from ..means import (MeanSpec, WeightVector, eval_mean, find_ehrhard_violation, holder_exponent,
                     check_triple_properties, power_mean_triple)
from ..measure import (ConcaveWeight, Gaussian, HomogeneousPotential, Lebesgue, Potential,
                       RadialLogConcave, RadialProfile, WeightedConcave, integrate_layered,
                       measure_of_polytope)
from ..polytope import (DifferenceBody, DirectionSet, Polytope, affine_combination,
                        lp_combination, volume)
from ..report import VerificationReport
from ..stepfn import LayeredFunction
from ..supconv import (AffineCombination, HeisenbergProduct, LevelSetLp, SupConvolutionSpec,
                       heisenberg_box_product_volume, integrate_supconv, supconv_layered)
from . import generators as gen
from .layercake import layer_cake_sum

__all__ = [
    "CASE_KINDS",
    "InequalityCase",
    "Instance",
    "RunConfig",
    "generate_instance",
    "run_instance",
    "instance_seed",
    "scale_instance",
    "schneider_constant",
]

CASE_KINDS = (
    "BM_2D", "PrekopaLeindler", "GaussianDimBM", "GaussianBBL", "RadialLogConcaveBM",
    "StarHomogeneousBBL", "WeightedConcaveBM", "LpBM", "LpFunctional", "LogBMUnconditional",
    "SchneiderRatio", "RogersShephardUpper", "BartheReverseBL", "NilpotentBBL",
    "MeanHolderFuzz", "EhrhardCounterexample", "TripleDualityCheck",
)

_DEFAULTS: dict[str, dict[str, Any]] = {
    "BM_2D": {},
    "PrekopaLeindler": {"t": 0.5, "n": 2},
    "GaussianDimBM": {"t": 0.5, "n": 2},
    "GaussianBBL": {"t": 0.5, "alpha": 0.0, "n": 2},
    "RadialLogConcaveBM": {"t": 0.5, "w": "w_power", "a": 0.5, "p": 2.0, "n": 2},
    "StarHomogeneousBBL": {"s": 2.0, "alpha": 0.0, "t": 0.5, "q": 2.0, "n": 2},
    "WeightedConcaveBM": {"beta": 1.0, "t": 0.5, "alpha": None, "r_form": "consistent", "R": 2.0,
                          "phi_q": 1.0, "n": 2},
    "LpBM": {"p": 2.0, "t": 0.5, "directions": 720},
    "LpFunctional": {"p": 0.5, "alpha": 0.0, "t": 0.5, "inputs": "symmetric", "conditional": None},
    "LogBMUnconditional": {"t": 0.5, "family": "polygon"},
    "SchneiderRatio": {"m": 1, "n": 2, "symmetric": True},
    "RogersShephardUpper": {"m": 1, "n": 2},
    "BartheReverseBL": {"instance": "lines_120"},
    "NilpotentBBL": {"alpha": 0.0, "t": 0.5},
    "MeanHolderFuzz": {"batch": 1000},
    "EhrhardCounterexample": {"t": 0.5, "resolution": 50},
    "TripleDualityCheck": {"n": 2, "samples": 200},
}

# alternative displayed form of the Schneider constant, kept in report metadata
_SCHNEIDER_DISPLAYED = "c(m,n) = |D^m(B)|_{nm} |B|^m"


def _fmt(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".6g")
    return str(v)


@dataclass(frozen=True)
class InequalityCase:
    """Tagged inequality with its parameters (defaults filled in, ranges checked)."""

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in _DEFAULTS:
            raise ValueError(f"unknown case kind {self.kind!r}")
        given = dict(self.params)
        extra = set(given) - set(_DEFAULTS[self.kind]) - {"rhs_factor"}
        if extra:
            raise ValueError(f"{self.kind} has no parameter(s) {sorted(extra)}")
        merged = {**_DEFAULTS[self.kind], **given}
        object.__setattr__(self, "params", tuple(sorted(merged.items())))
        _validate(self.kind, merged)

    @classmethod
    def make(cls, kind: str, **params) -> "InequalityCase":
        return cls(kind, tuple(params.items()))

    def __getitem__(self, key):
        return dict(self.params)[key]

    def get(self, key, default=None):
        return dict(self.params).get(key, default)

    @property
    def p(self) -> dict:
        return dict(self.params)

    @property
    def name(self) -> str:
        changed = [(k, v) for k, v in self.params
                   if k == "rhs_factor" or _DEFAULTS[self.kind].get(k, object()) != v]
        if not changed:
            return self.kind
        return f"{self.kind}(" + ",".join(f"{k}={_fmt(v)}" for k, v in changed) + ")"

    def __str__(self):
        return self.name

    @property
    def rhs_factor(self) -> float:
        return float(self.get("rhs_factor", 1.0))

    @property
    def conditional(self) -> bool:
        k, p = self.kind, self.p
        if k == "LpFunctional":
            if p["conditional"] is not None:
                return bool(p["conditional"])
            return p["inputs"] == "symmetric" and p["p"] < 1.0
        if k == "SchneiderRatio":
            return p["n"] >= 3
        if k == "LpBM":
            return p["p"] < 1.0
        if k == "WeightedConcaveBM":
            return p["r_form"] == "displayed"
        return False

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": {k: v for k, v in self.params}}

    @classmethod
    def from_json(cls, obj: dict) -> "InequalityCase":
        return cls(obj["kind"], tuple(obj.get("params", {}).items()))

    @classmethod
    def parse(cls, text: str) -> "InequalityCase":
        """``Kind`` or ``Kind:key=value,key=value``."""
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        params = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, _, raw = item.partition("=")
            params[key.strip()] = _coerce(raw.strip(), _DEFAULTS.get(kind, {}).get(key.strip()))
        return cls(kind, tuple(params.items()))


def _coerce(raw: str, like):
    low = raw.lower()
    if low in ("none", "null"):
        return None
    if low in ("true", "false"):
        return low == "true"
    if isinstance(like, bool):
        return low in ("1", "yes")
    if isinstance(like, int):
        return int(raw)
    try:
        if "/" in raw:
            num, den = raw.split("/")
            return float(num) / float(den)
        return float(raw)
    except ValueError:
        return raw


def _validate(kind: str, p: dict) -> None:
    def need(cond, msg):
        if not cond:
            raise ValueError(f"{kind}: {msg}")

    if "t" in p:
        need(0.0 < p["t"] < 1.0, "t must lie in (0, 1)")
    if "n" in p:
        need(int(p["n"]) >= 1, "n must be positive")
    n = int(p.get("n", 2))
    if kind == "GaussianBBL":
        need(-1.0 / n - 1e-15 <= p["alpha"] <= 1.0, "alpha must lie in [-1/n, 1]")
    elif kind == "StarHomogeneousBBL":
        s = p["s"]
        need(s > 1.0, "s must exceed 1")
        need((1.0 - s) / (s * n) - 1e-15 <= p["alpha"] <= 1.0, "alpha must be at least (1-s)/(sn)")
    elif kind == "WeightedConcaveBM":
        need(p["beta"] > 0, "beta must be positive")
        need(p["r_form"] in ("consistent", "displayed"), "r_form is consistent or displayed")
        if p["alpha"] is not None:
            need(-1.0 / (p["beta"] + n) - 1e-15 <= p["alpha"] <= 1.0,
                 "alpha must lie in [-1/(beta+n), 1]")
    elif kind == "LpBM":
        need(p["p"] > 0, "p must be positive")
    elif kind == "LpFunctional":
        need(0.0 <= p["p"] <= 1.0, "p must lie in [0, 1]")
        need(p["inputs"] in ("symmetric", "unconditional"), "inputs are symmetric or unconditional")
        lower = -p["p"] / 2.0 if p["p"] > 0 else 0.0
        need(lower - 1e-15 <= p["alpha"] <= 1.0, "alpha must lie in [-p/n, 1]")
    elif kind == "LogBMUnconditional":
        need(p["family"] in ("polygon", "box"), "family is polygon or box")
    elif kind in ("SchneiderRatio", "RogersShephardUpper"):
        need(int(p["m"]) >= 1 and int(p["n"]) in (2, 3), "m >= 1 and n in {2, 3}")
    elif kind == "BartheReverseBL":
        need(p["instance"] in ("coordinate_projections", "lines_120", "coordinate_planes", "random"),
             "unknown Barthe catalog instance")
    elif kind == "NilpotentBBL":
        need(-1.0 / 3.0 - 1e-15 <= p["alpha"] <= 1.0, "alpha must lie in [-1/3, 1]")
    elif kind == "MeanHolderFuzz":
        need(int(p["batch"]) >= 1, "batch must be positive")
    elif kind == "EhrhardCounterexample":
        need(int(p["resolution"]) >= 10, "resolution must be at least 10")


@dataclass
class RunConfig:
    """Harness settings; every count must be positive."""

    seed: int = 0
    instances: int = 3
    samples: int = 200_000
    grid_resolution: int = 64
    tolerance: float = 1e-9
    out: str | None = None
    format: str = "json"
    jobs: int = 1
    barthe_starts: int = 4

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        for name in ("instances", "samples", "grid_resolution", "jobs", "barthe_starts"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")


def instance_seed(config_seed: int, case: InequalityCase, index: int) -> int:
    """Seed of instance ``index``: a pure function of the run seed, the case name and the index."""
    ss = np.random.SeedSequence([int(config_seed), zlib.crc32(case.name.encode()), int(index)])
    return int(ss.generate_state(1, np.uint32)[0])


@dataclass
class Instance:
    case: InequalityCase
    seed: int
    equality: bool = False
    bodies: tuple = ()
    functions: tuple = ()
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        extra = {k: (v.to_json() if hasattr(v, "to_json") else v) for k, v in self.extra.items()}
        return {"case": self.case.to_json(), "seed": self.seed, "equality": self.equality,
                "bodies": [b.to_json() for b in self.bodies],
                "functions": [f.to_json() for f in self.functions], "extra": extra}

    def dumps(self) -> str:
        return _json.dumps(self.to_json())


# --------------------------------------------------------------------------
# instance generation


def _mk(case, seed, equality, **kw):
    return Instance(case, seed, equality, **kw)


def _pair_bodies(rng, kind, n=2):
    return gen.random_body(rng, n, kind), gen.random_body(rng, n, kind)


def _single_indicator(rng, kind, n=2, tag=None):
    A = gen.random_body(rng, n, kind)
    tag = tag or {"symmetric": "even_unimodal", "unconditional": "unconditional",
                  "origin": "star_unimodal"}.get(kind, "general")
    return LayeredFunction([(float(rng.uniform(0.5, 2.0)), A)], tag=tag)


def _functional_pair(rng, equality, maker, kind, n):
    if equality:
        f = _single_indicator(rng, kind, n)
        return (f, f)
    return (maker(rng, n, kind), maker(rng, n, kind))


def _nested(rng, n, kind):
    return gen.nested_layers(rng, n, kind)


def _profile(rng, n, kind):
    return gen.random_profile_function(rng, n, kind)


def _heisenberg_layers(rng, L=None) -> LayeredFunction:
    L = L or int(rng.integers(1, 4))
    A = gen.random_heisenberg_box(rng)
    boxes = [A]
    for _ in range(L - 1):
        lo, hi = boxes[-1].bounding_box()
        w = hi - lo
        a = lo + w * rng.uniform(0.0, 0.3, 3)
        b = hi - w * rng.uniform(0.0, 0.3, 3)
        boxes.append(Polytope.box(a, b))
    return LayeredFunction([(float(rng.uniform(0.3, 1.5)), B) for B in boxes], tag="general")


def _barthe_bodies(rng, inst: BartheInstance):
    out = []
    for k in inst.block_dims:
        if k == 1:
            a = rng.uniform(-1.0, 0.5)
            out.append(Polytope.segment(a, a + rng.uniform(0.3, 2.0)))
        else:
            out.append(gen.random_body(rng, k, "general"))
    return tuple(out)


def _barthe_equality(rng, name):
    """Coordinate projections (or planes) of one centered box: equality in reverse Brascamp-Lieb."""
    if name == "coordinate_planes":
        inst = BartheInstance.coordinate_planes()
        half = rng.uniform(0.3, 2.0, 3)
        bodies = tuple(Polytope.symmetric_box(np.delete(half, i)) for i in range(3))
    else:
        inst = BartheInstance.coordinate_projections(2)
        half = rng.uniform(0.3, 2.0, 2)
        bodies = tuple(Polytope.segment(-h, h) for h in half)
    return inst, bodies


def generate_instance(case: InequalityCase, seed: int, equality: bool = False) -> Instance:
    """Concrete instance, deterministic in ``(case, seed, equality)``.

    ``equality=True`` asks for the family's analytic equality configuration.
    """
    rng = np.random.default_rng(int(seed))
    k, p = case.kind, case.p
    n = int(p.get("n", 2))
    if k == "BM_2D":
        A, B = _pair_bodies(rng, "general")
        return _mk(case, seed, equality, bodies=(A, A if equality else B))
    if k in ("GaussianDimBM", "RadialLogConcaveBM"):
        A, B = _pair_bodies(rng, "symmetric", n)
        return _mk(case, seed, equality, bodies=(A, A if equality else B))
    if k == "WeightedConcaveBM":
        if p["alpha"] is None:
            A, B = _pair_bodies(rng, "symmetric", n)
            return _mk(case, seed, equality, bodies=(A, A if equality else B))
        return _mk(case, seed, equality, functions=_functional_pair(rng, equality, _profile, "symmetric", n))
    if k == "PrekopaLeindler":
        return _mk(case, seed, equality, functions=_functional_pair(rng, equality, _nested, "general", n))
    if k == "GaussianBBL":
        return _mk(case, seed, equality, functions=_functional_pair(rng, equality, _profile, "symmetric", n))
    if k == "StarHomogeneousBBL":
        return _mk(case, seed, equality, functions=_functional_pair(rng, equality, _nested, "origin", n))
    if k == "LpFunctional":
        return _mk(case, seed, equality, functions=_functional_pair(rng, equality, _profile, p["inputs"], 2))
    if k == "LpBM":
        kind = "origin" if p["p"] >= 1.0 else "symmetric"
        A, B = _pair_bodies(rng, kind)
        return _mk(case, seed, equality, bodies=(A, A if equality else B))
    if k == "LogBMUnconditional":
        if p["family"] == "box":
            A, B = gen.random_box(rng), gen.random_box(rng)
        else:
            A, B = _pair_bodies(rng, "unconditional")
        return _mk(case, seed, equality, bodies=(A, A if equality else B))
    if k == "SchneiderRatio":
        sym = p["symmetric"] or equality
        if n == 3:
            K = gen.random_body(rng, 3, "symmetric" if sym else "general", k=(3, 5))
        else:
            K = gen.random_body(rng, n, "symmetric" if sym else "general")
        return _mk(case, seed, equality, bodies=(K,))
    if k == "RogersShephardUpper":
        if equality:
            M = rng.standard_normal((n, n)) + 2 * np.eye(n)
            K = Polytope.simplex(n).linear_map(M).translate(rng.standard_normal(n))
        else:
            K = gen.random_body(rng, n, "general", k=(n + 1, 8 if n == 2 else 6))
        return _mk(case, seed, equality, bodies=(K,))
    if k == "BartheReverseBL":
        if equality:
            inst, bodies = _barthe_equality(rng, p["instance"])
        else:
            name = p["instance"]
            if name == "random":
                inst = BartheInstance.random(int(rng.integers(2**31)))
            elif name == "coordinate_projections":
                inst = BartheInstance.coordinate_projections(2)
            else:
                inst = getattr(BartheInstance, name)()
            bodies = _barthe_bodies(rng, inst)
        return _mk(case, seed, equality, bodies=bodies, extra={"instance": inst})
    if k == "NilpotentBBL":
        if equality:
            eps = 0.01
            A = Polytope.symmetric_box([eps / 2] * 3)
            f = LayeredFunction([(1.0, A)], tag="general")
            return _mk(case, seed, equality, functions=(f, f))
        return _mk(case, seed, equality, functions=(_heisenberg_layers(rng), _heisenberg_layers(rng)))
    if k == "MeanHolderFuzz":
        return _mk(case, seed, equality, extra={"seed": int(seed)})
    if k == "EhrhardCounterexample":
        return _mk(case, seed, equality, extra={})
    if k == "TripleDualityCheck":
        w = rng.uniform(0.2, 1.0, 2)
        return _mk(case, seed, equality, extra={"weights": tuple(float(x) for x in w / w.sum())})
    raise ValueError(f"no generator for {k}")


def scale_instance(inst: Instance, lam: float) -> Instance:
    """All bodies (and function layers) dilated by ``lam``."""
    bodies = tuple(B.scale(lam) for B in inst.bodies)
    fns = tuple(f.map_bodies(lambda B: B.scale(lam)) for f in inst.functions)
    return Instance(inst.case, inst.seed, inst.equality, bodies, fns, dict(inst.extra))


# --------------------------------------------------------------------------
# shared numerics


def _mean_with_se(r: float, t: float, vals, ses) -> tuple[float, float]:
    """``M_r^{(t)}`` of two estimates with a delta-method standard error."""
    spec = MeanSpec(r, WeightVector.convex_pair(t))
    x = np.asarray(vals, dtype=float)
    v = eval_mean(spec, x)
    var = 0.0
    for i, s in enumerate(ses):
        if s > 0 and x[i] > 0:
            h = 1e-6 * x[i]
            up, dn = x.copy(), x.copy()
            up[i] += h
            dn[i] -= h
            d = (eval_mean(spec, up) - eval_mean(spec, dn)) / (2 * h)
            var += (d * s) ** 2
    return v, math.sqrt(var)


def _budget(config: RunConfig, seed: int, exact: bool = False) -> Budget:
    return Budget.exact() if exact else Budget.monte_carlo(config.samples, seed=seed)


def _exact_lebesgue(m, n) -> bool:
    return isinstance(m, Lebesgue) and n <= 2


def _bbl_exponent(alpha: float, dim_exp: float) -> float:
    """``r`` with ``1/r = 1/alpha + 1/dim_exp`` (``-inf`` when ``alpha = -dim_exp``)."""
    if alpha == 0.0:
        return 0.0
    if abs(alpha + dim_exp) < 1e-15:
        return -math.inf
    return alpha * dim_exp / (alpha + dim_exp)


def star_homogeneous_exponent(alpha: float, s: float, n: int) -> float:
    """``alpha (s-1) / (alpha s n + s - 1)``."""
    return _bbl_exponent(alpha, (s - 1.0) / (s * n))


def weighted_concave_exponent(alpha: float, beta: float, n: int, form: str = "consistent") -> float:
    if form == "displayed":
        return alpha * (beta + n) / (alpha + n + beta)
    return _bbl_exponent(alpha, 1.0 / (beta + n))


def lp_functional_exponent(alpha: float, p: float, n: int) -> float:
    """``alpha p / (p + alpha n)``; ``0`` at ``p = 0``."""
    if p == 0.0:
        return 0.0
    return _bbl_exponent(alpha, p / n)


class _Result:
    """Mutable scratch for one instance."""

    def __init__(self):
        self.lhs = self.rhs = math.nan
        self.lhs_se = self.rhs_se = 0.0
        self.tol = None
        self.detail: dict = {}
        self.status = ""


def _functional(res: _Result, spec: SupConvolutionSpec, fs, m, r: float, t: float,
                budget: Budget, layer_cake: bool = False, scale=None):
    h = supconv_layered(spec, fs)
    lhs = integrate_supconv(h, m, budget)
    ints = [integrate_layered(m, f, budget) for f in fs]
    vals = [I.value for I in ints]
    ses = [I.stderr for I in ints]
    if scale is not None:
        vals = [v * s for v, s in zip(vals, scale)]
        ses = [e * s for e, s in zip(ses, scale)]
    rhs, rhs_se = _mean_with_se(r, t, vals, ses)
    res.lhs, res.lhs_se, res.rhs, res.rhs_se = lhs.value, lhs.stderr, rhs, rhs_se
    res.detail.update({"integrals": vals, "pieces": len(h), "r": r})
    if layer_cake:
        lc = layer_cake_sum(spec, fs, m, budget)
        res.detail["layer_cake_lhs"] = lc.value
        res.detail["layer_cake_margin"] = lc.value - rhs
        res.detail["layer_cake_leaves"] = lc.leaves
        res.detail["layer_cake_stderr"] = lc.stderr
    return h


def _geometric(res: _Result, m, A, B, t: float, budget: Budget):
    n = A.dim
    C = affine_combination(A, B, t)
    lhs = measure_of_polytope(m, C, budget)
    mA, mB = measure_of_polytope(m, A, budget), measure_of_polytope(m, B, budget)
    return lhs, mA, mB


@lru_cache(maxsize=32)
def schneider_constant(m: int, n: int, samples: int = 4000, seed: int = 0) -> tuple[float, float]:
    """``|D^m(B)| / |B|^m`` for a polytope approximation ``B`` of the unit ball.

    In the plane every origin-symmetric body attains the bound, so the value is
    ``(m+1)^2`` exactly.  For ``n = 3`` ``B`` is the icosahedron: exact volume
    for ``m = 1``, LP-oracle sampling otherwise.
    """
    if n == 2:
        return float((m + 1) ** 2), 0.0
    B = Polytope(DirectionSet.icosphere(0).vectors)
    D = DifferenceBody(B, m)
    vb = volume(B).value
    if m == 1:
        return volume(D.polytope).value / vb, 0.0
    r = _oracle_volume(D, samples, seed)
    return r.value / vb**m, r.stderr / vb**m


def _oracle_volume(D: DifferenceBody, samples: int, seed: int) -> IntegrationResult:
    """Hit-or-miss volume through the LP membership oracle (no high-dimensional hull)."""
    lo0, hi0 = D.bodies[0].bounding_box()
    boxes = [K.bounding_box() for K in D.bodies[1:]]
    lo = np.concatenate([lo0 - hi for _, hi in boxes])
    hi = np.concatenate([hi0 - lo_ for lo_, _ in boxes])
    rng = np.random.default_rng(seed)
    X = lo + (hi - lo) * rng.random((samples, len(lo)))
    inside = np.array([D.oracle_contains(x, 0.0) for x in X], dtype=float)
    box = float(np.prod(hi - lo))
    return IntegrationResult(box * inside.mean(), box * inside.std() / math.sqrt(samples), samples)


def _difference_volume(K: Polytope, m: int, config: RunConfig, seed: int) -> IntegrationResult:
    D = DifferenceBody(K, m)
    if K.dim * m <= 3:
        return volume(D.polytope)
    if K.dim * m <= 4 and D.exact_available:
        return volume(D.polytope, Budget.monte_carlo(config.samples, seed=seed))
    return _oracle_volume(D, min(config.samples, 4000), seed)


# --------------------------------------------------------------------------
# runners


def _run_bm2d(inst, config, res):
    A, B = inst.bodies
    vA, vB = volume(A).value, volume(B).value
    vC = volume(affine_combination(A, B, 0.5)).value * 4.0  # |A + B| = 4 |(A + B) / 2|
    res.lhs, res.rhs = math.sqrt(vC), math.sqrt(vA) + math.sqrt(vB)


def _run_pl(inst, config, res):
    t, n = inst.case["t"], inst.case["n"]
    spec = SupConvolutionSpec.standard(AffineCombination(t), 0.0)
    m = Lebesgue(n)
    _functional(res, spec, inst.functions, m, 0.0, t, _budget(config, inst.seed, True), layer_cake=True)


def _run_gauss_dim(inst, config, res):
    t, n = inst.case["t"], inst.case["n"]
    lhs, mA, mB = _geometric(res, Gaussian(n), *inst.bodies, t, _budget(config, inst.seed))
    res.lhs, res.lhs_se = lhs.value, lhs.stderr
    res.rhs, res.rhs_se = _mean_with_se(1.0 / n, t, [mA.value, mB.value], [mA.stderr, mB.stderr])


def _run_gauss_bbl(inst, config, res):
    t, n, alpha = inst.case["t"], inst.case["n"], inst.case["alpha"]
    spec = SupConvolutionSpec.standard(AffineCombination(t), alpha)
    r = _bbl_exponent(alpha, 1.0 / n)
    _functional(res, spec, inst.functions, Gaussian(n), r, t, _budget(config, inst.seed), layer_cake=True)


def _run_radial(inst, config, res):
    p = inst.case.p
    n = p["n"]
    m = RadialLogConcave(n, RadialProfile(p["w"], {"a": p["a"], "p": p["p"]}))
    lhs, mA, mB = _geometric(res, m, *inst.bodies, p["t"], _budget(config, inst.seed))
    res.lhs, res.lhs_se = lhs.value, lhs.stderr
    res.rhs, res.rhs_se = _mean_with_se(1.0 / n, p["t"], [mA.value, mB.value], [mA.stderr, mB.stderr])


def _run_star(inst, config, res):
    p = inst.case.p
    n, s, alpha, t = p["n"], p["s"], p["alpha"], p["t"]
    m = HomogeneousPotential(n, Potential("V_norm_p", {"a": 1.0, "q": p["q"], "s": s}))
    spec = SupConvolutionSpec.standard(AffineCombination(t), alpha)
    _functional(res, spec, inst.functions, m, star_homogeneous_exponent(alpha, s, n), t,
                _budget(config, inst.seed))


def _weighted_measure(p):
    q = math.inf if p["phi_q"] in ("inf", math.inf) else p["phi_q"]
    return WeightedConcave(p["n"], Lebesgue(p["n"]), ConcaveWeight("phi_linear_cap", {"R": p["R"], "q": q}),
                           p["beta"])


def _run_weighted(inst, config, res):
    p = inst.case.p
    n, beta, t = p["n"], p["beta"], p["t"]
    m = _weighted_measure(p)
    budget = _budget(config, inst.seed)
    if p["alpha"] is None:
        lhs, mA, mB = _geometric(res, m, *inst.bodies, t, budget)
        res.lhs, res.lhs_se = lhs.value, lhs.stderr
        res.rhs, res.rhs_se = _mean_with_se(1.0 / (beta + n), t, [mA.value, mB.value], [mA.stderr, mB.stderr])
        return
    spec = SupConvolutionSpec.standard(AffineCombination(t), p["alpha"])
    r = weighted_concave_exponent(p["alpha"], beta, n, p["r_form"])
    _functional(res, spec, inst.functions, m, r, t, budget)


def _run_lpbm(inst, config, res):
    p, t = inst.case["p"], inst.case["t"]
    A, B = inst.bodies
    body = lp_combination(A, B, t, p, DirectionSet.planar(int(inst.case["directions"])))
    res.lhs = volume(body.inner).value
    res.rhs, _ = _mean_with_se(p / 2.0, t, [volume(A).value, volume(B).value], [0.0, 0.0])
    res.detail["outer"] = volume(body.outer).value
    res.detail["bracket_width"] = body.bracket_width()
    res.detail["exact"] = body.exact


def _run_lp_functional(inst, config, res):
    p = inst.case.p
    fam = LevelSetLp(p["p"], p["t"])
    spec = SupConvolutionSpec.standard(fam, p["alpha"])
    r = lp_functional_exponent(p["alpha"], p["p"], 2)
    _functional(res, spec, inst.functions, Lebesgue(2), r, p["t"], Budget.exact())


def _run_logbm(inst, config, res):
    t = inst.case["t"]
    A, B = inst.bodies
    body = lp_combination(A, B, t, 0.0)
    vA, vB = volume(A).value, volume(B).value
    res.lhs = volume(body.inner).value
    res.rhs = vA ** (1 - t) * vB**t
    if inst.case["family"] == "box":
        ha, hb = A.bounding_box()[1], B.bounding_box()[1]
        target = Polytope.symmetric_box(ha ** (1 - t) * hb**t)
        match = body.inner.same_set(target, 1e-12)
        res.detail["box_match"] = bool(match)
        res.tol = 1e-12 * max(1.0, res.rhs)
        if not match:
            res.status = "fail"
    else:
        res.tol = 1e-6


def _run_schneider(inst, config, res):
    m, n = int(inst.case["m"]), int(inst.case["n"])
    K = inst.bodies[0]
    vK = volume(K).value
    D = _difference_volume(K, m, config, inst.seed)
    res.lhs, res.lhs_se = D.value / vK**m, D.stderr / vK**m
    c, c_se = schneider_constant(m, n)
    res.rhs, res.rhs_se = c, c_se
    res.detail["displayed_constant"] = _SCHNEIDER_DISPLAYED
    res.detail["implemented_constant"] = "|D^m(B)| |B|^{-m}"


def _run_rogers(inst, config, res):
    m, n = int(inst.case["m"]), int(inst.case["n"])
    K = inst.bodies[0]
    vK = volume(K).value
    D = _difference_volume(K, m, config, inst.seed)
    res.lhs = float(math.comb(n * (m + 1), n))
    res.rhs, res.rhs_se = D.value / vK**m, D.stderr / vK**m


_E_CACHE: dict = {}


def _run_barthe(inst, config, res):
    bi: BartheInstance = inst.extra["instance"]
    key = (bi.dumps(), config.barthe_starts)
    if key not in _E_CACHE:
        _E_CACHE[key] = constant_E(bi, starts=config.barthe_starts, seed=0).E
    E = _E_CACHE[key]
    rep = reverse_bl_geometric_check(bi, inst.bodies, E, Budget.exact(), config.tolerance, inst.seed,
                                     inst.case.name)
    res.lhs, res.rhs = rep.lhs, rep.rhs
    res.tol = rep.tolerance
    res.detail["E"] = E


def _run_nilpotent(inst, config, res):
    alpha, t = inst.case["alpha"], inst.case["t"]
    spec = SupConvolutionSpec(HeisenbergProduct(), MeanSpec(alpha, WeightVector.convex_pair(t)))
    f, g = inst.functions
    m = Lebesgue(3)
    r = _bbl_exponent(alpha, 1.0 / 3.0)
    if len(f) == 1 and len(g) == 1:
        (a, A), (b, B) = f.layers[0], g.layers[0]
        lhs = eval_mean(spec.mean, [a, b]) * heisenberg_box_product_volume(A, B)
        ints = [a * volume(A).value, b * volume(B).value]
        res.lhs = lhs
        res.rhs, _ = _mean_with_se(r, t, [ints[0] / (1 - t) ** 3, ints[1] / t**3], [0, 0])
        res.detail["integrals"] = ints
        return
    _functional(res, spec, (f, g), m, r, t, _budget(config, inst.seed),
                scale=(1.0 / (1 - t) ** 3, 1.0 / t**3))


def _run_holder(inst, config, res):
    rng = np.random.default_rng(inst.extra["seed"])
    N = int(inst.case["batch"])
    worst_h, worst_o = math.inf, math.inf
    for _ in range(N):
        while True:
            p, q = rng.uniform(-5.0, 5.0, 2)
            if p + q > 0.05:
                break
        r = holder_exponent(p, q)
        t = rng.uniform(0.05, 0.95)
        w = WeightVector.convex_pair(t)
        u, v = np.exp(rng.uniform(-3, 3, 2)), np.exp(rng.uniform(-3, 3, 2))
        left = eval_mean(MeanSpec(p, w), u) * eval_mean(MeanSpec(q, w), v)
        right = eval_mean(MeanSpec(r, w), u * v)
        worst_h = min(worst_h, (left - right) / max(left, right))
        lo, hi = sorted((p, q))
        if hi - lo > 1e-9:
            a, b = eval_mean(MeanSpec(lo, w), u), eval_mean(MeanSpec(hi, w), u)
            worst_o = min(worst_o, (b - a) / max(a, b))
    res.lhs, res.rhs = min(worst_h, worst_o), 0.0
    res.tol = 1e-12
    res.detail.update({"holder_worst": worst_h, "ordering_worst": worst_o, "checks": N})


def _run_ehrhard(inst, config, res):
    w = find_ehrhard_violation(inst.case["t"], int(inst.case["resolution"]), threshold=1e-6)
    res.lhs = w.margin if w else 0.0
    res.rhs = 1e-6
    res.tol = 0.0 if w else config.tolerance
    if w:
        res.detail["witness"] = {"a": list(w.a), "lambda": w.lam}
    else:
        res.status = "fail"


def _run_triple(inst, config, res):
    triple = power_mean_triple(int(inst.case["n"]), inst.extra["weights"])
    rep = check_triple_properties(triple, int(inst.case["samples"]), inst.seed)
    ineq = [c.worst_margin for name, c in rep.checks.items() if name != "duality"]
    res.lhs, res.rhs = min(ineq) if ineq else math.nan, 0.0
    res.detail["checks"] = {name: c.holds for name, c in rep.checks.items()}
    if not rep.all_hold:
        res.status = "fail"


_RUNNERS: dict[str, Callable] = {
    "BM_2D": _run_bm2d, "PrekopaLeindler": _run_pl, "GaussianDimBM": _run_gauss_dim,
    "GaussianBBL": _run_gauss_bbl, "RadialLogConcaveBM": _run_radial,
    "StarHomogeneousBBL": _run_star, "WeightedConcaveBM": _run_weighted, "LpBM": _run_lpbm,
    "LpFunctional": _run_lp_functional, "LogBMUnconditional": _run_logbm,
    "SchneiderRatio": _run_schneider, "RogersShephardUpper": _run_rogers,
    "BartheReverseBL": _run_barthe, "NilpotentBBL": _run_nilpotent,
    "MeanHolderFuzz": _run_holder, "EhrhardCounterexample": _run_ehrhard,
    "TripleDualityCheck": _run_triple,
}


def run_instance(inst: Instance, config: RunConfig) -> VerificationReport:
    """Both sides of the case's inequality on one instance; failures become ``error`` reports."""
    case = inst.case
    t0 = time.perf_counter()
    res = _Result()
    try:
        _RUNNERS[case.kind](inst, config, res)
    except Exception as exc:  # noqa: BLE001 - recorded in the report
        res.status = "error"
        res.detail["error"] = f"{type(exc).__name__}: {exc}"
    factor = case.rhs_factor
    if factor != 1.0:
        res.rhs *= factor
        res.rhs_se *= factor
    res.detail["equality_instance"] = inst.equality
    status = res.status
    if case.conditional and status != "":
        status = "evidence-only"
    tol = config.tolerance if res.tol is None else res.tol
    return VerificationReport(case.name, inst.seed, float(res.lhs), float(res.rhs), float(res.lhs_se),
                              float(res.rhs_se), tol, case.conditional,
                              1e3 * (time.perf_counter() - t0), res.detail, status)
