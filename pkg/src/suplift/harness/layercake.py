"""Explicit layer-cake induction for two-input functional inequalities.

The inputs are split repeatedly, the input with more layers at its lowest
level and the other at the threshold carrying the same fraction of its
integral, until every leaf is a pair of scaled indicators.  Leaves are then
summed: each one contributes ``M_alpha(a, b) m(C(A, B))``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..estimates import Budget
from ..means import eval_mean
from ..measure import MeasureSpec, measure_of_polytope
from ..polytope import Polytope
from ..stepfn import LayeredFunction, solve_matching_threshold, split_at_threshold
from ..supconv import SupConvolutionSpec, combined_set

__all__ = ["LayerCakeResult", "layer_cake_leaves", "layer_cake_sum"]


@dataclass
class LayerCakeResult:
    value: float
    stderr: float
    leaves: int


class _Masses:
    """Measure of each body, computed once; keyed by vertex bytes so split copies hit."""

    def __init__(self, m: MeasureSpec, budget: Budget):
        self.m, self.budget, self._cache = m, budget, {}

    def __call__(self, A: Polytope):
        key = A.vertices.tobytes()
        if key not in self._cache:
            self._cache[key] = measure_of_polytope(self.m, A, self.budget)
        return self._cache[key]

    def integral(self, f: LayeredFunction) -> float:
        return sum(a * self(A).value for a, A in f.layers)


def layer_cake_leaves(fs, m: MeasureSpec, budget: Budget, masses: _Masses | None = None):
    """Split a pair of layered functions into matched pairs of scaled indicators."""
    if len(fs) != 2:
        raise ValueError("the induction is implemented for two inputs")
    masses = masses or _Masses(m, budget)
    out = []

    def rec(F, G):
        if F.is_zero or G.is_zero:
            return
        if len(F) <= 1 and len(G) <= 1:
            out.append((F, G))
            return
        swap = len(G) > len(F)
        big, other = (G, F) if swap else (F, G)
        lo_big, hi_big, _ = split_at_threshold(big, float(big.cumulative[0]))
        lam = masses.integral(lo_big) / masses.integral(big)
        t = solve_matching_threshold(other, m, lam, masses=[masses(A).value for A in other.bodies])
        lo_o, hi_o, _ = split_at_threshold(other, t)
        if swap:
            rec(lo_o, lo_big)
            rec(hi_o, hi_big)
        else:
            rec(lo_big, lo_o)
            rec(hi_big, hi_o)

    rec(*fs)
    return out


def layer_cake_sum(spec: SupConvolutionSpec, fs, m: MeasureSpec, budget: Budget) -> LayerCakeResult:
    """Sum of the leaf sup-convolution integrals; a lower bound for ``∫ □f dm``."""
    masses = _Masses(m, budget)
    leaves = layer_cake_leaves(fs, m, budget, masses)
    total, var = 0.0, 0.0
    for F, G in leaves:
        (a, A), (b, B) = F.layers[0], G.layers[0]
        region = combined_set(spec.family, [A, B])
        region = getattr(region, "inner", region)
        r = measure_of_polytope(m, region, budget)
        w = eval_mean(spec.mean, [a, b])
        total += w * r.value
        var += (w * r.stderr) ** 2
    return LayerCakeResult(total, var**0.5, len(leaves))
