"""Acceptance criteria, one test each.

Every test records a single ``criterion N: PASS|FAIL  label  (detail)`` line;
the lines are printed as they are produced and again, in order, in the
pytest terminal summary.  Run directly (``python3 tests/test_acceptance.py``)
to get just the lines.
"""

import math
import time

import numpy as np
import pytest

from suplift.barthe import (BartheInstance, PDPoint, constant_E, objective_ratio, random_pd_floor,
                            reverse_bl_geometric_check)
from suplift.estimates import Budget
from suplift.harness import InequalityCase, Instance, RunConfig, run_case, run_instance
from suplift.harness.generators import (nested_layers, random_body, random_heisenberg_box,
                                        random_profile_function)
from suplift.means import find_ehrhard_violation
from suplift.measure import Lebesgue, integrate_layered
from suplift.polytope import Polytope, difference_body, volume
from suplift.stepfn import LayeredFunction, dyadic_approximation, solve_matching_threshold, split_at_threshold
from suplift.supconv import (AffineCombination, GeneralLinear, HeisenbergProduct, HeisenbergProductRegion,
                             LevelSetLp, LpUnion, SchneiderShift, SupConvolutionSpec, grid_volume,
                             heisenberg_box_product_volume, supconv_layered)

RESULTS: dict[int, str] = {}
mk = InequalityCase.make


def record(num: int, label: str, ok: bool, detail: str) -> None:
    line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {label}  ({detail})"
    RESULTS[num] = line
    print(line)
    assert ok, line


def lebesgue(f):
    return integrate_layered(Lebesgue(f.dim), f, Budget.exact()).value


# 1 -------------------------------------------------------------------------

def test_criterion_01_exact_constants():
    checks, slowest = [], 0.0
    tri = Polytope([[0, 0], [1, 0], [0, 1]])
    t0 = time.perf_counter()
    rs = run_instance(Instance(mk("RogersShephardUpper"), 0, True, (tri,)), RunConfig())
    slowest = max(slowest, time.perf_counter() - t0)
    checks.append(abs(rs.rhs - 6.0) <= 1e-9)
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(5):
        K = random_body(rng, 2, "symmetric")
        t0 = time.perf_counter()
        rep = run_instance(Instance(mk("SchneiderRatio"), 0, False, (K,)), RunConfig())
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, abs(rep.lhs - 4.0))
    checks.append(worst <= 1e-9)
    dk = 0.0
    for n in (2, 3):
        K = random_body(rng, n, "symmetric", k=(4, 8))
        t0 = time.perf_counter()
        ratio = volume(difference_body(K, 1).polytope).value / volume(K).value
        slowest = max(slowest, time.perf_counter() - t0)
        dk = max(dk, abs(ratio - 2.0**n))
    checks.append(dk <= 1e-9 * 8)
    record(1, "exact constants", all(checks) and slowest < 1.0,
           f"RS triangle={rs.rhs:.12g}, max|Schneider-4|={worst:.2e}, max||K-K|/|K|-2^n|={dk:.2e}, "
           f"slowest {slowest:.3f}s")


# 2 -------------------------------------------------------------------------

def test_criterion_02_brunn_minkowski_fuzz():
    t0 = time.perf_counter()
    reps = run_case(mk("BM_2D"), RunConfig(seed=0, instances=200))
    elapsed = time.perf_counter() - t0
    worst = min(r.margin for r in reps)
    record(2, "Brunn-Minkowski fuzz", worst >= -1e-9 and elapsed < 10.0 and len(reps) == 200,
           f"{len(reps)} pairs, worst margin {worst:.3e}, {elapsed:.2f}s")


# 3 -------------------------------------------------------------------------

def test_criterion_03_prekopa_leindler():
    worst, eq_worst, count = math.inf, 0.0, 0
    for t in (0.25, 0.5, 0.75):
        for r in run_case(mk("PrekopaLeindler", t=t), RunConfig(seed=0, instances=200)):
            count += 1
            worst = min(worst, r.margin)
            if r.detail["equality_instance"]:
                eq_worst = max(eq_worst, abs(r.margin))
    record(3, "Prekopa-Leindler exact path", worst >= -1e-9 and eq_worst < 1e-9,
           f"{count} pairs over t in {{1/4,1/2,3/4}}, worst margin {worst:.3e}, "
           f"worst equality |margin| {eq_worst:.3e}")


# 4 -------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_04_gaussian():
    cfg = RunConfig(seed=0, instances=50, samples=10**6)
    t0 = time.perf_counter()
    bad, eq_bad, total, worst_z = [], [], 0, math.inf
    for case in (mk("GaussianDimBM"), mk("GaussianBBL", alpha=-0.5), mk("GaussianBBL", alpha=0.0),
                 mk("GaussianBBL", alpha=1.0)):
        for r in run_case(case, cfg):
            total += 1
            sigma = r.sigma
            if r.margin < -3 * sigma:
                bad.append(case.name)
            if sigma > 0:
                worst_z = min(worst_z, r.margin / sigma)
            if r.detail["equality_instance"] and abs(r.margin) > 3 * sigma + 1e-12:
                eq_bad.append(case.name)
    elapsed = time.perf_counter() - t0
    record(4, "Gaussian dimensional BM and Gaussian BBL", not bad and not eq_bad and elapsed < 300,
           f"{total} instances at 1e6 samples, worst margin/sigma {worst_z:.2f}, "
           f"failures {len(bad)}, equality misses {len(eq_bad)}, {elapsed:.1f}s")


# 5 -------------------------------------------------------------------------

def test_criterion_05_lp_brunn_minkowski():
    reps = run_case(mk("LpBM", p=2.0, directions=720), RunConfig(seed=0, instances=50))
    worst = min(r.margin for r in reps)
    width = max(r.detail["bracket_width"] for r in reps)
    ok = all(r.status == "pass" for r in reps) and width < 0.01
    record(5, "L_p Brunn-Minkowski, p = 2", ok,
           f"{len(reps)} pairs, worst margin {worst:.3e}, widest bracket {100 * width:.3f}%")


# 6 -------------------------------------------------------------------------

def test_criterion_06_unconditional_log_bm():
    boxes = run_case(mk("LogBMUnconditional", family="box"), RunConfig(seed=0, instances=100))
    box_ok = all(r.detail["box_match"] and r.margin >= -1e-12 * max(1.0, r.rhs) for r in boxes)
    polys = run_case(mk("LogBMUnconditional", family="polygon"), RunConfig(seed=0, instances=50))
    poly_worst = min(r.margin for r in polys)
    record(6, "unconditional log-Brunn-Minkowski", box_ok and poly_worst >= -1e-6,
           f"{len(boxes)} box pairs exact={box_ok}, worst box margin "
           f"{min(r.margin for r in boxes):.3e}; {len(polys)} polygon pairs worst margin {poly_worst:.3e}")


# 7 -------------------------------------------------------------------------

def test_criterion_07_barthe():
    axes = BartheInstance.coordinate_projections(2)
    e_axes = constant_E(axes, starts=4, seed=0).E
    lines = BartheInstance.lines_120()
    res = constant_E(lines, starts=8, seed=0)
    floor = random_pd_floor(lines, 10**4, seed=1)
    at_identity = objective_ratio(lines, PDPoint.identity(lines))
    box = reverse_bl_geometric_check(axes, [Polytope.segment(-0.7, 0.7), Polytope.segment(-1.3, 1.3)], e_axes)
    ok = (abs(e_axes - 1.0) <= 1e-12 and res.objective <= 1 + 1e-6 and at_identity >= res.objective
          and floor >= res.objective - 1e-6 and abs(box.margin) <= 1e-9)
    record(7, "reverse Brascamp-Lieb constant", ok,
           f"E(projections)={e_axes:.15g}, 120-degree objective={res.objective:.12g}, "
           f"sampling floor={floor:.6g}, box margin={box.margin:.2e}")


# 8 -------------------------------------------------------------------------

def test_criterion_08_schneider_m2():
    reps = run_case(mk("SchneiderRatio", m=2, n=2), RunConfig(seed=0, instances=11, samples=10**6))
    zs = [(r.lhs - 9.0) / max(r.lhs_stderr, 1e-300) for r in reps]
    ok = all(r.lhs >= 9.0 - 3 * r.lhs_stderr for r in reps) and all(r.status == "pass" for r in reps)
    record(8, "Schneider m = 2, n = 2", ok,
           f"{len(reps)} symmetric polygons, ratios {min(r.lhs for r in reps):.4f}..{max(r.lhs for r in reps):.4f}, "
           f"min z {min(zs):.2f}")


# 9 -------------------------------------------------------------------------

def test_criterion_09_layer_cake():
    rng = np.random.default_rng(9)
    split_err, slice_bad, dyadic_bad = 0.0, 0, 0
    for _ in range(100):
        kind = ("symmetric", "unconditional", "general")[int(rng.integers(3))]
        if kind == "symmetric":
            f = random_profile_function(rng, 2, "symmetric")
        else:
            f = nested_layers(rng, 2, kind)
        total = lebesgue(f)
        lam = float(rng.uniform(0.05, 0.95))
        t = solve_matching_threshold(f, Lebesgue(2), lam)
        lo, hi, _ = split_at_threshold(f, t)
        split_err = max(split_err, abs(lebesgue(lo) - lam * total) / total,
                        abs(lebesgue(hi) - (1 - lam) * total) / total)
        bl, bh = f.layers[0][1].bounding_box()
        X = bl + (bh - bl) * rng.random((1000, 2))
        up, down = hi.evaluate(X, 0.0), lo.evaluate(X, 0.0)
        slice_bad += int(np.sum(down[up > 0] != lo.max_value))
        prev = -1.0
        a1 = volume(f.layers[0][1]).value
        for m in range(1, 8):
            if f.max_value > 2.0**m:
                continue
            I = lebesgue(dyadic_approximation(f, m))
            gap = total - I
            if I < prev - 1e-12 or gap < -1e-12 or gap > 2.0**-m * a1 + 1e-12:
                dyadic_bad += 1
            prev = I
    record(9, "layer-cake machinery", split_err <= 1e-9 and slice_bad == 0 and dyadic_bad == 0,
           f"100 functions, worst split error {split_err:.2e}, slicing violations {slice_bad}, "
           f"dyadic violations {dyadic_bad}")


# 10 ------------------------------------------------------------------------

def _split_family_inputs(rng, fs):
    """Matched split: first input at a random level, the rest at the matching fraction."""
    f0 = fs[0]
    t0 = float(rng.uniform(0.1, 0.9)) * f0.max_value
    lo0, hi0, _ = split_at_threshold(f0, t0)
    lam = lebesgue(lo0) / lebesgue(f0)
    lows, highs = [lo0], [hi0]
    for f in fs[1:]:
        lo, hi, _ = split_at_threshold(f, solve_matching_threshold(f, Lebesgue(f.dim), lam))
        lows.append(lo)
        highs.append(hi)
    return lows, highs


def _heisenberg_function(rng):
    A = random_heisenberg_box(rng)
    boxes = [A]
    for _ in range(int(rng.integers(0, 3))):
        lo, hi = boxes[-1].bounding_box()
        w = hi - lo
        boxes.append(Polytope.box(lo + w * rng.uniform(0, 0.3, 3), hi - w * rng.uniform(0, 0.3, 3)))
    return LayeredFunction([(float(rng.uniform(0.3, 1.5)), B) for B in boxes])


def _family_inputs(name, rng):
    even = lambda: random_profile_function(rng, 2, "symmetric", layers=(1, 3))  # noqa: E731
    if name in ("affine", "level_set_lp", "level_set_log", "lp_union"):
        return [even(), even()]
    if name in ("schneider_1", "schneider_2"):
        k = 2 if name == "schneider_1" else 3
        return [nested_layers(rng, 2, "general", layers=(1, 2)) for _ in range(k)]
    if name == "general_linear":
        return [LayeredFunction([(1.0, Polytope.segment(-a, a)), (0.5, Polytope.segment(-a / 2, a / 3))])
                for a in rng.uniform(0.5, 2.0, 3)]
    return [_heisenberg_function(rng), _heisenberg_function(rng)]


def _families():
    lines = BartheInstance.lines_120()
    return {
        "affine": SupConvolutionSpec.standard(AffineCombination(0.3), -0.25),
        "general_linear": SupConvolutionSpec.standard(GeneralLinear(tuple(lines.adjoints), lines.coeffs), 0.0),
        "level_set_log": SupConvolutionSpec.standard(LevelSetLp(0.0, 0.5), 0.0),
        "level_set_lp": SupConvolutionSpec.standard(LevelSetLp(0.5, 0.4), 0.2),
        "lp_union": SupConvolutionSpec.standard(LpUnion(2.0, 0.5), 0.0),
        "schneider_1": SupConvolutionSpec.standard(SchneiderShift(1), 0.0),
        "schneider_2": SupConvolutionSpec.standard(SchneiderShift(2), -0.1),
        "heisenberg": SupConvolutionSpec.standard(HeisenbergProduct(), 0.5),
    }


def test_criterion_10_restricted_superadditivity():
    rng = np.random.default_rng(10)
    violations, worst = {}, 0.0
    for name, spec in _families().items():
        violations[name] = 0
        for _ in range(20):
            fs = _family_inputs(name, rng)
            lows, highs = _split_family_inputs(rng, fs)
            whole = supconv_layered(spec, fs)
            lo, hi = supconv_layered(spec, lows), supconv_layered(spec, highs)
            blo, bhi = whole.bounding_box()
            pad = 0.05 * (bhi - blo)
            Z = (blo - pad) + (bhi - blo + 2 * pad) * rng.random((1000, whole.dim))
            gap = whole.evaluate(Z) - lo.evaluate(Z) - hi.evaluate(Z)
            worst = min(worst, float(gap.min()))
            violations[name] += int(np.sum(gap < -1e-9))
    total = sum(violations.values())
    record(10, "restricted superadditivity", total == 0,
           f"{len(violations)} families x 20 instances x 1000 points, violations {total}, "
           f"most negative gap {worst:.2e}")


# 11 ------------------------------------------------------------------------

def test_criterion_11_ehrhard():
    w = find_ehrhard_violation(0.5, 50)
    ok = w is not None and w.margin > 1e-6
    record(11, "Ehrhard counterexample", ok,
           f"margin {w.margin:.4e} at a={tuple(round(x, 3) for x in w.a)}, lambda={w.lam:.3f}" if w else "no witness")


# 12 ------------------------------------------------------------------------

def test_criterion_12_heisenberg():
    rng = np.random.default_rng(12)
    worst_z, fails, closed = math.inf, 0, 0.0
    for _ in range(20):
        A, B = random_heisenberg_box(rng), random_heisenberg_box(rng)
        region = HeisenbergProductRegion(A, B)
        est, err = grid_volume(region, 64)
        closed = max(closed, abs(est - heisenberg_box_product_volume(A, B)) / max(err, 1e-300))
        lhs = est ** (1 / 3)
        sigma = err / (3 * est ** (2 / 3))
        rhs = volume(A).value ** (1 / 3) + volume(B).value ** (1 / 3)
        if lhs - rhs < -3 * sigma:
            fails += 1
        worst_z = min(worst_z, (lhs - rhs) / sigma)
    record(12, "Heisenberg Brunn-Minkowski, exponent 1/3", fails == 0,
           f"20 box pairs on a 64^3 grid, worst margin/sigma {worst_z:.2f}, "
           f"closed-form deviation <= {closed:.2f} boundary-error units")


# 13 ------------------------------------------------------------------------

def test_criterion_13_mean_algebra():
    rep = run_case(mk("MeanHolderFuzz", batch=10_000), RunConfig(seed=0, instances=1))[0]
    d = rep.detail
    ok = rep.status == "pass" and d["holder_worst"] >= -1e-12 and d["ordering_worst"] >= -1e-12
    record(13, "mean algebra fuzz", ok,
           f"{d['checks']} Holder triples and orderings, worst relative slack "
           f"{d['holder_worst']:.2e} / {d['ordering_worst']:.2e}")


if __name__ == "__main__":
    import sys

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
