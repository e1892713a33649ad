import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suplift.barthe import (BartheInstance, PDPoint, constant_E, normalize_instance, objective_ratio,
                            random_pd_floor, reverse_bl_geometric_check)
from suplift.estimates import Budget
from suplift.measure import Lebesgue
from suplift.polytope import Polytope, linear_image_sum, volume
from suplift.stepfn import LayeredFunction
from suplift.supconv import GeneralLinear, SupConvolutionSpec, integrate_supconv, supconv_layered

LINES = BartheInstance.lines_120()
AXES = BartheInstance.coordinate_projections(2)
AMGM = BartheInstance(1, (np.eye(1), np.eye(1)), (0.5, 0.5))


def scalars(*ms):
    return PDPoint.from_matrices([[[m]] for m in ms])


def test_instance_validation():
    with pytest.raises(ValueError):
        BartheInstance(2, (np.eye(2)[:1], np.eye(2)[:1]), (1.0, 1.0))  # common kernel
    with pytest.raises(ValueError):
        BartheInstance(2, (np.eye(2)[:1], np.eye(2)[1:]), (1.0, 0.5))  # scaling
    assert LINES.is_geometric() and AXES.is_geometric()


def test_objective_examples():
    assert objective_ratio(LINES, PDPoint.identity(LINES)) == pytest.approx(1.0, abs=1e-14)
    for m1, m2 in ((1.0, 1.0), (0.3, 7.0), (12.0, 0.01)):
        assert objective_ratio(AXES, scalars(m1, m2)) == pytest.approx(1.0, rel=1e-13)


def test_am_gm_example():
    rng = np.random.default_rng(0)
    for m1, m2 in rng.uniform(0.01, 10, (200, 2)):
        got = objective_ratio(AMGM, scalars(m1, m2))
        assert got == pytest.approx((m1 + m2) / 2 / math.sqrt(m1 * m2), rel=1e-12)
        assert got >= 1 - 1e-15
    assert objective_ratio(AMGM, scalars(3.0, 3.0)) == pytest.approx(1.0, abs=1e-15)


def test_constant_examples():
    for inst in (AXES, AMGM):
        res = constant_E(inst, starts=3, seed=0)
        assert res.E == pytest.approx(1.0, abs=1e-9)


def test_lines_instance_is_sound():
    res = constant_E(LINES, starts=4, seed=1)
    assert res.objective <= objective_ratio(LINES, PDPoint.identity(LINES)) + 1e-12
    assert res.objective <= 1 + 1e-6
    floor = random_pd_floor(LINES, 10**4, seed=2)
    assert floor >= res.objective - 1e-6
    assert len(res.starts) == 4


def test_determinism():
    a = constant_E(BartheInstance.random(3), starts=3, seed=7)
    b = constant_E(BartheInstance.random(3), starts=3, seed=7)
    assert a.E == b.E


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.01, 100))
def test_objective_invariant_under_global_scaling(seed, lam):
    inst = BartheInstance.random(seed % 50, 3, 4)
    rng = np.random.default_rng(seed)
    Ms = [np.atleast_2d(rng.uniform(0.2, 3.0)) for _ in range(inst.m)]
    base = objective_ratio(inst, PDPoint.from_matrices(Ms))
    scaled = objective_ratio(inst, PDPoint.from_matrices([lam * M for M in Ms]))
    assert scaled == pytest.approx(base, rel=1e-10)


def test_box_check_is_equality():
    rep = reverse_bl_geometric_check(AXES, [Polytope.segment(0, 2.0), Polytope.segment(-1, 0.5)], 1.0)
    assert rep.lhs == pytest.approx(3.0, rel=1e-14) and rep.rhs == pytest.approx(3.0, rel=1e-14)
    assert rep.passed


def test_scaling_one_factor_of_a_product_instance():
    bodies = [Polytope.segment(0, 2.0), Polytope.segment(-1, 0.5)]
    base = reverse_bl_geometric_check(AXES, bodies, 1.0)
    lam = 2.5
    bigger = reverse_bl_geometric_check(AXES, [bodies[0].scale(lam), bodies[1]], 1.0)
    assert bigger.lhs / base.lhs == pytest.approx(lam, rel=1e-12)
    assert bigger.rhs / base.rhs == pytest.approx(lam, rel=1e-12)
    assert bigger.margin == pytest.approx(lam * base.margin, abs=1e-12)


def test_lines_instance_scaling():
    E = constant_E(LINES, starts=2, seed=0).E
    bodies = [Polytope.segment(-1, 1)] * 3
    base = reverse_bl_geometric_check(LINES, bodies, E)
    assert base.passed
    lam = 2.5
    # the right side scales by lam^{c_1 n_1}; the sum of images is not a product, so the left side need not
    one = reverse_bl_geometric_check(LINES, [bodies[0].scale(lam)] + bodies[1:], E)
    assert one.rhs / base.rhs == pytest.approx(lam ** LINES.coeffs[0], rel=1e-12)
    assert one.passed
    # scaling every body scales both sides by lam^n
    every = reverse_bl_geometric_check(LINES, [A.scale(lam) for A in bodies], E)
    assert every.lhs / base.lhs == pytest.approx(lam**2, rel=1e-12)
    assert every.rhs / base.rhs == pytest.approx(lam**2, rel=1e-12)


def test_normalize_examples():
    assert normalize_instance(AXES) == ((0.5, 0.5), 2.0)
    t, power = normalize_instance(LINES)
    assert t == pytest.approx((1 / 3,) * 3) and power == pytest.approx(2.0)
    single = BartheInstance(1, (np.eye(1),), (1.0,))
    assert normalize_instance(single) == ((1.0,), 1.0)


def test_json_round_trip():
    inst = BartheInstance.random(4, 3, 4)
    back = BartheInstance.from_json(inst.to_json())
    assert back.coeffs == inst.coeffs
    assert all(np.array_equal(a, b) for a, b in zip(back.maps, inst.maps))


def test_functional_route_matches_geometric_sum():
    bodies = [Polytope.segment(-0.5, 1.0), Polytope.segment(-1, 1), Polytope.segment(-0.2, 0.3)]
    fam = GeneralLinear(tuple(LINES.adjoints), LINES.coeffs)
    spec = SupConvolutionSpec.standard(fam, 0.0)
    h = supconv_layered(spec, [LayeredFunction.indicator(A) for A in bodies])
    got = integrate_supconv(h, Lebesgue(2), Budget.exact()).value
    want = volume(linear_image_sum(LINES.adjoints, LINES.coeffs, bodies)).value
    assert got == pytest.approx(want, rel=1e-12)


def test_enlarging_a_body_does_not_shrink_the_sum():
    small = [Polytope.segment(-0.5, 0.5)] * 3
    big = [Polytope.segment(-0.7, 0.9)] + small[1:]
    a = volume(linear_image_sum(LINES.adjoints, LINES.coeffs, small)).value
    b = volume(linear_image_sum(LINES.adjoints, LINES.coeffs, big)).value
    assert b >= a

