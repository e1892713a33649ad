import math

import numpy as np
import pytest

from suplift.estimates import Budget
from suplift.measure import Gaussian, Lebesgue, integrate_layered
from suplift.polytope import DifferenceBody, Polytope, difference_body
from suplift.stepfn import LayeredFunction, split_at_threshold
from suplift.supconv import (AffineCombination, GeneralLinear, GridFunction, HeisenbergProduct,
                             HeisenbergProductRegion, HypothesisError, LevelSetLp, SchneiderShift,
                             SupConvolutionSpec, combined_set, grid_volume, heisenberg_box_product_volume,
                             heisenberg_op, integrate_supconv, rasterize, supconv_grid_oracle,
                             supconv_layered)

HALF = SupConvolutionSpec.standard(AffineCombination(0.5), 0.0)


def test_indicator_pair_collapses_to_combination():
    A, B = Polytope.symmetric_box([1, 1]), Polytope.regular_polygon(6, 2.0)
    h = supconv_layered(HALF, [LayeredFunction.indicator(A), LayeredFunction.indicator(B)])
    assert len(h) == 1 and h.max_value == 1.0
    assert h.pieces[0].region.same_set(combined_set(AffineCombination(0.5), [A, B]))


def test_scaled_indicators_take_the_mean_value():
    A = Polytope.segment(0, 1)
    h = supconv_layered(SupConvolutionSpec.standard(AffineCombination(0.25), -0.5),
                        [LayeredFunction.indicator(A, 2.0), LayeredFunction.indicator(A, 3.0)])
    expected = (0.75 * 2.0**-0.5 + 0.25 * 3.0**-0.5) ** -2
    assert h.max_value == pytest.approx(expected, rel=1e-14)


def test_sqrt2_example_and_integral():
    f = LayeredFunction.indicator(Polytope.segment(0, 1), 2.0)
    g = LayeredFunction.indicator(Polytope.segment(0, 2), 1.0)
    h = supconv_layered(HALF, [f, g])
    assert h.max_value == pytest.approx(math.sqrt(2), rel=1e-15)
    assert h.pieces[0].region.same_set(Polytope.segment(0, 1.5))
    val = integrate_supconv(h, Lebesgue(1), Budget.exact()).value
    assert val == pytest.approx(1.5 * math.sqrt(2), rel=1e-14)
    assert val >= 2.0


def test_sqrt2_example_on_grid_oracle():
    s = 1 / 64
    F = rasterize(LayeredFunction.indicator(Polytope.segment(0, 1), 2.0), [0.0], [s], [65])
    G = rasterize(LayeredFunction.indicator(Polytope.segment(0, 2), 1.0), [0.0], [s], [129])
    H = supconv_grid_oracle(HALF, [F, G])
    assert H.values.max() == pytest.approx(math.sqrt(2), rel=1e-14)
    support = H.nodes()[H.values.ravel() > 0, 0]
    assert support.min() == pytest.approx(0.0, abs=1e-12) and support.max() == pytest.approx(1.5, abs=1e-12)


def test_self_combination_of_single_layer_is_identity():
    K = Polytope.regular_polygon(8, 1.0)
    f = LayeredFunction.indicator(K, 1.7, tag="even_unimodal")
    h = supconv_layered(HALF, [f, f])
    X = np.random.default_rng(0).uniform(-1.2, 1.2, (500, 2))
    assert np.array_equal(h.evaluate(X, 1e-9), f.evaluate(X))


def test_self_combination_of_two_layers_exceeds_the_input():
    # mixed layers (A_1, A_2) give sqrt(c_1 c_2) on (A_1 + A_2)/2, which sticks out of A_2
    f = LayeredFunction([(1.0, Polytope.segment(-2, 2)), (1.0, Polytope.segment(-1, 1))], tag="even_unimodal")
    h = supconv_layered(HALF, [f, f])
    assert h(np.array([1.2])) == pytest.approx(math.sqrt(2))
    assert f(np.array([1.2])) == 1.0


def test_zero_input_gives_zero():
    f = LayeredFunction.indicator(Polytope.symmetric_box([1, 1]))
    h = supconv_layered(HALF, [f, LayeredFunction.zero(2)])
    assert len(h) == 0 and integrate_supconv(h, Lebesgue(2), Budget.exact()).value == 0.0
    F = GridFunction(np.zeros(1), np.ones(1) / 8, np.zeros(9))
    assert not supconv_grid_oracle(HALF, [F, F]).values.any()


def test_nested_pieces_match_layered_integral():
    f = LayeredFunction([(1.0, Polytope.symmetric_box([2, 2])), (0.5, Polytope.symmetric_box([1, 1]))])
    h = supconv_layered(SupConvolutionSpec.standard(AffineCombination(0.5), -math.inf), [f, f])
    got = integrate_supconv(h, Lebesgue(2), Budget.exact()).value
    assert got == pytest.approx(integrate_layered(Lebesgue(2), f, Budget.exact()).value, rel=1e-12)


def test_combined_set_examples():
    K = Polytope([[0, 0], [1, 0], [0, 1]])
    D = combined_set(SchneiderShift(1), [K, K])
    assert D.same_set(difference_body(K, 1).polytope)
    D2 = combined_set(SchneiderShift(2), [K, K, K])
    assert D2.same_set(DifferenceBody(K, 2).polytope, 1e-9)
    e = Polytope([[0.0, 0.0, 0.0]])
    region = combined_set(HeisenbergProduct(), [e, e])
    assert region.contains_points(np.zeros((1, 3)))[0]
    assert not region.contains_points(np.array([[0.0, 0.0, 0.1]]))[0]


def test_heisenberg_op_examples():
    x = (0.3, -1.2, 2.0)
    assert heisenberg_op("product", x, heisenberg_op("inverse", x)) == (0.0, 0.0, 0.0)
    assert heisenberg_op("product", (0, 0, 0), x) == x
    assert heisenberg_op("product", (1, 0, 0), (0, 1, 0)) == (1.0, 1.0, 0.5)
    assert heisenberg_op("product", (0, 1, 0), (1, 0, 0)) == (1.0, 1.0, -0.5)


def test_heisenberg_box_membership_matches_brute_force():
    A = Polytope.box([-0.5, 0.0, -0.2], [0.4, 0.7, 0.3])
    B = Polytope.box([0.1, -0.6, 0.0], [0.9, 0.2, 0.5])
    exact = HeisenbergProductRegion(A, B)
    approx = HeisenbergProductRegion(Polytope(A.vertices + 0.0), B)
    approx.exact, approx._xs = False, None
    lo, hi = A.bounding_box()
    axes = [np.linspace(l, h, 30) for l, h in zip(lo, hi)]
    approx._xs = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    rng = np.random.default_rng(1)
    blo, bhi = exact.bounding_box()
    Z = blo + (bhi - blo) * rng.random((400, 3))
    a, b = exact.contains_points(Z, 0.0), approx.contains_points(Z, 0.0)
    # the sampled version is an inner approximation
    assert not np.any(b & ~a)
    assert (a == b).mean() > 0.95


def test_heisenberg_box_volume_closed_form_vs_sampling():
    A = Polytope.box([-0.5, 0.0, -0.2], [0.4, 0.7, 0.3])
    B = Polytope.box([0.1, -0.6, 0.0], [0.9, 0.2, 0.5])
    region = HeisenbergProductRegion(A, B)
    rng = np.random.default_rng(2)
    lo, hi = region.bounding_box()
    Z = lo + (hi - lo) * rng.random((400_000, 3))
    p = region.contains_points(Z, 0.0).mean()
    box = float(np.prod(hi - lo))
    se = box * math.sqrt(p * (1 - p) / len(Z))
    assert abs(box * p - heisenberg_box_product_volume(A, B)) <= 4 * se
    est, err = grid_volume(region, 48)
    assert abs(est - region.volume()) <= err


def test_grid_volume_of_polygon():
    P = Polytope.regular_polygon(40, 1.0)
    est, err = grid_volume(P, 64)
    assert abs(est - 20 * math.sin(2 * math.pi / 40)) <= err


def test_heisenberg_grid_oracle_contains_commutative_shadow():
    s = 0.05
    box = Polytope.box([-0.1] * 3, [0.1] * 3)
    F = rasterize(LayeredFunction.indicator(box), [-0.1] * 3, [s] * 3, [5, 5, 5])
    H = supconv_grid_oracle(SupConvolutionSpec.standard(HeisenbergProduct(), 0.0), [F, F])
    nodes = H.nodes()[H.values.ravel() > 0]
    assert nodes[:, 0].min() == pytest.approx(-0.2) and nodes[:, 0].max() == pytest.approx(0.2)
    assert nodes[:, 1].min() == pytest.approx(-0.2) and nodes[:, 1].max() == pytest.approx(0.2)


def test_grid_oracle_agrees_with_layered_within_a_cell():
    rng = np.random.default_rng(5)
    for _ in range(5):
        A = Polytope(rng.uniform(-1, 1, (6, 2)))
        B = Polytope(rng.uniform(-1, 1, (6, 2)))
        f, g = LayeredFunction.indicator(A, 1.5), LayeredFunction.indicator(B, 0.7)
        spec = SupConvolutionSpec.standard(AffineCombination(0.5), 0.0)
        s = 1 / 32
        F = rasterize(f, [-1, -1], [s, s], [65, 65])
        G = rasterize(g, [-1, -1], [s, s], [65, 65])
        H = supconv_grid_oracle(spec, [F, G])
        h = supconv_layered(spec, [f, g])
        Z = H.nodes()
        exact = h.evaluate(Z, 0.0)
        grid = H.values.ravel()
        # grid sup never exceeds the exact value; misses are within one cell of the boundary
        assert np.all(grid <= exact + 1e-12)
        miss = Z[(grid < exact - 1e-12)]
        if len(miss):
            region = h.pieces[0].region
            assert np.all(~region.contains_points(miss, -s * math.sqrt(2)))


def test_general_linear_indicator_is_linear_image_sum():
    fam = GeneralLinear.affine(2, 0.3)
    A, B = Polytope.symmetric_box([1, 0.5]), Polytope.regular_polygon(5, 1.0)
    spec = SupConvolutionSpec.standard(fam, 0.0)
    h = supconv_layered(spec, [LayeredFunction.indicator(A), LayeredFunction.indicator(B)])
    assert h.pieces[0].region.same_set(combined_set(AffineCombination(0.3), [A, B]))


def test_level_set_family_requires_even_inputs():
    spec = SupConvolutionSpec.standard(LevelSetLp(0.5, 0.5), 0.0)
    tri = LayeredFunction.indicator(Polytope([[-1, -1], [2, -1], [-1, 2]]))
    with pytest.raises(HypothesisError):
        supconv_layered(spec, [tri, tri])


@pytest.mark.parametrize("family", [AffineCombination(0.4), SchneiderShift(1), LevelSetLp(0.5, 0.5)])
def test_restricted_superadditivity(family):
    rng = np.random.default_rng(11)
    spec = SupConvolutionSpec.standard(family, 0.0)
    for _ in range(3):
        K = Polytope.regular_polygon(6, 1.0, rng.uniform(0, 1))
        f = LayeredFunction([(0.6, K.scale(1.4)), (0.8, K), (0.5, K.scale(0.5))], tag="even_unimodal")
        g = LayeredFunction([(1.0, K.scale(1.2)), (0.4, K.scale(0.7))], tag="even_unimodal")
        sf, sg = split_at_threshold(f, 0.9), split_at_threshold(g, 0.9)
        fs_low, fs_high = [sf.minus, sg.minus], [sf.plus, sg.plus]
        whole = supconv_layered(spec, [f, g])
        lo, hi = supconv_layered(spec, fs_low), supconv_layered(spec, fs_high)
        box_lo, box_hi = whole.bounding_box()
        Z = box_lo + (box_hi - box_lo) * rng.random((1000, whole.dim))
        assert np.all(whole.evaluate(Z, 1e-9) >= lo.evaluate(Z, 1e-9) + hi.evaluate(Z, 1e-9) - 1e-12)


def test_monotone_in_inputs():
    K = Polytope.regular_polygon(7, 1.0)
    f = LayeredFunction([(1.0, K), (0.5, K.scale(0.5))])
    g = LayeredFunction([(1.2, K.scale(1.1)), (0.6, K.scale(0.6))])
    h_small = supconv_layered(HALF, [f, f])
    h_big = supconv_layered(HALF, [g, g])
    Z = np.random.default_rng(3).uniform(-1.2, 1.2, (1000, 2))
    assert np.all(h_big.evaluate(Z) >= h_small.evaluate(Z))


def test_integration_under_gaussian_brackets_the_exact_value():
    f = LayeredFunction.indicator(Polytope.symmetric_box([1, 1]))
    h = supconv_layered(HALF, [f, f])
    r = integrate_supconv(h, Gaussian(2), Budget.monte_carlo(2 * 10**5, seed=0))
    assert abs(r.value - math.erf(1 / math.sqrt(2)) ** 2) <= 3 * r.stderr


def test_grid_function_dump_and_load(tmp_path):
    G = rasterize(LayeredFunction.indicator(Polytope.segment(0, 1), 2.0), [0.0], [0.25], [6])
    G.dump(tmp_path / "g.bin")
    H = GridFunction.load(tmp_path / "g.bin")
    assert np.array_equal(G.values, H.values) and np.array_equal(G.lo, H.lo)
