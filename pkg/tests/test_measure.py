import math

import numpy as np
import pytest
from scipy import integrate

from suplift.estimates import Budget
from suplift.measure import (ConcaveWeight, Gaussian, HomogeneousPotential, Lebesgue,
                             MeasureConfigurationError, Potential, RadialLogConcave, RadialProfile,
                             WeightedConcave, density_at, integrate_layered, layer_measures,
                             measure_from_json, measure_of_polytope, total_mass)
from suplift.polytope import Polytope
from suplift.stepfn import LayeredFunction

# quadrature oracle for the standard normal mass of [-1, 1], frozen
GAUSS_1 = 0.682689492137086


def test_frozen_gaussian_oracle():
    val, _ = integrate.quad(lambda x: math.exp(-x * x / 2) / math.sqrt(2 * math.pi), -1, 1)
    assert val == pytest.approx(GAUSS_1, abs=1e-14)


def test_density_examples():
    assert density_at(Gaussian(2), [0, 0]) == pytest.approx(1 / (2 * math.pi))
    assert density_at(Lebesgue(3), [5, -1, 2]) == 1.0
    wc = WeightedConcave(2, weight=ConcaveWeight("phi_linear_cap", {"R": 1.0, "q": 1}))
    assert density_at(wc, [0.8, 0.8]) == 0.0
    assert density_at(wc, [0.2, 0.1]) == pytest.approx(0.7)


def test_measure_of_polytope_examples():
    assert measure_of_polytope(Lebesgue(2), Polytope.symmetric_box([1, 1]), Budget.exact()).value == 4.0
    r = measure_of_polytope(Gaussian(1), Polytope.segment(-1, 1), Budget.monte_carlo(10**6, seed=1))
    assert abs(r.value - GAUSS_1) <= 3 * r.stderr
    big = measure_of_polytope(Gaussian(3), Polytope.symmetric_box([10] * 3), Budget.monte_carlo(10**5, seed=2))
    assert abs(big.value - 1.0) <= max(3 * big.stderr, 1e-12)


def test_exact_budget_rejected_for_sampled_measures():
    with pytest.raises(ValueError):
        measure_of_polytope(Gaussian(2), Polytope.symmetric_box([1, 1]), Budget.exact())


def test_integrate_layered_examples():
    sq = Polytope.symmetric_box([1, 1])
    f = LayeredFunction([(2.0, sq)])
    assert integrate_layered(Lebesgue(2), f, Budget.exact()).value == 8.0
    g = LayeredFunction([(1.0, Polytope.symmetric_box([2, 2])), (1.0, sq)])
    assert integrate_layered(Lebesgue(2), g, Budget.exact()).value == 20.0
    r = integrate_layered(Gaussian(1), LayeredFunction([(1.0, Polytope.segment(-1, 1))]),
                          Budget.monte_carlo(10**6, seed=5))
    assert abs(r.value - GAUSS_1) <= 3 * r.stderr


def test_layered_integral_matches_layer_sum_under_sampling():
    g = LayeredFunction([(1.0, Polytope.symmetric_box([2, 2])), (0.5, Polytope.symmetric_box([1, 1]))])
    b = Budget.monte_carlo(4 * 10**5, seed=7)
    whole = integrate_layered(Gaussian(2), g, b)
    parts = layer_measures(Gaussian(2), g, b)
    # layers share the sample stream: hit counts add up
    assert whole.value == pytest.approx(1.0 * parts[0].value + 0.5 * parts[1].value, rel=1e-12)
    exact = math.erf(2 / math.sqrt(2)) ** 2 + 0.5 * math.erf(1 / math.sqrt(2)) ** 2
    assert abs(whole.value - exact) <= 3 * whole.stderr


def test_radial_profile_checks():
    RadialLogConcave(2, RadialProfile("w_softplus", {"a": 1.0, "p": 1.5}))
    with pytest.raises(MeasureConfigurationError):
        # a decreasing profile is rejected
        RadialLogConcave(2, _Decreasing())


class _Decreasing(RadialProfile):
    def __init__(self):
        object.__setattr__(self, "kind", "w_power")
        object.__setattr__(self, "params", {"a": 1.0, "p": 1.0})

    def __call__(self, r):
        return -np.asarray(r, dtype=float)


def test_homogeneous_potential_mass():
    m = HomogeneousPotential(2, Potential("V_norm_p", {"a": 1.0, "q": 2.0, "s": 2.0}))
    r = measure_of_polytope(m, Polytope.symmetric_box([6, 6]), Budget.monte_carlo(4 * 10**5, seed=3))
    assert abs(r.value - math.pi) <= 3 * r.stderr  # ∫ exp(-|x|^2) = pi
    with pytest.raises(ValueError):
        Potential("V_norm_p", {"s": 1.0})


def test_weighted_concave_total_mass():
    m = WeightedConcave(2, weight=ConcaveWeight("phi_linear_cap", {"R": 1.0, "q": "inf"}), beta=1.0)
    r = total_mass(m, Budget.monte_carlo(4 * 10**5, seed=4))
    # ∫_{[-1,1]^2} (1 - max|x_i|) = 4/3
    assert abs(r.value - 4 / 3) <= 3 * r.stderr


def test_measure_json_round_trip():
    for m in (Lebesgue(2), Gaussian(3), RadialLogConcave(2),
              HomogeneousPotential(2, Potential("V_norm_p", {"q": math.inf, "s": 3.0})),
              WeightedConcave(2, Gaussian(2), ConcaveWeight("phi_constant", {"c": 2.0, "R": 1.0}), 2.0)):
        assert measure_from_json(m.to_json()) == m
