import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ahpp import catalog
from ahpp.correlations import (
    QuadratureSpec,
    SineDeterminant,
    agreement_expected,
    ah_npoint_expectation,
    alias_sum_1d,
    bandlimited_agreement_check,
    continuous_correlation_integral,
    continuous_integral,
    discrete_correlation_sum,
    offdiagonal_vanishing_check,
)
from ahpp.errors import InsufficientDecayError, QuadratureError
from ahpp.testfunctions import SincFactor, product, sinc_power, zero_function

points = st.lists(st.floats(-50, 50), min_size=3, max_size=3)


def _brute_lattice(eta, a, radius):
    k = np.arange(-radius, radius + 1) * a
    grids = np.meshgrid(*([k] * eta.n), indexing="ij")
    pts = np.stack(grids, axis=-1)
    return a**eta.n * float(np.sum(eta(pts) * SineDeterminant(eta.n)(pts)))


def _brute_integral_2d(eta, half_width=40.0, nodes=12):
    t, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.arange(-half_width, half_width, 1.0)
    x = (edges[:, None] + (t[None, :] + 1) / 2).ravel()
    wt = np.tile(w / 2, edges.size)
    total = 0.0
    for i in range(0, x.size, 120):
        xs = x[i:i + 120]
        pts = np.stack(np.meshgrid(xs, x, indexing="ij"), axis=-1)
        vals = eta(pts) * SineDeterminant(2)(pts)
        total += float(wt[i:i + 120] @ vals @ wt)
    return total


def test_sine_determinant_values():
    d2 = SineDeterminant(2)
    assert d2(np.array([0.0, 0.5])) == pytest.approx(1 - 4 / np.pi**2)
    assert d2(np.array([0.0, 1.0])) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        d2(np.zeros(3))
    with pytest.raises(ValueError):
        SineDeterminant(0)


@given(points)
def test_sine_determinant_vanishes_on_coincidence(x):
    assert SineDeterminant(2)(np.array([x[0], x[0]])) == 0.0
    assert SineDeterminant(3)(np.array([x[0], x[1], x[0]])) == pytest.approx(0.0, abs=1e-15)


@given(points, st.floats(-100, 100))
def test_sine_determinant_translation_invariant(x, t):
    x = np.array(x)
    for n in (1, 2, 3):
        d = SineDeterminant(n)
        assert abs(d(x[:n] + t) - d(x[:n])) <= 1e-12


def test_discrete_sum_n1_is_lattice_sum():
    eta = sinc_power(0.5, 2, 0.3)
    k = np.arange(-100000, 100001) * 0.5
    ref = 0.5 * np.sum(eta(k[:, None]))
    assert discrete_correlation_sum(eta, 0.5) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("eta,a", [
    (product(SincFactor(0.5, 3), SincFactor(0.5, 3), freq=(0.2, -0.1)), 0.5),
    (product(SincFactor(0.25, 3), SincFactor(0.5, 4)), 0.9),
    (product(SincFactor(0.5, 2), SincFactor(0.5, 2), freq=(1.5, 1.5), scale=2.0), 0.5),
])
def test_discrete_sum_n2_against_brute_force(eta, a):
    radius = 300
    assert discrete_correlation_sum(eta, a, radius=radius) == pytest.approx(
        _brute_lattice(eta, a, radius), abs=2e-5)


def test_discrete_sum_n3_against_brute_force():
    eta = product(SincFactor(0.5, 3), SincFactor(0.5, 3), SincFactor(0.5, 3), freq=(0.2, -0.1, 0.05))
    # identity term uses exact tails, the rest is truncated at the same radius
    assert discrete_correlation_sum(eta, 0.5, radius=40) == pytest.approx(
        _brute_lattice(eta, 0.5, 40), abs=1e-8)


def test_continuous_n1_is_exact_integral():
    for eta in catalog.one_dim_family():
        assert continuous_correlation_integral(eta) == pytest.approx(eta.exact_integral(), abs=1e-10)


def test_continuous_n2_against_tensor_quadrature():
    eta = product(SincFactor(0.5, 3), SincFactor(0.5, 3), freq=(0.2, -0.1))
    res = continuous_integral(eta)
    assert res.error_estimate < 1e-9
    assert res.value == pytest.approx(_brute_integral_2d(eta), abs=1e-6)


def test_continuous_n3_matches_lattice_sum_when_band_limited():
    eta = product(SincFactor(0.25, 3), SincFactor(0.25, 3), SincFactor(0.25, 3))
    quad = QuadratureSpec(rel_tol=1e-6, nodes=10, refine=4, tol=1e-6)
    assert continuous_correlation_integral(eta, quad) == pytest.approx(
        discrete_correlation_sum(eta, 0.5, rel_tol=1e-6), abs=1e-6)


def test_dimension_and_decay_limits():
    f = SincFactor(0.5, 3)
    with pytest.raises(ValueError):
        discrete_correlation_sum(product(f, f, f, f), 0.5)
    with pytest.raises(InsufficientDecayError):
        continuous_correlation_integral(product(SincFactor(0.75, 2), SincFactor(0.75, 2)))
    with pytest.raises(QuadratureError):
        continuous_correlation_integral(product(f, f), QuadratureSpec(nodes=2, refine=1, panel=8.0))


def test_zero_function_everywhere():
    z = zero_function(2)
    assert discrete_correlation_sum(z, 0.5) == 0.0
    assert continuous_correlation_integral(z) == 0.0
    assert ah_npoint_expectation(z) == 0.0


@pytest.mark.parametrize("eta", catalog.two_dim_family())
def test_agreement_at_half(eta):
    rep = bandlimited_agreement_check(eta, 0.5, 1e-4)
    assert rep.expected_pass and rep.passed
    assert rep.as_dict()["abs_diff"] < 1e-9


def test_agreement_fails_beyond_half():
    rep = bandlimited_agreement_check(catalog.sharpness_case(), 0.9, 1e-4)
    assert not rep.expected_pass and not rep.passed
    assert rep.abs_diff > 1e-3


def test_agreement_expected_rules():
    small = product(SincFactor(0.2, 3), SincFactor(0.2, 3))
    assert agreement_expected(small, 0.5)
    assert not agreement_expected(small, 0.9)  # the identity needs a <= 1/2 for n >= 2
    assert agreement_expected(sinc_power(0.9, 1), 0.9)
    assert not agreement_expected(sinc_power(0.6, 2), 0.9)


@given(st.integers(4, 20), st.integers(1, 3), st.integers(0, 15), st.integers(6, 20))
def test_defect_equals_alias_sum(b20, m, nu10, a20):
    # rational parameters keep the lattice tails summable in closed form
    eta, a = sinc_power(b20 / 20, m, nu10 / 10), a20 / 20
    rep = bandlimited_agreement_check(eta, a, 1e-8)
    assert rep.discrete - rep.continuous == pytest.approx(alias_sum_1d(eta, a), abs=1e-8)


@pytest.mark.parametrize("eta", catalog.one_dim_family())
def test_ah_one_point_is_integral(eta):
    assert ah_npoint_expectation(eta) == pytest.approx(eta.exact_integral(), abs=1e-10)


@pytest.mark.parametrize("eta", catalog.two_dim_family())
def test_ah_two_point_matches_sine_integral(eta):
    assert ah_npoint_expectation(eta) == pytest.approx(continuous_correlation_integral(eta), abs=1e-8)


def test_ah_shift_average_independent_of_node_count():
    eta = product(SincFactor(0.5, 2), SincFactor(0.5, 2), freq=(0.7, 0.4))
    assert ah_npoint_expectation(eta, t_quadrature=12) == pytest.approx(
        ah_npoint_expectation(eta, t_quadrature=20), abs=1e-12)


@pytest.mark.parametrize("eta", catalog.off_diagonal_family())
def test_offdiagonal_vanishes(eta):
    assert eta.avoids_zero_sum()
    assert abs(offdiagonal_vanishing_check(eta)) <= (1e-8 if eta.n == 1 else 1e-6)


def test_control_case_is_not_small():
    assert abs(offdiagonal_vanishing_check(catalog.control_case())) > 0.1
