import numpy as np
import pytest
import scipy.integrate
from hypothesis import given
from hypothesis import strategies as st

from ahpp.errors import InsufficientDecayError
from ahpp.testfunctions import (
    BandLimitedTestFunction,
    SincFactor,
    describe,
    integral_tail_1d,
    irwin_hall_density,
    lattice_sum_1d,
    product,
    sinc_power,
    zero_function,
)


def _fourier_by_quad(factor, xi, limit=4000.0):
    """cos-weighted quadrature of the even factor; tail beyond ``limit`` dropped."""
    val, _ = scipy.integrate.quad(factor, 0, limit, weight="cos", wvar=2 * np.pi * xi,
                            limit=20000, epsabs=1e-13)
    return 2 * val


@pytest.mark.parametrize("k", [1, 2, 3, 4, 6])
def test_irwin_hall_normalized(k):
    val, _ = scipy.integrate.quad(lambda x: irwin_hall_density(k, x), 0, k, points=list(range(1, k)))
    assert val == pytest.approx(1.0, abs=1e-12)
    assert irwin_hall_density(k, -0.1) == 0.0 and irwin_hall_density(k, k + 0.1) == 0.0


def test_irwin_hall_small_cases():
    assert irwin_hall_density(2, 1.0) == pytest.approx(1.0)
    assert irwin_hall_density(2, 0.5) == pytest.approx(0.5)
    assert irwin_hall_density(3, 1.5) == pytest.approx(0.75)


@pytest.mark.parametrize("b,m,xi", [(0.5, 2, 0.0), (0.5, 2, 0.3), (0.25, 3, 0.1), (1.0, 2, 1.2), (0.3, 4, 0.5)])
def test_transform_against_quadrature(b, m, xi):
    f = SincFactor(b, m)
    assert f.transform(xi) == pytest.approx(_fourier_by_quad(f, xi), abs=1e-8)


def test_sinc_squared_transform_is_triangle():
    f = SincFactor(1.0, 1)
    xi = np.linspace(-1.5, 1.5, 31)
    assert np.allclose(f.transform(xi), np.clip(1 - np.abs(xi), 0, None), atol=1e-15)
    assert f.mass == pytest.approx(1.0)
    assert f.half_band == 1.0


def test_factor_validation():
    for b, m in ((0.0, 1), (-1.0, 2), (1.0, 0), (1.0, 1.5)):
        with pytest.raises(ValueError):
            SincFactor(b, m)


def test_numerator_expansion():
    f = SincFactor(0.7, 3)
    amps, freqs = f.numerator_terms()
    x = np.linspace(-3, 3, 101)
    series = sum(a * np.cos(2 * np.pi * w * x) for a, w in zip(amps, freqs))
    assert np.allclose(series, np.sin(np.pi * 0.7 * x) ** 6, atol=1e-14)


@pytest.mark.parametrize("b,m,nu,a,shift", [
    (0.5, 2, 0.0, 0.5, 0.0), (0.25, 3, 0.2, 0.5, 0.13), (0.8, 2, 0.3, 0.9, 0.0), (0.5, 3, 1.5, 0.5, 0.3),
])
def test_lattice_sum_against_direct_sum(b, m, nu, a, shift):
    f = SincFactor(b, m)
    k = np.arange(-400000, 400001)
    x = k * a - shift
    direct = np.sum(f(x) * np.exp(2j * np.pi * nu * x))
    assert lattice_sum_1d(f, nu, a, shift) == pytest.approx(direct, abs=1e-11)


def test_lattice_sum_of_sinc_squared_exact_tail():
    # a sum_k S(k a)^2 = 1 for a <= 1 (Poisson summation with the triangle)
    for a in (0.25, 0.5, 0.9):
        assert (a * lattice_sum_1d(SincFactor(1, 1), 0.0, a)).real == pytest.approx(1.0, abs=1e-13)


def test_lattice_sum_irrational_needs_decay():
    with pytest.raises(InsufficientDecayError):
        lattice_sum_1d(SincFactor(1.0, 1), 0.0, np.sqrt(0.3))
    val = lattice_sum_1d(SincFactor(1.0, 6), 0.0, np.sqrt(0.3))
    assert np.isfinite(val.real)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("b,m,nu,x0", [(0.5, 2, 0.0, 10.0), (0.25, 3, 0.2, 7.0), (1.0, 2, 1.3, 4.5)])
def test_integral_tail_against_quadrature(b, m, nu, x0):
    f = SincFactor(b, m)
    re = 2 * scipy.integrate.quad(f, x0, 3000, weight="cos", wvar=2 * np.pi * nu, limit=5000,
                                  epsabs=1e-13)[0]
    assert integral_tail_1d(f, nu, x0).real == pytest.approx(re, abs=1e-11)
    assert integral_tail_1d(f, nu, x0).imag == pytest.approx(0.0, abs=1e-12)


def test_integral_tail_oracle_value():
    # multiprecision oscillatory quadrature of the same tail
    assert integral_tail_1d(SincFactor(0.25, 3), 0.2, 7.0).real == pytest.approx(
        7.93828933230114594992e-06, abs=1e-15)


def test_test_function_evaluation():
    eta = product(SincFactor(0.5, 1), SincFactor(0.25, 2), freq=(0.1, 0.2), scale=3.0)
    x = np.array([[0.3, -1.2], [2.0, 0.7]])
    ref = 3.0 * np.sinc(0.5 * x[:, 0]) ** 2 * np.sinc(0.25 * x[:, 1]) ** 4 * np.cos(
        2 * np.pi * (0.1 * x[:, 0] + 0.2 * x[:, 1]))
    assert np.allclose(eta(x), ref, atol=1e-15)
    with pytest.raises(ValueError):
        eta(np.zeros(3))


def test_construction_errors():
    with pytest.raises(ValueError):
        BandLimitedTestFunction(())
    with pytest.raises(ValueError):
        BandLimitedTestFunction((SincFactor(),), (0.1, 0.2))


def test_spectral_boxes_and_bands():
    eta = product(SincFactor(0.25, 2), SincFactor(0.25, 2), freq=(1.5, 1.5))
    assert eta.fourier_boxes() == [[(1.0, 2.0), (1.0, 2.0)], [(-2.0, -1.0), (-2.0, -1.0)]]
    assert eta.avoids_zero_sum()
    assert eta.max_frequency == 2.0
    assert not eta.band_inside(2.0)
    assert eta.band_inside(2.0, closed=True)
    plain = product(SincFactor(0.25, 2), SincFactor(0.25, 2))
    assert not plain.avoids_zero_sum()
    assert len(plain.fourier_boxes()) == 1


def test_exact_integral_and_transform():
    eta = sinc_power(0.5, 2, 0.3, scale=2.0)
    f = SincFactor(0.5, 2)
    assert eta.exact_integral() == pytest.approx(2.0 * f.transform(0.3))
    assert eta.transform_1d(0.0) == pytest.approx(2.0 * f.transform(0.3))
    assert np.allclose(eta.transform_knots(), np.unique(np.r_[np.arange(-1, 1.5, 0.5) + 0.3,
                                                              np.arange(-1, 1.5, 0.5) - 0.3]))
    with pytest.raises(ValueError):
        product(f, f).transform_1d(0.0)


def test_zero_function_and_describe():
    z = zero_function(2)
    assert z.is_zero and z.n == 2
    assert np.all(z(np.ones((3, 2))) == 0.0)
    assert describe(sinc_power(0.5, 2, 0.25, 2.0)) == "2*S(0.5x1)^4*cos(2pi(0.25).x)"


@given(st.floats(0.1, 2.0), st.integers(1, 4), st.sampled_from([1e-4, 1e-6, 1e-9]))
def test_radius_meets_tail_bound(b, m, tol):
    f = SincFactor(b, m)
    r = f.radius_for(tol)
    assert f.tail_bound(r) == pytest.approx(tol * f.mass, rel=1e-9)


@given(st.floats(0.1, 1.5), st.integers(1, 4), st.floats(-2.0, 2.0))
def test_transform_support_is_exact(b, m, xi):
    f = SincFactor(b, m)
    val = f.transform(xi)
    if abs(xi) >= m * b:
        assert val == 0.0
    else:
        assert val >= 0.0
