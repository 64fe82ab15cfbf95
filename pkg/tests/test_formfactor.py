import numpy as np
import pytest
import scipy.integrate
from hypothesis import given
from hypothesis import strategies as st

from ahpp.formfactor import (
    FormFactorModel,
    discriminator,
    empirical_form_factor,
    form_factor_theoretical,
)
from ahpp.sampler import AhConfiguration, LatticeConfiguration, SeededStream, sample_ah_configuration
from ahpp.sine_kernel import sinc_eval
from ahpp.testfunctions import SincFactor, product, sinc_power

ALT, GUE = FormFactorModel.ALT, FormFactorModel.GUE


def _quad_oracle(fhat, model):
    lo, hi = fhat.transform_knots()[[0, -1]]
    pts = list(np.arange(np.ceil(lo), np.floor(hi) + 1)) + list(fhat.transform_knots())
    smooth = scipy.integrate.quad(lambda x: fhat.transform_1d(x) * model.density(x), lo, hi,
                                  points=sorted(set(pts))[:100], limit=500, epsabs=1e-13)[0]
    if model is GUE:
        atoms = [0.0]
    else:
        atoms = [2.0 * k for k in range(int(np.ceil(lo / 2)), int(np.floor(hi / 2)) + 1)]
    return smooth + sum(float(fhat.transform_1d(x)) for x in atoms)


def test_triangle_values():
    tri = sinc_power(1.0, 1)
    assert form_factor_theoretical(tri, ALT) == pytest.approx(4 / 3, abs=1e-14)
    assert form_factor_theoretical(tri, GUE) == pytest.approx(4 / 3, abs=1e-14)


def test_discriminator_values():
    d = discriminator()
    assert form_factor_theoretical(d, ALT) == pytest.approx(8 / 3, abs=1e-14)
    assert form_factor_theoretical(d, GUE) == pytest.approx(2.0, abs=1e-14)
    x = np.linspace(-3, 3, 13)
    assert np.allclose(d(x[:, None]), 2 * np.cos(4 * np.pi * x) * sinc_eval(x) ** 2)


def test_model_densities():
    xi = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 2.25, -3.0])
    assert np.allclose(GUE.density(xi), [0, 0.5, 1, 1, 1, 1, 1])
    assert np.allclose(ALT.density(xi), [0, 0.5, 1, 0.5, 0, 0.25, 1])
    assert list(ALT.atoms(-3.0, 4.5)) == [-2.0, 0.0, 2.0, 4.0]
    assert list(GUE.atoms(0.5, 3.0)) == []


@given(st.floats(0.05, 1.0), st.integers(1, 3), st.floats(0.0, 1.0))
def test_models_agree_inside_unit_band(width, m, frac):
    # half-band m * b = width and centre chosen so the support stays inside [-1, 1]
    nu = frac * (1.0 - width)
    fhat = sinc_power(width / m, m, nu)
    assert form_factor_theoretical(fhat, ALT) == pytest.approx(form_factor_theoretical(fhat, GUE), abs=1e-12)


@pytest.mark.parametrize("b,m,nu", [(0.7, 2, 1.3), (1.0, 1, 2.0), (0.5, 3, 2.6), (0.9, 2, 0.0)])
@pytest.mark.parametrize("model", [ALT, GUE])
def test_theoretical_against_quadrature(b, m, nu, model):
    fhat = sinc_power(b, m, nu, scale=1.5)
    assert form_factor_theoretical(fhat, model) == pytest.approx(_quad_oracle(fhat, model), abs=1e-10)


def test_unsupported_shape():
    with pytest.raises(ValueError):
        form_factor_theoretical(product(SincFactor(), SincFactor()), ALT)
    with pytest.raises(ValueError):
        form_factor_theoretical(lambda x: x, GUE)


def _brute(points, f, lo, hi, outer_lo, outer_hi):
    inside = points[(points >= lo) & (points < hi)]
    outer = inside[(inside >= outer_lo) & (inside < outer_hi)]
    return float(np.sum(f(outer[:, None] - inside[None, :]))) / (outer_hi - outer_lo)


def test_single_point_gives_f0_over_T():
    cfg = LatticeConfiguration(0.5, [7], 20)
    est = empirical_form_factor(cfg, lambda x: sinc_eval(x) ** 2)
    assert est.value == pytest.approx(1.0 / 10.0)


def test_estimator_against_brute_force():
    ah = sample_ah_configuration(400, SeededStream(2))
    f = lambda x: sinc_eval(x) ** 2  # noqa: E731
    pts = ah.base.indices * 0.5
    est = empirical_form_factor(ah, f, margin=0.0, blocks=1)
    assert est.value == pytest.approx(_brute(pts, f, 0, 200, 0, 200), rel=1e-12)
    est = empirical_form_factor(ah, f, T=150.0, margin=20.0, blocks=4)
    assert est.value == pytest.approx(_brute(pts, f, 0, 150, 20, 130), rel=1e-12)
    assert est.stderr > 0
    assert est.margin == 20.0 and est.length == 110.0


def test_shift_does_not_matter():
    base = LatticeConfiguration(0.5, [0, 1, 3, 6, 8, 9], 12)
    f = lambda x: np.cos(x) * sinc_eval(x)  # noqa: E731
    a = empirical_form_factor(base, f).value
    b = empirical_form_factor(AhConfiguration(base, 0.37), f).value
    assert a == b


def test_estimator_errors():
    cfg = LatticeConfiguration(0.5, [1, 2], 10)
    with pytest.raises(ValueError):
        empirical_form_factor(cfg, np.cos, T=6.0)
    with pytest.raises(ValueError):
        empirical_form_factor(cfg, np.cos, margin=2.5)


def test_discriminator_on_half_lattice_doubles_triangle():
    ah = sample_ah_configuration(2000, SeededStream(4))
    d = discriminator()
    a = empirical_form_factor(ah, lambda x: d(x[..., None]), margin=32)
    b = empirical_form_factor(ah, lambda x: sinc_eval(x) ** 2, margin=32)
    assert a.value == pytest.approx(2 * b.value, rel=1e-12)
