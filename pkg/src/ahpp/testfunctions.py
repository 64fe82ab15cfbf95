"""Band-limited test functions built from powers of the sine kernel.

A factor ``S(b x)^(2m)`` has Fourier transform equal to the density of a sum
of ``2m`` independent uniforms on ``[-b/2, b/2]``, so its spectrum is exactly
``[-m b, m b]`` and it decays like ``|x|^(-2m)``.  A test function on R^n is

    eta(x) = scale * prod_i S(b_i x_i)^(2 m_i) * cos(2 pi nu . x)

whose spectrum is the box ``prod [-m_i b_i, m_i b_i]`` translated to
``+nu`` and ``-nu``.  Exact Schwartz band-limited functions cannot be
represented finitely; the polynomial decay here is the price of an exactly
known compact spectrum, and all truncation radii are derived from it.

Internally ``eta = Re(scale * prod_i h_i(x_i))`` with complex components
``h_i(x) = S(b_i x)^(2 m_i) exp(2 pi i nu_i x)``, which keeps every
correlation sum separable.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, lcm

import numpy as np
import scipy.special

from .errors import InsufficientDecayError
from .sine_kernel import sinc_eval


def irwin_hall_density(k: int, x):
    """Density of the sum of ``k`` independent U(0, 1) variables."""
    x = np.asarray(x, dtype=float)
    if k == 1:
        return np.where((x >= 0) & (x <= 1), 1.0, 0.0)
    out = np.zeros_like(x)
    for j in range(k + 1):
        out += (-1) ** j * comb(k, j) * np.clip(x - j, 0.0, None) ** (k - 1)
    out /= factorial(k - 1)
    return np.where((x < 0) | (x > k), 0.0, out)


@dataclass(frozen=True)
class SincFactor:
    """``x -> S(b x)^(2m)``."""

    b: float = 1.0
    m: int = 1

    def __post_init__(self):
        if self.b <= 0 or int(self.m) != self.m or self.m < 1:
            raise ValueError("need b > 0 and integer m >= 1")

    def __call__(self, x):
        return sinc_eval(self.b * np.asarray(x, dtype=float)) ** (2 * self.m)

    @property
    def half_band(self) -> float:
        return self.m * self.b

    def transform(self, xi):
        xi = np.asarray(xi, dtype=float)
        return irwin_hall_density(2 * self.m, xi / self.b + self.m) / self.b

    @property
    def mass(self) -> float:
        """``integral of S(b x)^(2m)``; the factor is non-negative."""
        return float(self.transform(0.0))

    def tail_bound(self, x: float) -> float:
        """Bound on the integral of the factor over ``|t| > x``."""
        p = 2 * self.m
        return 2.0 / ((np.pi * self.b) ** p * (p - 1) * x ** (p - 1))

    def radius_for(self, rel_tol: float) -> float:
        """Smallest ``x`` with ``tail_bound(x) <= rel_tol * mass``."""
        p = 2 * self.m
        return (2.0 / ((np.pi * self.b) ** p * (p - 1) * rel_tol * self.mass)) ** (1.0 / (p - 1))

    def numerator_terms(self):
        """``sin(pi b x)^(2m)`` as ``sum amp * cos(2 pi f x)``; returns (amp, f)."""
        m = self.m
        amps = [comb(2 * m, m) / 4**m]
        freqs = [0.0]
        for j in range(m):
            amps.append(2 * (-1) ** (m - j) * comb(2 * m, j) / 4**m)
            freqs.append((m - j) * self.b)
        return np.array(amps), np.array(freqs)


def _rational(x: float, max_den: int = 4096):
    f = Fraction(x).limit_denominator(max_den)
    return f if abs(float(f) - x) < 1e-12 else None


def _lattice_period(values) -> int | None:
    period = 1
    for v in values:
        f = _rational(v)
        if f is None:
            return None
        period = lcm(period, f.denominator)
    return period


def lattice_sum_1d(factor: SincFactor, nu: float, a: float, shift: float = 0.0,
                   direct: int = 4096) -> complex:
    """``sum_k h(k a - shift)`` over all integers ``k`` for ``h = factor * e(nu x)``.

    Sites with ``|k| <= direct`` are summed directly.  Both tails are summed
    exactly through Hurwitz zeta values when the numerator is periodic on the
    lattice (``b a`` and ``nu a`` rational); otherwise the envelope bound must
    already be below 1e-13 of the mass.
    """
    k = np.arange(-direct, direct + 1, dtype=float)
    x = k * a - shift
    body = np.sum(factor(x) * np.exp(2j * np.pi * nu * x))
    p = 2 * factor.m
    period = _lattice_period([factor.b * a, nu * a])
    if period is None:
        if factor.tail_bound(direct * a - abs(shift)) / a > 1e-13 * factor.mass:
            raise InsufficientDecayError("non-periodic lattice tail too heavy to truncate")
        return complex(body)
    theta = np.pi * factor.b * a
    r = np.arange(period, dtype=float)
    j = direct + 1 + r
    s = shift / a
    # k = j on the right, k = -j on the left
    xr = j * a - shift
    xl = -j * a - shift
    num_r = np.sin(np.pi * factor.b * xr) ** p * np.exp(2j * np.pi * nu * xr)
    num_l = np.sin(np.pi * factor.b * xl) ** p * np.exp(2j * np.pi * nu * xl)
    zr = scipy.special.zeta(p, (j - s) / period)
    zl = scipy.special.zeta(p, (j + s) / period)
    tail = (np.sum(num_r * zr) + np.sum(num_l * zl)) / (theta * period) ** p
    return complex(body + tail)


def _fourier_tail(p: int, x0: float, omega: float) -> complex:
    """``integral_{x0}^inf exp(i omega x) x^(-p) dx`` in closed form.

    Integration by parts lowers ``p`` one step at a time down to the cosine
    and sine integrals at ``p = 1``.
    """
    if omega == 0.0:
        return complex(x0 ** (1 - p) / (p - 1))
    w = abs(omega)
    si, ci = scipy.special.sici(w * x0)
    val = complex(-ci, np.pi / 2 - si)
    phase = np.exp(1j * w * x0)
    for q in range(2, p + 1):
        val = (phase * x0 ** (1 - q) + 1j * w * val) / (q - 1)
    return val if omega > 0 else val.conjugate()


def integral_tail_1d(factor: SincFactor, nu: float, x0: float) -> complex:
    """``integral over |x| > x0`` of ``factor(x) exp(2 pi i nu x)``, exactly."""
    amps, freqs = factor.numerator_terms()
    p = 2 * factor.m
    total = 0.0 + 0.0j
    for amp, f in zip(amps, freqs):
        for sgn_side in (1.0, -1.0):
            # on the left substitute x -> -x: exp(-2 pi i nu x)
            w = 2 * np.pi * nu * sgn_side
            if f == 0.0:
                total += amp * _fourier_tail(p, x0, w)
            else:
                total += 0.5 * amp * (_fourier_tail(p, x0, w + 2 * np.pi * f)
                                      + _fourier_tail(p, x0, w - 2 * np.pi * f))
    return total / (np.pi * factor.b) ** p


@dataclass(frozen=True)
class BandLimitedTestFunction:
    factors: tuple[SincFactor, ...]
    freq: tuple[float, ...] = ()
    scale: float = 1.0

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ValueError("need at least one factor")
        freq = tuple(float(v) for v in self.freq) or (0.0,) * len(factors)
        if len(freq) != len(factors):
            raise ValueError("freq must have one entry per coordinate")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "freq", freq)

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def is_zero(self) -> bool:
        return self.scale == 0.0

    def component(self, i: int, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.factors[i](x) * np.exp(2j * np.pi * self.freq[i] * x)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise ValueError(f"expected points of dimension {self.n}")
        env = np.ones(x.shape[:-1])
        for i, f in enumerate(self.factors):
            env = env * f(x[..., i])
        return self.scale * env * np.cos(2 * np.pi * (x @ np.asarray(self.freq)))

    # -- spectrum ---------------------------------------------------------
    def fourier_boxes(self) -> list[list[tuple[float, float]]]:
        half = [f.half_band for f in self.factors]
        centres = [self.freq]
        if any(self.freq):
            centres.append(tuple(-v for v in self.freq))
        return [[(c - h, c + h) for c, h in zip(ctr, half)] for ctr in centres]

    def band_inside(self, bound: float, closed: bool = False) -> bool:
        """Whether every spectral box lies in ``(-bound, bound)^n``."""
        if closed:
            return all(lo >= -bound and hi <= bound for box in self.fourier_boxes() for lo, hi in box)
        return all(lo > -bound and hi < bound for box in self.fourier_boxes() for lo, hi in box)

    def avoids_zero_sum(self) -> bool:
        """Whether the spectrum misses the hyperplane ``xi_1 + ... + xi_n = 0``."""
        for box in self.fourier_boxes():
            lo = sum(b[0] for b in box)
            hi = sum(b[1] for b in box)
            if lo <= 0.0 <= hi:
                return False
        return True

    @property
    def max_frequency(self) -> float:
        return max(max(abs(lo), abs(hi)) for box in self.fourier_boxes() for lo, hi in box)

    def transform_1d(self, xi):
        """Fourier transform ``hat eta(xi)`` for ``n = 1``."""
        if self.n != 1:
            raise ValueError("transform_1d needs a one-dimensional test function")
        g, nu = self.factors[0], self.freq[0]
        if nu == 0.0:
            return self.scale * g.transform(xi)
        return 0.5 * self.scale * (g.transform(np.asarray(xi) - nu) + g.transform(np.asarray(xi) + nu))

    def transform_knots(self) -> np.ndarray:
        """Breakpoints of the piecewise-polynomial transform for ``n = 1``."""
        g, nu = self.factors[0], self.freq[0]
        base = g.b * (np.arange(2 * g.m + 1) - g.m)
        return np.unique(np.concatenate([base + nu, base - nu]))

    def exact_integral(self) -> float:
        """``integral of eta over R^n`` from the transforms at the modulation."""
        prod = self.scale
        for f, nu in zip(self.factors, self.freq):
            prod *= float(f.transform(nu))
        return prod

    # -- decay ------------------------------------------------------------
    def radius_for(self, rel_tol: float) -> float:
        return max(f.radius_for(rel_tol) for f in self.factors)

    def min_order(self) -> int:
        return min(2 * f.m for f in self.factors)


def sinc_power(b: float = 1.0, m: int = 1, nu: float = 0.0, scale: float = 1.0) -> BandLimitedTestFunction:
    """One-dimensional ``scale * S(b x)^(2m) * cos(2 pi nu x)``."""
    return BandLimitedTestFunction((SincFactor(b, m),), (nu,), scale)


def product(*factors: SincFactor, freq=(), scale: float = 1.0) -> BandLimitedTestFunction:
    return BandLimitedTestFunction(tuple(factors), tuple(freq), scale)


def zero_function(n: int) -> BandLimitedTestFunction:
    return BandLimitedTestFunction((SincFactor(),) * n, (), 0.0)


def describe(eta: BandLimitedTestFunction) -> str:
    parts = [f"S({f.b:g}x{i+1})^{2*f.m}" for i, f in enumerate(eta.factors)]
    text = "*".join(parts)
    if any(eta.freq):
        text += "*cos(2pi(" + ",".join(f"{v:g}" for v in eta.freq) + ").x)"
    return f"{eta.scale:g}*{text}" if eta.scale != 1.0 else text
