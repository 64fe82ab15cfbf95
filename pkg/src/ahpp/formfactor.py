"""Two-point form factors: theoretical ALT and GUE models and a pair-sum estimator.

For a test function ``f`` with transform ``fhat`` the pair statistic

    (1/T) sum_{j,k} f(gamma_j - gamma_k)

tends to ``int fhat(xi) K(xi) dxi``.  The GUE model is
``K = delta_0 + min(|xi|, 1)``.  The ALT model is ``|xi|`` on ``[-1, 1]``
extended with period 2, plus unit masses at every even integer.  The two
agree for ``fhat`` supported in ``[-1, 1]``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.signal

from .testfunctions import BandLimitedTestFunction, sinc_power

_GL_NODES = 24


class FormFactorModel(enum.Enum):
    ALT = "alt"
    GUE = "gue"

    def density(self, xi):
        """Absolutely continuous part of the form factor."""
        xi = np.abs(np.asarray(xi, dtype=float))
        if self is FormFactorModel.GUE:
            return np.minimum(xi, 1.0)
        return np.abs(xi - 2.0 * np.rint(xi / 2.0))

    def atoms(self, lo: float, hi: float) -> np.ndarray:
        """Locations of unit point masses inside ``[lo, hi]``."""
        if self is FormFactorModel.GUE:
            return np.array([0.0]) if lo <= 0.0 <= hi else np.zeros(0)
        k = np.arange(math.ceil(lo / 2.0), math.floor(hi / 2.0) + 1)
        return 2.0 * k


def _check_transform(fhat) -> BandLimitedTestFunction:
    if not isinstance(fhat, BandLimitedTestFunction) or fhat.n != 1:
        raise ValueError("form factors need a one-dimensional iterated-sinc transform")
    if fhat.factors[0].m > _GL_NODES - 2:
        raise ValueError("transform degree too high for the fixed quadrature rule")
    return fhat


def form_factor_theoretical(fhat: BandLimitedTestFunction, model: FormFactorModel) -> float:
    """``int fhat K_model`` with point masses evaluated on ``fhat``.

    ``fhat`` is piecewise polynomial between its knots and both model
    densities are linear between integers, so Gauss-Legendre on the merged
    breakpoints is exact up to rounding.
    """
    fhat = _check_transform(fhat)
    model = FormFactorModel(model)
    knots = fhat.transform_knots()
    lo, hi = knots[0], knots[-1]
    ints = np.arange(math.ceil(lo), math.floor(hi) + 1, dtype=float)
    edges = np.unique(np.concatenate([knots, ints]))
    t, w = np.polynomial.legendre.leggauss(_GL_NODES)
    a, b = edges[:-1, None], edges[1:, None]
    xi = (a + b) / 2 + (b - a) / 2 * t[None, :]
    wt = (b - a) / 2 * w[None, :]
    smooth = float(np.sum(wt * fhat.transform_1d(xi) * model.density(xi)))
    atoms = model.atoms(lo, hi)
    return smooth + float(np.sum(fhat.transform_1d(atoms)))


@dataclass(frozen=True)
class FormFactorEstimate:
    value: float
    stderr: float
    length: float
    n_outer: int
    margin: float

    def z_score(self, target: float) -> float:
        return (self.value - target) / self.stderr if self.stderr > 0 else math.inf


def empirical_form_factor(config, f, T: float | None = None, margin: float = 0.0,
                          blocks: int = 32) -> FormFactorEstimate:
    """Pair-sum estimate ``(1/T) sum_{j,k} f(x_j - x_k)``, diagonal included.

    Points are taken from ``[x0, x0 + T]`` where ``x0`` is the left end of the
    configuration window (default ``T`` is the whole window).  Outer indices
    ``j`` are restricted to ``[x0 + margin, x0 + T - margin]`` and the sum is
    normalized by that length; partners ``k`` range over all points.  The
    standard error comes from batch means over ``blocks`` contiguous pieces
    of the outer range.

    ``config`` is a lattice or shifted half-lattice configuration; only
    differences enter, so the shift drops out.  ``f`` must accept arrays.
    """
    config = getattr(config, "base", config)
    a = float(config.a)
    span = config.n_sites * a
    T = span if T is None else float(T)
    if T <= 0 or T > span + 1e-12:
        raise ValueError(f"window of length {T} does not fit the configuration span {span}")
    if margin < 0 or 2 * margin >= T:
        raise ValueError("margin leaves no outer range")
    n_win = int(math.floor(T / a + 1e-9))
    idx = np.asarray(config.indices, dtype=np.int64) - config.offset
    idx = idx[idx < n_win]
    occ = np.zeros(n_win)
    occ[idx] = 1.0
    m_sites = int(math.ceil(margin / a - 1e-9))
    outer_lo, outer_hi = m_sites, n_win - m_sites
    diffs = np.arange(-(n_win - 1), n_win)
    fvals = np.asarray(f(diffs * a), dtype=float)

    def block_sum(lo, hi):
        u = np.zeros(n_win)
        u[lo:hi] = occ[lo:hi]
        # counts[d] = sum_i u[i] occ[i + d]
        counts = np.rint(scipy.signal.fftconvolve(occ, u[::-1], mode="full"))
        return float(fvals @ counts)

    length = (outer_hi - outer_lo) * a
    total = block_sum(outer_lo, outer_hi)
    value = total / length
    n_outer = int(occ[outer_lo:outer_hi].sum())
    stderr = 0.0
    if blocks > 1 and outer_hi - outer_lo >= blocks:
        cuts = np.linspace(outer_lo, outer_hi, blocks + 1).astype(int)
        vals = np.array([block_sum(lo, hi) / ((hi - lo) * a) for lo, hi in zip(cuts[:-1], cuts[1:])])
        stderr = float(vals.std(ddof=1) / math.sqrt(blocks))
    return FormFactorEstimate(value, stderr, length, n_outer, m_sites * a)


def discriminator() -> BandLimitedTestFunction:
    """``2 cos(4 pi x) S(x)^2``; its transform is two unit triangles centred at +-2."""
    return sinc_power(1.0, 1, 2.0, 2.0)
