"""Sine kernel on the lattice aZ and finite window restrictions.

The a-discrete sine process is the determinantal process on aZ whose
correlation kernel, with respect to a times counting measure, is
``S(x - y)`` with ``S(x) = sin(pi x) / (pi x)``.  Restricting it to N
consecutive sites gives the N x N Toeplitz matrix ``a * S(a (i - j))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import MacchiViolation, SpectrumError

# Eigenvalues within this distance of [0, 1] are floating noise and get clipped.
CLIP_TOL = 1e-10

_SERIES_CUTOFF = 1e-4


def sinc_eval(x):
    """Normalized sinc ``sin(pi x) / (pi x)`` with ``S(0) = 1``.

    Accepts scalars or arrays.  Nonzero integers map to exactly 0 and the
    argument is reduced modulo 2 before calling ``sin`` so large inputs
    keep full accuracy.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("sinc_eval requires finite input")
    flat = arr.reshape(-1)
    px = np.pi * flat
    # sin(pi x) has period 2; reduce to [-1, 1] first.
    r = flat - 2.0 * np.rint(flat / 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(np.pi * r) / px
    small = np.abs(px) < _SERIES_CUTOFF
    p2 = px[small] ** 2
    out[small] = 1.0 - p2 / 6.0 + p2 * p2 / 120.0
    out[(flat == np.rint(flat)) & (flat != 0)] = 0.0
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


@dataclass(frozen=True)
class KernelWindowMatrix:
    """Restriction of the a-discrete sine kernel to ``size`` consecutive sites.

    ``values[i, j] = a * S(a (i - j))``.  The array is read-only.
    """

    a: float
    values: np.ndarray

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def restrict(self, sites) -> np.ndarray:
        """Principal submatrix on the given window-relative site indices."""
        idx = np.asarray(sites, dtype=int)
        return self.values[np.ix_(idx, idx)]

    def trace(self) -> float:
        return float(np.trace(self.values))


def _check_spacing(a: float) -> float:
    a = float(a)
    if not np.isfinite(a) or a <= 0:
        raise ValueError(f"lattice spacing must be positive, got {a!r}")
    return a


def kernel_row(a: float, n_sites: int) -> np.ndarray:
    """First row ``(a S(0), a S(a), a S(2a), ...)`` of the window matrix."""
    a = _check_spacing(a)
    return a * sinc_eval(a * np.arange(n_sites, dtype=float))


def kernel_matrix(a: float, n_sites: int) -> KernelWindowMatrix:
    if int(n_sites) != n_sites or n_sites < 1:
        raise ValueError(f"n_sites must be a positive integer, got {n_sites!r}")
    values = scipy.linalg.toeplitz(kernel_row(a, int(n_sites)))
    values.flags.writeable = False
    return KernelWindowMatrix(a=float(a), values=values)


def window_spectrum(m: KernelWindowMatrix) -> np.ndarray:
    """Ascending eigenvalues of a window matrix (dense symmetric solver)."""
    try:
        return scipy.linalg.eigvalsh(m.values)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectrumError(f"eigensolver failed: {exc}") from exc


def window_eigh(m: KernelWindowMatrix) -> tuple[np.ndarray, np.ndarray]:
    try:
        return scipy.linalg.eigh(m.values)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectrumError(f"eigensolver failed: {exc}") from exc


def clip_eigenvalues(lam: np.ndarray, tol: float = CLIP_TOL) -> np.ndarray:
    """Clip eigenvalues into [0, 1], refusing anything beyond ``tol`` outside."""
    lam = np.asarray(lam, dtype=float)
    if lam.size and (lam.min() < -tol or lam.max() > 1.0 + tol):
        raise MacchiViolation(
            f"kernel spectrum [{lam.min():.3g}, {lam.max():.3g}] leaves [0, 1]"
        )
    return np.clip(lam, 0.0, 1.0)


@dataclass(frozen=True)
class MacchiReport:
    a: float
    n_sites: int
    min_eigenvalue: float
    max_eigenvalue: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.min_eigenvalue >= -self.tol and self.max_eigenvalue <= 1.0 + self.tol

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "n_sites": self.n_sites,
            "min_eigenvalue": self.min_eigenvalue,
            "max_eigenvalue": self.max_eigenvalue,
            "tol": self.tol,
            "pass": self.passed,
        }


def macchi_spectrum_check(a: float, n_sites: int, tol: float = 1e-9) -> MacchiReport:
    """Check ``0 <= K <= I`` on a finite window through its full spectrum."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    lam = window_spectrum(kernel_matrix(a, n_sites))
    return MacchiReport(
        a=float(a),
        n_sites=int(n_sites),
        min_eigenvalue=float(lam[0]),
        max_eigenvalue=float(lam[-1]),
        tol=float(tol),
    )


def rayleigh_witness(a: float) -> tuple[float, float]:
    """Quadratic form and squared norm of the indicator of site 0.

    Both use the weighted inner product ``<f, g> = a sum f(k) g(k)``, so
    ``<psi, K psi> = a^2`` and ``<psi, psi> = a``.  A form exceeding the
    norm rules out any process on aZ with this kernel.
    """
    a = _check_spacing(a)
    psi = np.array([1.0])
    k_psi = kernel_matrix(a, 1).values @ psi  # a * S(0) * psi(0)
    quadratic_form = a * float(psi @ k_psi)
    norm = a * float(psi @ psi)
    return quadratic_form, norm
