"""Time averages along one fixed half-lattice configuration.

A single sample ``(c_j)`` of the 1/2-discrete sine process is frozen and
treated as a deterministic sequence.  Two averages of the n-point statistic
``F(s) = sum_{distinct j} eta(c_{j_1} - s, ..., c_{j_n} - s)`` are provided:

* over lattice shifts ``s = s0 + l/2`` for ``l < N`` (target: the lattice
  correlation sum), and
* over continuous shifts ``s in [T, 2T]`` (target: the sine-process integral).

Because ``eta`` is a real part of a product of one-dimensional components,
the distinct-tuple sum expands over set partitions into products of
one-dimensional sums ``H_B(s) = sum_j prod_{i in B} h_i(c_j - s)``, each a
convolution of the occupancy vector with a sampled kernel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.signal

from .correlations import continuous_correlation_integral, discrete_correlation_sum
from .errors import SpanExhaustedError
from .sampler import LatticeConfiguration, SeededStream, sample_configuration
from .testfunctions import BandLimitedTestFunction

EDGE_PAD = 32.0  # units added to the effective support radius
EFFECTIVE_TAIL = 1e-3
_TAU_PANELS = 4  # step 1/8 in the continuous shift
_TAU_NODES = 8


@dataclass(frozen=True)
class DeterministicSequence:
    """Increasing half-integers stored as integer doubles ``2 c_j``."""

    doubled: np.ndarray
    n_sites: int
    seed: int
    stream_index: int = 0

    def __post_init__(self):
        d = np.asarray(self.doubled, dtype=np.int64)
        if d.size > 1 and np.any(np.diff(d) < 1):
            raise ValueError("sequence must be strictly increasing in half-integer steps")
        d.flags.writeable = False
        object.__setattr__(self, "doubled", d)

    @property
    def points(self) -> np.ndarray:
        return self.doubled / 2.0

    @property
    def span(self) -> float:
        return self.n_sites / 2.0

    @property
    def doubled_gaps(self) -> np.ndarray:
        return np.diff(self.doubled)

    def occupancy(self) -> np.ndarray:
        occ = np.zeros(self.n_sites)
        occ[self.doubled] = 1.0
        return occ

    def density(self) -> float:
        return self.doubled.size / self.span

    def __len__(self) -> int:
        return int(self.doubled.size)


def build_sequence(seed, n_sites: int, method: str = "auto") -> DeterministicSequence:
    """Freeze one sampled configuration on sites ``0 .. n_sites-1`` of the half lattice."""
    stream = seed if isinstance(seed, SeededStream) else SeededStream(int(seed))
    if int(n_sites) != n_sites or n_sites < 2:
        raise ValueError("n_sites must be an integer >= 2")
    cfg: LatticeConfiguration = sample_configuration(0.5, int(n_sites), stream, method=method)
    return DeterministicSequence(cfg.indices - cfg.offset, int(n_sites), stream.seed, stream.stream_index)


def effective_margin(eta: BandLimitedTestFunction, tail: float = EFFECTIVE_TAIL) -> float:
    """Effective support radius of ``eta`` plus a fixed pad, in units."""
    return eta.radius_for(tail) + EDGE_PAD


# --------------------------------------------------------------------------
# distinct-tuple sums
# --------------------------------------------------------------------------

def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _mobius(part) -> int:
    out = 1
    for block in part:
        k = len(block)
        out *= (-1) ** (k - 1) * math.factorial(k - 1)
    return out


def _block_sums(seq: DeterministicSequence, eta: BandLimitedTestFunction, tau: float) -> dict:
    """``H_B(l/2 + tau)`` for every nonempty block ``B`` and every ``l`` in ``[0, n_sites)``."""
    occ = seq.occupancy()
    n = seq.n_sites
    # F(l) = sum_i occ[i] g[i - l] = (occ * rev g)(l); rev g sampled on e = l - i
    e = np.arange(-(n - 1), n)
    x = -e / 2.0 - tau
    comps = [eta.component(i, x) for i in range(eta.n)]
    out = {}
    for part in _set_partitions(list(range(eta.n))):
        for block in part:
            key = tuple(block)
            if key in out:
                continue
            g = np.ones_like(x, dtype=complex)
            for i in key:
                g = g * comps[i]
            full = scipy.signal.fftconvolve(occ, g, mode="full")
            out[key] = full[n - 1:2 * n - 1]
    return out


def shift_statistic(seq: DeterministicSequence, eta: BandLimitedTestFunction, tau: float = 0.0) -> np.ndarray:
    """``F(l/2 + tau)`` for ``l = 0 .. n_sites-1``, summed over distinct tuples."""
    if eta.is_zero:
        return np.zeros(seq.n_sites)
    sums = _block_sums(seq, eta, tau)
    total = np.zeros(seq.n_sites, dtype=complex)
    for part in _set_partitions(list(range(eta.n))):
        term = np.full(seq.n_sites, float(_mobius(part)), dtype=complex)
        for block in part:
            term = term * sums[tuple(block)]
        total += term
    return np.real(eta.scale * total)


# --------------------------------------------------------------------------
# averages
# --------------------------------------------------------------------------

def _lattice_range(seq, eta, n_shifts, start, tail):
    margin = effective_margin(eta, tail)
    l0 = int(math.ceil(2 * max(start, margin)))
    l1 = l0 + int(n_shifts)
    if n_shifts < 1:
        raise ValueError("n_shifts must be positive")
    if (l1 - 1) / 2.0 + margin > seq.span:
        raise SpanExhaustedError(
            f"{n_shifts} shifts from {l0 / 2} plus margin {margin:.0f} exceed span {seq.span}"
        )
    return l0, l1


def lattice_average_statistic(seq: DeterministicSequence, eta: BandLimitedTestFunction,
                              n_shifts: int, start: float | None = None,
                              tail: float = EFFECTIVE_TAIL) -> float:
    """``(1/N) sum_{l<N} F(s0 + l/2)`` with ``s0`` at least the effective margin."""
    l0, l1 = _lattice_range(seq, eta, n_shifts, start or 0.0, tail)
    return float(np.mean(shift_statistic(seq, eta)[l0:l1]))


def continuous_average_statistic(seq: DeterministicSequence, eta: BandLimitedTestFunction,
                                 T: float, tail: float = EFFECTIVE_TAIL) -> float:
    """``(1/T) int_T^{2T} F(t) dt`` by Gauss-Legendre in ``t`` with step 1/8."""
    if T <= 0:
        raise ValueError("T must be positive")
    margin = effective_margin(eta, tail)
    if T < margin or 2 * T + margin > seq.span:
        raise SpanExhaustedError(f"[T, 2T] with T={T} and margin {margin:.0f} leaves the span {seq.span}")
    l0 = int(math.floor(2 * T))
    l1 = int(math.ceil(4 * T))
    t, w = np.polynomial.legendre.leggauss(_TAU_NODES)
    h = 0.5 / _TAU_PANELS
    taus = (np.arange(_TAU_PANELS)[:, None] + (t[None, :] + 1) / 2) * h
    wts = np.broadcast_to(w[None, :] * h / 2, taus.shape)
    cells = np.arange(l0, l1) / 2.0
    acc = 0.0
    for tau, wt in zip(taus.ravel(), wts.ravel()):
        f = shift_statistic(seq, eta, tau)[l0:l1]
        inside = (cells + tau >= T) & (cells + tau < 2 * T)
        acc += wt * float(np.sum(f[inside]))
    return acc / T


def lattice_target(eta: BandLimitedTestFunction) -> float:
    """Ensemble value of the lattice average."""
    return discrete_correlation_sum(eta, 0.5)


def continuous_target(eta: BandLimitedTestFunction) -> float:
    return continuous_correlation_integral(eta)


# --------------------------------------------------------------------------
# diagnostics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagnosticRow:
    scale: int
    value: float
    target: float

    @property
    def deviation(self) -> float:
        return abs(self.value - self.target)


def doubling_schedule(lo_exp: int, hi_exp: int) -> list[int]:
    return [2**k for k in range(lo_exp, hi_exp + 1)]


def convergence_diagnostic(seq: DeterministicSequence, eta: BandLimitedTestFunction,
                           schedule, target: float | None = None,
                           tail: float = EFFECTIVE_TAIL) -> list[DiagnosticRow]:
    """Lattice averages over each ``N`` in ``schedule`` against ``target``."""
    if target is None:
        target = 0.0 if eta.is_zero else lattice_target(eta)
    stat = shift_statistic(seq, eta)
    rows = []
    for n_shifts in schedule:
        l0, l1 = _lattice_range(seq, eta, n_shifts, 0.0, tail)
        rows.append(DiagnosticRow(int(n_shifts), float(np.mean(stat[l0:l1])), float(target)))
    return rows


def trend_slope(rows, floor: float = 1e-12) -> float:
    """Least-squares slope of ``log deviation`` against ``log scale``."""
    if len(rows) < 2:
        return 0.0
    x = np.log([r.scale for r in rows])
    y = np.log([max(r.deviation, floor) for r in rows])
    return float(np.polyfit(x, y, 1)[0])


def nonincreasing_in_trend(rows, floor: float = 1e-12) -> bool:
    return trend_slope(rows, floor) <= 0.0


def lattice_l1_norm(eta: BandLimitedTestFunction, radius: float) -> float:
    """``sum |eta(k)|`` over distinct half-lattice tuples within ``radius`` of 0."""
    k = np.arange(-int(2 * radius), int(2 * radius) + 1) / 2.0
    grids = np.meshgrid(*([k] * eta.n), indexing="ij")
    tup = np.stack(grids, axis=-1).reshape(-1, eta.n)
    return float(np.sum(np.abs(eta(_distinct(tup)))))


def _distinct(tup: np.ndarray) -> np.ndarray:
    keep = np.ones(len(tup), dtype=bool)
    for i in range(tup.shape[1]):
        for j in range(i + 1, tup.shape[1]):
            keep &= tup[:, i] != tup[:, j]
    return tup[keep]


def simple_upper_bound_check(seq: DeterministicSequence, eta: BandLimitedTestFunction,
                             shifts, radius: float) -> list[tuple[float, float]]:
    """Pairs ``(sum_distinct |eta(c - s)|, l1 norm)`` at lattice shifts ``s``.

    Both sides are restricted to tuples within ``radius`` of the shift, so
    the inequality holds exactly for every shift in ``shifts``.
    """
    bound = lattice_l1_norm(eta, radius)
    pts = seq.points
    out = []
    for s in shifts:
        if (2 * s) != int(2 * s):
            raise ValueError("shifts must be half-integers")
        near = pts[np.abs(pts - s) <= radius] - s
        grids = np.meshgrid(*([near] * eta.n), indexing="ij")
        tup = _distinct(np.stack(grids, axis=-1).reshape(-1, eta.n))
        out.append((float(np.sum(np.abs(eta(tup)))), bound))
    return out


def seed_spread(seqs, eta: BandLimitedTestFunction, n_shifts: int) -> list[float]:
    """Lattice averages of the same statistic along several sequences."""
    return [lattice_average_statistic(s, eta, n_shifts) for s in seqs]
