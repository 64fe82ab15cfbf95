"""Gap probabilities of the 1/2-discrete sine process via Toeplitz determinants.

With ``a_j = S(j/2)`` and ``Sigma_L = (a_{k-j})``, the hole probability of
``L`` consecutive half-lattice sites is ``omega(L) = det(I - Sigma_L / 2)``.
The probability that the gap following a point equals ``L/2`` is the second
difference ``G_{L/2} = 2 (omega(L+1) + omega(L-1) - 2 omega(L))``.

Empirical gap histograms use the unconditional consecutive-gap frequencies
of sampled configurations; by translation invariance these estimate the
conditional law given a point at the origin.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import pi

import numpy as np
import scipy.linalg

from .errors import EmptyInteriorError, MacchiViolation, SpectrumError
from .sine_kernel import KernelWindowMatrix

OMEGA_TOL = 1e-9
SUM_RULE_STOP = 1e-14


def symbol(j: int) -> float:
    """Toeplitz symbol ``a_j = S(j/2)`` from its closed form."""
    j = abs(int(j))
    if j == 0:
        return 1.0
    if j % 2 == 0:
        return 0.0
    return 2.0 * (-1) ** ((j - 1) // 2) / (pi * j)


def build_sigma(L: int) -> np.ndarray:
    if L < 0:
        raise ValueError("L must be non-negative")
    return scipy.linalg.toeplitz([symbol(j) for j in range(L)]) if L else np.zeros((0, 0))


def omega(L: int) -> float:
    """``det(I - Sigma_L / 2)`` accumulated as a log-sum over eigenvalues.

    Absolute accuracy is near machine precision for all ``L``; relative
    accuracy degrades once eigenvalues of ``Sigma_L / 2`` approach 1 to
    within rounding, which happens for ``L`` beyond roughly 20 where
    ``omega`` is already below 1e-60.
    """
    if L < 0:
        raise ValueError("L must be non-negative")
    if L == 0:
        return 1.0
    try:
        mu = scipy.linalg.eigvalsh(0.5 * build_sigma(L))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectrumError(str(exc)) from exc
    if mu[-1] > 1.0 + OMEGA_TOL or mu[0] < -OMEGA_TOL:
        raise MacchiViolation(f"eigenvalue of Sigma_{L}/2 outside [0, 1]: {mu[0]:.3g}, {mu[-1]:.3g}")
    mu = np.clip(mu, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        return float(np.exp(np.sum(np.log1p(-mu))))


def gap_probability(L: int) -> float:
    if L < 1:
        raise ValueError("L must be at least 1")
    return 2.0 * (omega(L + 1) + omega(L - 1) - 2.0 * omega(L))


# Published closed forms for L = 1..6 as (constant, [(coef, power of pi), ...]).
_CLOSED_FORMS = {
    1: (1 / 2, [(-2, 2)]),
    2: (1 / 4, [(2, 2)]),
    3: (1 / 8, [(4 / 9, 2), (32 / 9, 4)]),
    4: (1 / 16, [(1 / 18, 2), (-224 / 81, 4)]),
    5: (1 / 32, [(-209 / 1800, 2), (-1664 / 2025, 4), (-131072 / 18225, 6)]),
    6: (1 / 64, [(-3 / 25, 2), (-13312 / 16875, 4), (2097152 / 455625, 6)]),
}

PUBLISHED_APPROX = {1: 0.297, 2: 0.453, 3: 0.207, 4: 0.0397, 5: 0.00357, 6: 0.000156}


def closed_form_gap(L: int) -> float:
    """Closed-form ``G_{L/2}`` for ``L <= 6`` as rational combinations of pi powers."""
    try:
        const, terms = _CLOSED_FORMS[L]
    except KeyError:
        raise ValueError("closed forms are tabulated for L = 1..6 only") from None
    return const + sum(c / pi**p for c, p in terms)


@dataclass(frozen=True)
class SumRules:
    total_prob: float
    mean_gap: float
    l_max: int
    last_term: float


def gap_sum_rules(l_max: int) -> SumRules:
    """Truncated ``sum G`` and ``sum (L/2) G``; both tend to 1.

    Summation stops early once a term drops below 1e-14.
    """
    if l_max < 1:
        raise ValueError("l_max must be at least 1")
    w = [omega(L) for L in range(l_max + 2)]
    total = mean = 0.0
    last = 0.0
    used = 0
    for L in range(1, l_max + 1):
        g = 2.0 * (w[L + 1] + w[L - 1] - 2.0 * w[L])
        total += g
        mean += 0.5 * L * g
        last, used = g, L
        if L > 1 and abs(g) < SUM_RULE_STOP:
            break
    return SumRules(total, mean, used, last)


def count_pgf(m, z: complex) -> complex:
    """``E z^{#B} = det(I + (z - 1) K_B)`` for a finite window ``B``.

    ``m`` is a :class:`KernelWindowMatrix` or any square kernel array already
    restricted to ``B`` (including the lattice weight ``a``).
    """
    k = m.values if isinstance(m, KernelWindowMatrix) else np.asarray(m, dtype=float)
    n = k.shape[0]
    if n == 0:
        return complex(1.0)
    mat = np.eye(n, dtype=complex) + (complex(z) - 1.0) * k
    return complex(np.linalg.det(mat))


@dataclass
class GapDistribution:
    """Map ``L -> G_{L/2}`` with provenance; empirical instances carry counts."""

    probabilities: dict[int, float]
    source: str
    counts: dict[int, int] = field(default_factory=dict)
    n_gaps: int = 0

    def stderr(self, L: int) -> float:
        if not self.n_gaps:
            return 0.0
        p = self.probabilities.get(L, 0.0)
        return float(np.sqrt(p * (1.0 - p) / self.n_gaps))


def analytic_gap_distribution(l_max: int) -> GapDistribution:
    w = [omega(L) for L in range(l_max + 2)]
    probs = {L: 2.0 * (w[L + 1] + w[L - 1] - 2.0 * w[L]) for L in range(1, l_max + 1)}
    return GapDistribution(probs, "analytic")


def empirical_gap_histogram(configs, margin: int) -> GapDistribution:
    """Consecutive-gap histogram over interior starting points.

    A gap is counted when its left point lies at least ``margin`` sites from
    both window ends; its right point may lie anywhere in the window.  Keys
    are doubled gaps ``L`` (gap = L/2 for the half lattice).
    """
    if margin < 0:
        raise ValueError("margin must be non-negative")
    counts: Counter = Counter()
    for cfg in configs:
        idx = np.asarray(cfg.indices)
        if idx.size < 2:
            continue
        lo, hi = cfg.offset + margin, cfg.offset + cfg.n_sites - margin
        left = idx[:-1]
        keep = (left >= lo) & (left < hi)
        diffs = np.diff(idx)[keep]
        vals, cnt = np.unique(diffs, return_counts=True)
        counts.update(dict(zip(vals.tolist(), cnt.tolist())))
    total = sum(counts.values())
    if total == 0:
        raise EmptyInteriorError("no interior gaps after removing the margin")
    keys = sorted(counts)
    return GapDistribution(
        {L: counts[L] / total for L in keys},
        "empirical",
        counts={L: counts[L] for L in keys},
        n_gaps=total,
    )


def default_margin(n_sites: int) -> int:
    return max(32, n_sites // 10)
