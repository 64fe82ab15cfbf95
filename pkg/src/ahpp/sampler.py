"""Exact sampling of the a-discrete sine process on finite windows.

Two exact samplers are provided for a window matrix ``M``:

* :func:`sample_window` / :func:`sample_window_batch` -- spectral thinning
  followed by sequential projection sampling.  Eigenvector ``i`` is kept with
  probability ``lambda_i``; sites are then drawn one at a time with
  probability proportional to the squared row norms of the current
  orthonormal basis, which is then restricted to vectors vanishing at the
  chosen site.
* :func:`sample_window_lu` -- the chain-rule sampler: sites are visited in
  order and accepted with their conditional inclusion probability, read off
  as the pivot of an LU factorization whose rejected pivots are shifted by -1.

Long configurations use :func:`sample_stream`, which runs the chain-rule
sampler block by block while conditioning on a fixed-length context of
already decided sites.  Every run of ``context + 1`` consecutive sites then
has exactly the law of the infinite process; only dependence across longer
ranges is truncated.

Randomness flows through :class:`SeededStream`, a (seed, stream_index) pair
mapped onto a counter-based Philox generator so replicate ``r`` can use
``stream_index = r`` regardless of execution order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateBasisError, MacchiViolation
from .sine_kernel import (
    CLIP_TOL,
    KernelWindowMatrix,
    clip_eigenvalues,
    kernel_matrix,
    window_eigh,
)

DEFAULT_SEED = 20190411

# Windows up to this many sites are sampled spectrally; longer ones stream.
SPECTRAL_MAX_SITES = 2048
DEFAULT_CONTEXT = 256
DEFAULT_BLOCK = 256

_CHUNK_FLOATS = 1 << 22
_REORTH_EVERY = 32
_DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class SeededStream:
    """Reproducible random stream identified by ``(seed, stream_index)``."""

    seed: int = DEFAULT_SEED
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if int(self.stream_index) < 0:
            raise ValueError("stream_index must be non-negative")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_index),))
        return np.random.Generator(np.random.Philox(seq))

    def replicate(self, r: int) -> "SeededStream":
        return SeededStream(self.seed, int(r))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, SeededStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return SeededStream(DEFAULT_SEED if rng is None else int(rng)).generator()
    raise TypeError(f"cannot build a generator from {type(rng).__name__}")


@dataclass(frozen=True)
class LatticeConfiguration:
    """Occupied sites of aZ inside the window ``[offset, offset + n_sites)``.

    ``indices`` holds absolute lattice indices ``j``; the points are ``j * a``.
    """

    a: float
    indices: np.ndarray
    n_sites: int
    offset: int = 0

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1:
            raise ValueError("indices must be one-dimensional")
        if idx.size > 1 and np.any(np.diff(idx) <= 0):
            raise ValueError("indices must be strictly increasing")
        if idx.size and (idx[0] < self.offset or idx[-1] >= self.offset + self.n_sites):
            raise ValueError("indices fall outside the window")
        idx.flags.writeable = False
        object.__setattr__(self, "indices", idx)

    @property
    def points(self) -> np.ndarray:
        return self.indices * self.a

    def __len__(self) -> int:
        return int(self.indices.size)


@dataclass(frozen=True)
class AhConfiguration:
    """Half-lattice configuration shifted left by ``shift`` in [0, 1/2)."""

    base: LatticeConfiguration
    shift: float

    def __post_init__(self):
        if self.base.a != 0.5:
            raise ValueError("AH configurations live on the half-integer lattice")
        if not 0.0 <= self.shift < 0.5:
            raise ValueError("shift must lie in [0, 1/2)")

    @property
    def points(self) -> np.ndarray:
        return self.base.indices * 0.5 - self.shift

    @property
    def doubled_gaps(self) -> np.ndarray:
        """Consecutive gaps in units of 1/2, computed on integer indices."""
        return np.diff(self.base.indices)

    def __len__(self) -> int:
        return len(self.base)


# --------------------------------------------------------------------------
# spectral sampler
# --------------------------------------------------------------------------

def _projection_draws(eigvecs: np.ndarray, keep: np.ndarray, choice_u: np.ndarray):
    """Sequential projection sampling, vectorized over draws sharing a rank."""
    reps, n = keep.shape
    ranks = keep.sum(axis=1)
    out: list[np.ndarray] = [np.empty(0, dtype=np.int64)] * reps
    for k in np.unique(ranks):
        k = int(k)
        if k == 0:
            continue
        rows = np.flatnonzero(ranks == k)
        step = max(1, _CHUNK_FLOATS // (n * k))
        for start in range(0, rows.size, step):
            chunk = rows[start:start + step]
            picks = _project_chunk(eigvecs, keep[chunk], choice_u[chunk], k)
            for r, p in zip(chunk, picks):
                out[r] = np.sort(p)
    return out


def _project_chunk(eigvecs, keep, choice_u, k):
    b, n = keep.shape
    cols = np.nonzero(keep)[1].reshape(b, k)
    basis = np.ascontiguousarray(np.transpose(eigvecs[:, cols], (1, 0, 2)))
    batch = np.arange(b)
    picks = np.empty((b, k), dtype=np.int64)
    for t in range(k):
        weights = np.einsum("bnk,bnk->bn", basis, basis)
        cum = np.cumsum(weights, axis=1)
        target = choice_u[:, t] * cum[:, -1]
        j = np.minimum((cum < target[:, None]).sum(axis=1), n - 1)
        picks[:, t] = j
        if t == k - 1:
            break
        row = basis[batch, j, :]
        norm = np.linalg.norm(row, axis=1)
        if np.any(norm**2 < _DEGENERATE_TOL):
            raise DegenerateBasisError("selected site carries no basis weight")
        # Householder reflection sending the selected row direction to the
        # last coordinate; dropping that column leaves an orthonormal basis
        # of the subspace vanishing at site j.
        h = row / norm[:, None]
        h[:, -1] -= 1.0
        hn = np.linalg.norm(h, axis=1)
        live = hn > 1e-14
        h[live] /= hn[live, None]
        h[~live] = 0.0
        basis = basis - 2.0 * (basis @ h[:, :, None]) * h[:, None, :]
        basis = basis[:, :, :-1]
        basis[batch, j, :] = 0.0
        if (t + 1) % _REORTH_EVERY == 0:
            basis = _reorthonormalize(basis)
    return picks


def _reorthonormalize(basis):
    q, r = np.linalg.qr(basis)
    diag = np.abs(np.diagonal(r, axis1=1, axis2=2))
    if diag.size and diag.min() < 1e-6:
        raise DegenerateBasisError("projection basis lost rank")
    return q


def _spectral(m: KernelWindowMatrix):
    lam, vecs = window_eigh(m)
    return clip_eigenvalues(lam), vecs


def sample_window_batch(m: KernelWindowMatrix, reps: int, rng) -> list[LatticeConfiguration]:
    """Draw ``reps`` independent configurations from one random stream.

    All keep/select uniforms are drawn up front (``reps x N`` each), so the
    result depends only on the stream and ``reps``.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    gen = as_generator(rng)
    lam, vecs = _spectral(m)
    n = m.size
    keep = gen.random((reps, n)) < lam
    choice_u = gen.random((reps, n))
    draws = _projection_draws(vecs, keep, choice_u)
    return [LatticeConfiguration(m.a, d, n) for d in draws]


def sample_window(m: KernelWindowMatrix, rng) -> LatticeConfiguration:
    return sample_window_batch(m, 1, rng)[0]


# --------------------------------------------------------------------------
# chain-rule sampler
# --------------------------------------------------------------------------

def _chain_rule(kernel: np.ndarray, u: np.ndarray) -> np.ndarray:
    a = np.array(kernel, dtype=float, copy=True)
    n = a.shape[0]
    chosen = np.zeros(n, dtype=bool)
    for i in range(n):
        p = a[i, i]
        if p < -CLIP_TOL or p > 1.0 + CLIP_TOL:
            raise MacchiViolation(f"conditional inclusion probability {p:.3g} outside [0, 1]")
        if u[i] < p:
            chosen[i] = True
        else:
            a[i, i] -= 1.0
        if i + 1 < n:
            pivot = a[i, i]
            if abs(pivot) < 1e-300:
                raise DegenerateBasisError("zero pivot in chain-rule sampler")
            a[i + 1:, i + 1:] -= np.outer(a[i + 1:, i] / pivot, a[i, i + 1:])
    return chosen


def sample_window_lu(m: KernelWindowMatrix, rng) -> LatticeConfiguration:
    gen = as_generator(rng)
    chosen = _chain_rule(m.values, gen.random(m.size))
    return LatticeConfiguration(m.a, np.flatnonzero(chosen), m.size)


def sample_stream(
    a: float,
    n_sites: int,
    rng,
    context: int = DEFAULT_CONTEXT,
    block: int = DEFAULT_BLOCK,
) -> LatticeConfiguration:
    """Sample ``n_sites`` consecutive sites block by block.

    The first ``context + block`` sites are drawn exactly.  Each further
    block is drawn from its exact conditional law given the previous
    ``context`` sites.
    """
    if n_sites < 1 or context < 1 or block < 1:
        raise ValueError("n_sites, context and block must be positive")
    gen = as_generator(rng)
    occ = np.zeros(n_sites, dtype=bool)
    first = min(n_sites, context + block)
    occ[:first] = _chain_rule(kernel_matrix(a, first).values, gen.random(first))
    if first < n_sites:
        full = kernel_matrix(a, context + block).values
        k_cc = full[:context, :context]
        k_cb = full[:context, context:]
        k_bb = full[context:, context:]
        pos = first
        while pos < n_sites:
            nb = min(block, n_sites - pos)
            holes = ~occ[pos - context:pos]
            lhs = k_cc - np.diag(holes.astype(float))
            cross = k_cb[:, :nb]
            cond = k_bb[:nb, :nb] - cross.T @ scipy.linalg.solve(lhs, cross, assume_a="sym")
            occ[pos:pos + nb] = _chain_rule(cond, gen.random(nb))
            pos += nb
    return LatticeConfiguration(float(a), np.flatnonzero(occ), n_sites)


def sample_configuration(a: float, n_sites: int, rng, method: str = "auto", **stream_kw):
    if method == "auto":
        method = "spectral" if n_sites <= SPECTRAL_MAX_SITES else "stream"
    if method == "spectral":
        return sample_window(kernel_matrix(a, n_sites), rng)
    if method == "lu":
        return sample_window_lu(kernel_matrix(a, n_sites), rng)
    if method == "stream":
        return sample_stream(a, n_sites, rng, **stream_kw)
    raise ValueError(f"unknown sampling method {method!r}")


def sample_ah_configuration(
    n_sites: int, rng, shift: float | None = None, method: str = "auto", **stream_kw
) -> AhConfiguration:
    """Half-lattice sample followed by a uniform shift in [0, 1/2).

    The shift is the first uniform drawn after the window sample.  Passing
    ``shift`` fixes it instead (no draw is consumed).
    """
    gen = as_generator(rng)
    base = sample_configuration(0.5, n_sites, gen, method=method, **stream_kw)
    if shift is None:
        shift = 0.5 * gen.random()
    return AhConfiguration(base, float(shift))


def empirical_count_moments(m: KernelWindowMatrix, reps: int, rng) -> tuple[float, float]:
    """Monte Carlo mean and variance of the number of sampled points."""
    counts = np.array([len(c) for c in sample_window_batch(m, reps, rng)], dtype=float)
    var = counts.var(ddof=1) if reps > 1 else 0.0
    return float(counts.mean()), float(var)


def count_moments_exact(m: KernelWindowMatrix) -> tuple[float, float]:
    """``(tr M, tr M - tr M^2)``: exact mean and variance of the point count."""
    v = m.values
    tr = float(np.trace(v))
    return tr, tr - float(np.sum(v * v))
