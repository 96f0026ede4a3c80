"""Information-theoretic diagnostic estimators.

Parzen-window estimators of information potential and correntropy, using
the normalized Gaussian kernel

    K_sigma(v) = (2 pi sigma^2)^(-d/2) * exp(-||v||^2 / (2 sigma^2))

for d-dimensional samples.  These are diagnostics over sample sets, not
the filter-facing kernels of :mod:`fbf.kernels`.
"""

from __future__ import annotations

import numpy as np


def _as_samples(x) -> np.ndarray:
    """Coerce a sample list to an (N, d) float array."""
    a = np.asarray(x, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError(f"samples must be scalars or vectors, got ndim={a.ndim}")
    return a


def _parzen(sq_norms: np.ndarray, sigma: float, dim: int) -> np.ndarray:
    norm = (np.sqrt(2.0 * np.pi) * sigma) ** dim
    return np.exp(-sq_norms / (2.0 * sigma**2)) / norm


def information_potential(samples, sigma: float) -> float:
    """Mean pairwise normalized-kernel value, (1/N^2) sum_ij K_{sqrt(2) sigma}(x_i - x_j).

    The pairwise kernel size is sqrt(2) * sigma, matching a Parzen density
    estimate with size sigma integrated against itself.  Strictly positive.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = _as_samples(samples)
    if x.shape[0] == 0:
        raise ValueError("empty sample set")
    diffs = x[:, None, :] - x[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diffs, diffs)
    return float(np.mean(_parzen(sq, np.sqrt(2.0) * sigma, x.shape[1])))


def renyi_quadratic_entropy(samples, sigma: float) -> float:
    """Quadratic Renyi entropy estimate, -log of the information potential."""
    return -float(np.log(information_potential(samples, sigma)))


def correntropy(x, y, sigma: float) -> float:
    """Sample correntropy (1/N) sum_i K_sigma(x_i - y_i) between paired samples."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    xa = _as_samples(x)
    ya = _as_samples(y)
    if xa.shape != ya.shape:
        raise ValueError(f"sample lists disagree: {xa.shape} vs {ya.shape}")
    if xa.shape[0] == 0:
        raise ValueError("empty sample set")
    d = xa - ya
    sq = np.einsum("ij,ij->i", d, d)
    return float(np.mean(_parzen(sq, sigma, xa.shape[1])))
