"""Gaussian and tensor-product kernel evaluations.

Two kernel conventions live in this package.  The filter-facing kernels
here use the unnormalized exponential form ``exp(-a * ||x - y||^2)``,
which is what the state-transition gradient assumes (its ``2 * a_s``
derivative factor is exact for this form).  The information-theoretic
estimators in :mod:`fbf.itl` use the normalized Parzen form instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KernelParams:
    """Widths of the state and input Gaussian kernels.

    Parameters
    ----------
    a_s : float
        State kernel width parameter, > 0.  Larger means narrower kernel.
    a_u : float
        Input kernel width parameter, > 0.
    """

    a_s: float
    a_u: float

    def __post_init__(self):
        if not (self.a_s > 0 and self.a_u > 0):
            raise ValueError(
                f"kernel widths must be positive, got a_s={self.a_s}, a_u={self.a_u}"
            )


def gaussian_kernel(x, y, a: float) -> float:
    """Unnormalized Gaussian kernel ``exp(-a * ||x - y||^2)``.

    Symmetric in ``x`` and ``y``; equals 1 exactly when ``x == y``.
    """
    if a <= 0:
        raise ValueError(f"kernel width must be positive, got a={a}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"incompatible vectors: shapes {x.shape} vs {y.shape}")
    d = x - y
    return float(np.exp(-a * np.dot(d.ravel(), d.ravel())))


def tensor_kernel(s, u, s2, u2, kp: KernelParams) -> float:
    """Product of the state kernel on (s, s2) and the input kernel on (u, u2)."""
    return gaussian_kernel(s, s2, kp.a_s) * gaussian_kernel(u, u2, kp.a_u)


def kernel_vector(centers_s, centers_u, s, u, kp: KernelParams) -> np.ndarray:
    """Tensor-product kernel of (s, u) against every stored center.

    Parameters
    ----------
    centers_s : (N, n_s) array_like
    centers_u : (N, n_u) array_like
    s : (n_s,) array_like
    u : (n_u,) array_like

    Returns
    -------
    (N,) ndarray with entries in (0, 1].
    """
    centers_s = np.atleast_2d(np.asarray(centers_s, dtype=float))
    centers_u = np.atleast_2d(np.asarray(centers_u, dtype=float))
    if centers_s.shape[0] != centers_u.shape[0]:
        raise ValueError(
            f"center lists disagree: {centers_s.shape[0]} state centers vs "
            f"{centers_u.shape[0]} input centers"
        )
    if centers_s.shape[0] == 0:
        raise ValueError("empty dictionary: at least one center is required")
    s = np.asarray(s, dtype=float).ravel()
    u = np.asarray(u, dtype=float).ravel()
    if centers_s.shape[1] != s.size:
        raise ValueError(
            f"state dimension mismatch: centers have {centers_s.shape[1]}, query has {s.size}"
        )
    if centers_u.shape[1] != u.size:
        raise ValueError(
            f"input dimension mismatch: centers have {centers_u.shape[1]}, query has {u.size}"
        )
    ds = centers_s - s
    du = centers_u - u
    return np.exp(
        -kp.a_s * np.einsum("ij,ij->i", ds, ds)
        - kp.a_u * np.einsum("ij,ij->i", du, du)
    )


def gram_block(centers_s, centers_u, rows: slice, kp: KernelParams) -> np.ndarray:
    """Rows ``rows`` of the tensor-kernel Gram matrix of a center set.

    Computed via the ||a||^2 + ||b||^2 - 2 a.b expansion so memory stays
    O(block * N); diagonal entries inside the block are forced to exactly 1.
    """
    cs = np.asarray(centers_s, dtype=float)
    cu = np.asarray(centers_u, dtype=float)
    sq_s = np.einsum("ij,ij->i", cs, cs)
    sq_u = np.einsum("ij,ij->i", cu, cu)
    d2_s = sq_s[rows, None] + sq_s[None, :] - 2.0 * (cs[rows] @ cs.T)
    d2_u = sq_u[rows, None] + sq_u[None, :] - 2.0 * (cu[rows] @ cu.T)
    np.maximum(d2_s, 0.0, out=d2_s)
    np.maximum(d2_u, 0.0, out=d2_u)
    g = np.exp(-kp.a_s * d2_s - kp.a_u * d2_u)
    start = rows.start or 0
    for i in range(g.shape[0]):
        g[i, start + i] = 1.0
    return g
