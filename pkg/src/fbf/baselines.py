"""Classical nonlinear Kalman baselines with known system models."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass
class KnownSsm:
    """A known state-space model ``x' = f(x, u) + w``, ``y = h(x) + v``.

    Jacobian handles are optional; a central finite-difference fallback
    with step ``1e-6 * (1 + |x|)`` is used when absent.
    """

    f: Callable[[np.ndarray, np.ndarray | None], np.ndarray]
    h: Callable[[np.ndarray], np.ndarray]
    Q: np.ndarray
    R: np.ndarray
    n_x: int
    n_y: int
    jacobian_f: Callable | None = None
    jacobian_h: Callable | None = None

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        self.R = np.asarray(self.R, dtype=float)
        for name, m, d in (("Q", self.Q, self.n_x), ("R", self.R, self.n_y)):
            if m.shape != (d, d):
                raise ValueError(f"{name} must be {d}x{d}, got {m.shape}")
            if np.max(np.abs(m - m.T)) > 1e-12:
                raise ValueError(f"{name} must be symmetric")


def finite_difference_jacobian(fn: Callable, x: np.ndarray) -> np.ndarray:
    """Central-difference Jacobian with per-coordinate step 1e-6 * (1 + |x|)."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(fn(x), dtype=float)
    jac = np.empty((f0.size, x.size))
    for j in range(x.size):
        step = 1e-6 * (1.0 + abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += step
        xm[j] -= step
        jac[:, j] = (np.asarray(fn(xp)) - np.asarray(fn(xm))) / (2.0 * step)
    return jac


def _sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def ekf_step(ssm: KnownSsm, x, P, u, y) -> tuple[np.ndarray, np.ndarray]:
    """One extended Kalman filter predict+update with first-order linearization."""
    x = np.asarray(x, dtype=float)
    P = np.asarray(P, dtype=float)
    fu = (lambda v: ssm.f(v, u))
    F = (ssm.jacobian_f(x, u) if ssm.jacobian_f is not None
         else finite_difference_jacobian(fu, x))
    x_prior = np.asarray(fu(x), dtype=float)
    P_prior = _sym(F @ P @ F.T + ssm.Q)

    H = (ssm.jacobian_h(x_prior) if ssm.jacobian_h is not None
         else finite_difference_jacobian(ssm.h, x_prior))
    S = H @ P_prior @ H.T + ssm.R
    K = np.linalg.solve(S.T, (P_prior @ H.T).T).T
    x_post = x_prior + K @ (np.asarray(y, dtype=float) - np.asarray(ssm.h(x_prior)))
    P_post = _sym(P_prior - K @ S @ K.T)
    return x_post, P_post


def _cubature_points(x: np.ndarray, P: np.ndarray) -> np.ndarray:
    """2n points ``x +- sqrt(n) * chol(P) columns``; one-shot jitter on failure."""
    n = x.size
    try:
        L = np.linalg.cholesky(P)
    except np.linalg.LinAlgError:
        L = np.linalg.cholesky(P + 1e-12 * np.eye(n))
    spread = np.sqrt(n) * L
    return np.concatenate([x + spread.T, x - spread.T])


def ckf_step(ssm: KnownSsm, x, P, u, y) -> tuple[np.ndarray, np.ndarray]:
    """One cubature Kalman filter step (third-degree spherical-radial rule)."""
    x = np.asarray(x, dtype=float)
    P = np.asarray(P, dtype=float)
    n = ssm.n_x

    pts = _cubature_points(x, P)
    prop = np.array([ssm.f(p, u) for p in pts], dtype=float)
    x_prior = prop.mean(axis=0)
    dx = prop - x_prior
    P_prior = _sym(dx.T @ dx / (2 * n) + ssm.Q)

    pts = _cubature_points(x_prior, P_prior)
    zs = np.array([ssm.h(p) for p in pts], dtype=float)
    z_pred = zs.mean(axis=0)
    dz = zs - z_pred
    dxp = pts - x_prior
    S = _sym(dz.T @ dz / (2 * n) + ssm.R)
    Pxz = dxp.T @ dz / (2 * n)

    K = np.linalg.solve(S.T, Pxz.T).T
    x_post = x_prior + K @ (np.asarray(y, dtype=float) - z_pred)
    P_post = _sym(P_prior - K @ S @ K.T)
    return x_post, P_post


@dataclass
class FilterRun:
    """Posterior trajectory plus per-step covariance diagnostics."""

    x_post: np.ndarray   # (T, n_x)
    p_diag: np.ndarray   # (T, n_x)
    min_eig: np.ndarray = field(default=None)  # (T,) minimum eigenvalue of P


def run_filter(step_fn: Callable, ssm: KnownSsm, x0, P0, y_seq,
               u_seq=None) -> FilterRun:
    """Drive ``ekf_step`` or ``ckf_step`` over a measurement sequence."""
    y_seq = np.atleast_2d(np.asarray(y_seq, dtype=float))
    t = y_seq.shape[0]
    x = np.asarray(x0, dtype=float).copy()
    P = np.asarray(P0, dtype=float).copy()
    out = FilterRun(x_post=np.empty((t, ssm.n_x)), p_diag=np.empty((t, ssm.n_x)),
                    min_eig=np.empty(t))
    for i in range(t):
        u = None if u_seq is None else u_seq[i]
        x, P = step_fn(ssm, x, P, u, y_seq[i])
        out.x_post[i] = x
        out.p_diag[i] = np.diag(P)
        out.min_eig[i] = float(np.linalg.eigvalsh(P)[0])
    return out
