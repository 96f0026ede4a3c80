"""RKHS state-space model: feature dictionary, coefficients, propagation.

The model represents the learned dynamics as a linear map in the
tensor-product feature space: the next augmented state is ``A.T @ k``
where ``k`` is the kernel vector of the previous (state, input) pair
against the stored centers.  The augmented state carries the output in
its last ``n_y`` coordinates, so measurement is a fixed selector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import KernelParams, kernel_vector

MODEL_MAGIC = "FBF-MODEL"
MODEL_VERSION = "v1"


def measurement_select(s, n_y: int) -> np.ndarray:
    """Last ``n_y`` components of an augmented state vector."""
    s = np.asarray(s, dtype=float).ravel()
    if not 0 < n_y <= s.size:
        raise ValueError(f"cannot select {n_y} outputs from a state of dimension {s.size}")
    return s[-n_y:]


def selector_matrix(n_y: int, n_s: int) -> np.ndarray:
    """Explicit (n_y, n_s) projection onto the last n_y state coordinates."""
    if not 0 < n_y <= n_s:
        raise ValueError(f"need 0 < n_y <= n_s, got n_y={n_y}, n_s={n_s}")
    m = np.zeros((n_y, n_s))
    m[:, n_s - n_y:] = np.eye(n_y)
    return m


@dataclass
class RkhsModel:
    """Dictionary of (state, input) centers and the coefficient matrix.

    Attributes
    ----------
    centers_s : (N, n_s) ndarray
        State parts of the stored feature centers.
    centers_u : (N, n_u) ndarray
        Input parts of the stored feature centers.
    A : (N, n_s) ndarray
        Coefficients; column k weights the centers for state component k.
    kp : KernelParams
    n_y : int
        Output dimension, <= n_s; outputs are the trailing state entries.
    """

    centers_s: np.ndarray
    centers_u: np.ndarray
    A: np.ndarray
    kp: KernelParams
    n_y: int

    def __post_init__(self):
        self.centers_s = np.atleast_2d(np.asarray(self.centers_s, dtype=float))
        self.centers_u = np.atleast_2d(np.asarray(self.centers_u, dtype=float))
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = self.centers_s.shape[0]
        if n < 1:
            raise ValueError("model needs at least one center")
        if self.centers_u.shape[0] != n or self.A.shape[0] != n:
            raise ValueError(
                f"inconsistent dictionary: {n} state centers, "
                f"{self.centers_u.shape[0]} input centers, {self.A.shape[0]} coefficient rows"
            )
        if self.A.shape[1] != self.n_s:
            raise ValueError(
                f"coefficient rows must have n_s={self.n_s} entries, got {self.A.shape[1]}"
            )
        if not 0 < self.n_y <= self.n_s:
            raise ValueError(f"need 0 < n_y <= n_s, got n_y={self.n_y}, n_s={self.n_s}")
        for name, arr in (("centers_s", self.centers_s),
                          ("centers_u", self.centers_u), ("A", self.A)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite values in {name}")

    @property
    def n_s(self) -> int:
        return self.centers_s.shape[1]

    @property
    def n_u(self) -> int:
        return self.centers_u.shape[1]

    @property
    def size(self) -> int:
        """Current dictionary size N."""
        return self.centers_s.shape[0]

    @classmethod
    def initialize(cls, n_s: int, n_u: int, n_y: int, kp: KernelParams,
                   rng: np.random.Generator, scale: float = 0.1) -> "RkhsModel":
        """Fresh single-center model with small random center and coefficients.

        Center and coefficient entries are drawn i.i.d. from N(0, scale^2);
        the small scale keeps early states inside the kernel's sensitive
        region.
        """
        return cls(
            centers_s=rng.normal(0.0, scale, (1, n_s)),
            centers_u=rng.normal(0.0, scale, (1, n_u)),
            A=rng.normal(0.0, scale, (1, n_s)),
            kp=kp,
            n_y=n_y,
        )

    def kernel_vector(self, s, u) -> np.ndarray:
        """Tensor-kernel evaluations of (s, u) against the dictionary."""
        return kernel_vector(self.centers_s, self.centers_u, s, u, self.kp)

    def propagate(self, s_prev, u, k: np.ndarray | None = None) -> np.ndarray:
        """Next augmented state ``A.T @ k(s_prev, u)``."""
        if k is None:
            k = self.kernel_vector(s_prev, u)
        return self.A.T @ k

    def transition_gradient(self, s_prev, u, k: np.ndarray | None = None) -> np.ndarray:
        """Jacobian of :meth:`propagate` with respect to ``s_prev``.

        Entry (l, m) is ``2 a_s * sum_j A[j, l] * (centers_s[j, m] - s_prev[m]) * k[j]``.
        """
        s_prev = np.asarray(s_prev, dtype=float).ravel()
        if s_prev.size != self.n_s:
            raise ValueError(f"state dimension mismatch: expected {self.n_s}, got {s_prev.size}")
        if k is None:
            k = self.kernel_vector(s_prev, u)
        weighted = self.A * k[:, None]                    # (N, n_s)
        return 2.0 * self.kp.a_s * weighted.T @ (self.centers_s - s_prev)

    def add_center(self, s_prev, u, coeff_row) -> None:
        """Append the feature center (s_prev, u) with the given coefficient row."""
        s_prev = np.asarray(s_prev, dtype=float).reshape(1, -1)
        u = np.asarray(u, dtype=float).reshape(1, -1)
        coeff_row = np.asarray(coeff_row, dtype=float).reshape(1, -1)
        if s_prev.shape[1] != self.n_s or u.shape[1] != self.n_u:
            raise ValueError(
                f"center dimensions ({s_prev.shape[1]}, {u.shape[1]}) do not match "
                f"model ({self.n_s}, {self.n_u})"
            )
        if coeff_row.shape[1] != self.n_s:
            raise ValueError(f"coefficient row must have {self.n_s} entries")
        for name, arr in (("center state", s_prev), ("center input", u),
                          ("coefficient row", coeff_row)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite {name}")
        self.centers_s = np.concatenate([self.centers_s, s_prev])
        self.centers_u = np.concatenate([self.centers_u, u])
        self.A = np.concatenate([self.A, coeff_row])

    def copy(self) -> "RkhsModel":
        return RkhsModel(self.centers_s.copy(), self.centers_u.copy(),
                         self.A.copy(), self.kp, self.n_y)


def _fmt(values) -> str:
    return " ".join(f"{v:.17g}" for v in np.asarray(values, dtype=float).ravel())


def model_header(model: RkhsModel) -> str:
    return (f"{MODEL_MAGIC} {MODEL_VERSION} {model.n_s} {model.n_u} {model.n_y} "
            f"{model.kp.a_s:.17g} {model.kp.a_u:.17g} {model.size}")


def write_model(model: RkhsModel, fh) -> None:
    fh.write(model_header(model) + "\n")
    for j in range(model.size):
        fh.write(_fmt(model.centers_s[j]) + " " + _fmt(model.centers_u[j])
                 + " " + _fmt(model.A[j]) + "\n")


def read_model(fh) -> RkhsModel:
    header = fh.readline().split()
    if len(header) != 8 or header[0] != MODEL_MAGIC or header[1] != MODEL_VERSION:
        raise ValueError(f"not a {MODEL_MAGIC} {MODEL_VERSION} stream: {' '.join(header)!r}")
    n_s, n_u, n_y = (int(v) for v in header[2:5])
    a_s, a_u = float(header[5]), float(header[6])
    n = int(header[7])
    centers_s = np.empty((n, n_s))
    centers_u = np.empty((n, n_u))
    coeff = np.empty((n, n_s))
    for j in range(n):
        row = np.fromstring(fh.readline(), sep=" ")
        if row.size != n_s + n_u + n_s:
            raise ValueError(f"malformed center line {j + 1}: expected "
                             f"{n_s + n_u + n_s} values, got {row.size}")
        centers_s[j] = row[:n_s]
        centers_u[j] = row[n_s:n_s + n_u]
        coeff[j] = row[n_s + n_u:]
    return RkhsModel(centers_s, centers_u, coeff, KernelParams(a_s, a_u), n_y)


def save_model(model: RkhsModel, path) -> None:
    """Write the versioned line-oriented model format (lossless round trip)."""
    with open(path, "w") as fh:
        write_model(model, fh)


def load_model(path) -> RkhsModel:
    with open(path) as fh:
        return read_model(fh)
