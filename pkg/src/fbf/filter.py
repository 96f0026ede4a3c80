"""Recursive Bayesian estimation of the augmented state and RKHS weights.

The filter tracks the joint uncertainty of the signal state ``s`` and the
kernel filter weights through a factored covariance:

* ``P1`` -- dense n_s x n_s state covariance block,
* ``P2`` -- state/weight cross block, kept as ``V[k] @ features.T`` so only
  the (n_s, N) coefficient panels ``V[k]`` are stored,
* ``P4`` -- weight covariance block, a scalar multiple ``rho[k]`` of the
  identity per state component.

Every consumer of P2 and P4 reduces to kernel evaluations against the
dictionary, so the recursion never materializes a weight-space matrix.
Per-step cost is O(N^2); memory stays O(N) unless the optional Gram cache
is enabled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import KernelParams, gram_block
from .model import (MODEL_MAGIC, RkhsModel, measurement_select, read_model,
                    write_model)

CKPT_MAGIC = "FBF-CKPT"
CKPT_VERSION = "v1"

#: chunk width for streaming Gram products (keeps temporaries O(N))
_GRAM_CHUNK = 256


class DivergenceError(RuntimeError):
    """Raised when the recursion produces non-finite values."""


@dataclass
class FilterParams:
    """Process/measurement variances and gain scales.

    The gain scales damp the state (``eta_k1``) and weight (``eta_k2``)
    corrections; small weight steps self-regularize the kernel expansion.
    ``eta`` values live in [0, 1]; 0 disables the corresponding correction.
    """

    sigma2_s: float
    sigma2_omega: float
    sigma2_y: float
    eta_k1: float = 0.5
    eta_k2: float = 0.1
    rho_min: float = 1e-8

    def __post_init__(self):
        for name in ("sigma2_s", "sigma2_omega", "sigma2_y"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("eta_k1", "eta_k2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


@dataclass
class CovarianceState:
    """Factored covariance blocks: dense P1, per-component V panels, rho."""

    P1: np.ndarray            # (n_s, n_s)
    V: np.ndarray             # (n_s, n_s, N); V[k] is the P2 panel for component k
    rho: np.ndarray           # (n_s,)

    def copy(self) -> "CovarianceState":
        return CovarianceState(self.P1.copy(), self.V.copy(), self.rho.copy())


@dataclass
class HealthStats:
    """Numerical health counters accumulated over a run."""

    steps: int = 0
    updates: int = 0
    max_asymmetry: float = 0.0
    min_innovation_eig: float = np.inf
    rho_clamps: int = 0
    rho_updates: int = 0

    def record_asymmetry(self, m: np.ndarray) -> None:
        with np.errstate(invalid="ignore"):
            a = float(np.max(np.abs(m - m.T))) if m.size else 0.0
        if a > self.max_asymmetry:  # false for nan; divergence is caught later
            self.max_asymmetry = a

    def merge(self, other: "HealthStats") -> None:
        self.steps += other.steps
        self.updates += other.updates
        self.max_asymmetry = max(self.max_asymmetry, other.max_asymmetry)
        self.min_innovation_eig = min(self.min_innovation_eig, other.min_innovation_eig)
        self.rho_clamps += other.rho_clamps
        self.rho_updates += other.rho_updates

    @property
    def clamp_fraction(self) -> float:
        return self.rho_clamps / self.rho_updates if self.rho_updates else 0.0


@dataclass
class Prediction:
    """Everything the time update produces; consumed by :meth:`update`.

    Holds the pending dictionary append (the previous state and current
    input) so the filter itself is only mutated when the step commits.
    """

    u: np.ndarray
    prev_state: np.ndarray
    s_prior: np.ndarray
    Lam: np.ndarray
    k_old: np.ndarray
    k_new: np.ndarray
    P1_prior: np.ndarray
    V_prior: np.ndarray
    rho_prior: np.ndarray
    appended: bool


@dataclass
class StepResult:
    """Per-step outputs: prior prediction, innovation, posterior state."""

    y_pred: np.ndarray
    e: np.ndarray | None
    s_post: np.ndarray
    gain_norm_k1: float = 0.0
    gain_norm_k2: float = 0.0


class _GramCache:
    """Incrementally grown tensor-kernel Gram matrix of the dictionary.

    Trades O(N^2) memory for skipping the per-step Gram recomputation;
    each appended center reuses the kernel vector the step computed anyway.
    """

    def __init__(self, model: RkhsModel):
        n = model.size
        cap = max(64, n)
        self._g = np.empty((cap, cap))
        self.n = n
        for start in range(0, n, _GRAM_CHUNK):
            rows = slice(start, min(start + _GRAM_CHUNK, n))
            self._g[rows, :n] = gram_block(model.centers_s, model.centers_u,
                                           rows, model.kp)

    def append(self, k_old: np.ndarray) -> None:
        n = self.n
        if n + 1 > self._g.shape[0]:
            grown = np.empty((2 * self._g.shape[0],) * 2)
            grown[:n, :n] = self._g[:n, :n]
            self._g = grown
        self._g[n, :n] = k_old
        self._g[:n, n] = k_old
        self._g[n, n] = 1.0
        self.n = n + 1

    def view(self) -> np.ndarray:
        return self._g[:self.n, :self.n]


class FunctionalBayesFilter:
    """Joint signal/weight estimator over a growing kernel dictionary.

    Parameters
    ----------
    model : RkhsModel
        Dictionary and coefficients; mutated in place as the filter learns.
    hp : FilterParams
    s0 : (n_s,) array_like
        Initial running state estimate.
    max_dict_size, coherence :
        Optional growth budget: once the dictionary holds ``max_dict_size``
        centers, a new center is rejected when its maximum tensor-kernel
        value against the stored ones exceeds ``coherence``.  Defaults never
        reject.
    gram_cache : bool
        Cache the dictionary Gram matrix (O(N^2) memory) instead of
        streaming it per step (O(N) memory, more kernel evaluations).
    """

    def __init__(self, model: RkhsModel, hp: FilterParams, s0,
                 max_dict_size: int | None = None, coherence: float = 1.0,
                 gram_cache: bool = False):
        self.model = model
        self.hp = hp
        self.s = np.asarray(s0, dtype=float).ravel().copy()
        if self.s.size != model.n_s:
            raise ValueError(f"initial state has dimension {self.s.size}, model "
                             f"expects {model.n_s}")
        self.s_init = self.s.copy()
        n_s = model.n_s
        self.cov = CovarianceState(
            P1=hp.sigma2_s * np.eye(n_s),
            V=np.zeros((n_s, n_s, model.size)),
            rho=np.full(n_s, hp.sigma2_omega),
        )
        self.step_count = 0
        self.health = HealthStats()
        self.max_dict_size = max_dict_size
        self.coherence = coherence
        self._gram = _GramCache(model) if gram_cache else None

    # -- convenience ---------------------------------------------------

    @property
    def n_s(self) -> int:
        return self.model.n_s

    @property
    def n_y(self) -> int:
        return self.model.n_y

    @classmethod
    def create(cls, n_x: int, n_u: int, n_y: int, kp: KernelParams,
               hp: FilterParams, seed, init_scale: float = 0.1,
               **kwargs) -> "FunctionalBayesFilter":
        """Fresh filter with a randomly initialized single-center model.

        Draws the initial center, coefficients and running state i.i.d.
        N(0, init_scale^2) from a generator seeded by ``seed``.
        """
        rng = np.random.default_rng(seed)
        n_s = n_x + n_y
        model = RkhsModel.initialize(n_s, n_u, n_y, kp, rng, scale=init_scale)
        s0 = rng.normal(0.0, init_scale, n_s)
        return cls(model, hp, s0, **kwargs)

    def reset_signal(self, state=None) -> None:
        """Restart the signal-side state for a new trajectory segment.

        Resets the running state (to ``state`` when given, else the initial
        draw), P1, and the cross block P2 to their stream-start values;
        dictionary, coefficients, and weight variance rho persist.
        """
        self.s = (self.s_init if state is None
                  else np.asarray(state, dtype=float).ravel()).copy()
        n_s = self.model.n_s
        self.cov.P1 = self.hp.sigma2_s * np.eye(n_s)
        self.cov.V = np.zeros((n_s, n_s, self.model.size))

    # -- recursion -----------------------------------------------------

    def predict(self, u) -> Prediction:
        """Time update: propagate state and the factored covariance blocks.

        Does not mutate the filter; the pending dictionary append is carried
        in the returned record and committed by :meth:`update` or
        :meth:`step`.
        """
        u = np.asarray(u, dtype=float).ravel()
        model, cov, hp = self.model, self.cov, self.hp
        n_s = model.n_s

        k_old = model.kernel_vector(self.s, u)
        s_prior = model.A.T @ k_old
        Lam = model.transition_gradient(self.s, u, k=k_old)

        append = self._accept_center(k_old)
        LV = np.einsum("ab,kbn->kan", Lam, cov.V)
        if append:
            new_col = np.zeros((n_s, n_s, 1))
            new_col[np.arange(n_s), np.arange(n_s), 0] = cov.rho
            V_prior = np.concatenate([LV, new_col], axis=2)
            k_new = np.concatenate([k_old, [1.0]])
        else:
            V_prior = LV
            k_new = k_old

        # P1_prior = [Lam P1 + W1] Lam^T + W2 + sigma2_s I, where row k of W1
        # is V_post[k] @ k_old and column k of W2 is V_prior[k] @ k_new.
        W1 = np.einsum("kan,n->ka", cov.V, k_old)
        W2 = np.einsum("kan,n->ka", V_prior, k_new).T
        P1_prior = (Lam @ cov.P1 + W1) @ Lam.T + W2
        if not append:
            # a rejected center still carries the exact weight-noise feed
            # into the state block: the query's self-kernel is 1
            P1_prior[np.diag_indices(n_s)] += cov.rho
        P1_prior[np.diag_indices(n_s)] += hp.sigma2_s
        self.health.record_asymmetry(P1_prior)
        P1_prior = 0.5 * (P1_prior + P1_prior.T)

        rho_prior = cov.rho + hp.sigma2_omega

        for name, arr in (("prior state", s_prior), ("transition gradient", Lam),
                          ("prior P1", P1_prior)):
            if not np.all(np.isfinite(arr)):
                raise DivergenceError(
                    f"non-finite {name} at step {self.step_count}")

        return Prediction(u=u.copy(), prev_state=self.s.copy(), s_prior=s_prior,
                          Lam=Lam, k_old=k_old, k_new=k_new, P1_prior=P1_prior,
                          V_prior=V_prior, rho_prior=rho_prior, appended=append)

    def update(self, d, pred: Prediction) -> StepResult:
        """Measurement update: correct state, weights, and covariance blocks."""
        model, hp = self.model, self.hp
        n_y = model.n_y
        d = np.asarray(d, dtype=float).ravel()
        if d.size != n_y:
            raise ValueError(f"desired output has dimension {d.size}, expected {n_y}")

        e = d - pred.s_prior[-n_y:]
        L1 = pred.P1_prior[:, -n_y:]
        M = pred.P1_prior[-n_y:, -n_y:]
        S = M + hp.sigma2_y * np.eye(n_y)
        self.health.min_innovation_eig = min(
            self.health.min_innovation_eig,
            float(np.linalg.eigvalsh(0.5 * (S + S.T))[0]))
        N_inv = np.linalg.inv(S)

        K1 = hp.eta_k1 * (L1 @ N_inv)
        s_post = pred.s_prior + K1 @ e
        P1_post = pred.P1_prior - K1 @ L1.T
        self.health.record_asymmetry(P1_post)
        P1_post = 0.5 * (P1_post + P1_post.T)

        # Weight correction, distributed over the dictionary: the increment
        # for component k is eta_k2 * V[k,-n_y:,:].T @ (N_inv @ e).
        C = pred.V_prior[:, -n_y:, :]
        ne = N_inv @ e
        dA = hp.eta_k2 * np.einsum("kyn,y->nk", C, ne)

        self._commit_append(pred)
        model.A += dA

        varsigma = self._varsigma(C, N_inv) if hp.eta_k2 > 0 else np.zeros(model.n_s)
        rho_post = pred.rho_prior - varsigma
        self.health.rho_updates += rho_post.size
        clamped = rho_post < hp.rho_min
        self.health.rho_clamps += int(np.count_nonzero(clamped))
        rho_post = np.maximum(rho_post, hp.rho_min)

        V_post = pred.V_prior - np.einsum("ay,kyn->kan", K1, C)

        for name, arr in (("posterior state", s_post), ("posterior P1", P1_post),
                          ("coefficient increment", dA)):
            if not np.all(np.isfinite(arr)):
                raise DivergenceError(f"non-finite {name} at step {self.step_count}")

        self.cov = CovarianceState(P1=P1_post, V=V_post, rho=rho_post)
        self.s = s_post
        self.step_count += 1
        self.health.steps += 1
        self.health.updates += 1
        return StepResult(y_pred=pred.s_prior[-n_y:], e=e, s_post=s_post.copy(),
                          gain_norm_k1=float(np.linalg.norm(K1)),
                          gain_norm_k2=float(np.linalg.norm(dA)))

    def step(self, u, d=None) -> StepResult:
        """One recursion step; with ``d`` absent, propagate open loop.

        Deferred desired outputs leave every existing coefficient row
        untouched; the appended center gets a zero row.
        """
        pred = self.predict(u)
        if d is not None:
            return self.update(d, pred)
        self._commit_append(pred)
        self.cov = CovarianceState(P1=pred.P1_prior, V=pred.V_prior,
                                   rho=pred.rho_prior)
        self.s = pred.s_prior.copy()
        self.step_count += 1
        self.health.steps += 1
        return StepResult(y_pred=pred.s_prior[-self.model.n_y:], e=None,
                          s_post=pred.s_prior.copy())

    # -- internals -------------------------------------------------------

    def _accept_center(self, k_old: np.ndarray) -> bool:
        if self.max_dict_size is None or self.model.size < self.max_dict_size:
            return True
        return float(np.max(k_old)) <= self.coherence

    def _commit_append(self, pred: Prediction) -> None:
        if not pred.appended:
            return
        self.model.add_center(pred.prev_state, pred.u, np.zeros(self.model.n_s))
        if self._gram is not None:
            self._gram.append(pred.k_old)

    def _gram_product(self, c_flat: np.ndarray) -> np.ndarray:
        """``c_flat @ G`` for the dictionary Gram matrix G, chunked if uncached."""
        model = self.model
        n = model.size
        if self._gram is not None:
            return c_flat @ self._gram.view()
        out = np.zeros_like(c_flat)
        for start in range(0, n, _GRAM_CHUNK):
            rows = slice(start, min(start + _GRAM_CHUNK, n))
            out += c_flat[:, rows] @ gram_block(model.centers_s, model.centers_u,
                                                rows, model.kp)
        return out

    def _varsigma(self, C: np.ndarray, N_inv: np.ndarray) -> np.ndarray:
        """Scalar P4 corrections, one per state component.

        For component k this is ``eta_k2 * sum_ij B_ij G_ij`` with
        ``B = C[k].T @ N_inv @ C[k]`` and G the dictionary Gram matrix,
        evaluated without materializing either N x N matrix.
        """
        n_s, n_y, n = C.shape
        cg = self._gram_product(C.reshape(n_s * n_y, n)).reshape(n_s, n_y, n)
        nc = np.einsum("yz,kzn->kyn", N_inv, C)
        return self.hp.eta_k2 * np.einsum("kyn,kyn->k", nc, cg)


# -- batch training and fixed-weight inference ---------------------------


def train_epochs(filt: FunctionalBayesFilter, u_seq, d_seq, epochs: int,
                 batch_len: int, seed,
                 reset_state=None) -> tuple[FunctionalBayesFilter, np.ndarray]:
    """Train over randomly positioned batches; returns per-batch MSE trace.

    Each batch restarts the signal state (:meth:`reset_signal`, optionally
    to ``reset_state``) and runs ``batch_len`` update steps from a start
    drawn uniformly from the valid range (from position 0 when the batch
    spans the whole sequence).  The trace entry is the mean squared
    innovation over the batch.
    """
    u_seq = np.atleast_2d(np.asarray(u_seq, dtype=float))
    d_seq = np.atleast_2d(np.asarray(d_seq, dtype=float))
    if u_seq.shape[0] == 0:
        raise ValueError("empty training sequence")
    if d_seq.shape[0] != u_seq.shape[0]:
        raise ValueError(f"input/desired lengths disagree: {u_seq.shape[0]} vs "
                         f"{d_seq.shape[0]}")
    n = u_seq.shape[0]
    if not 0 < batch_len <= n:
        raise ValueError(f"batch_len must be in [1, {n}], got {batch_len}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    trace = np.empty(epochs)
    for b in range(epochs):
        start = 0 if batch_len == n else int(rng.integers(0, n - batch_len + 1))
        filt.reset_signal(reset_state)
        se = 0.0
        for i in range(start, start + batch_len):
            res = filt.step(u_seq[i], d_seq[i])
            se += float(res.e @ res.e) / filt.n_y
        trace[b] = se / batch_len
    return filt, trace


@dataclass
class InferResult:
    """Fixed-weight filtering outputs over a sequence."""

    y_prior: np.ndarray       # (T, n_y) open-loop output predictions
    y_post: np.ndarray        # (T, n_y) measurement-corrected outputs
    s_post: np.ndarray        # (T, n_s) posterior states
    p_diag: np.ndarray        # (T, n_s) posterior P1 diagonals
    P1: np.ndarray            # final posterior P1
    health: HealthStats = field(default_factory=HealthStats)


class InferSession:
    """State-only Bayesian filtering with frozen weights.

    Once the model is trained the recursion reduces to the state update:
    the transition gradient propagates P1 and the gain is built from P1
    alone.  No dictionary growth, no coefficient mutation.

    ``n_y_obs`` selects how many trailing state components the measurement
    observes (defaults to the model's output dimension); ``gain_scale``
    defaults to the unscaled Kalman gain.
    """

    def __init__(self, model: RkhsModel, P1_0, hp: FilterParams, s0=None,
                 n_y_obs: int | None = None, gain_scale: float = 1.0):
        self.model = model
        self.hp = hp
        self.P1 = np.array(P1_0, dtype=float)
        if self.P1.shape != (model.n_s, model.n_s):
            raise ValueError(f"P1_0 must be {(model.n_s, model.n_s)}, got {self.P1.shape}")
        self.s = (np.zeros(model.n_s) if s0 is None
                  else np.asarray(s0, dtype=float).ravel().copy())
        self.n_y_obs = model.n_y if n_y_obs is None else n_y_obs
        if not 0 < self.n_y_obs <= model.n_s:
            raise ValueError(f"n_y_obs must be in [1, {model.n_s}], got {self.n_y_obs}")
        self.gain_scale = gain_scale
        self.health = HealthStats()

    def step(self, u, d=None) -> tuple[np.ndarray, np.ndarray]:
        """Returns (prior state, posterior state) for one input/measurement."""
        model, hp = self.model, self.hp
        k = model.kernel_vector(self.s, u)
        s_prior = model.A.T @ k
        Lam = model.transition_gradient(self.s, u, k=k)
        P_prior = Lam @ self.P1 @ Lam.T
        P_prior[np.diag_indices(model.n_s)] += hp.sigma2_s
        self.health.record_asymmetry(P_prior)
        P_prior = 0.5 * (P_prior + P_prior.T)

        if d is None:
            s_post, P_post = s_prior, P_prior
        else:
            m = self.n_y_obs
            d = np.asarray(d, dtype=float).ravel()
            if d.size != m:
                raise ValueError(f"measurement has dimension {d.size}, expected {m}")
            L1 = P_prior[:, -m:]
            S = P_prior[-m:, -m:] + hp.sigma2_y * np.eye(m)
            self.health.min_innovation_eig = min(
                self.health.min_innovation_eig,
                float(np.linalg.eigvalsh(0.5 * (S + S.T))[0]))
            K = self.gain_scale * (L1 @ np.linalg.inv(S))
            s_post = s_prior + K @ (d - s_prior[-m:])
            P_post = P_prior - K @ L1.T
            self.health.record_asymmetry(P_post)
            P_post = 0.5 * (P_post + P_post.T)
            self.health.updates += 1

        if not (np.all(np.isfinite(s_post)) and np.all(np.isfinite(P_post))):
            raise DivergenceError(f"non-finite inference state at step {self.health.steps}")
        self.s, self.P1 = s_post, P_post
        self.health.steps += 1
        return s_prior, s_post


def infer(model: RkhsModel, P1_0, hp: FilterParams, u_seq, d_seq=None,
          s0=None, n_y_obs: int | None = None, gain_scale: float = 1.0) -> InferResult:
    """Run fixed-weight filtering over aligned input/measurement sequences."""
    u_seq = np.atleast_2d(np.asarray(u_seq, dtype=float))
    t = u_seq.shape[0]
    sess = InferSession(model, P1_0, hp, s0=s0, n_y_obs=n_y_obs,
                        gain_scale=gain_scale)
    if d_seq is not None:
        d_seq = np.atleast_2d(np.asarray(d_seq, dtype=float))
        if d_seq.shape[0] != t:
            raise ValueError(f"input/measurement lengths disagree: {t} vs {d_seq.shape[0]}")
    n_s, n_y = model.n_s, model.n_y
    out = InferResult(y_prior=np.empty((t, n_y)), y_post=np.empty((t, n_y)),
                      s_post=np.empty((t, n_s)), p_diag=np.empty((t, n_s)),
                      P1=np.empty((n_s, n_s)))
    for i in range(t):
        d = None if d_seq is None else d_seq[i]
        s_prior, s_post = sess.step(u_seq[i], d)
        out.y_prior[i] = measurement_select(s_prior, n_y)
        out.y_post[i] = measurement_select(s_post, n_y)
        out.s_post[i] = s_post
        out.p_diag[i] = np.diag(sess.P1)
    out.P1 = sess.P1
    out.health = sess.health
    return out


# -- checkpoint format ----------------------------------------------------


def save_checkpoint(filt: FunctionalBayesFilter, path) -> None:
    """Write the model format extended with a COV section (state, P1, rho, V)."""
    def fmt(a):
        return " ".join(f"{v:.17g}" for v in np.asarray(a, dtype=float).ravel())

    hp = filt.hp
    with open(path, "w") as fh:
        fh.write(f"{CKPT_MAGIC} {CKPT_VERSION}\n")
        write_model(filt.model, fh)
        fh.write("COV\n")
        fh.write(f"HP {hp.sigma2_s:.17g} {hp.sigma2_omega:.17g} {hp.sigma2_y:.17g} "
                 f"{hp.eta_k1:.17g} {hp.eta_k2:.17g} {hp.rho_min:.17g}\n")
        fh.write(f"STATE {fmt(filt.s)}\n")
        fh.write(f"STEP {filt.step_count}\n")
        fh.write(f"P1 {fmt(filt.cov.P1)}\n")
        fh.write(f"RHO {fmt(filt.cov.rho)}\n")
        for k in range(filt.model.n_s):
            fh.write(f"V {fmt(filt.cov.V[k])}\n")


def load_checkpoint(path) -> FunctionalBayesFilter:
    def expect(fh, tag):
        line = fh.readline().split()
        if not line or line[0] != tag:
            raise ValueError(f"malformed checkpoint: expected {tag!r} section")
        return np.array([float(v) for v in line[1:]])

    with open(path) as fh:
        magic = fh.readline().split()
        if magic[:2] != [CKPT_MAGIC, CKPT_VERSION]:
            raise ValueError(f"not a {CKPT_MAGIC} {CKPT_VERSION} file")
        model = read_model(fh)
        if fh.readline().strip() != "COV":
            raise ValueError("malformed checkpoint: missing COV section")
        hp_vals = expect(fh, "HP")
        hp = FilterParams(*hp_vals[:3], eta_k1=hp_vals[3], eta_k2=hp_vals[4],
                          rho_min=hp_vals[5])
        s = expect(fh, "STATE")
        step = int(expect(fh, "STEP")[0])
        n_s, n = model.n_s, model.size
        filt = FunctionalBayesFilter(model, hp, s)
        filt.cov.P1 = expect(fh, "P1").reshape(n_s, n_s)
        filt.cov.rho = expect(fh, "RHO")
        v = np.empty((n_s, n_s, n))
        for k in range(n_s):
            v[k] = expect(fh, "V").reshape(n_s, n)
        filt.cov.V = v
        filt.step_count = step
    return filt


def read_checkpoint_header(path) -> dict:
    """Parse just the header lines of a model or checkpoint file."""
    with open(path) as fh:
        first = fh.readline().split()
        info = {"format": " ".join(first[:2])}
        if first[:2] == [CKPT_MAGIC, CKPT_VERSION]:
            first = fh.readline().split()
        if first[:2] != [MODEL_MAGIC, "v1"]:
            raise ValueError(f"unrecognized file format: {' '.join(first[:2])!r}")
        info.update(n_s=int(first[2]), n_u=int(first[3]), n_y=int(first[4]),
                    a_s=float(first[5]), a_u=float(first[6]), size=int(first[7]))
    return info
