"""Additive noise models scaled to a target signal-to-noise ratio."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FAMILIES = ("gaussian", "laplacian", "uniform", "alpha_stable")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise family plus the stability index (alpha_stable only)."""

    family: str
    alpha: float = 1.6

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown noise family {self.family!r}; "
                             f"choose from {FAMILIES}")
        if self.family == "alpha_stable" and not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"stability index must be in (0, 2], got {self.alpha}")


def sample_alpha_stable(rng: np.random.Generator, alpha: float,
                        size) -> np.ndarray:
    """Symmetric alpha-stable samples with unit scale (Chambers-Mallows-Stuck)."""
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"stability index must be in (0, 2], got {alpha}")
    u = rng.uniform(-np.pi / 2, np.pi / 2, size)
    if alpha == 1.0:
        return np.tan(u)
    w = rng.exponential(1.0, size)
    return (np.sin(alpha * u) / np.cos(u) ** (1.0 / alpha)
            * (np.cos(u - alpha * u) / w) ** ((1.0 - alpha) / alpha))


@dataclass
class NoisySignal:
    """Noise-injection output: the noisy signal plus realized statistics."""

    noisy: np.ndarray
    noise: np.ndarray
    scale: float          # target noise scale sigma (std or stable scale)
    sample_var: float     # empirical variance of the injected noise


def add_noise(signal, spec: NoiseSpec, snr_db: float, seed) -> NoisySignal:
    """Inject i.i.d. additive noise at the requested SNR.

    Signal power is the mean square over all entries; the noise scale is
    ``sqrt(power / 10^(snr_db/10))``.  For the infinite-variance stable
    family the scale parameter stands in for the standard deviation.
    ``snr_db = inf`` returns the signal unchanged.
    """
    signal = np.asarray(signal, dtype=float)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if np.isinf(snr_db) and snr_db > 0:
        return NoisySignal(signal.copy(), np.zeros_like(signal), 0.0, 0.0)
    power = float(np.mean(signal**2))
    if power <= 0.0:
        raise ValueError("zero-power signal: SNR scaling undefined")
    sigma = np.sqrt(power / 10.0 ** (snr_db / 10.0))

    if spec.family == "gaussian":
        noise = rng.normal(0.0, sigma, signal.shape)
    elif spec.family == "laplacian":
        noise = rng.laplace(0.0, sigma / np.sqrt(2.0), signal.shape)
    elif spec.family == "uniform":
        half = sigma * np.sqrt(3.0)
        noise = rng.uniform(-half, half, signal.shape)
    else:
        noise = sigma * sample_alpha_stable(rng, spec.alpha, signal.shape)
    return NoisySignal(signal + noise, noise, float(sigma), float(np.var(noise)))
