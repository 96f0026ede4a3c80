"""Benchmark system generators: delay-feedback flow, planar chaotic map,
two-link arm kinematics."""

from __future__ import annotations

import numpy as np


def mackey_glass(n: int, beta: float = 0.2, gamma: float = 0.1,
                 tau: float = 30.0, power: float = 10.0, dt: float = 6.0,
                 x0: float = 0.9, oversample: int = 10) -> np.ndarray:
    """Delay-feedback flow dx/dt = beta*x(t-tau)/(1 + x(t-tau)^power) - gamma*x.

    Integrated with fourth-order Runge-Kutta at internal step ``dt /
    oversample``; the delayed value is linearly interpolated on the internal
    grid and held at ``x0`` for t <= 0.  Returns ``n`` samples spaced ``dt``
    apart starting at t = 0.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if dt <= 0 or oversample < 1:
        raise ValueError("dt must be positive and oversample >= 1")
    if tau < 0:
        raise ValueError(f"delay must be nonnegative, got {tau}")

    h = dt / oversample
    steps = (n - 1) * oversample
    buf = np.empty(steps + 1)
    buf[0] = x0
    lag = tau / h  # delay in internal-grid units

    def delayed(t_idx: float, known: int) -> float:
        # delayed value at t_idx - lag; flat extrapolation outside [0, known]
        j = t_idx - lag
        if j <= 0.0:
            return x0
        if j >= known:
            return buf[known]
        j0 = int(j)
        frac = j - j0
        return (1.0 - frac) * buf[j0] + frac * buf[j0 + 1]

    def rhs(x: float, xd: float) -> float:
        return beta * xd / (1.0 + xd**power) - gamma * x

    for i in range(steps):
        x = buf[i]
        k1 = rhs(x, delayed(i, i))
        k2 = rhs(x + 0.5 * h * k1, delayed(i + 0.5, i))
        k3 = rhs(x + 0.5 * h * k2, delayed(i + 0.5, i))
        k4 = rhs(x + h * k3, delayed(i + 1.0, i))
        buf[i + 1] = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return buf[::oversample].copy()


def ikeda_step(p: np.ndarray, u_param: float = 0.84) -> np.ndarray:
    """One iterate of the planar map with phase t = 0.4 - 6/(1 + x^2 + y^2)."""
    x, y = float(p[0]), float(p[1])
    t = 0.4 - 6.0 / (1.0 + x * x + y * y)
    ct, st = np.cos(t), np.sin(t)
    return np.array([1.0 + u_param * (x * ct - y * st),
                     u_param * (x * st + y * ct)])


def ikeda(n: int, u_param: float = 0.84, x0: float = 1.0,
          y0: float = 0.0) -> np.ndarray:
    """``n`` iterates of the planar map, starting with [x0, y0] as row 0."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    out = np.empty((n, 2))
    out[0] = (x0, y0)
    for i in range(1, n):
        out[i] = ikeda_step(out[i - 1], u_param)
    return out


def robot_arm_forward(alpha1, alpha2, r1: float = 0.8, r2: float = 0.2) -> np.ndarray:
    """End-effector position of the two-link arm.

    y1 = r1*cos(a1) - r2*cos(a1 + a2), y2 = r1*sin(a1) - r2*sin(a1 + a2).
    Accepts scalars or equal-shaped arrays; output stacks the two
    coordinates along the last axis.
    """
    a1 = np.asarray(alpha1, dtype=float)
    a2 = np.asarray(alpha2, dtype=float)
    y1 = r1 * np.cos(a1) - r2 * np.cos(a1 + a2)
    y2 = r1 * np.sin(a1) - r2 * np.sin(a1 + a2)
    return np.stack([y1, y2], axis=-1)


ARM_ALPHA1_RANGE = (0.3, 1.2)
ARM_ALPHA2_RANGE = (np.pi / 2, 3 * np.pi / 2)
ARM_PROCESS_STD = np.array([0.01, 0.1])
ARM_MEAS_VAR = 0.005


def robot_arm_trajectory(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Random-walk joint angles (clipped to the joint ranges) and noisy
    end-effector measurements.

    Returns ``(angles, measurements)`` of shapes (n, 2) and (n, 2).
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    lo = np.array([ARM_ALPHA1_RANGE[0], ARM_ALPHA2_RANGE[0]])
    hi = np.array([ARM_ALPHA1_RANGE[1], ARM_ALPHA2_RANGE[1]])
    angles = np.empty((n, 2))
    angles[0] = rng.uniform(lo, hi)
    for i in range(1, n):
        step = rng.normal(0.0, ARM_PROCESS_STD)
        angles[i] = np.clip(angles[i - 1] + step, lo, hi)
    meas = robot_arm_forward(angles[:, 0], angles[:, 1])
    meas = meas + rng.normal(0.0, np.sqrt(ARM_MEAS_VAR), meas.shape)
    return angles, meas
