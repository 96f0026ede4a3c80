from collections import deque

import numpy as np
import pytest

from fbf.baselines import finite_difference_jacobian
from fbf.systems import (ikeda, ikeda_step, mackey_glass, robot_arm_forward,
                         robot_arm_trajectory)


def ring_buffer_mg(n, beta=0.2, gamma=0.1, tau=30.0, power=10.0, dt=6.0,
                   x0=0.9, oversample=10):
    """Independent integrator: deque ring buffer, same RK4 stage layout."""
    h = dt / oversample
    lag = tau / h
    depth = int(np.ceil(lag)) + 3
    ring = deque([x0] * depth, maxlen=depth)  # ring[-1] is the current value

    def delayed(offset):
        pos = lag - offset  # grid units back from the current index
        if pos <= 0.0:
            return ring[-1]
        k_lo = int(np.floor(pos))
        frac = pos - k_lo
        newer = ring[-1 - k_lo]
        older = ring[-1 - k_lo - 1] if k_lo + 1 < depth else ring[0]
        return (1.0 - frac) * newer + frac * older

    def rhs(x, xd):
        return beta * xd / (1.0 + xd**power) - gamma * x

    out = [x0]
    for i in range((n - 1) * oversample):
        x = ring[-1]
        k1 = rhs(x, delayed(0.0))
        k2 = rhs(x + 0.5 * h * k1, delayed(0.5))
        k3 = rhs(x + 0.5 * h * k2, delayed(0.5))
        k4 = rhs(x + h * k3, delayed(1.0))
        ring.append(x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))
        if (i + 1) % oversample == 0:
            out.append(ring[-1])
    return np.array(out)


class TestMackeyGlass:
    def test_decay_without_feedback(self):
        # tau = 0, beta = 0 reduces to dx/dt = -gamma x
        x = mackey_glass(20, beta=0.0, tau=0.0, gamma=0.1, dt=1.0, x0=2.0)
        t = np.arange(20)
        np.testing.assert_allclose(x, 2.0 * np.exp(-0.1 * t), rtol=1e-9)

    def test_fixed_point_stays_constant(self):
        # beta x/(1+x^n) = gamma x has the root x = (beta/gamma - 1)^(1/n) = 1
        x = mackey_glass(50, x0=1.0)
        np.testing.assert_allclose(x, np.ones(50), atol=1e-9)

    def test_matches_independent_integrator(self):
        ours = mackey_glass(10)
        theirs = ring_buffer_mg(10)
        np.testing.assert_allclose(ours, theirs, rtol=1e-10)

    def test_matches_independent_integrator_long(self):
        ours = mackey_glass(200)
        theirs = ring_buffer_mg(200)
        np.testing.assert_allclose(ours, theirs, rtol=1e-9)

    def test_sensitive_dependence(self):
        a = mackey_glass(1000)
        b = mackey_glass(1000, x0=0.9 + 1e-8)
        assert np.max(np.abs(a - b)) > 1e-2

    def test_input_validation(self):
        with pytest.raises(ValueError):
            mackey_glass(0)
        with pytest.raises(ValueError):
            mackey_glass(5, tau=-1.0)


class TestIkeda:
    def test_first_iterate_hand_values(self):
        traj = ikeda(2)
        np.testing.assert_array_equal(traj[0], [1.0, 0.0])
        assert traj[1, 0] == pytest.approx(0.2802134471700843, abs=1e-12)
        assert traj[1, 1] == pytest.approx(-0.4330211523300299, abs=1e-12)

    def test_zero_contraction_parameter(self):
        traj = ikeda(10, u_param=0.0, x0=0.3, y0=-0.7)
        np.testing.assert_array_equal(traj[1:], np.tile([1.0, 0.0], (9, 1)))

    def test_attractor_bounded(self):
        traj = ikeda(10_000)
        assert np.max(np.linalg.norm(traj, axis=1)) <= 10.0

    def test_step_matches_sequence(self):
        traj = ikeda(5)
        np.testing.assert_array_equal(ikeda_step(traj[2]), traj[3])


class TestRobotArm:
    def test_hand_evaluation(self):
        y = robot_arm_forward(np.pi / 2, np.pi)
        np.testing.assert_allclose(y, [0.0, 1.0], atol=1e-15)

    def test_collinear_links(self):
        y = robot_arm_forward(0.4, 0.0)
        np.testing.assert_allclose(
            y, [0.6 * np.cos(0.4), 0.6 * np.sin(0.4)], rtol=1e-14)
        assert np.linalg.norm(y) == pytest.approx(0.6, rel=1e-14)

    def test_jacobian_matches_finite_differences(self, rng):
        r1, r2 = 0.8, 0.2
        for _ in range(5):
            a1, a2 = rng.uniform(0.3, 1.2), rng.uniform(np.pi / 2, 1.5 * np.pi)
            analytic = np.array([
                [-r1 * np.sin(a1) + r2 * np.sin(a1 + a2), r2 * np.sin(a1 + a2)],
                [r1 * np.cos(a1) - r2 * np.cos(a1 + a2), -r2 * np.cos(a1 + a2)],
            ])
            fd = finite_difference_jacobian(
                lambda v: robot_arm_forward(v[0], v[1]), np.array([a1, a2]))
            np.testing.assert_allclose(fd, analytic, atol=1e-6)

    def test_trajectory_ranges_and_noise(self, rng):
        angles, meas = robot_arm_trajectory(4000, rng)
        assert np.all(angles[:, 0] >= 0.3) and np.all(angles[:, 0] <= 1.2)
        assert np.all(angles[:, 1] >= np.pi / 2) and np.all(angles[:, 1] <= 1.5 * np.pi)
        noise = meas - robot_arm_forward(angles[:, 0], angles[:, 1])
        assert np.var(noise) == pytest.approx(0.005, rel=0.15)

    def test_trajectory_deterministic(self):
        a1, m1 = robot_arm_trajectory(50, np.random.default_rng(5))
        a2, m2 = robot_arm_trajectory(50, np.random.default_rng(5))
        np.testing.assert_array_equal(a1, a2)
        np.testing.assert_array_equal(m1, m2)
