import math

import numpy as np
import pytest

from conftest import random_rotation
from rotgram import so3
from rotgram.errors import DegenerateRotation

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


class TestSkew:
    def test_e1_layout(self):
        expected = np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float)
        np.testing.assert_array_equal(so3.skew(E1), expected)

    def test_zero_vector(self):
        np.testing.assert_array_equal(so3.skew(np.zeros(3)), np.zeros((3, 3)))

    def test_self_product_vanishes(self):
        a = np.array([1.0, 2.0, 3.0])
        np.testing.assert_array_equal(so3.skew(a) @ a, np.zeros(3))

    def test_matches_cross_product(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a, x = rng.normal(size=3), rng.normal(size=3)
            np.testing.assert_allclose(so3.skew(a) @ x, np.cross(a, x), atol=1e-14)

    def test_vee_inverts(self):
        a = np.array([0.3, -1.2, 2.0])
        np.testing.assert_array_equal(so3.vee(so3.skew(a)), a)


class TestFromAxisAngle:
    def test_z_quarter_turn_maps_e1_to_e2(self):
        R = so3.from_axis_angle(E3, math.pi / 2)
        np.testing.assert_allclose(R @ E1, E2, atol=1e-15)

    def test_zero_angle_is_identity(self):
        R = so3.from_axis_angle(np.array([0.6, 0.8, 0.0]), 0.0)
        np.testing.assert_array_equal(R, np.eye(3))

    def test_trace_identity_at_pi_third(self):
        R = so3.from_axis_angle(E3, math.pi / 3)
        assert abs(np.trace(R) - 2.0) < 1e-12  # 1 + 2 cos(pi/3)

    def test_sampled_rotation_invariants(self):
        rng = np.random.default_rng(2)
        for _ in range(2000):
            u = so3.sample_uniform_axis(rng)
            t = rng.uniform(0.0, math.pi)
            R = so3.from_axis_angle(u, t)
            assert np.max(np.abs(R.T @ R - np.eye(3))) < 1e-12
            assert abs(np.linalg.det(R) - 1.0) < 1e-12
            assert np.max(np.abs(R @ u - u)) < 1e-12
            assert abs(np.trace(R) - (1.0 + 2.0 * math.cos(t))) < 1e-12
            # law of spherical cosines on the (3,3) entry
            assert abs(R[2, 2] - (u[2] ** 2 + (1.0 - u[2] ** 2) * math.cos(t))) < 1e-12

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(3)
        axes = so3.sample_uniform_axes(10, rng)
        angles = rng.uniform(0.0, math.pi, size=10)
        batch = so3.from_axis_angle_batch(axes, angles)
        for i in range(10):
            np.testing.assert_array_equal(batch[i], so3.from_axis_angle(axes[i], angles[i]))


class TestToAxisAngle:
    def test_z_quarter_turn(self):
        aa = so3.to_axis_angle(so3.from_axis_angle(E3, math.pi / 2))
        np.testing.assert_allclose(aa.axis, E3, atol=1e-12)
        assert abs(aa.angle - math.pi / 2) < 1e-12

    def test_identity_is_degenerate(self):
        with pytest.raises(DegenerateRotation):
            so3.to_axis_angle(np.eye(3))

    def test_half_turn_is_degenerate(self):
        R = so3.from_axis_angle(E1, math.pi - 1e-12)
        with pytest.raises(DegenerateRotation):
            so3.to_axis_angle(R)

    def test_round_trip_random(self):
        rng = np.random.default_rng(4)
        for _ in range(10000):
            u = so3.sample_uniform_axis(rng)
            t = rng.uniform(1e-6, math.pi - 1e-6)
            R = so3.from_axis_angle(u, t)
            aa = so3.to_axis_angle(R)
            back = so3.from_axis_angle(aa.axis, aa.angle)
            assert np.max(np.abs(back - R)) < 1e-10

    def test_round_trip_near_degenerate_edges(self):
        rng = np.random.default_rng(5)
        for t in [3e-9, 1e-7, 1e-4, math.pi - 1e-4, math.pi - 1e-7, math.pi - 3e-9]:
            u = so3.sample_uniform_axis(rng)
            R = so3.from_axis_angle(u, t)
            back = so3.to_axis_angle(R)
            rebuilt = so3.from_axis_angle(back.axis, back.angle)
            assert np.max(np.abs(rebuilt - R)) < 1e-10

    def test_angle_matches_arccos_of_trace(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            R = random_rotation(rng)
            aa = so3.to_axis_angle(R)
            expected = math.acos(min(1.0, max(-1.0, (np.trace(R) - 1.0) / 2.0)))
            assert abs(aa.angle - expected) < 1e-9


class TestRotationAngleBetween:
    def test_identical_rotations(self):
        R = so3.from_axis_angle(E2, 0.9)
        assert so3.rotation_angle_between(R, R) == 0.0

    def test_z_rotation_angle(self):
        assert abs(so3.rotation_angle_between(np.eye(3), so3.from_axis_angle(E3, 0.7)) - 0.7) < 1e-12

    def test_consistent_with_chart(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            m1, m2 = random_rotation(rng), random_rotation(rng)
            alpha = so3.rotation_angle_between(m1, m2)
            try:
                chart = so3.to_axis_angle(m1 @ m2.T).angle
            except DegenerateRotation:
                continue
            assert abs(alpha - chart) < 1e-10

    def test_left_invariance(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            m1, m2, q = (random_rotation(rng) for _ in range(3))
            a = so3.rotation_angle_between(m1, m2)
            b = so3.rotation_angle_between(q @ m1, q @ m2)
            assert abs(a - b) < 1e-10

    def test_trace_identity(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            m1, m2 = random_rotation(rng), random_rotation(rng)
            alpha = so3.rotation_angle_between(m1, m2)
            lhs = np.trace(np.eye(3) - m1 @ m2.T)
            assert abs(lhs - 2.0 * (1.0 - math.cos(alpha))) < 1e-12


class TestPlanarBlock:
    def test_quarter_turn_layout(self):
        expected = np.array([[1, 1, 0], [-1, 1, 0], [0, 0, 0]], dtype=float)
        np.testing.assert_allclose(so3.planar_block(math.pi / 2), expected, atol=1e-15)

    def test_small_angle_limit(self):
        assert np.max(np.abs(so3.planar_block(1e-9))) < 1e-8

    def test_trace_value(self):
        # 2 (1 - cos 1)
        assert abs(np.trace(so3.planar_block(1.0)) - 0.91939538826372045) < 1e-15


class TestSampleUniformAxis:
    def test_moments_and_norms(self):
        rng = np.random.default_rng(10)
        axes = so3.sample_uniform_axes(10 ** 6, rng)
        norms = np.linalg.norm(axes, axis=1)
        assert np.max(np.abs(norms - 1.0)) < 1e-12
        assert abs(axes[:, 2].mean()) < 4e-3
        assert abs((axes[:, 2] ** 2).mean() - 1.0 / 3.0) < 4e-3

    def test_scalar_form(self):
        rng = np.random.default_rng(11)
        u = so3.sample_uniform_axis(rng)
        assert u.shape == (3,)
        assert abs(np.linalg.norm(u) - 1.0) < 1e-12


class TestAxisAngleType:
    def test_rejects_non_unit_axis(self):
        with pytest.raises(ValueError):
            so3.AxisAngle(axis=np.array([1.0, 1.0, 0.0]), angle=0.5)

    def test_rejects_angle_out_of_range(self):
        with pytest.raises(ValueError):
            so3.AxisAngle(axis=E1, angle=math.pi)

    def test_validators(self):
        assert so3.is_rotation(np.eye(3))
        assert not so3.is_rotation(np.eye(3) * 1.001)
        assert not so3.is_rotation(np.diag([1.0, 1.0, -1.0]))
        with pytest.raises(ValueError):
            so3.require_rotation(np.zeros((3, 3)))
