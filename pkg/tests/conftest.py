"""Shared helpers for the test suite."""

import math

import numpy as np

from rotgram import so3


def random_rotation(rng):
    """A generic rotation away from the chart's degenerate set."""
    axis = so3.sample_uniform_axes(1, rng)[0]
    angle = rng.uniform(0.05, math.pi - 0.05)
    return so3.from_axis_angle(axis, angle)


def random_rotations(rng, n):
    axes = so3.sample_uniform_axes(n, rng)
    angles = rng.uniform(0.05, math.pi - 0.05, size=n)
    return so3.from_axis_angle_batch(axes, angles)


def ks_statistic(a, b):
    """Two-sample Kolmogorov-Smirnov statistic."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    both = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, both, side="right") / a.size
    cdf_b = np.searchsorted(b, both, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def ks_critical(n, m, alpha=0.001):
    """Large-sample two-sample KS critical value at level ``alpha``."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c * math.sqrt((n + m) / (n * m))


def rotation_with_third_row(p):
    """A rotation whose third row equals the unit vector p."""
    p = np.asarray(p, dtype=float)
    p = p / np.linalg.norm(p)
    seed = np.array([1.0, 0.0, 0.0])
    if abs(seed @ p) > 0.9:
        seed = np.array([0.0, 1.0, 0.0])
    r1 = seed - (seed @ p) * p
    r1 = r1 / np.linalg.norm(r1)
    r2 = np.cross(p, r1)
    return np.vstack([r1, r2, p])
