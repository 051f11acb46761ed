"""Deterministic SO(3) algebra: the axis-angle chart, skew operator,
angles between rotations, and the planar spectral block.

Conventions:
- Rotations are plain 3x3 numpy arrays acting on column vectors, with
  R^T R = I and det R = +1 (within ``ROTATION_TOL``).
- The axis-angle chart is R = cos(t) I + sin(t) S(u) + (1 - cos(t)) u u^T
  with unit axis u and angle t in [0, pi).  The identity and half-turns
  (t = 0 or pi) are excluded from the inverse chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRotation

ROTATION_TOL = 1e-12
DEGENERATE_ANGLE = 1e-9

_EYE3 = np.eye(3)


@dataclass(frozen=True)
class AxisAngle:
    """Unit rotation axis plus angle in [0, pi)."""

    axis: np.ndarray
    angle: float

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        if axis.shape != (3,):
            raise ValueError("axis must be a 3-vector")
        if abs(np.linalg.norm(axis) - 1.0) > 1e-12:
            raise ValueError("axis must have unit norm")
        if not 0.0 <= self.angle < math.pi:
            raise ValueError("angle must lie in [0, pi)")
        object.__setattr__(self, "axis", axis)


def skew(a) -> np.ndarray:
    """Skew-symmetric matrix S(a) with S(a) @ x = a x x (cross product)."""
    a = np.asarray(a, dtype=float)
    return np.array([
        [0.0, -a[2], a[1]],
        [a[2], 0.0, -a[0]],
        [-a[1], a[0], 0.0],
    ])


def vee(W) -> np.ndarray:
    """Inverse of ``skew`` on antisymmetric matrices."""
    W = np.asarray(W, dtype=float)
    return np.array([W[2, 1], W[0, 2], W[1, 0]])


def is_rotation(R, tol: float = ROTATION_TOL) -> bool:
    """True when R^T R = I entrywise and det R = 1 within ``tol``."""
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        return False
    if not np.all(np.abs(R.T @ R - _EYE3) <= tol):
        return False
    return abs(np.linalg.det(R) - 1.0) <= tol


def require_rotation(R, tol: float = ROTATION_TOL) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if not is_rotation(R, tol):
        raise ValueError("matrix is not a rotation within tolerance %g" % tol)
    return R


def from_axis_angle(axis, angle: float) -> np.ndarray:
    """Rotation about the unit vector ``axis`` by ``angle`` radians."""
    u = np.asarray(axis, dtype=float)
    c = math.cos(angle)
    s = math.sin(angle)
    return c * _EYE3 + s * skew(u) + (1.0 - c) * np.outer(u, u)


def from_axis_angle_batch(axes: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Vectorised axis-angle chart: (n,3) axes and (n,) angles -> (n,3,3)."""
    u = np.asarray(axes, dtype=float)
    t = np.asarray(angles, dtype=float)
    c = np.cos(t)[:, None, None]
    s = np.sin(t)[:, None, None]
    n = u.shape[0]
    S = np.zeros((n, 3, 3))
    S[:, 0, 1] = -u[:, 2]
    S[:, 0, 2] = u[:, 1]
    S[:, 1, 0] = u[:, 2]
    S[:, 1, 2] = -u[:, 0]
    S[:, 2, 0] = -u[:, 1]
    S[:, 2, 1] = u[:, 0]
    outer = u[:, :, None] * u[:, None, :]
    return c * _EYE3 + s * S + (1.0 - c) * outer


def to_axis_angle(R) -> AxisAngle:
    """Invert the axis-angle chart.

    Raises DegenerateRotation when the rotation angle is within
    ``DEGENERATE_ANGLE`` of 0 or pi, where the chart is not defined.
    The angle is recovered from atan2 of the skew and trace parts, which
    is accurate over the whole admissible range; the axis is taken from
    the skew part away from pi and from the symmetric part near pi,
    where the skew part degenerates.
    """
    R = np.asarray(R, dtype=float)
    s_vec = vee((R - R.T) / 2.0)
    s = float(np.linalg.norm(s_vec))
    c = (float(np.trace(R)) - 1.0) / 2.0
    angle = math.atan2(s, c)
    if angle < DEGENERATE_ANGLE or angle > math.pi - DEGENERATE_ANGLE:
        raise DegenerateRotation(
            "rotation angle %.3e is within %.0e of 0 or pi" % (angle, DEGENERATE_ANGLE)
        )
    if angle <= 0.75 * math.pi:
        axis = s_vec / s
    else:
        # Near pi the skew part is O(pi - angle); the symmetric part gives
        # u u^T with condition number O(1).
        B = ((R + R.T) / 2.0 - c * _EYE3) / (1.0 - c)
        j = int(np.argmax(np.diag(B)))
        axis = B[:, j] / math.sqrt(B[j, j])
        axis = axis / np.linalg.norm(axis)
        i = int(np.argmax(np.abs(s_vec)))
        if axis[i] * s_vec[i] < 0.0:
            axis = -axis
    return AxisAngle(axis=axis, angle=angle)


def rotation_angle_between(m1, m2) -> float:
    """Riemannian distance on SO(3): the rotation angle of M1 M2^T, in [0, pi].

    Evaluated as atan2(|skew part|, (trace - 1)/2), which agrees with
    arccos((tr(M1 M2^T) - 1)/2) but stays accurate near 0 and pi.
    """
    D = np.asarray(m1, dtype=float) @ np.asarray(m2, dtype=float).T
    s = float(np.linalg.norm(vee((D - D.T) / 2.0)))
    c = (float(np.trace(D)) - 1.0) / 2.0
    c = min(1.0, max(-1.0, c))
    return math.atan2(s, c)


def planar_block(alpha: float) -> np.ndarray:
    """The 3x3 block A(alpha) whose top-left 2x2 corner is
    [[1-cos a, sin a], [-sin a, 1-cos a]] and which is zero elsewhere."""
    c = math.cos(alpha)
    s = math.sin(alpha)
    return np.array([
        [1.0 - c, s, 0.0],
        [-s, 1.0 - c, 0.0],
        [0.0, 0.0, 0.0],
    ])


def sample_uniform_axis(rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the unit sphere.

    Built from a uniform third component on [-1, 1] and a uniform
    azimuth, so the U3 marginal is uniform by construction.
    """
    return sample_uniform_axes(1, rng)[0]


def sample_uniform_axes(n: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorised ``sample_uniform_axis``: (n,3) array of unit vectors.

    Draw order is fixed (all third components, then all azimuths) so a
    seeded generator reproduces the same axes.
    """
    u3 = rng.uniform(-1.0, 1.0, size=n)
    phi = rng.uniform(0.0, 2.0 * math.pi, size=n)
    r = np.sqrt(np.clip(1.0 - u3 * u3, 0.0, None))
    return np.column_stack((r * np.cos(phi), r * np.sin(phi), u3))
