"""Projected-Gram pipeline for randomly rotated landmark sets.

A 3 x k landmark matrix V is observed only through planar projections
H A V of its random rotations A, with H = diag(1, 1, 0).  For a
shift-symmetric rotation law (centred law conjugation-invariant, modal
rotation M) the expected projected Gram matrix has the closed form

    E[Gram(H A V)] = Gram(V) - Gram(D M V),
    D^2 = diag((1 - tau2)/2, (1 - tau2)/2, tau2),

with tau2 = E[Z^2] the second zonal moment.  The same tau2 = 1/3 as
under the uniform law makes the expectation indistinguishable from the
Haar case (fake uniformity), which is what breaks naive recovery.
"""

from __future__ import annotations

import math

import numpy as np

from . import moments
from .distributions import DistributionSpec, sample_rotations
from .errors import DomainError

_H = np.diag([1.0, 1.0, 0.0])


def gram(V) -> np.ndarray:
    """Gram(V) = V^T V, invariant under left rotation of the landmarks."""
    V = np.asarray(V, dtype=float)
    return V.T @ V


def project(A, V) -> np.ndarray:
    """Planar projection H A V of the rotated landmarks; the third row is
    exactly zero."""
    A = np.asarray(A, dtype=float)
    V = np.asarray(V, dtype=float)
    return _H @ A @ V


def is_gram(G, tol: float = 1e-12) -> bool:
    """Symmetric within ``tol`` and positive semidefinite up to
    -1e-10 * ||G|| on the smallest eigenvalue."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        return False
    if not np.all(np.abs(G - G.T) <= tol):
        return False
    scale = np.linalg.norm(G, ord=2) if G.size else 0.0
    if scale == 0.0:
        return True
    return float(np.linalg.eigvalsh(G)[0]) >= -1e-10 * scale


def shape_dispersion_matrix(spec: DistributionSpec, quad=None) -> np.ndarray:
    """The diagonal matrix D with D^2 = diag((1-tau2)/2, (1-tau2)/2, tau2),
    computed through the moment integral ``moments.tau_k``."""
    tau2 = moments.tau_k(spec, 2, quad)
    d = math.sqrt(max((1.0 - tau2) / 2.0, 0.0))
    return np.diag([d, d, math.sqrt(max(tau2, 0.0))])


def expected_projected_gram(spec: DistributionSpec, V, quad=None) -> np.ndarray:
    """Closed-form E[Gram(H A V)] = Gram(V) - Gram(D M V)."""
    V = np.asarray(V, dtype=float)
    D = shape_dispersion_matrix(spec, quad)
    return gram(V) - gram(D @ spec.modal @ V)


def mc_projected_gram(
    spec: DistributionSpec,
    V,
    n: int,
    rng: np.random.Generator,
    return_stderr: bool = False,
):
    """Monte Carlo mean of Gram(H A V) over n rotation draws.

    Accumulation is chunked but the chunk order is fixed, so the result
    is reproducible bitwise for a given seeded generator.  With
    ``return_stderr`` the entrywise standard error of the mean is
    returned as a second array.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    V = np.asarray(V, dtype=float)
    k = V.shape[1]
    total = np.zeros((k, k))
    total_sq = np.zeros((k, k))
    chunk = 1 << 16
    done = 0
    while done < n:
        m = min(chunk, n - done)
        A = sample_rotations(spec, m, rng)
        B = A[:, :2, :] @ V  # rows of H A V that survive the projection
        G = np.einsum("ndj,ndl->njl", B, B)
        total += G.sum(axis=0)
        total_sq += (G * G).sum(axis=0)
        done += m
    mean = total / n
    if not return_stderr:
        return mean
    var = np.maximum(total_sq / n - mean * mean, 0.0)
    if n > 1:
        var *= n / (n - 1.0)
    return mean, np.sqrt(var / n)


def recover_gram(E, tau2: float, w) -> np.ndarray:
    """Invert the expected projected Gram.

    With W = M V and w its third row, the forward map reads
    E = ((1 + tau2)/2) Gram(V) + ((1 - 3 tau2)/2) w w^T, so

        Gram(V) = (2 / (1 + tau2)) * (E - ((1 - 3 tau2)/2) w w^T).

    At tau2 = 1/3 the w-term vanishes and recovery degenerates to
    (3/2) E for every w: the fake-uniformity pitfall.
    """
    if not 0.0 < tau2 < 1.0:
        raise DomainError("tau2 must lie in (0, 1)")
    E = np.asarray(E, dtype=float)
    w = np.asarray(w, dtype=float)
    return (2.0 / (1.0 + tau2)) * (E - 0.5 * (1.0 - 3.0 * tau2) * np.outer(w, w))


def limit_gram_kappa_infinity(M, V) -> np.ndarray:
    """kappa -> infinity limit of the expected projected Gram.

    As the law concentrates at M, D^2 -> diag(0, 0, 1) and the
    expectation tends to Gram((I - p p^T) V) with p = M^T e3 (the third
    row of M): only the projection orthogonal to that direction
    survives.
    """
    M = np.asarray(M, dtype=float)
    V = np.asarray(V, dtype=float)
    p = M.T @ np.array([0.0, 0.0, 1.0])
    return gram((np.eye(3) - np.outer(p, p)) @ V)
