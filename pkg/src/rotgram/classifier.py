"""Bayes classification of two shift-symmetric rotation classes.

Class i draws P = R M_i with a shared centred conjugation-invariant R
and equal priors.  The Bayes rule assigns class 1 exactly when
tr(P M1^T (I - M1 M2^T)) > 0, and its accuracy depends on the modal
rotations only through their separation angle alpha (the rotation angle
of M1 M2^T).  The accuracy has a closed integral form in

    h(x) = sqrt(x / (1 - x)) f_X(x),

which for the Cayley-LMR family with modal identity reduces to
x^kappa / B(kappa + 1/2, 3/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import so3
from .distributions import DistributionSpec, fx_density, sample_rotations
from .errors import DomainError
from .moments import QuadratureSpec, integrate

TIE_TOL = 1e-14


@dataclass(frozen=True)
class ClassPair:
    """Two modal rotations plus the shared centred law; the separation
    angle is recomputed from the matrices, never trusted from input."""

    m1: np.ndarray
    m2: np.ndarray
    common: DistributionSpec
    alpha: float = None

    def __post_init__(self):
        m1 = so3.require_rotation(self.m1)
        m2 = so3.require_rotation(self.m2)
        if not np.all(np.abs(self.common.modal - np.eye(3)) <= 1e-12):
            raise DomainError("the common law must be centred (modal = identity)")
        alpha = so3.rotation_angle_between(m1, m2)
        if not 1e-12 < alpha < math.pi - 1e-12:
            raise DomainError("modal rotations must be separated by an angle in (0, pi)")
        m1.flags.writeable = False
        m2.flags.writeable = False
        object.__setattr__(self, "m1", m1)
        object.__setattr__(self, "m2", m2)
        object.__setattr__(self, "alpha", alpha)


def make_h(spec: DistributionSpec):
    """The weight h(x) = sqrt(x / (1 - x)) f_X(x) on (0, 1)."""

    def h(x: float) -> float:
        return math.sqrt(x / (1.0 - x)) * fx_density(spec, x)

    return h


def bayes_assign(P, pair: ClassPair) -> int:
    """Bayes-optimal class of an observed rotation; ties (statistic
    within TIE_TOL of zero) go to class 1 for reproducibility."""
    P = np.asarray(P, dtype=float)
    contrast = np.eye(3) - pair.m1 @ pair.m2.T
    stat = float(np.trace(P @ pair.m1.T @ contrast))
    return 1 if (stat > 0.0 or abs(stat) < TIE_TOL) else 2


def quad_coeffs(alpha: float, x: float) -> tuple[float, float, float]:
    """Coefficients (a, b, c) of the quadratic in U3 whose sign decides
    the assignment, at separation alpha and angle variate x:

        a = -2 (1 - cos a)(1 - x) < 0,
        b = 4 sin(a) sqrt(x (1 - x)),
        c = 2 (1 - cos a) x.

    Its roots are -tan(a/4) cot(t/2) and cot(a/4) cot(t/2) with
    t = arccos(2x - 1).
    """
    one_minus_cos = 1.0 - math.cos(alpha)
    a = -2.0 * one_minus_cos * (1.0 - x)
    b = 4.0 * math.sin(alpha) * math.sqrt(x * (1.0 - x))
    c = 2.0 * one_minus_cos * x
    return a, b, c


def _accuracy_integrals(spec: DistributionSpec, alpha: float, quad):
    w = math.cos(0.5 * alpha)
    lo = 0.5 * (1.0 - w)
    hi = 0.5 * (1.0 + w)
    h = make_h(spec)

    def fx_via_h(x: float) -> float:
        return math.sqrt((1.0 - x) / x) * h(x)

    upper = integrate(fx_via_h, hi, 1.0, quad)
    middle = integrate(fx_via_h, lo, hi, quad)
    h_mid = integrate(h, lo, hi, quad)
    h_tail = integrate(h, 0.0, lo, quad)
    return w, upper, middle, h_mid, h_tail


def psi_closed(pair: ClassPair, quad: QuadratureSpec | None = None) -> float:
    """Probability of a correct assignment, via the four-integral h-form
    with w = cos(alpha/2):

        psi = int_{(1+w)/2}^{1} sqrt((1-x)/x) h
              + (1/2) int_{(1-w)/2}^{(1+w)/2} sqrt((1-x)/x) h
              + (tan(alpha/4)/2) int_{(1-w)/2}^{(1+w)/2} h
              + (1/sin(alpha/2)) int_{0}^{(1-w)/2} h.
    """
    alpha = pair.alpha
    w, upper, middle, h_mid, h_tail = _accuracy_integrals(pair.common, alpha, quad)
    return (
        upper
        + 0.5 * middle
        + 0.5 * math.tan(0.25 * alpha) * h_mid
        + h_tail / math.sin(0.5 * alpha)
    )


def psi_theta_form(pair: ClassPair, quad: QuadratureSpec | None = None) -> float:
    """The same accuracy through the rotation-angle law: region
    probabilities of Theta plus cot(Theta/2) partial expectations,
    integrated in the angle variable.  Cross-checks ``psi_closed``."""
    alpha = pair.alpha
    spec = pair.common

    def f_theta(theta: float) -> float:
        x = 0.5 * (1.0 + math.cos(theta))
        if x >= 1.0:
            x = math.nextafter(1.0, 0.0)
        elif x <= 0.0:
            x = math.nextafter(0.0, 1.0)
        return 0.5 * fx_density(spec, x) * math.sin(theta)

    def cot_weighted(theta: float) -> float:
        return f_theta(theta) / math.tan(0.5 * theta)

    p_low = integrate(f_theta, 0.0, 0.5 * alpha, quad)
    p_mid = integrate(f_theta, 0.5 * alpha, math.pi - 0.5 * alpha, quad)
    e_mid = integrate(cot_weighted, 0.5 * alpha, math.pi - 0.5 * alpha, quad)
    e_tail = integrate(cot_weighted, math.pi - 0.5 * alpha, math.pi, quad)
    return (
        p_low
        + 0.5 * p_mid
        + 0.5 * math.tan(0.25 * alpha) * e_mid
        + e_tail / math.sin(0.5 * alpha)
    )


def psi_derivative(pair: ClassPair, quad: QuadratureSpec | None = None) -> float:
    """d psi / d alpha as a weighted difference of two integral means of
    h, with w = cos(alpha/2):

        psi'(alpha) = (w / (4 (1 + w)))
                      * ((1/w) int_{(1-w)/2}^{(1+w)/2} h
                         - (2 / (1 - w)) int_{0}^{(1-w)/2} h).

    Identically zero under the uniform law, where h is constant.
    """
    alpha = pair.alpha
    if not 0.0 < alpha < math.pi:
        raise DomainError("alpha must lie in (0, pi)")
    w = math.cos(0.5 * alpha)
    lo = 0.5 * (1.0 - w)
    hi = 0.5 * (1.0 + w)
    h = make_h(pair.common)
    h_mid = integrate(h, lo, hi, quad)
    h_tail = integrate(h, 0.0, lo, quad)
    return (w / (4.0 * (1.0 + w))) * (h_mid / w - 2.0 * h_tail / (1.0 - w))


def mc_accuracy(
    pair: ClassPair,
    n: int,
    rng: np.random.Generator,
    return_by_class: bool = False,
):
    """Monte Carlo estimate of the classification accuracy.

    Draws n class labels uniformly, samples each observation as
    P = R M_label from the common centred law, applies the Bayes rule,
    and returns the fraction of correct assignments.  With
    ``return_by_class`` the tuple (overall, class1 accuracy, class2
    accuracy) is returned.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    contrast = np.eye(3) - pair.m1 @ pair.m2.T
    stat1 = contrast  # P M1^T = R for class-1 draws
    stat2 = pair.m2 @ pair.m1.T @ contrast
    labels = rng.integers(1, 3, size=n)
    correct = 0
    correct1 = 0
    n1 = 0
    chunk = 1 << 17
    done = 0
    while done < n:
        m = min(chunk, n - done)
        lab = labels[done:done + m]
        R = sample_rotations(pair.common, m, rng)
        s1 = np.einsum("nij,ji->n", R, stat1)
        s2 = np.einsum("nij,ji->n", R, stat2)
        stat = np.where(lab == 1, s1, s2)
        assign1 = (stat > 0.0) | (np.abs(stat) < TIE_TOL)
        hit = np.where(lab == 1, assign1, ~assign1)
        correct += int(np.count_nonzero(hit))
        correct1 += int(np.count_nonzero(hit & (lab == 1)))
        n1 += int(np.count_nonzero(lab == 1))
        done += m
    overall = correct / n
    if not return_by_class:
        return overall
    acc1 = correct1 / n1 if n1 else math.nan
    n2 = n - n1
    acc2 = (correct - correct1) / n2 if n2 else math.nan
    return overall, acc1, acc2
