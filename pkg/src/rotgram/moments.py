"""Quadrature engine and the moment/density transforms linking the angle
variate X = (1 + cos Theta)/2 and the zonal variate Z = (R e3)_3.

The zonal density f_Z is normalised so that (1/2) * integral_{-1}^{1}
f_Z(s) ds = 1, matching the sphere-density convention of the closed
Cayley-LMR form (Haar gives f_Z identically 1).
"""

from __future__ import annotations

import functools
import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import DistributionSpec, Family, fx_density
from .errors import DomainError, NoConvergence

_SQRT2 = math.sqrt(2.0)

# 15-point Kronrod nodes (positive half, descending) with the embedded
# 7-point Gauss rule at indices 1, 3, 5 and the centre.
_XGK = (
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993945,
    0.5860872354676911,
    0.4058451513773972,
    0.2077849550078985,
)
_WGK = (
    0.0229353220105292,
    0.0630920926299786,
    0.1047900103222502,
    0.1406532597155259,
    0.1690047266392679,
    0.1903505780647854,
    0.2044329400752989,
    0.2094821410847278,
)
_WG = (
    0.1294849661688697,
    0.2797053914892766,
    0.3818300505051189,
    0.4179591836734694,
)

_EPS = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny


@dataclass(frozen=True)
class QuadratureSpec:
    """Adaptive-quadrature budget: absolute tolerance and maximum number
    of panel bisections."""

    abs_tol: float = 1e-10
    max_depth: int = 60

    def __post_init__(self):
        if not self.abs_tol > 0.0:
            raise ValueError("abs_tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


def _qk15(g, a: float, b: float):
    """One Gauss-Kronrod 15/7 panel; returns (integral, error estimate)."""
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = g(centre)
    resk = _WGK[7] * fc
    resg = _WG[3] * fc
    resabs = _WGK[7] * abs(fc)
    values = []
    for i, x in enumerate(_XGK):
        f1 = g(centre - half * x)
        f2 = g(centre + half * x)
        values.append((f1, f2, _WGK[i]))
        resk += _WGK[i] * (f1 + f2)
        resabs += _WGK[i] * (abs(f1) + abs(f2))
        if i % 2 == 1:
            resg += _WG[i // 2] * (f1 + f2)
    mean = 0.5 * resk
    resasc = _WGK[7] * abs(fc - mean)
    for f1, f2, w in values:
        resasc += w * (abs(f1 - mean) + abs(f2 - mean))
    integral = resk * half
    resabs *= abs(half)
    resasc *= abs(half)
    err = abs((resk - resg) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > _UFLOW / (50.0 * _EPS):
        err = max(err, 50.0 * _EPS * resabs)
    return integral, err, resabs


def integrate(f, a: float, b: float, quad: QuadratureSpec | None = None) -> float:
    """Adaptive Gauss-Kronrod integral of f over [a, b].

    The substitution x = a + (b - a) sin^2(t) is applied first, which
    removes endpoint singularities up to inverse-square-root type; the
    transformed integrand is then bisected adaptively until the summed
    error estimate drops below ``abs_tol`` or below the roundoff floor
    50 eps * integral(|f|), whichever is larger (an absolute tolerance
    finer than that floor is unreachable in double precision).

    Raises NoConvergence when the bisection budget is exhausted.
    """
    quad = quad or DEFAULT_QUADRATURE
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    if a > b:
        raise ValueError("integration bounds must satisfy a <= b")
    span = b - a

    def transformed(t: float) -> float:
        s = math.sin(t)
        x = a + span * s * s
        if x <= a:
            x = math.nextafter(a, b)
        elif x >= b:
            x = math.nextafter(b, a)
        return f(x) * span * math.sin(2.0 * t)

    val, err, resabs = _qk15(transformed, 0.0, 0.5 * math.pi)
    heap = [(-err, 0, 0.0, 0.5 * math.pi, val, err, resabs)]
    total_err = err
    total_resabs = resabs
    max_panels = 4000
    while total_err > max(quad.abs_tol, 50.0 * _EPS * total_resabs):
        neg_err, depth, lo, hi, val, err, resabs = heapq.heappop(heap)
        if err <= 55.0 * _EPS * resabs:
            # The worst panel is already at its roundoff floor; splitting
            # cannot improve the estimate, so the result is converged to
            # machine precision even though abs_tol was not reachable.
            heapq.heappush(heap, (neg_err, depth, lo, hi, val, err, resabs))
            break
        if depth >= quad.max_depth or len(heap) + 2 > max_panels:
            raise NoConvergence(
                "quadrature stalled at error %.3e (target %.3e)"
                % (total_err, quad.abs_tol)
            )
        mid = 0.5 * (lo + hi)
        v1, e1, r1 = _qk15(transformed, lo, mid)
        v2, e2, r2 = _qk15(transformed, mid, hi)
        heapq.heappush(heap, (-e1, depth + 1, lo, mid, v1, e1, r1))
        heapq.heappush(heap, (-e2, depth + 1, mid, hi, v2, e2, r2))
        total_err += e1 + e2 - err
        total_resabs += r1 + r2 - resabs
    return float(sum(item[4] for item in sorted(heap, key=lambda it: it[2])))


# ---------------------------------------------------------------------------
# Moments


@dataclass(frozen=True)
class MomentVector:
    """Raw moments rho_r = E[X^r] alongside tau_j = E[Z^j]."""

    rho: tuple = field(default_factory=tuple)
    tau: tuple = field(default_factory=tuple)

    def __post_init__(self):
        rho = tuple(float(v) for v in self.rho)
        tau = tuple(float(v) for v in self.tau)
        if rho and abs(rho[0] - 1.0) > 1e-9:
            raise ValueError("rho_0 must equal 1")
        if tau and abs(tau[0] - 1.0) > 1e-9:
            raise ValueError("tau_0 must equal 1")
        if any(rho[i + 1] > rho[i] + 1e-12 for i in range(len(rho) - 1)):
            raise ValueError("rho must be nonincreasing for X in [0, 1]")
        if any(abs(v) > 1.0 + 1e-12 for v in tau):
            raise ValueError("|tau_j| must not exceed 1")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "tau", tau)


def rho_moment(spec: DistributionSpec, r: int, quad: QuadratureSpec | None = None) -> float:
    """E[X^r].  Haar and Cayley-LMR use the Beta-moment Pochhammer ratio
    with p = kappa + 1/2, q = 3/2; Fisher-von Mises integrates x^r f_X."""
    if not 0 <= r <= 20:
        raise DomainError("moment order must lie in 0..20")
    if r == 0:
        return 1.0
    if spec.family is Family.FVM and spec.kappa > 0.0:
        return integrate(lambda x: x ** r * fx_density(spec, x), 0.0, 1.0, quad)
    p = spec.kappa + 0.5
    out = 1.0
    for j in range(r):
        out *= (p + j) / (p + 1.5 + j)
    return out


def tau_from_rho(rho1: float, rho2: float) -> tuple[float, float]:
    """(tau_1, tau_2) from the first two X-moments:
    tau_1 = -1/3 + (4/3) rho_1,  tau_2 = 7/15 - (8/5) rho_1 + (32/15) rho_2.
    """
    tau1 = -1.0 / 3.0 + (4.0 / 3.0) * rho1
    tau2 = 7.0 / 15.0 - (8.0 / 5.0) * rho1 + (32.0 / 15.0) * rho2
    return tau1, tau2


@functools.lru_cache(maxsize=None)
def g0_coefficients(k: int) -> tuple:
    """Ascending polynomial coefficients of G0_k(x) = G_k(x) / sqrt(1-x).

    G_k(x) = integral_{2x-1}^{1} t^{k-1} sqrt(1 + t - 2x) dt satisfies
    G_k = a_k + b_k G_{k-1} with a_k = (4 sqrt2 / (2k+1)) (1-x)^{3/2} and
    b_k = (2(k-1)/(2k+1)) (2x-1).  Writing G_k = (1-x)^{3/2} P_k(x), the
    polynomial recursion for P_k is carried exactly in coefficient space,
    so no division by sqrt(1-x) ever happens numerically.
    """
    if not 1 <= k <= 20:
        raise DomainError("g0 is supported for 1 <= k <= 20")
    p = np.array([4.0 * _SQRT2 / 3.0])
    for j in range(2, k + 1):
        shifted = np.convolve(p, [-1.0, 2.0])  # (2x - 1) * P, ascending
        p = (2.0 * (j - 1) / (2.0 * j + 1.0)) * shifted
        p[0] += 4.0 * _SQRT2 / (2.0 * j + 1.0)
    return tuple(np.convolve(p, [1.0, -1.0]))  # (1 - x) * P_k


def g0(k: int, x: float) -> float:
    """G0_k(x) for x in [-1, 1]; the (1-x) factor is kept analytic so the
    value is exactly 0 at x = 1."""
    if not -1.0 <= x <= 1.0:
        raise DomainError("g0 expects x in [-1, 1]")
    if x == 1.0:
        return 0.0
    coeffs = g0_coefficients(k)
    out = 0.0
    for c in reversed(coeffs):
        out = out * x + c
    return out


def tau_k(spec: DistributionSpec, k: int, quad: QuadratureSpec | None = None) -> float:
    """E[Z^k] computed through the angle density:
    tau_k = 1 - (k / sqrt2) * integral_0^1 f_X(x) G0_k(x) dx."""
    if not 1 <= k <= 20:
        raise DomainError("tau_k is supported for 1 <= k <= 20")
    value = integrate(lambda x: fx_density(spec, x) * g0(k, x), 0.0, 1.0, quad)
    return 1.0 - (k / _SQRT2) * value


def moment_vector(spec: DistributionSpec, order: int, quad: QuadratureSpec | None = None) -> MomentVector:
    """rho and tau up to ``order`` (tau via the G-recursion integrals)."""
    rho = [rho_moment(spec, r, quad) for r in range(order + 1)]
    tau = [1.0] + [tau_k(spec, j, quad) for j in range(1, order + 1)]
    return MomentVector(rho=tuple(rho), tau=tuple(tau))


# ---------------------------------------------------------------------------
# Density transforms


def fz_from_fx(spec: DistributionSpec, s: float, quad: QuadratureSpec | None = None) -> float:
    """Zonal density of Z at s in (-1, 1), from the angle density:

        f_Z(s) = (1/sqrt2) * integral_0^{(1+s)/2}
                 f_X(x) / sqrt((1 + s - 2x)(1 - x)) dx

    Both inverse-square-root endpoints are handled by the quadrature
    substitution.  The result is nonnegative and satisfies
    (1/2) * integral_{-1}^{1} f_Z = 1.
    """
    if not -1.0 < s < 1.0:
        raise DomainError("s must lie in the open interval (-1, 1)")
    upper = 0.5 * (1.0 + s)

    def integrand(x: float) -> float:
        return fx_density(spec, x) / math.sqrt((1.0 + s - 2.0 * x) * (1.0 - x))

    value = integrate(integrand, 0.0, upper, quad) / _SQRT2
    return max(value, 0.0)


def fx_from_fz(fz, s: float, quad: QuadratureSpec | None = None, step: float = 1e-3) -> float:
    """Recover the angle density at s in (0, 1) from a zonal density.

    Inverting the forward half-integral relation (an Abel equation in
    v = cos Theta) gives

        f_X(s) = (2/pi) sqrt((1-s)/s) f_Z(-1)
                 + (4 sqrt2 / pi) sqrt(1-s)
                   * integral_0^{sqrt(2s)} f_Z'(2s - 1 - u^2) du,

    which reproduces the closed Cayley-LMR pairs exactly.  ``fz`` may be
    any callable on the open interval (-1, 1) in the zonal normalisation;
    its derivative is taken by a five-point central stencil of width
    ``step`` (shrunk near the interval ends), and the boundary value
    f_Z(-1) is read just inside the endpoint.

    The default tolerance is looser than ``integrate``'s because the
    stencil noise floor, roughly eval-error / step, is what limits the
    achievable accuracy; pass a tighter ``quad`` only together with a
    correspondingly accurate ``fz``.
    """
    if not 0.0 < s < 1.0:
        raise DomainError("s must lie in the open interval (0, 1)")
    quad = quad or QuadratureSpec(abs_tol=1e-9)

    def dfz(y: float) -> float:
        h = max(min(step, 0.2 * (1.0 + y), 0.2 * (1.0 - y)), 1e-13)
        return (-fz(y + 2.0 * h) + 8.0 * fz(y + h) - 8.0 * fz(y - h) + fz(y - 2.0 * h)) / (12.0 * h)

    boundary = fz(-1.0 + 1e-12)
    head = (2.0 / math.pi) * math.sqrt((1.0 - s) / s) * boundary
    tail = integrate(lambda u: dfz(2.0 * s - 1.0 - u * u), 0.0, math.sqrt(2.0 * s), quad)
    return head + (4.0 * _SQRT2 / math.pi) * math.sqrt(1.0 - s) * tail
