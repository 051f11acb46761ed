"""Fake-uniformity analysis of tau2 as a function of concentration.

A family has the fake uniformity property when some kappa > 0 gives the
same second zonal moment tau2 = 1/3 as the uniform law, so its expected
projected Gram cannot be told apart from Haar's.  The Cayley-LMR family
crosses at kappa = 1; Fisher-von Mises does not cross at all.
"""

from __future__ import annotations

from dataclasses import dataclass

from .distributions import DistributionSpec, Family
from .errors import DomainError
from .moments import QuadratureSpec, rho_moment, tau_from_rho

SCAN_POINTS = 64


@dataclass(frozen=True)
class CurvePoint:
    kappa: float
    tau2_minus_third: float


def tau2_of_kappa(family, kappa: float, quad: QuadratureSpec | None = None) -> float:
    """tau2 for the centred family at concentration kappa, through the
    moment map tau2 = 7/15 - (8/5) rho1 + (32/15) rho2."""
    if kappa < 0.0:
        raise DomainError("kappa must be >= 0")
    family = Family(family)
    if kappa == 0.0:
        family = Family.HAAR
    spec = DistributionSpec(family, kappa=kappa)
    rho1 = rho_moment(spec, 1, quad)
    rho2 = rho_moment(spec, 2, quad)
    return tau_from_rho(rho1, rho2)[1]


def scan_curve(family, kappa_max: float, n_points: int, quad: QuadratureSpec | None = None):
    """tau2(kappa) - 1/3 on a uniform grid over [0, kappa_max]."""
    if kappa_max <= 0.0:
        raise DomainError("kappa_max must be positive")
    if n_points < 2:
        raise DomainError("n_points must be >= 2")
    points = []
    for i in range(n_points):
        kappa = kappa_max * i / (n_points - 1)
        points.append(CurvePoint(kappa, tau2_of_kappa(family, kappa, quad) - 1.0 / 3.0))
    return points


def find_fake_uniformity(
    family,
    kappa_lo: float,
    kappa_hi: float,
    tol: float = 1e-10,
    quad: QuadratureSpec | None = None,
):
    """First root of tau2(kappa) - 1/3 in (kappa_lo, kappa_hi), or None.

    A 64-point sign scan brackets the root, then bisection refines it to
    ``tol`` in kappa.
    """
    if not 0.0 < kappa_lo < kappa_hi:
        raise DomainError("need 0 < kappa_lo < kappa_hi")

    def g(kappa: float) -> float:
        return tau2_of_kappa(family, kappa, quad) - 1.0 / 3.0

    grid = [kappa_lo + (kappa_hi - kappa_lo) * i / (SCAN_POINTS - 1) for i in range(SCAN_POINTS)]
    values = [g(kappa) for kappa in grid]
    for i in range(SCAN_POINTS - 1):
        if values[i] == 0.0:
            return grid[i]
        if values[i] * values[i + 1] < 0.0:
            lo, hi = grid[i], grid[i + 1]
            glo = values[i]
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                gm = g(mid)
                if gm == 0.0:
                    return mid
                if glo * gm < 0.0:
                    hi = mid
                else:
                    lo, glo = mid, gm
            return 0.5 * (lo + hi)
    if values[-1] == 0.0:
        return grid[-1]
    return None


def initial_slope(family, h: float = 1e-3, quad: QuadratureSpec | None = None) -> float:
    """One-sided derivative of tau2(kappa) at kappa = 0+, Richardson
    extrapolated over steps h and h/2.

    A negative slope means the curve dips below the uniform value 1/3,
    which forces a return crossing (fake uniformity) once tau2 tends to
    1 for large kappa.  The sign is invariant under smooth monotone
    reparametrisations of kappa fixing 0.
    """
    if not 0.0 < h <= 1e-3:
        raise DomainError("h must lie in (0, 1e-3]")
    base = tau2_of_kappa(family, 0.0, quad)
    d_full = (tau2_of_kappa(family, h, quad) - base) / h
    d_half = (tau2_of_kappa(family, 0.5 * h, quad) - base) / (0.5 * h)
    return 2.0 * d_half - d_full
