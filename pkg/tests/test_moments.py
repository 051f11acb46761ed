import math

import numpy as np
import pytest
import scipy.integrate

from rotgram import distributions as dist
from rotgram import moments
from rotgram.errors import DomainError, NoConvergence

SQRT2 = math.sqrt(2.0)


def g0_double_sum_oracle(k, x):
    """Closed double-sum form of G0_k, independent of the recursion."""
    pref = 2.0 * SQRT2 * math.factorial(k - 1) / math.gamma(k + 1.5) * (1.0 - x)
    outer = 0.0
    for s in range(k):
        inner = 0.0
        for t in range(k - s):
            inner += (
                (-1.0) ** t
                * math.factorial(t + s) / math.factorial(t)
                * math.gamma(k - t - s + 0.5) / math.factorial(k - t - s - 1)
            )
        outer += (2.0 * x) ** s / math.factorial(s) * inner
    return pref * outer


def g0_direct_integral_oracle(k, x):
    """G_k / sqrt(1-x) by quadrature of the defining integral; the
    substitution t = 2x - 1 + 2(1-x) v^2 makes the integrand polynomial
    so scipy.quad is exact."""
    val, _ = scipy.integrate.quad(
        lambda v: (2.0 * x - 1.0 + 2.0 * (1.0 - x) * v * v) ** (k - 1) * v * v,
        0.0, 1.0, limit=200,
    )
    return 4.0 * SQRT2 * (1.0 - x) * val


class TestIntegrate:
    def test_constant(self):
        assert abs(moments.integrate(lambda x: 1.0, 0.0, 1.0) - 1.0) < 1e-12

    def test_inverse_sqrt_singularity(self):
        assert abs(moments.integrate(lambda x: x ** -0.5, 0.0, 1.0) - 2.0) < 1e-9

    def test_density_normalisation(self):
        spec = dist.cayley(2.0)
        total = moments.integrate(lambda x: dist.fx_density(spec, x), 0.0, 1.0)
        assert abs(total - 1.0) < 1e-9

    def test_against_scipy_oracle(self):
        cases = [
            (lambda x: math.sin(7.0 * x) * math.exp(x), 0.0, 1.0),
            (lambda x: 1.0 / math.sqrt((1.2 - x) * (x + 0.1)), -0.1, 1.2),
            (lambda x: x ** 3 - 2.0 * x + 0.25, -2.0, 3.0),
        ]
        for f, a, b in cases:
            ref, _ = scipy.integrate.quad(f, a, b, limit=300)
            assert abs(moments.integrate(f, a, b) - ref) < 1e-9

    def test_empty_interval(self):
        assert moments.integrate(lambda x: 1.0, 2.0, 2.0) == 0.0

    def test_reversed_bounds(self):
        with pytest.raises(ValueError):
            moments.integrate(lambda x: 1.0, 1.0, 0.0)

    def test_non_integrable_raises(self):
        with pytest.raises(NoConvergence):
            moments.integrate(lambda x: 1.0 / x, 0.0, 1.0)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            moments.QuadratureSpec(abs_tol=0.0)
        with pytest.raises(ValueError):
            moments.QuadratureSpec(max_depth=0)


class TestRhoMoment:
    def test_cayley_zero_first(self):
        assert abs(moments.rho_moment(dist.cayley(0.0), 1) - 0.25) < 1e-15

    def test_cayley_one_second(self):
        assert abs(moments.rho_moment(dist.cayley(1.0), 2) - 5.0 / 16.0) < 1e-15

    def test_zeroth_is_one(self):
        for spec in (dist.haar(), dist.cayley(3.0), dist.fisher_von_mises(2.0)):
            assert moments.rho_moment(spec, 0) == 1.0

    def test_fvm_against_scipy_oracle(self):
        spec = dist.fisher_von_mises(1.0)
        mine = moments.rho_moment(spec, 1)
        ref, _ = scipy.integrate.quad(lambda x: x * dist.fx_density(spec, x), 0.0, 1.0)
        assert abs(mine - ref) < 1e-9

    def test_order_cap(self):
        with pytest.raises(DomainError):
            moments.rho_moment(dist.haar(), 21)


class TestTauFromRho:
    def test_haar_values(self):
        tau1, tau2 = moments.tau_from_rho(0.25, 0.125)
        assert abs(tau1) < 1e-15
        assert abs(tau2 - 1.0 / 3.0) < 1e-15

    def test_cayley_one(self):
        tau1, tau2 = moments.tau_from_rho(0.5, 5.0 / 16.0)
        assert abs(tau1 - 1.0 / 3.0) < 1e-15
        assert abs(tau2 - 1.0 / 3.0) < 1e-15

    def test_cayley_two(self):
        _, tau2 = moments.tau_from_rho(5.0 / 8.0, 7.0 / 16.0)
        assert abs(tau2 - 0.4) < 1e-15


class TestG0:
    def test_first_order_closed_form(self):
        for x in np.linspace(-1.0, 1.0, 21):
            assert abs(moments.g0(1, x) - (4.0 * SQRT2 / 3.0) * (1.0 - x)) < 1e-14

    def test_second_order_at_zero(self):
        assert abs(moments.g0(2, 0.0) - 4.0 * SQRT2 / 15.0) < 1e-14

    def test_second_order_closed_form(self):
        for x in np.linspace(-1.0, 1.0, 21):
            expected = 4 * SQRT2 / 15 + (4 * SQRT2 / 5) * x - (16 * SQRT2 / 15) * x * x
            assert abs(moments.g0(2, x) - expected) < 1e-13

    def test_vanishes_at_one(self):
        for k in range(1, 6):
            assert moments.g0(k, 1.0) == 0.0

    def test_against_direct_integral_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            k = int(rng.integers(1, 9))
            x = float(rng.uniform(-0.95, 0.95))
            assert abs(moments.g0(k, x) - g0_direct_integral_oracle(k, x)) < 1e-10

    def test_against_double_sum_oracle(self):
        rng = np.random.default_rng(43)
        for _ in range(50):
            k = int(rng.integers(1, 9))
            x = float(rng.uniform(-1.0, 1.0))
            assert abs(moments.g0(k, x) - g0_double_sum_oracle(k, x)) < 1e-10

    def test_leading_coefficient_identity(self):
        # coefficient of rho_k inside tau_k equals k! 2^{k-1} sqrt(pi) / Gamma(k + 3/2)
        for k in range(1, 7):
            coeffs = moments.g0_coefficients(k)
            extracted = -(k / SQRT2) * coeffs[k]
            expected = math.factorial(k) * 2.0 ** (k - 1) * math.sqrt(math.pi) / math.gamma(k + 1.5)
            assert abs(extracted - expected) < 1e-8

    def test_domain(self):
        with pytest.raises(DomainError):
            moments.g0(0, 0.5)
        with pytest.raises(DomainError):
            moments.g0(21, 0.5)
        with pytest.raises(DomainError):
            moments.g0(2, 1.5)


class TestTauK:
    def test_haar_first_vanishes(self):
        assert abs(moments.tau_k(dist.haar(), 1)) < 1e-9

    def test_cayley_one_second(self):
        assert abs(moments.tau_k(dist.cayley(1.0), 2) - 1.0 / 3.0) < 1e-9

    def test_cayley_two_second(self):
        assert abs(moments.tau_k(dist.cayley(2.0), 2) - 0.4) < 1e-9

    @pytest.mark.parametrize("family", [dist.cayley, dist.fisher_von_mises])
    @pytest.mark.parametrize("kappa", [0.0, 0.5, 1.0, 2.0, 5.0])
    def test_bridge_to_moment_route(self, family, kappa):
        spec = family(kappa)
        rho1 = moments.rho_moment(spec, 1)
        rho2 = moments.rho_moment(spec, 2)
        tau1, tau2 = moments.tau_from_rho(rho1, rho2)
        assert abs(moments.tau_k(spec, 1) - tau1) < 1e-9
        assert abs(moments.tau_k(spec, 2) - tau2) < 1e-9

    def test_monte_carlo_bridge(self):
        spec = dist.fisher_von_mises(1.0)
        rng = np.random.default_rng(99)
        R = dist.sample_rotations(spec, 10 ** 6, rng)
        z = R[:, 2, 2]
        for k in (1, 2, 3):
            zk = z ** k
            se = zk.std(ddof=1) / math.sqrt(zk.size)
            assert abs(zk.mean() - moments.tau_k(spec, k)) < 4.0 * se

    def test_order_cap(self):
        with pytest.raises(DomainError):
            moments.tau_k(dist.haar(), 0)


class TestMomentVector:
    def test_build_and_invariants(self):
        mv = moments.moment_vector(dist.cayley(1.0), 3)
        assert mv.rho[0] == 1.0 and mv.tau[0] == 1.0
        assert all(mv.rho[i + 1] <= mv.rho[i] + 1e-12 for i in range(3))
        assert all(abs(t) <= 1.0 + 1e-12 for t in mv.tau)

    def test_rejects_increasing_rho(self):
        with pytest.raises(ValueError):
            moments.MomentVector(rho=(1.0, 0.2, 0.5), tau=(1.0,))

    def test_rejects_bad_tau(self):
        with pytest.raises(ValueError):
            moments.MomentVector(rho=(1.0,), tau=(1.0, 1.5))


class TestFzFromFx:
    def test_cayley_two_at_origin(self):
        assert abs(moments.fz_from_fx(dist.cayley(2.0), 0.0) - 0.75) < 1e-8

    def test_haar_is_flat(self):
        for s in (-0.5, 0.5):
            assert abs(moments.fz_from_fx(dist.haar(), s) - 1.0) < 1e-8

    def test_matches_closed_cayley_grid(self):
        for kappa in (0.0, 1.0, 2.0, 3.0):
            spec = dist.cayley(kappa)
            for s in (-0.9, -0.5, 0.0, 0.5, 0.9):
                closed = dist.fz_closed_cayley(kappa, s)
                assert abs(moments.fz_from_fx(spec, s) - closed) < 1e-8

    def test_fvm_zonal_normalisation(self):
        spec = dist.fisher_von_mises(1.0)
        quad = moments.QuadratureSpec(abs_tol=1e-8)
        total = 0.5 * moments.integrate(lambda s: moments.fz_from_fx(spec, s), -1.0, 1.0, quad)
        assert abs(total - 1.0) < 1e-7

    def test_nonnegative(self):
        spec = dist.fisher_von_mises(2.0)
        for s in np.linspace(-0.99, 0.99, 15):
            assert moments.fz_from_fx(spec, s) >= 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            moments.fz_from_fx(dist.haar(), 1.0)


class TestFxFromFz:
    def test_uniform_zonal_gives_haar_value(self):
        value = moments.fx_from_fz(lambda s: 1.0, 0.5)
        assert abs(value - 2.0 / math.pi) < 1e-8

    def test_uniform_zonal_normalises(self):
        quad = moments.QuadratureSpec(abs_tol=1e-8)
        total = moments.integrate(
            lambda s: moments.fx_from_fz(lambda t: 1.0, s), 0.0, 1.0, quad
        )
        assert abs(total - 1.0) < 1e-7

    def test_closed_cayley_inverts_exactly(self):
        for kappa in (1.0, 2.0, 3.0):
            spec = dist.cayley(kappa)
            for s in (0.2, 0.5, 0.8):
                value = moments.fx_from_fz(lambda t, k=kappa: dist.fz_closed_cayley(k, t), s)
                assert abs(value - dist.fx_density(spec, s)) < 1e-9

    def test_round_trip_through_numeric_fz(self):
        inner = moments.QuadratureSpec(abs_tol=1e-12)
        outer = moments.QuadratureSpec(abs_tol=1e-8)
        spec = dist.cayley(1.0)
        for s in (0.2, 0.5, 0.8):
            value = moments.fx_from_fz(
                lambda t: moments.fz_from_fx(spec, t, inner), s, outer
            )
            assert abs(value - dist.fx_density(spec, s)) < 1e-6

    def test_domain(self):
        with pytest.raises(DomainError):
            moments.fx_from_fz(lambda t: 1.0, 0.0)
