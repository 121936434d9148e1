import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zeroloc import quadrature as qd
from zeroloc.complex_special import bessel_i_complex
from zeroloc.errors import NonConvergence, NonFinite, NonNormalizable


class TestRules:
    @pytest.mark.parametrize("n", [8, 100, 4095])
    def test_periodic_rule_needs_power_of_two(self, n):
        with pytest.raises(ValueError):
            qd.PeriodicRule(n)

    def test_radial_rule_validation(self):
        with pytest.raises(ValueError):
            qd.RadialRule(abs_tol=0)
        with pytest.raises(ValueError):
            qd.RadialRule(max_depth=0)

    def test_defaults(self):
        assert qd.DEFAULT_PERIODIC.n_points == 4096
        assert (qd.DEFAULT_RADIAL.abs_tol, qd.DEFAULT_RADIAL.rel_tol, qd.DEFAULT_RADIAL.max_depth) == (1e-10, 1e-8, 40)


class TestPeriodic:
    def test_constant(self):
        assert qd.integrate_periodic(lambda p: np.ones_like(p)) == pytest.approx(2 * math.pi, rel=1e-15)

    @pytest.mark.parametrize("l", [0, 3, 17])
    def test_fourier_mode_norm(self, l):
        val = qd.integrate_periodic(lambda p: np.abs(np.exp(1j * l * p)) ** 2)
        assert val == pytest.approx(2 * math.pi, rel=1e-14)

    def test_bessel_modulus_matches_coefficient_sum(self):
        # |I_4(2 e^{i phi/2})|^2 integrates to 2 pi sum_s a_s^2, a_s = 1/(s! (s+4)!)
        mp.mp.dps = 30
        oracle = float(2 * mp.pi * mp.nsum(lambda s: 1 / (mp.factorial(s) * mp.factorial(s + 4)) ** 2, [0, mp.inf]))
        val = qd.integrate_periodic(lambda p: np.abs(bessel_i_complex(4, 2 * np.exp(0.5j * p))) ** 2)
        assert val.real == pytest.approx(oracle, rel=1e-14)

    @pytest.mark.parametrize("l, lam", [(0, 10.0), (3, 5.0), (9, 10.0), (2, 0.1)])
    def test_spectral_convergence(self, l, lam):
        def f(p):
            return np.abs(bessel_i_complex(2 * l, 2 * lam * np.exp(0.5j * p))) ** 2

        coarse = qd.integrate_periodic(f, qd.PeriodicRule(2048)).real
        fine = qd.integrate_periodic(f, qd.PeriodicRule(4096)).real
        assert abs(fine - coarse) <= 1e-12 * abs(fine)

    def test_nonfinite_sample(self):
        with pytest.raises(NonFinite), np.errstate(divide="ignore"):
            qd.integrate_periodic(lambda p: 1 / np.sin(p))


class TestGaussKronrod:
    @pytest.mark.parametrize("deg", [0, 5, 13, 21])
    def test_exact_for_polynomials_up_to_degree_21(self, deg):
        est, _ = qd.gauss_kronrod_panels(lambda x: x ** deg, np.array([0.0]), np.array([2.0]))
        assert est[0] == pytest.approx(2.0 ** (deg + 1) / (deg + 1), rel=1e-14)

    def test_gauss_part_exact_to_degree_13(self):
        _, err = qd.gauss_kronrod_panels(lambda x: x ** 13, np.array([-1.0]), np.array([1.5]))
        assert err[0] <= 1e-13

    def test_adaptive_smooth(self):
        total, _ = qd.adaptive_integrate(np.exp, 0.0, 3.0)
        assert total == pytest.approx(math.exp(3.0) - 1, rel=1e-12)

    def test_adaptive_depth_limit(self):
        with pytest.raises(NonConvergence):
            qd.adaptive_integrate(lambda x: np.where(x > 0.3, 1.0, 0.0) / np.sqrt(np.abs(x - 0.3) + 1e-300),
                                  0.0, 1.0, qd.RadialRule(abs_tol=1e-15, rel_tol=1e-15, max_depth=3))


class TestRadialDensity:
    @pytest.mark.parametrize("nu, expected", [(2.0, 1 / 24), (3.0, 1 / 96)])
    def test_integer_orders(self, nu, expected):
        assert qd.integrate_radial_density(nu) == pytest.approx(expected, rel=1e-8)

    @pytest.mark.parametrize("nu", [2.0, 2.5, 3.0, 5.0, math.sqrt(5), math.sqrt(3), math.sqrt(85), 9.0])
    def test_closed_form_invariant(self, nu):
        val = qd.integrate_radial_density(nu)
        assert val * 4 * nu * (nu * nu - 1) == pytest.approx(1.0, abs=1e-8)

    @given(st.floats(1.05, 12.0))
    def test_random_orders(self, nu):
        val = qd.integrate_radial_density(nu)
        assert val * 4 * nu * (nu * nu - 1) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("nu", [1.0, 0.5, 0.0])
    def test_divergent(self, nu):
        with pytest.raises(NonNormalizable):
            qd.integrate_radial_density(nu)

    def test_cutoff_tail_bound(self):
        u = qd.radial_cutoff()
        assert 2 / (3 * math.pi * u ** 3) <= qd.DEFAULT_RADIAL.abs_tol / 10 * (1 + 1e-12)
