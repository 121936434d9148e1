import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zeroloc import quantum_states as qs
from zeroloc.complex_special import bessel_i_complex, bessel_j
from zeroloc.errors import ComplexOrder, DomainError, NotBound
from zeroloc.quadrature import integrate_periodic

PHI = 2 * math.pi * np.arange(256) / 256

# 1/sqrt(2 pi sum_s a_s^2) and l + sum s a_s^2 / sum a_s^2 with mpmath sums
C_ORACLE = [
    (2, 1.0, 9.387425756968046, 2.038987108969759),
    (0, 5.0, 0.0003344932480821987, 4.61679954546558),
    (5, 10.0, 3.071935207789127e-07, 10.82586844044167),
]


class TestParams:
    def test_dimensionless_roundtrip(self):
        dp = qs.DimensionlessParams(gamma=1.7, lam=0.3)
        back = dp.physical(mass=2.0, hbar=0.5, a0=3.0).dimensionless()
        assert back.gamma == pytest.approx(1.7, rel=1e-15)
        assert back.lam == pytest.approx(0.3, rel=1e-15)

    def test_physical_to_dimensionless(self):
        p = qs.PhysicalParams(mass=1.0, hbar=1.0, Gamma=0.5, Lambda=0.5, a0=1.0)
        dp = p.dimensionless()
        assert (dp.gamma, dp.lam) == (1.0, 1.0)

    @pytest.mark.parametrize("kw", [{"mass": 0}, {"hbar": -1}, {"a0": 0}, {"Gamma": -1}, {"Lambda": -0.1}])
    def test_physical_invariants(self, kw):
        with pytest.raises(ValueError):
            qs.PhysicalParams(**kw)

    def test_dimensionless_invariants(self):
        with pytest.raises(ValueError):
            qs.DimensionlessParams(gamma=0)
        with pytest.raises(ValueError):
            qs.DimensionlessParams(lam=-1)

    def test_coords(self):
        c = qs.DimensionlessCoords.from_polar(np.array([2.0, 4.0]), np.array([0.0, 1.0]), a0=2.0)
        assert np.allclose(c.rho * c.xi, 1.0)
        assert np.allclose(np.abs(c.chi), 1.0)
        with pytest.raises(DomainError):
            qs.DimensionlessCoords.from_polar(0.0, 0.0)

    def test_kind_parse(self):
        assert qs.PotentialKind.parse("VC") is qs.PotentialKind.VC
        with pytest.raises(ValueError):
            qs.PotentialKind.parse("vx")


class TestPotential:
    def test_examples(self):
        assert qs.potential_value("vc", qs.PhysicalParams(Gamma=1, Lambda=0), 1.0, 0.7) == -1
        assert qs.potential_value("vc", qs.PhysicalParams(Gamma=0, Lambda=1), 1.0, math.pi) == pytest.approx(1.0)
        assert qs.potential_value("vminus", qs.PhysicalParams(Gamma=1, Lambda=1), 2.0) == -0.3125

    def test_real_for_companions(self):
        v = qs.potential_value("vplus", qs.PhysicalParams(Lambda=1), np.array([0.5, 1.0]), np.array([0.1, 2.0]))
        assert np.all(v.imag == 0)

    def test_origin(self):
        with pytest.raises(DomainError):
            qs.potential_value("vc", qs.PhysicalParams(), 0.0)

    @pytest.mark.parametrize("kind, lam", [("vc", 1.0), ("vc", 0.0), ("vplus", 1.0), ("vminus", 1.0)])
    def test_hamiltonian_symmetry(self, kind, lam):
        r = np.linspace(0.5, 2.0, 32)[None, :]
        p = PHI[:, None]
        res = qs.hamiltonian_symmetry_residual(kind, qs.PhysicalParams(Gamma=1.0, Lambda=lam), r, p)
        assert res <= 1e-14
        if kind != "vc" or lam == 0:
            assert res == 0.0


class TestTheta:
    def test_fourier_mode_invariant(self):
        f = lambda r, p: np.exp(3j * p) + 0 * r
        assert qs.theta_residual(f, np.array([1.0]), PHI) < 1e-14

    def test_constant_imaginary(self):
        g = qs.theta_apply(lambda r, p: 1j * np.ones_like(p))
        assert np.all(g(1.0, PHI) == -1j)

    @given(st.floats(0.1, 5.0), st.floats(0.0, 2 * math.pi))
    def test_involution(self, r, p):
        f = lambda rr, pp: np.exp(1j * 0.37 * pp) * rr + 1j * np.sin(pp) ** 2
        twice = qs.theta_apply(qs.theta_apply(f))
        assert twice(r, p) == pytest.approx(f(r, p), abs=1e-14)


class TestAngular:
    def test_lambda_zero_fallback(self):
        m = qs.make_angular_mode(0, 0.0)
        assert m.fourier and m.norm_constant == pytest.approx(0.3989422804014327, rel=1e-15)
        assert np.allclose(m(PHI), 1 / math.sqrt(2 * math.pi))

    @pytest.mark.parametrize("l, lam, c, _", C_ORACLE)
    def test_norm_constant_oracle(self, l, lam, c, _):
        assert qs.make_angular_mode(l, lam).norm_constant == pytest.approx(c, rel=1e-12)
        assert qs.angular_norm_series(l, lam) == pytest.approx(c, rel=1e-12)

    @pytest.mark.parametrize("l, lam", [(2, 1.0), (0, 0.1), (4, 5.0), (9, 10.0), (3, 100.0)])
    def test_quadrature_matches_series(self, l, lam):
        quad = qs.make_angular_mode(l, lam).norm_constant
        assert abs(quad - qs.angular_norm_series(l, lam)) <= 1e-10 * quad

    @pytest.mark.parametrize("l, lam", [(2, 1.0), (5, 10.0), (0, 100.0)])
    def test_unit_norm(self, l, lam):
        m = qs.make_angular_mode(l, lam)
        assert integrate_periodic(lambda p: np.abs(m(p)) ** 2).real == pytest.approx(1.0, abs=1e-12)

    def test_small_lambda_limit(self):
        m = qs.make_angular_mode(3, 1e-4)
        ref = np.exp(3j * PHI) / math.sqrt(2 * math.pi)
        assert np.max(np.abs(m(PHI) - ref)) < 1e-7

    def test_value_at_phi_zero(self):
        m = qs.make_angular_mode(2, 1.0)
        assert m(0.0) == pytest.approx(m.norm_constant * 0.050728569979180238, rel=1e-14)

    def test_invalid_l(self):
        with pytest.raises(ValueError):
            qs.make_angular_mode(-1, 1.0)
        with pytest.raises(ValueError):
            qs.make_angular_mode(1.5, 1.0)

    @pytest.mark.parametrize("l", range(6))
    @pytest.mark.parametrize("lam", [0.1, 1.0, 10.0])
    def test_periodicity(self, l, lam):
        m = qs.make_angular_mode(l, lam)
        assert np.max(np.abs(m(PHI + 2 * math.pi) - m(PHI))) <= 1e-10 * np.max(np.abs(m(PHI)))
        assert qs.periodicity_residual(l, lam, PHI) <= 1e-10

    @pytest.mark.parametrize("l", [0.5, 1.5, 4.5])
    @pytest.mark.parametrize("lam", [0.0, 0.1, 1.0, 10.0])
    def test_half_integer_breaks_periodicity(self, l, lam):
        assert qs.periodicity_residual(l, lam, PHI) >= 0.1

    @pytest.mark.parametrize("l, lam, tol", [(2, 1.0, 1e-9), (0, 0.0, 0.0), (5, 10.0, 1e-8), (9, 5.0, 1e-9), (2, 100.0, 1e-9)])
    def test_ode_residual(self, l, lam, tol):
        assert qs.angular_ode_residual(qs.make_angular_mode(l, lam), PHI) <= tol

    def test_ode_residual_detects_wrong_l(self):
        m = qs.make_angular_mode(2, 1.0)
        value, _, second = qs.angular_derivatives(m, PHI)
        # I_4 does not solve the l = 3 equation
        res = second + np.exp(1j * PHI) * value + 9 * value
        assert np.max(np.abs(res)) / np.max(np.abs(value)) > 1

    def test_derivative_agrees_with_spectral_derivative(self):
        m = qs.make_angular_mode(3, 2.0)
        value, first, _ = qs.angular_derivatives(m, PHI)
        k = np.fft.fftfreq(PHI.size, d=1.0 / PHI.size)
        spectral = np.fft.ifft(1j * k * np.fft.fft(value))
        assert np.max(np.abs(first - spectral)) <= 1e-10 * np.max(np.abs(first))


class TestAngularMomentum:
    def test_fourier_exact(self):
        lm = qs.angular_momentum_expectation(qs.make_angular_mode(3, 0.0))
        assert lm.quadrature == 3 and lm.series == 3

    def test_small_lambda(self):
        lm = qs.angular_momentum_expectation(qs.make_angular_mode(2, 0.1))
        assert 0 <= lm.deviation < 1e-3
        assert lm.agreement <= 1e-8

    @pytest.mark.parametrize("l, lam, _, expected", C_ORACLE)
    def test_oracle(self, l, lam, _, expected):
        lm = qs.angular_momentum_expectation(qs.make_angular_mode(l, lam))
        assert lm.series == pytest.approx(expected, rel=1e-13)
        assert lm.agreement <= 1e-8

    @given(st.integers(0, 9), st.floats(0.01, 20.0))
    def test_methods_agree_and_deviation_nonnegative(self, l, lam):
        lm = qs.angular_momentum_expectation(qs.make_angular_mode(l, lam))
        assert lm.agreement <= 1e-8 * max(1.0, lm.series)
        assert lm.deviation >= 0


class TestRadial:
    def test_order(self):
        assert qs.effective_order("vc", 3, 5.0) == 3
        assert qs.effective_order("vplus", 2, 1.0) == pytest.approx(math.sqrt(5))
        assert qs.effective_order("vminus", 3, 1.0) == pytest.approx(math.sqrt(8))

    def test_closed_form_l2(self):
        m = qs.make_radial_mode("vc", 2, qs.DimensionlessParams(1.0, 0.0))
        assert m.norm_constant == pytest.approx(2 * math.sqrt(6), rel=1e-15)

    @pytest.mark.parametrize("l", range(2, 10))
    def test_closed_form_factorials(self, l):
        n = qs.radial_norm_closed_form(l, 1.0)
        assert n == pytest.approx(2 * math.sqrt(math.factorial(l + 1) / math.factorial(l - 2)), rel=1e-15)

    def test_real_order_gamma_form(self):
        nu = math.sqrt(5)
        mp.mp.dps = 30
        expected = float(2 * mp.sqrt(mp.gamma(nu + 2) / mp.gamma(nu - 1)))
        assert qs.radial_norm_closed_form(nu, 1.0) == pytest.approx(expected, rel=1e-13)

    def test_not_bound(self):
        with pytest.raises(NotBound):
            qs.make_radial_mode("vc", 1, qs.DimensionlessParams())

    def test_complex_order(self):
        with pytest.raises(ComplexOrder):
            qs.make_radial_mode("vminus", 2, qs.DimensionlessParams(1.0, 2.0))
        with pytest.raises(ComplexOrder):
            qs.make_radial_mode("vminus", 2, qs.DimensionlessParams(1.0, 3.0))

    def test_vminus_real_order_below_one(self):
        with pytest.raises(NotBound) as info:
            qs.make_radial_mode("vminus", 2, qs.DimensionlessParams(1.0, 1.9))
        assert not isinstance(info.value, ComplexOrder)

    def test_first_zero(self):
        m = qs.make_radial_mode("vc", 2, qs.DimensionlessParams())
        assert abs(m(1 / 5.1356223)) < 1e-6

    def test_decay_both_ends(self):
        m = qs.make_radial_mode("vc", 2, qs.DimensionlessParams())
        assert abs(m(1e6)) < 1e-10
        assert abs(m(1e-6)) < 1e-2

    def test_origin(self):
        m = qs.make_radial_mode("vc", 2, qs.DimensionlessParams())
        with pytest.raises(DomainError):
            m(0.0)

    @pytest.mark.parametrize("kind, l, lam", [("vc", l, 1.0) for l in range(2, 10)]
                             + [("vplus", l, 1.0) for l in range(2, 10)]
                             + [("vminus", l, 1.0) for l in range(2, 10)])
    def test_norm_quadrature_matches_closed_form(self, kind, l, lam):
        m = qs.make_radial_mode(kind, l, qs.DimensionlessParams(1.0, lam))
        assert qs.radial_norm_quadrature(m) == pytest.approx(m.norm_constant, rel=1e-6)

    def test_norm_scales_with_gamma_a0(self):
        dp = qs.DimensionlessParams(gamma=2.5, lam=0.0)
        m = qs.make_radial_mode("vc", 3, dp, a0=0.4)
        assert qs.radial_norm_quadrature(m) == pytest.approx(m.norm_constant, rel=1e-6)

    @pytest.mark.parametrize("kind, l", [("vc", 2), ("vplus", 2), ("vc", 9), ("vminus", 5)])
    def test_ode_residual(self, kind, l):
        m = qs.make_radial_mode(kind, l, qs.DimensionlessParams(1.0, 1.0))
        assert qs.radial_ode_residual(m, np.linspace(0.05, 5.0, 400)) <= 1e-9

    def test_ode_residual_detects_wrong_order(self):
        # the V+ solution (order sqrt 5) does not solve the l = 2 equation
        m = qs.make_radial_mode("vplus", 2, qs.DimensionlessParams(1.0, 1.0))
        rho = np.linspace(0.05, 5, 50)
        x = 1 / rho
        nu = m.order
        j = bessel_j(nu, x)
        dj = bessel_j(nu - 1, x) - nu / x * j
        d2j = 0.25 * (bessel_j(nu - 2, x) - 2 * j + bessel_j(nu + 2, x))
        res = d2j / rho ** 4 + dj / rho ** 3 - 4 / rho ** 2 * j + j / rho ** 4
        assert np.max(np.abs(res)) > 1e-3


class TestFullState:
    def test_theta_invariance_64(self):
        st_ = qs.full_state("vc", 2, qs.DimensionlessParams(1.0, 1.0))
        r = np.linspace(1e-3, 2.0, 64)[None, :]
        p = (2 * math.pi * np.arange(64) / 64)[:, None]
        assert qs.theta_residual(st_, r, p) <= 1e-12

    @pytest.mark.parametrize("l", range(2, 10))
    @pytest.mark.parametrize("lam", [0.1, 1.0, 5.0, 10.0])
    def test_theta_invariance_all_modes(self, l, lam):
        st_ = qs.full_state("vc", l, qs.DimensionlessParams(1.0, lam))
        r = np.linspace(1e-3, 1.0, 32)[None, :]
        p = PHI[::8, None]
        assert qs.theta_residual(st_, r, p) <= 1e-12 * max(1.0, np.max(np.abs(st_(r, p))))

    def test_vc_and_vplus_coincide_at_lambda_zero(self):
        dp = qs.DimensionlessParams(1.0, 0.0)
        r = np.linspace(0.01, 2, 20)[None, :]
        p = PHI[:, None]
        a = qs.full_state("vc", 4, dp)(r, p)
        b = qs.full_state("vplus", 4, dp)(r, p)
        assert np.array_equal(a, b)

    def test_vanishes_at_both_ends(self):
        st_ = qs.full_state("vc", 3, qs.DimensionlessParams(1.0, 1.0))
        assert np.max(np.abs(st_(np.array([1e7]), PHI))) < 1e-10
        assert np.max(np.abs(st_(np.array([1e-7]), PHI))) < 1e-1

    def test_separable_product(self):
        st_ = qs.full_state("vc", 2, qs.DimensionlessParams(1.0, 1.0))
        r, p = 0.3, 1.1
        expected = st_.angular(p) * st_.radial(r)
        assert st_(r, p) == expected

    def test_companion_angular_is_fourier(self):
        st_ = qs.full_state("vplus", 3, qs.DimensionlessParams(1.0, 2.0))
        assert st_.angular.fourier
        assert st_.angular(0.4) == pytest.approx(cmath.exp(1.2j) / math.sqrt(2 * math.pi))

    def test_raw_angular_uses_bessel(self):
        m = qs.make_angular_mode(1, 0.7)
        assert m(0.3) == pytest.approx(m.norm_constant * bessel_i_complex(2, 1.4 * cmath.exp(0.15j)))
