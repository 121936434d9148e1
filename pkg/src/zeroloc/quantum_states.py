"""E=0 eigenstates for V_c = -Gamma/r^4 - (Lambda/r^2) e^{i phi} and V+-.

Units are dimensionless throughout the evaluators: rho = r/a0, gamma and
lambda as defined by ``DimensionlessParams``. The angular factor under V_c
is C I_{2l}(2 lambda e^{i phi/2}); under V+- it is the Fourier mode
e^{i l phi}/sqrt(2 pi) and the radial order shifts to sqrt(l^2 +- lambda^2).
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .complex_special import (
    DEFAULT_POLICY,
    bessel_i_any_sign,
    bessel_i_complex,
    bessel_i_derivative,
    bessel_j,
)
from .errors import ComplexOrder, DomainError, NotBound
from .gamma import gamma, log_gamma
from .quadrature import DEFAULT_PERIODIC, DEFAULT_RADIAL, integrate_periodic, integrate_radial_density

TWO_PI = 2.0 * math.pi
INV_SQRT_TWO_PI = 1.0 / math.sqrt(TWO_PI)

# below this log10 magnitude of lambda^{2l}/(2l)! the leading series term
# underflows and the lambda -> 0 Fourier limit is used instead
_UNDERFLOW_LOG10 = -280.0


class PotentialKind(str, Enum):
    VC = "vc"
    VPLUS = "vplus"
    VMINUS = "vminus"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown potential {value!r}; expected one of {names}") from None


@dataclass(frozen=True)
class PhysicalParams:
    mass: float = 1.0
    hbar: float = 1.0
    Gamma: float = 0.5
    Lambda: float = 0.0
    a0: float = 1.0

    def __post_init__(self):
        if not (self.mass > 0 and self.hbar > 0 and self.a0 > 0):
            raise ValueError("mass, hbar and a0 must be positive")
        if not (self.Gamma >= 0 and self.Lambda >= 0):
            raise ValueError("Gamma and Lambda must be nonnegative")

    def dimensionless(self):
        g = math.sqrt(2.0 * self.mass * self.Gamma) / (self.hbar * self.a0)
        lam = math.sqrt(2.0 * self.mass * self.Lambda) / self.hbar
        return DimensionlessParams(gamma=g, lam=lam)


@dataclass(frozen=True)
class DimensionlessParams:
    """gamma^2 = 2 m Gamma / (hbar^2 a0^2) and lambda^2 = 2 m Lambda / hbar^2."""

    gamma: float = 1.0
    lam: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.lam >= 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")

    def physical(self, mass=1.0, hbar=1.0, a0=1.0):
        """Physical constants reproducing these dimensionless values."""
        return PhysicalParams(
            mass=mass,
            hbar=hbar,
            Gamma=(self.gamma * hbar * a0) ** 2 / (2.0 * mass),
            Lambda=(self.lam * hbar) ** 2 / (2.0 * mass),
            a0=a0,
        )


@dataclass(frozen=True)
class DimensionlessCoords:
    rho: np.ndarray
    xi: np.ndarray
    chi: np.ndarray

    @classmethod
    def from_polar(cls, r, phi, a0=1.0):
        r = np.asarray(r, dtype=np.float64)
        if np.any(r <= 0):
            raise DomainError("coordinates need r > 0")
        rho = r / a0
        return cls(rho=rho, xi=1.0 / rho, chi=np.exp(1j * np.asarray(phi, dtype=np.float64)))


# -- potential and symmetry -------------------------------------------------


def potential_value(kind, params, r, phi=0.0):
    """V(r, phi) for the chosen potential; complex for V_c, real otherwise."""
    kind = PotentialKind.parse(kind)
    r = np.asarray(r, dtype=np.float64)
    if np.any(r == 0):
        raise DomainError("the potential is singular at r = 0")
    phi = np.asarray(phi, dtype=np.float64)
    core = -params.Gamma / r ** 4
    if kind is PotentialKind.VC:
        value = core - (params.Lambda / r ** 2) * np.exp(1j * phi)
    elif kind is PotentialKind.VPLUS:
        value = (core + params.Lambda / r ** 2) * np.ones_like(phi) + 0j
    else:
        value = (core - params.Lambda / r ** 2) * np.ones_like(phi) + 0j
    return value.item() if value.ndim == 0 else value


def theta_apply(f):
    """Theta = Pi T: (r, phi) -> conj(f(r, 2 pi - phi)). Theta is its own inverse."""

    def transformed(r, phi):
        return np.conj(f(r, TWO_PI - np.asarray(phi, dtype=np.float64)))

    return transformed


def hamiltonian_symmetry_residual(kind, params, r, phi):
    """max |conj(V(r, 2 pi - phi)) - V(r, phi)| over the broadcast grid."""
    r = np.asarray(r, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    r, phi = np.broadcast_arrays(r, phi)

    def v(rr, pp):
        return potential_value(kind, params, rr, pp)

    return float(np.max(np.abs(theta_apply(v)(r, phi) - v(r, phi))))


# -- angular modes ----------------------------------------------------------


@dataclass(frozen=True)
class AngularMode:
    """Phi_l(phi) = C I_{2l}(2 lambda e^{i phi/2}), or e^{i l phi}/sqrt(2 pi) when ``fourier``.

    ``fourier`` is set for the lambda -> 0 limit and for the V+- family,
    whose angular equation carries no lambda.
    """

    l: int
    lam: float
    norm_constant: float
    fourier: bool = False

    def __call__(self, phi):
        return angular_eval(self, phi)


def angular_coefficients(l, lam, tol=1e-18):
    """log a_s for a_s = lambda^{2(s+l)} / (s! (s+2l)!), s = 0, 1, ...

    These are the Fourier coefficients of I_{2l}(2 lambda e^{i phi/2}) in
    e^{i (s+l) phi}. Terms are kept until they drop below ``tol`` times the
    largest one.
    """
    if lam <= 0:
        return np.array([-log_gamma(2 * l + 1)]) if l >= 0 else np.array([])
    log_lam = math.log(lam)
    logs = []
    peak = -math.inf
    s = 0
    while True:
        value = 2 * (s + l) * log_lam - log_gamma(s + 1) - log_gamma(s + 2 * l + 1)
        logs.append(value)
        peak = max(peak, value)
        # terms are log-concave in s, so once past the peak they only fall
        if value < peak + math.log(tol) and s > lam * lam:
            break
        s += 1
    return np.array(logs)


def _series_norm_sq(l, lam):
    # sum_s a_s^2, returned as (log of the scale, scaled sum) to avoid overflow
    logs = angular_coefficients(l, lam)
    top = logs.max()
    return 2 * top, float(np.sum(np.exp(2 * (logs - top))))


def angular_norm_series(l, lam):
    """C_{l lambda} from the coefficient sum: 1 / sqrt(2 pi sum_s a_s^2)."""
    log_scale, scaled = _series_norm_sq(l, lam)
    return math.exp(-0.5 * log_scale) / math.sqrt(TWO_PI * scaled)


def _angular_raw(l, lam, phi, policy=DEFAULT_POLICY):
    z = 2.0 * lam * np.exp(0.5j * np.asarray(phi, dtype=np.float64))
    return np.asarray(bessel_i_complex(2 * l, z, policy))


def make_angular_mode(l, lam, rule=DEFAULT_PERIODIC):
    """Normalised angular mode with C from periodic quadrature of |I_{2l}|^2.

    At lambda = 0 (or where lambda^{2l}/(2l)! underflows) the limiting
    Fourier mode e^{i l phi}/sqrt(2 pi) is returned instead.
    """
    if int(l) != l or l < 0:
        raise ValueError(f"angular quantum number must be a nonnegative integer, got {l}")
    l = int(l)
    lam = float(lam)
    if not lam >= 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if lam == 0 or (2 * l * math.log10(lam) - log_gamma(2 * l + 1) / math.log(10) < _UNDERFLOW_LOG10):
        return AngularMode(l=l, lam=lam, norm_constant=INV_SQRT_TWO_PI, fourier=True)
    samples = _angular_raw(l, lam, rule.nodes())
    scale = float(np.max(np.abs(samples)))
    scaled = samples / scale
    integral = integrate_periodic(lambda _phi: np.abs(scaled) ** 2, rule).real
    return AngularMode(l=l, lam=lam, norm_constant=1.0 / (scale * math.sqrt(integral)))


def fourier_mode(l, lam=0.0):
    """The V+- angular factor e^{i l phi}/sqrt(2 pi), labelled with lambda."""
    return AngularMode(l=int(l), lam=float(lam), norm_constant=INV_SQRT_TWO_PI, fourier=True)


def angular_eval(mode, phi):
    phi = np.asarray(phi, dtype=np.float64)
    if mode.fourier:
        out = mode.norm_constant * np.exp(1j * mode.l * phi)
    else:
        out = mode.norm_constant * _angular_raw(mode.l, mode.lam, phi)
    return out.item() if out.ndim == 0 else out


def angular_derivatives(mode, phi):
    """(Phi, dPhi/dphi, d2Phi/dphi2) from Bessel recurrences, no differencing.

    With u = 2 lambda e^{i phi/2}: Phi' = C (i u/2) I'(u) and
    Phi'' = -C ((u^2/4) I''(u) + (u/4) I'(u)), where
    I' = (I_{n-1} + I_{n+1})/2 and I'' = (I_{n-2} + 2 I_n + I_{n+2})/4.
    """
    phi = np.asarray(phi, dtype=np.float64)
    c = mode.norm_constant
    if mode.fourier:
        base = c * np.exp(1j * mode.l * phi)
        return base, 1j * mode.l * base, -(mode.l ** 2) * base
    n = 2 * mode.l
    u = 2.0 * mode.lam * np.exp(0.5j * phi)
    i_n = np.asarray(bessel_i_complex(n, u))
    d1 = 0.5 * (np.asarray(bessel_i_any_sign(n - 1, u)) + np.asarray(bessel_i_any_sign(n + 1, u)))
    d2 = 0.25 * (np.asarray(bessel_i_any_sign(n - 2, u)) + 2.0 * i_n
                 + np.asarray(bessel_i_any_sign(n + 2, u)))
    value = c * i_n
    first = c * (0.5j * u) * d1
    second = -c * (0.25 * u * u * d2 + 0.25 * u * d1)
    return value, first, second


def angular_ode_residual(mode, phi):
    """max |Phi'' + lambda^2 e^{i phi} Phi + l^2 Phi| / max |Phi| over ``phi``."""
    phi = np.asarray(phi, dtype=np.float64)
    value, _, second = angular_derivatives(mode, phi)
    lam2 = 0.0 if mode.fourier else mode.lam ** 2
    residual = second + lam2 * np.exp(1j * phi) * value + mode.l ** 2 * value
    peak = np.max(np.abs(value))
    if peak == 0:
        return 0.0
    return float(np.max(np.abs(residual)) / peak)


def periodicity_residual(l, lam, phi):
    """max |I_{2l}(z(phi + 2 pi)) - I_{2l}(z(phi))| / max |I_{2l}| for z = 2 lambda e^{i phi/2}.

    ``l`` may be a half-integer (odd Bessel order); those orders change sign
    under phi -> phi + 2 pi and give a residual of 2.
    """
    order = 2 * l
    if order != int(order):
        raise ValueError(f"2l must be an integer, got l = {l}")
    order = int(order)
    if order < 0:
        raise ValueError("l must be nonnegative")
    if lam == 0:
        # Fourier limit e^{i l phi}
        phi = np.asarray(phi, dtype=np.float64)
        a = np.exp(1j * l * phi)
        b = np.exp(1j * l * (phi + TWO_PI))
        return float(np.max(np.abs(b - a)))
    phi = np.asarray(phi, dtype=np.float64)
    here = np.asarray(bessel_i_complex(order, 2.0 * lam * np.exp(0.5j * phi)))
    there = np.asarray(bessel_i_complex(order, 2.0 * lam * np.exp(0.5j * (phi + TWO_PI))))
    return float(np.max(np.abs(there - here)) / np.max(np.abs(here)))


@dataclass(frozen=True)
class AngularMomentum:
    quadrature: float
    series: float
    l: int

    @property
    def agreement(self):
        return abs(self.quadrature - self.series)

    @property
    def deviation(self):
        """<L>/hbar - l; nonnegative for lambda > 0."""
        return self.series - self.l


def angular_momentum_expectation(mode, rule=DEFAULT_PERIODIC):
    """<Phi| -i d/dphi |Phi> in units of hbar, by quadrature and by coefficients.

    The coefficient route uses the Fourier expansion Phi ~ sum_s a_s e^{i(s+l)phi},
    giving l + sum_s s a_s^2 / sum_s a_s^2.
    """
    if mode.fourier:
        # e^{i l phi} is an exact eigenfunction of -i d/dphi
        return AngularMomentum(quadrature=float(mode.l), series=float(mode.l), l=mode.l)
    phi = rule.nodes()
    value, first, _ = angular_derivatives(mode, phi)
    scale = np.max(np.abs(value))
    v, d = value / scale, first / scale
    num = integrate_periodic(lambda _p: np.conj(v) * (-1j) * d, rule)
    den = integrate_periodic(lambda _p: np.abs(v) ** 2, rule).real
    quad = float((num / den).real)
    logs = angular_coefficients(mode.l, mode.lam)
    weights = np.exp(2 * (logs - logs.max()))
    s = np.arange(weights.size)
    series = mode.l + float(np.sum(s * weights) / np.sum(weights))
    return AngularMomentum(quadrature=quad, series=series, l=mode.l)


# -- radial modes -----------------------------------------------------------


def effective_order(kind, l, lam):
    """l for V_c, sqrt(l^2 + lambda^2) for V+, sqrt(l^2 - lambda^2) for V-.

    Raises ComplexOrder when l^2 - lambda^2 <= 0 under V-.
    """
    kind = PotentialKind.parse(kind)
    if kind is PotentialKind.VC:
        return float(l)
    if kind is PotentialKind.VPLUS:
        return math.sqrt(l * l + lam * lam)
    shifted = l * l - lam * lam
    if shifted <= 0:
        raise ComplexOrder(
            f"V- shifted order squared l^2 - lambda^2 = {shifted:.6g} is not positive "
            f"(l = {l}, lambda = {lam})",
            l=l,
        )
    return math.sqrt(shifted)


def radial_norm_closed_form(order, gamma_, a0=1.0):
    """(2/(a0 gamma)) sqrt(Gamma(nu+2)/Gamma(nu-1)); (l+1)!/(l-2)! for integer nu."""
    nu = float(order)
    if nu <= 1:
        raise NotBound(f"bound state requires radial order > 1, got {nu:.6g}", order=nu)
    if nu == int(nu) and nu <= 170:
        ratio = math.factorial(int(nu) + 1) / math.factorial(int(nu) - 2)
    elif nu + 2 <= 171:
        ratio = gamma(nu + 2.0) / gamma(nu - 1.0)
    else:
        ratio = math.exp(log_gamma(nu + 2.0) - log_gamma(nu - 1.0))
    return 2.0 / (a0 * gamma_) * math.sqrt(ratio)


@dataclass(frozen=True)
class RadialMode:
    """R(r) = N J_order(gamma a0 / r)."""

    order: float
    gamma: float
    a0: float
    norm_constant: float

    def __call__(self, r):
        return radial_eval(self, r)


def make_radial_mode(kind, l, dp, a0=1.0):
    """Radial factor for angular number ``l`` under potential ``kind``.

    Raises
    ------
    NotBound
        If the effective order does not exceed 1.
    ComplexOrder
        Under V- when lambda^2 >= l^2.
    """
    order = effective_order(kind, l, dp.lam)
    if order <= 1:
        raise NotBound(
            f"bound state requires radial order > 1, got {order:.6g} for l = {l}",
            l=l,
            order=order,
        )
    return RadialMode(order=order, gamma=dp.gamma, a0=float(a0),
                      norm_constant=radial_norm_closed_form(order, dp.gamma, a0))


def radial_norm_quadrature(mode, rule=DEFAULT_RADIAL):
    """N from adaptive quadrature of the radial density instead of the closed form."""
    integral = integrate_radial_density(mode.order, rule)
    return 1.0 / (mode.gamma * mode.a0 * math.sqrt(integral))


def radial_eval(mode, r):
    r = np.asarray(r, dtype=np.float64)
    if np.any(r <= 0):
        raise DomainError("radial factor needs r > 0")
    out = mode.norm_constant * np.asarray(bessel_j(mode.order, mode.gamma * mode.a0 / r))
    return out.item() if out.ndim == 0 else out


def radial_ode_residual(mode, rho):
    """Max relative residual of [(1/rho) d/drho (rho d/drho) - nu^2/rho^2 + gamma^2/rho^4] R.

    R(rho) = N J_nu(gamma/rho). J' uses J_{nu-1} - (nu/x) J_nu and
    J'' uses (J_{nu-2} - 2 J_nu + J_{nu+2})/4. Each point's residual is
    divided by the sum of the magnitudes of the four terms.
    """
    rho = np.asarray(rho, dtype=np.float64)
    if np.any(rho <= 0):
        raise DomainError("radial residual needs rho > 0")
    nu, g, n = mode.order, mode.gamma, mode.norm_constant
    if n == 0:
        return 0.0
    x = g / rho
    j = np.asarray(bessel_j(nu, x))
    jm1 = np.asarray(bessel_j(nu - 1.0, x))
    jm2 = np.asarray(bessel_j(nu - 2.0, x))
    jp2 = np.asarray(bessel_j(nu + 2.0, x))
    dj = jm1 - (nu / x) * j
    d2j = 0.25 * (jm2 - 2.0 * j + jp2)
    r_val = n * j
    r1 = -n * g / rho ** 2 * dj
    r2 = n * (g * g / rho ** 4 * d2j + 2.0 * g / rho ** 3 * dj)
    terms = (r2, r1 / rho, -(nu * nu) / rho ** 2 * r_val, g * g / rho ** 4 * r_val)
    residual = np.abs(sum(terms))
    scale = sum(np.abs(t) for t in terms)
    rel = np.divide(residual, scale, out=np.zeros_like(residual), where=scale > 0)
    return float(np.max(rel))


# -- full states ------------------------------------------------------------


@dataclass(frozen=True)
class EigenState:
    """psi(r, phi) = Phi(phi) R(r), a single E=0 eigenstate."""

    kind: PotentialKind
    l: int
    angular: AngularMode
    radial: RadialMode

    def angular_factor(self, phi):
        return np.asarray(angular_eval(self.angular, phi))

    def radial_factor(self, r):
        return np.asarray(radial_eval(self.radial, r))

    def __call__(self, r, phi):
        return self.angular_factor(phi) * self.radial_factor(r)


def make_angular_for(kind, l, lam, rule=DEFAULT_PERIODIC):
    kind = PotentialKind.parse(kind)
    if kind is PotentialKind.VC:
        return make_angular_mode(l, lam, rule)
    return fourier_mode(l, lam)


def full_state(kind, l, dp, a0=1.0, rule=DEFAULT_PERIODIC):
    """Normalised E=0 eigenstate psi_{l, gamma, lambda} for the chosen potential."""
    kind = PotentialKind.parse(kind)
    radial = make_radial_mode(kind, l, dp, a0)
    angular = make_angular_for(kind, l, dp.lam, rule)
    return EigenState(kind=kind, l=int(l), angular=angular, radial=radial)


def theta_residual(field, r, phi):
    """max |Theta f - f| over the broadcast (r, phi) grid."""
    r = np.asarray(r, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    return float(np.max(np.abs(theta_apply(field)(r, phi) - field(r, phi))))
