"""Quadrature for the normalization constants and expectation values.

Periodic integrands over [0, 2 pi] use the equally spaced rule, which is
spectrally accurate for smooth periodic functions. The radial density
integral of J_nu(u)^2 u^-3 combines a term-by-term series on [0, 1], a
vectorised adaptive Gauss-Kronrod (7, 15) scheme on [1, u_max] and the
mean asymptotic tail beyond u_max.
"""

import math
from dataclasses import dataclass

import numpy as np

from .complex_special import DEFAULT_POLICY, bessel_j
from .errors import NonConvergence, NonFinite, NonNormalizable
from .gamma import log_gamma

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PeriodicRule:
    n_points: int = 4096

    def __post_init__(self):
        n = self.n_points
        if int(n) != n or n < 16 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 16, got {n}")

    def nodes(self):
        return TWO_PI * np.arange(self.n_points) / self.n_points


@dataclass(frozen=True)
class RadialRule:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_depth: int = 40

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise ValueError(f"max_depth must be a positive integer, got {self.max_depth}")


DEFAULT_PERIODIC = PeriodicRule()
DEFAULT_RADIAL = RadialRule()


def integrate_periodic(f, rule=DEFAULT_PERIODIC):
    """Integrate a 2 pi-periodic function over [0, 2 pi].

    ``f`` must accept a numpy array of angles and return an array of the same
    shape. The result is complex when ``f`` is complex-valued.
    """
    phi = rule.nodes()
    values = np.asarray(f(phi))
    if values.shape != phi.shape:
        values = np.broadcast_to(values, phi.shape)
    if not np.all(np.isfinite(values)):
        raise NonFinite("integrand is not finite on the periodic grid")
    return values.sum() * (TWO_PI / rule.n_points)


# Gauss-Kronrod 7-15 nodes on [-1, 1] (QUADPACK qk15), nonnegative half.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# 7-point Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[[9, 11, 13]] = _WG[2::-1]
_GAUSS_W[7] = _WG[3]


def gauss_kronrod_panels(f, a, b):
    """Kronrod estimate and |Kronrod - Gauss| for each panel [a_i, b_i].

    ``f`` is called once on all 15 * len(a) nodes.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = center[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=np.float64).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise NonFinite("integrand is not finite at a Gauss-Kronrod node")
    kronrod = half * (fx @ _KRONROD_W)
    gauss = half * (fx @ _GAUSS_W)
    return kronrod, np.abs(kronrod - gauss)


def adaptive_integrate(f, a, b, rule=DEFAULT_RADIAL, panel_width=None):
    """Adaptive Gauss-Kronrod integration of ``f`` over [a, b].

    Every unconverged panel of a sweep is evaluated in one batch. A panel is
    accepted when its error estimate is below its share (by width) of
    max(abs_tol, rel_tol * |estimate|); panels are bisected otherwise, up to
    ``rule.max_depth`` times.
    """
    n0 = 1 if panel_width is None else max(1, int(math.ceil((b - a) / panel_width)))
    edges = np.linspace(a, b, n0 + 1)
    lo, hi = edges[:-1], edges[1:]
    depth = 0
    total = 0.0
    accepted_err = 0.0
    span = b - a
    while lo.size:
        est, err = gauss_kronrod_panels(f, lo, hi)
        running = total + est.sum()
        budget = max(rule.abs_tol, rule.rel_tol * abs(running))
        ok = err <= budget * (hi - lo) / span
        total += est[ok].sum()
        accepted_err += err[ok].sum()
        lo, hi = lo[~ok], hi[~ok]
        if lo.size:
            depth += 1
            if depth > rule.max_depth:
                raise NonConvergence(
                    f"adaptive quadrature exceeded depth {rule.max_depth} "
                    f"with {lo.size} unconverged panels near u = {lo[0]:.6g}"
                )
            mid = 0.5 * (lo + hi)
            lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
            order = np.argsort(lo, kind="stable")
            lo, hi = lo[order], hi[order]
    return total, accepted_err


def _near_origin_piece(nu, upper, max_terms=200):
    # integral_0^upper J_nu(u)^2 u^-3 du from the power series of J_nu^2:
    # J_nu(u)^2 = sum_k (-1)^k (2nu+2k)! / (k! (2nu+k)! ((nu+k)!)^2) (u/2)^(2nu+2k)
    total = 0.0
    log_half = math.log(0.5 * upper)
    for k in range(max_terms):
        log_mag = (
            log_gamma(2 * nu + 2 * k + 1)
            - log_gamma(k + 1)
            - log_gamma(2 * nu + k + 1)
            - 2 * log_gamma(nu + k + 1)
            + (2 * nu + 2 * k) * log_half
        )
        term = math.exp(log_mag) * upper ** -2 / (2 * nu + 2 * k - 2)
        term = -term if k % 2 else term
        total += term
        if abs(term) < 1e-17 * abs(total):
            return total
    raise NonConvergence("near-origin series for the radial density did not converge")


def radial_cutoff(rule=DEFAULT_RADIAL):
    """u_max with the envelope tail bound integral 2/(pi u^4) < abs_tol / 10."""
    return (20.0 / (3.0 * math.pi * rule.abs_tol)) ** (1.0 / 3.0)


def integrate_radial_density(order, rule=DEFAULT_RADIAL):
    """Integral over u in (0, inf) of J_nu(u)^2 u^-3, for nu > 1.

    With u = gamma a0 / r this is the radial norm integral of N J_nu(gamma a0 / r)
    up to the factor (gamma a0)^2 N^2.

    Raises
    ------
    NonNormalizable
        If nu <= 1, where the integral diverges at u = 0.
    """
    nu = float(order)
    if not math.isfinite(nu) or nu <= 1.0:
        raise NonNormalizable(f"radial density integral diverges for order {nu} <= 1")
    u_max = radial_cutoff(rule)
    head = _near_origin_piece(nu, 1.0)

    def integrand(u):
        j = np.asarray(bessel_j(nu, u, DEFAULT_POLICY))
        return j * j / (u * u * u)

    body, _ = adaptive_integrate(integrand, 1.0, u_max, rule, panel_width=math.pi)
    # mean of J_nu^2 beyond u_max is (1/(pi u)) (1 + (4 nu^2 - 1)/(8 u^2) + ...)
    tail = 1.0 / (3.0 * math.pi * u_max ** 3) + (4 * nu * nu - 1) / (40.0 * math.pi * u_max ** 5)
    return head + body + tail
