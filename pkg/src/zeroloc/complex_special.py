"""Bessel functions for the angular and radial factors of the E=0 states.

``bessel_i_complex``
    I_n(z) for integer n >= 0 and complex z. Power series accumulated in
    80-bit extended precision (``np.clongdouble``) so the large-|z| circle
    arguments keep a few guard digits.
``bessel_j_real_order``
    J_nu(x) for real nu >= 0 and x >= 0. Three regimes: a double-double
    power series for x <= 30, the Hankel asymptotic form for
    x > max(30, 2 nu^2), and Miller backward recurrence in between.

Every loop freezes an element as soon as that element has converged, so a
value never depends on which other points were evaluated beside it.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _ddouble as dd
from .errors import DomainError, InvalidOrder, NonConvergence, NonFinite
from .gamma import gamma, log_gamma

J_SERIES_MAX_X = 30.0
_DD_EPS = 2.0 ** -104


@dataclass(frozen=True)
class SeriesPolicy:
    """Truncation rule shared by the power series.

    A series stops once two consecutive terms fall below ``rel_tol`` times
    the partial sum, or below the working-precision floor of the summed
    term magnitudes (past which more terms cannot change the rounded sum).
    Hitting ``max_terms`` first raises NonConvergence.
    """

    rel_tol: float = 1e-16
    max_terms: int = 200

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValueError(f"max_terms must be an integer >= 1, got {self.max_terms}")


DEFAULT_POLICY = SeriesPolicy()


def _integer_order(order, allow_negative=False):
    try:
        value = float(order)
    except (TypeError, ValueError):
        raise InvalidOrder(f"order must be an integer, got {order!r}") from None
    if not math.isfinite(value) or value != math.floor(value):
        raise InvalidOrder(f"order must be an integer, got {order!r}")
    n = int(value)
    if n < 0 and not allow_negative:
        raise InvalidOrder(f"order must be nonnegative, got {n}")
    return n


def _as_complex_array(z):
    arr = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    return arr


def _as_real_array(x):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    return arr


def _restore_shape(values, like):
    if like.ndim == 0:
        return values.reshape(()).item()
    return values.reshape(like.shape)


def _ipow(base, n):
    # binary exponentiation; even powers of -b and b come out bit-identical
    result = np.ones_like(base)
    while n:
        if n & 1:
            result = result * base
        base = base * base
        n >>= 1
    return result


def _inv_factorial_ld(n):
    return np.longdouble(1) / np.longdouble(str(math.factorial(n)))


def bessel_i_complex(order, z, policy=DEFAULT_POLICY):
    """Modified Bessel function I_n(z) of integer order n >= 0.

    Parameters
    ----------
    order : int
        Nonnegative integer order (2l for the angular modes).
    z : complex or array_like
        Finite complex argument; arrays are evaluated elementwise.
    policy : SeriesPolicy

    Returns
    -------
    complex or ndarray of complex128
    """
    nu = _integer_order(order)
    z = _as_complex_array(z)
    zl = np.atleast_1d(z).ravel().astype(np.clongdouble)

    half = zl / 2
    w = half * half
    term = np.full(zl.shape, _inv_factorial_ld(nu), dtype=np.clongdouble)
    total = term.copy()
    tol = np.longdouble(policy.rel_tol)
    floor = np.longdouble(np.finfo(np.longdouble).eps)
    magnitude = np.abs(term)
    run = np.zeros(zl.shape, dtype=np.int64)
    active = np.ones(zl.shape, dtype=bool)
    for s in range(1, policy.max_terms):
        term = term * w / (s * (s + nu))
        total = np.where(active, total + term, total)
        size = np.abs(term)
        magnitude = magnitude + size
        small = (size <= tol * np.abs(total)) | (size <= floor * magnitude)
        run = np.where(active & small, run + 1, 0)
        active &= run < 2
        if not active.any():
            break
    if active.any():
        raise NonConvergence(
            f"I_{nu} series did not converge in {policy.max_terms} terms "
            f"(max |z| = {float(np.max(np.abs(zl))):.6g})"
        )
    out = (total * _ipow(half, nu)).astype(np.complex128)
    if not np.all(np.isfinite(out)):
        raise NonFinite(f"I_{nu}(z) overflows a double")
    return _restore_shape(out, z)


def bessel_i_derivative(order, z, policy=DEFAULT_POLICY):
    """dI_n/dz, computed as (I_{n-1} + I_{n+1}) / 2 (I_1 when n = 0).

    This equals I_{n+1}(z) + (n/z) I_n(z) but needs no special case at z = 0.
    """
    nu = _integer_order(order)
    if nu == 0:
        return bessel_i_complex(1, z, policy)
    lower = np.asarray(bessel_i_complex(nu - 1, z, policy))
    upper = np.asarray(bessel_i_complex(nu + 1, z, policy))
    return _restore_shape(0.5 * (lower + upper), np.asarray(z))


def bessel_i_any_sign(order, z, policy=DEFAULT_POLICY):
    """I_n(z) for any integer n, using I_{-n} = I_n."""
    return bessel_i_complex(abs(_integer_order(order, allow_negative=True)), z, policy)


def reflection_check_i(order, z, m, policy=DEFAULT_POLICY):
    """Residual of the continuation identity I_n(z e^{i m pi}) = e^{i m pi n} I_n(z).

    Both sides are evaluated independently from the series; the rotated
    argument is formed in floating point, not by an exact sign flip.
    Returns |lhs - rhs| / max(1, |I_n(z)|), elementwise for array ``z``.
    """
    nu = _integer_order(order, allow_negative=True)
    m = _integer_order(m, allow_negative=True)
    z = _as_complex_array(z)
    rotated = z * cmath.exp(1j * m * math.pi)
    lhs = np.asarray(bessel_i_any_sign(nu, rotated, policy))
    base = np.asarray(bessel_i_any_sign(nu, z, policy))
    rhs = cmath.exp(1j * m * math.pi * nu) * base
    residual = np.abs(lhs - rhs) / np.maximum(1.0, np.abs(base))
    return _restore_shape(np.asarray(residual, dtype=np.float64), z)


def k_branch_mismatch(order, z, policy=DEFAULT_POLICY):
    """|K_n(z e^{i pi}) - K_n(z)| for even integer n.

    Integer-order continuation: K_n(z e^{i pi}) = (-1)^n K_n(z) - i pi I_n(z).
    For even n the K terms cancel identically, leaving pi |I_n(z)|, which is
    positive wherever I_n(z) != 0; the K branch therefore cannot be
    2 pi-periodic in the angle.
    """
    nu = _integer_order(order)
    if nu % 2:
        raise InvalidOrder(f"k_branch_mismatch needs an even order, got {nu}")
    z = _as_complex_array(z)
    if np.any(z == 0):
        raise DomainError("K_n is singular at z = 0")
    i_val = np.asarray(bessel_i_complex(nu, z, policy))
    # ((-1)**nu - 1) * K_n(z) is exactly zero here, so K itself is never needed
    mismatch = np.abs(-1j * math.pi * i_val)
    return _restore_shape(np.asarray(mismatch, dtype=np.float64), z)


# -- Bessel J of real order ----------------------------------------------------


def j_asymptotic_threshold(nu):
    """Argument above which J_nu switches to the Hankel asymptotic form."""
    return max(J_SERIES_MAX_X, 2.0 * nu * nu)


def _series_prefactor(nu, x):
    # (x/2)^nu / Gamma(nu + 1)
    if nu <= 150.0:
        return (0.5 * x) ** nu / gamma(nu + 1.0)
    with np.errstate(divide="ignore"):
        return np.exp(nu * np.log(0.5 * x) - log_gamma(nu + 1.0))


def _j_series(nu, x, policy=DEFAULT_POLICY):
    """Power series in double-double arithmetic; x > 0, nu > -1."""
    x = np.asarray(x, dtype=np.float64)
    qh, ql = dd.two_prod(x, x)
    qh, ql = -0.25 * qh, -0.25 * ql
    th = np.ones_like(x)
    tl = np.zeros_like(x)
    sh = np.ones_like(x)
    sl = np.zeros_like(x)
    magnitude = np.ones_like(x)
    run = np.zeros(x.shape, dtype=np.int64)
    active = np.ones(x.shape, dtype=bool)
    for s in range(1, policy.max_terms):
        dh, dl = dd.two_sum(float(s), nu)
        dh, dl = dd.dd_mul(dh, dl, float(s), 0.0)
        rh, rl = dd.dd_div(qh, ql, dh, dl)
        th, tl = dd.dd_mul(th, tl, rh, rl)
        nh, nl = dd.dd_add(sh, sl, th, tl)
        sh = np.where(active, nh, sh)
        sl = np.where(active, nl, sl)
        size = np.abs(th)
        magnitude = magnitude + size
        small = (size <= policy.rel_tol * np.abs(sh)) | (size <= _DD_EPS * magnitude)
        run = np.where(active & small, run + 1, 0)
        active &= run < 2
        if not active.any():
            break
    if active.any():
        raise NonConvergence(f"J_{nu} series did not converge in {policy.max_terms} terms")
    return _series_prefactor(nu, x) * dd.to_float(sh, sl)


def _j_asymptotic(nu, x, policy=DEFAULT_POLICY):
    """Hankel expansion sqrt(2/(pi x)) (P cos w - Q sin w)."""
    x = np.asarray(x, dtype=np.float64)
    mu = 4.0 * nu * nu
    x8 = 8.0 * x
    term = np.ones_like(x)
    p = np.ones_like(x)
    q = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, policy.max_terms):
        new = term * ((mu - (2 * k - 1) ** 2) / (k * x8))
        # past the smallest term the expansion diverges; stop there
        diverging = (np.abs(new) > np.abs(term)) & (k > nu + 1)
        take = active & ~diverging
        term = np.where(take, new, term)
        signed = term if k % 4 in (0, 1) else -term
        if k % 2:
            q = np.where(take, q + signed, q)
        else:
            p = np.where(take, p + signed, p)
        small = np.abs(term) <= policy.rel_tol * (np.abs(p) + np.abs(q))
        active = take & ~small
        if not active.any():
            break
    if active.any():
        raise NonConvergence(f"J_{nu} asymptotic expansion did not settle")
    turns = math.fmod(0.5 * nu + 0.25, 2.0)
    c, s = math.cos(turns * math.pi), math.sin(turns * math.pi)
    cx, sx = np.cos(x), np.sin(x)
    cos_w = cx * c + sx * s
    sin_w = sx * c - cx * s
    return np.sqrt(2.0 / (math.pi * x)) * (p * cos_w - q * sin_w)


def _j_miller(nu, x, policy=DEFAULT_POLICY):
    """Backward recurrence from well above max(x, nu), normalised against
    J at the two lowest orders of the same fractional part."""
    x = np.asarray(x, dtype=np.float64)
    n = int(math.floor(nu))
    mu0 = nu - n
    reach = np.maximum(x, nu)
    start = (np.ceil(reach + 15.0 * np.cbrt(0.5 * reach)) + 10).astype(np.int64)
    f_next = np.zeros_like(x)
    f_cur = np.zeros_like(x)
    stored = {}
    for k in range(int(start.max()), 0, -1):
        f_cur = np.where(start == k, 1.0, f_cur)
        f_prev = (2.0 * (mu0 + k) / x) * f_cur - f_next
        huge = np.abs(f_prev) > 1e250
        if huge.any():
            f_prev = np.where(huge, f_prev * 1e-250, f_prev)
            f_cur = np.where(huge, f_cur * 1e-250, f_cur)
            for j in stored:
                stored[j] = np.where(huge, stored[j] * 1e-250, stored[j])
        j = k - 1
        if j in (n, 1, 0):
            stored[j] = f_prev
        f_next, f_cur = f_cur, f_prev
    f0, f1, fn = stored[0], stored[1], stored[n]
    j0 = np.asarray(bessel_j(mu0, x, policy))
    j1 = np.asarray(bessel_j(mu0 + 1.0, x, policy))
    m = np.maximum(np.abs(f0), np.abs(f1))
    g0, g1 = f0 / m, f1 / m
    return (fn / m) * (j0 * g0 + j1 * g1) / (g0 * g0 + g1 * g1)


def bessel_j(order, x, policy=DEFAULT_POLICY):
    """J_nu(x) for x >= 0 and real nu > -1 (or any negative integer).

    Negative fractional orders are needed for second derivatives of low
    orders; ``bessel_j_real_order`` is the nu >= 0 entry point.
    """
    nu = float(order)
    if not math.isfinite(nu):
        raise InvalidOrder(f"order must be finite, got {order!r}")
    if nu < 0 and nu == math.floor(nu):
        sign = -1.0 if int(-nu) % 2 else 1.0
        return _restore_shape(sign * np.asarray(bessel_j(-nu, x, policy), dtype=np.float64),
                              np.asarray(x))
    if nu <= -1:
        raise InvalidOrder(f"fractional order must exceed -1, got {nu}")
    x = _as_real_array(x)
    if np.any(x < 0):
        raise DomainError("J_nu is evaluated for x >= 0 only")
    xa = np.atleast_1d(x).ravel()
    out = np.empty_like(xa)

    zero = xa == 0
    if zero.any():
        if nu < 0:
            raise DomainError(f"J_{nu}(0) is infinite")
        out[zero] = 1.0 if nu == 0 else 0.0
    series = ~zero & (xa <= J_SERIES_MAX_X)
    asym = xa > j_asymptotic_threshold(nu)
    miller = ~(zero | series | asym)
    if series.any():
        out[series] = _j_series(nu, xa[series], policy)
    if asym.any():
        out[asym] = _j_asymptotic(nu, xa[asym], policy)
    if miller.any():
        out[miller] = _j_miller(nu, xa[miller], policy)
    return _restore_shape(out, x)


def bessel_j_real_order(order, x, policy=DEFAULT_POLICY):
    """Bessel function of the first kind J_nu(x), real nu >= 0, x >= 0."""
    nu = float(order)
    if not math.isfinite(nu) or nu < 0:
        raise InvalidOrder(f"order must be a nonnegative real, got {order!r}")
    return bessel_j(nu, x, policy)


def bessel_j_derivative(order, x, policy=DEFAULT_POLICY):
    """dJ_nu/dx = J_{nu-1}(x) - (nu/x) J_nu(x) for x > 0."""
    nu = float(order)
    x = _as_real_array(x)
    if np.any(x <= 0):
        raise DomainError("derivative identity needs x > 0")
    lower = np.asarray(bessel_j(nu - 1.0, x, policy))
    value = np.asarray(bessel_j(nu, x, policy))
    return _restore_shape(lower - (nu / x) * value, x)
