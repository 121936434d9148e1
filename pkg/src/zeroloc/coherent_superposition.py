"""Binomially weighted superpositions of the degenerate E=0 eigenstates.

Psi_N = sum_k w_k psi_{k+2}, w_k = sqrt(binom(N, k)) tau^k / (1 + |tau|^2)^{N/2},
with tau = A e^{i theta0}. The shift l = k + 2 keeps every component bound.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ComplexOrder, NotBound
from .gamma import log_gamma
from .quadrature import DEFAULT_PERIODIC
from .quantum_states import DimensionlessParams, PotentialKind, full_state

L_OFFSET = 2
_LOG_BINOM_FROM = 60


@dataclass(frozen=True)
class CoherentSpec:
    """Parameters of the coherent superposition; tau = A e^{i theta0}."""

    N: int = 7
    A: float = 1.0
    theta0: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if not (math.isfinite(self.A) and self.A >= 0):
            raise ValueError(f"A must be finite and nonnegative, got {self.A}")
        if not math.isfinite(self.theta0):
            raise ValueError(f"theta0 must be finite, got {self.theta0}")

    @property
    def tau(self):
        return self.A * cmath.exp(1j * self.theta0)

    def mean_l(self):
        """Weighted mean of l = k + 2 under |w_k|^2 (a binomial distribution)."""
        p = self.A ** 2 / (1.0 + self.A ** 2)
        return L_OFFSET + self.N * p


def _log_binom(n, k):
    return log_gamma(n + 1) - log_gamma(k + 1) - log_gamma(n - k + 1)


def binomial_weights(spec):
    """Complex weights w_0 .. w_N; sum |w_k|^2 = 1 by the binomial theorem.

    Magnitudes are formed in log space so large N or A cannot overflow.
    """
    n = int(spec.N)
    if spec.A == 0:
        out = np.zeros(n + 1, dtype=np.complex128)
        out[0] = 1.0
        return out
    log_a = math.log(spec.A)
    log_norm = 0.5 * n * math.log1p(spec.A ** 2)
    weights = np.empty(n + 1, dtype=np.complex128)
    for k in range(n + 1):
        if n > _LOG_BINOM_FROM:
            lb = _log_binom(n, k)
        else:
            lb = math.log(math.comb(n, k))
        magnitude = math.exp(0.5 * lb + k * log_a - log_norm)
        weights[k] = magnitude * cmath.exp(1j * k * spec.theta0)
    return weights


@dataclass(frozen=True)
class LocalizedState:
    """Psi_N as a list of weighted eigenstates.

    Every component is separable, so the field on a tensor grid is
    sum_k (w_k Phi_k(phi)) R_k(r).
    """

    kind: PotentialKind
    spec: CoherentSpec
    params: DimensionlessParams
    a0: float
    weights: np.ndarray
    components: tuple = field(default_factory=tuple)

    def __call__(self, r, phi):
        r = np.asarray(r, dtype=np.float64)
        phi = np.asarray(phi, dtype=np.float64)
        total = np.zeros(np.broadcast_shapes(r.shape, phi.shape), dtype=np.complex128)
        for w, comp in zip(self.weights, self.components):
            total = total + (w * comp.angular_factor(phi)) * comp.radial_factor(r)
        return total

    def separable_terms(self, r, phi):
        """[(w_k Phi_k(phi), R_k(r)) for each k], in increasing k."""
        return [(w * comp.angular_factor(phi), comp.radial_factor(r))
                for w, comp in zip(self.weights, self.components)]

    def component_fields(self):
        """Each weighted component as its own callable, for linearity checks."""
        return [lambda r, phi, w=w, c=c: w * c(r, phi)
                for w, c in zip(self.weights, self.components)]

    def metadata(self):
        return {
            "kind": self.kind.value,
            "N": int(self.spec.N),
            "A": float(self.spec.A),
            "theta0": float(self.spec.theta0),
            "gamma": float(self.params.gamma),
            "lambda": float(self.params.lam),
            "a0": float(self.a0),
            "l_values": [c.l for c in self.components],
        }


def localized_state(kind, spec, dp, a0=1.0, rule=DEFAULT_PERIODIC):
    """Build Psi_N for the given potential family.

    Raises
    ------
    NotBound, ComplexOrder
        From the first component that cannot be built; the message and the
        ``k`` attribute name the offending index.
    """
    kind = PotentialKind.parse(kind)
    weights = binomial_weights(spec)
    components = []
    for k in range(int(spec.N) + 1):
        l = k + L_OFFSET
        try:
            components.append(full_state(kind, l, dp, a0, rule))
        except NotBound as exc:
            cls = ComplexOrder if isinstance(exc, ComplexOrder) else NotBound
            raise cls(f"component k = {k}: {exc}", l=l, order=exc.order, k=k) from exc
    return LocalizedState(kind=kind, spec=spec, params=dp, a0=float(a0),
                          weights=weights, components=tuple(components))

