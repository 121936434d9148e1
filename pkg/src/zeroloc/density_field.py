"""Probability-density grids and the localization statistics read off them.

Polar grids are the analysis representation: rows are angles
phi_j = 2 pi j / n_phi, columns are radii spaced evenly on [r_min, r_max].
Cartesian grids exist for image export; their rows run over y ascending.

Rendering splits rows into fixed blocks of ``ROW_BLOCK`` rows. Each block is
computed by the same operations whichever thread runs it, so the output is
bitwise identical for any ``ZEROLOC_THREADS`` setting.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .complex_special import bessel_i_complex
from .errors import DomainError, EmptyRow, ZeroMass, ZerolocError
from .quantum_states import angular_eval

TWO_PI = 2.0 * math.pi
ROW_BLOCK = 16
EMPTY_ROW_FLOOR = 1e-300
MIN_RESOLUTION = 16


@dataclass(frozen=True)
class GridSpec:
    kind: str
    shape: tuple
    r_min: float = 1e-3
    r_max: float = 1.0
    x_range: tuple = (-1.0, 1.0)
    y_range: tuple = (-1.0, 1.0)

    def __post_init__(self):
        if self.kind not in ("polar", "cartesian"):
            raise ValueError(f"grid kind must be 'polar' or 'cartesian', got {self.kind!r}")
        if len(self.shape) != 2 or any(int(n) != n or n < MIN_RESOLUTION for n in self.shape):
            raise ValueError(f"grid resolution must be >= {MIN_RESOLUTION} per axis, got {self.shape}")
        if not self.r_min > 0:
            raise ValueError(f"r_min must be positive, got {self.r_min}")
        if self.kind == "polar" and not self.r_max > self.r_min:
            raise ValueError("r_max must exceed r_min")
        if self.kind == "cartesian":
            for lo, hi in (self.x_range, self.y_range):
                if not hi > lo:
                    raise ValueError("cartesian ranges must be increasing")

    @classmethod
    def polar(cls, nr=256, nphi=512, r_min=1e-3, r_max=1.0):
        return cls(kind="polar", shape=(int(nr), int(nphi)), r_min=r_min, r_max=r_max)

    @classmethod
    def cartesian(cls, nx=256, ny=256, x_range=(-1.0, 1.0), y_range=(-1.0, 1.0), r_min=1e-3):
        return cls(kind="cartesian", shape=(int(nx), int(ny)), r_min=r_min,
                   x_range=tuple(map(float, x_range)), y_range=tuple(map(float, y_range)))

    @property
    def value_shape(self):
        """(rows, columns): (n_phi, n_r) for polar, (n_y, n_x) for cartesian."""
        return (self.shape[1], self.shape[0])

    def radii(self):
        return np.linspace(self.r_min, self.r_max, self.shape[0])

    def angles(self):
        return TWO_PI * np.arange(self.shape[1]) / self.shape[1]

    def xs(self):
        return np.linspace(self.x_range[0], self.x_range[1], self.shape[0])

    def ys(self):
        return np.linspace(self.y_range[0], self.y_range[1], self.shape[1])

    def delta_r(self):
        return (self.r_max - self.r_min) / (self.shape[0] - 1)

    def to_dict(self):
        out = {"kind": self.kind, "shape": list(self.shape), "r_min": self.r_min}
        if self.kind == "polar":
            out["r_max"] = self.r_max
        else:
            out["x_range"] = list(self.x_range)
            out["y_range"] = list(self.y_range)
        return out


@dataclass(frozen=True)
class DensityGrid:
    spec: GridSpec
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != self.spec.value_shape:
            raise ValueError(f"values shape {self.values.shape} != {self.spec.value_shape}")
        if not (np.all(np.isfinite(self.values)) and np.all(self.values >= 0)):
            raise ValueError("density values must be finite and nonnegative")


class RenderError(ZerolocError):
    """A field evaluation failure, annotated with the grid rows involved."""

    def __init__(self, message, rows):
        super().__init__(message)
        self.rows = rows


def thread_count(env=None):
    """Worker count from ZEROLOC_THREADS, defaulting to the CPU count (capped at 8)."""
    env = os.environ if env is None else env
    raw = env.get("ZEROLOC_THREADS")
    if raw is None or raw.strip() == "":
        return max(1, min(8, os.cpu_count() or 1))
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"ZEROLOC_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"ZEROLOC_THREADS must be a positive integer, got {raw!r}")
    return n


def _blocks(n_rows):
    return [(i, min(i + ROW_BLOCK, n_rows)) for i in range(0, n_rows, ROW_BLOCK)]


def _run_blocks(work, n_rows, threads):
    blocks = _blocks(n_rows)
    out = [None] * len(blocks)

    def task(idx):
        lo, hi = blocks[idx]
        try:
            out[idx] = work(lo, hi)
        except ZerolocError as exc:
            raise RenderError(f"evaluation failed in grid rows {lo}..{hi - 1}: {exc}", (lo, hi)) from exc

    if threads <= 1:
        for i in range(len(blocks)):
            task(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(task, range(len(blocks))))
    return np.concatenate(out, axis=0)


def _polar_separable(state, spec, threads):
    r = spec.radii()
    phi = spec.angles()
    radial = [comp.radial_factor(r) * w for w, comp in zip(state.weights, state.components)]
    # weights folded into the radial side here; angular factors per block
    angular = [comp.angular for comp in state.components]

    def work(lo, hi):
        p = phi[lo:hi]
        total = np.zeros((hi - lo, r.size), dtype=np.complex128)
        for mode, rad in zip(angular, radial):
            total = total + np.asarray(angular_eval(mode, p))[:, None] * rad[None, :]
        return total.real ** 2 + total.imag ** 2

    return _run_blocks(work, phi.size, threads)


def _pointwise(field_fn, rr, pp, mask, threads):
    def work(lo, hi):
        vals = np.zeros(rr[lo:hi].shape, dtype=np.float64)
        m = mask[lo:hi]
        if m.any():
            f = np.asarray(field_fn(rr[lo:hi][m], pp[lo:hi][m]), dtype=np.complex128)
            vals[m] = f.real ** 2 + f.imag ** 2
        return vals

    return _run_blocks(work, rr.shape[0], threads)


def render_density(state, spec, threads=None, metadata=None):
    """Sample |state(r, phi)|^2 on the grid.

    ``state`` is any callable field of (r, phi); objects exposing
    ``components`` and ``weights`` (a LocalizedState) take a separable fast
    path on polar grids. Cartesian points with r < r_min are set to 0.
    """
    threads = thread_count() if threads is None else int(threads)
    if spec.kind == "polar":
        if hasattr(state, "components") and hasattr(state, "weights"):
            values = _polar_separable(state, spec, threads)
        else:
            pp, rr = np.meshgrid(spec.angles(), spec.radii(), indexing="ij")
            values = _pointwise(state, rr, pp, np.ones(rr.shape, dtype=bool), threads)
    else:
        yy, xx = np.meshgrid(spec.ys(), spec.xs(), indexing="ij")
        rr = np.hypot(xx, yy)
        # atan2 in (-pi, pi]; shift into [0, 2 pi)
        pp = np.mod(np.arctan2(yy, xx), TWO_PI)
        values = _pointwise(state, rr, pp, rr >= spec.r_min, threads)
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        raise RenderError(f"non-finite density at grid index {tuple(int(i) for i in bad)}",
                          (int(bad[0]), int(bad[0]) + 1))
    meta = dict(metadata or {})
    if not meta and hasattr(state, "metadata"):
        meta = state.metadata()
    return DensityGrid(spec=spec, values=values, metadata=meta)


# -- classical orbit --------------------------------------------------------


@dataclass(frozen=True)
class ClassicalOrbit:
    """Zero-energy orbit in -Gamma/r^4: a circle of diameter a through the origin."""

    a: float
    L: float = 1.0
    phi0: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"orbit diameter must be positive, got {self.a}")

    @classmethod
    def from_physical(cls, params, L, phi0=0.0):
        """a = sqrt(2 m Gamma / L^2)."""
        if not L > 0:
            raise ValueError(f"angular momentum must be positive, got {L}")
        return cls(a=math.sqrt(2.0 * params.mass * params.Gamma) / L, L=float(L), phi0=float(phi0))


def classical_trajectory(orbit, n_samples):
    """(x, y) samples of x = (a/2)(1 + cos(t - phi0)), y = (a/2) sin(t - phi0).

    The parameter t runs over 2 pi j / n_samples.
    """
    if int(n_samples) != n_samples or n_samples < 3:
        raise ValueError(f"n_samples must be an integer >= 3, got {n_samples}")
    t = TWO_PI * np.arange(int(n_samples)) / n_samples
    half = 0.5 * orbit.a
    x = half * (1.0 + np.cos(t - orbit.phi0))
    y = half * np.sin(t - orbit.phi0)
    return np.column_stack([x, y])


# -- statistics on polar grids ----------------------------------------------


def _require_polar(grid):
    if grid.spec.kind != "polar":
        raise DomainError("this statistic needs a polar grid")


def ridge_profile(grid):
    """Radius of maximum density for every angle row; ties go to the smaller r."""
    _require_polar(grid)
    v = grid.values
    peak = v.max(axis=1)
    empty = np.flatnonzero(peak < EMPTY_ROW_FLOOR)
    if empty.size:
        raise EmptyRow(f"density row {int(empty[0])} has no value above {EMPTY_ROW_FLOOR:g}")
    # argmax returns the first (smallest-r) maximum
    return grid.spec.radii()[np.argmax(v, axis=1)]


def angular_marginal(grid):
    """P(phi_j) = sum_i values[j, i] r_i dr."""
    _require_polar(grid)
    r = grid.spec.radii()
    return (grid.values * r[None, :]).sum(axis=1) * grid.spec.delta_r()


def total_mass(grid):
    """Riemann sum of values r dr dphi over a polar grid."""
    return float(angular_marginal(grid).sum() * (TWO_PI / grid.spec.shape[1]))


def mean_ridge_radius(grid):
    """Ridge radius averaged over angles with the angular marginal as weight.

    Rows carrying little probability have noisy ridges; weighting by P(phi)
    measures the radius where the density actually lives.
    """
    ridge = ridge_profile(grid)
    p = angular_marginal(grid)
    mass = p.sum()
    if not mass > 0:
        raise ZeroMass("density grid has zero total mass")
    return float((p * ridge).sum() / mass)


def angular_concentration(grid):
    """Mean resultant length |sum P e^{i phi}| / sum P, in [0, 1]."""
    p = angular_marginal(grid)
    mass = p.sum()
    if not mass > 0:
        raise ZeroMass("density grid has zero total mass")
    phi = grid.spec.angles()
    resultant = np.hypot((p * np.cos(phi)).sum(), (p * np.sin(phi)).sum())
    return float(min(1.0, resultant / mass))


@dataclass(frozen=True)
class CircleFit:
    """r = p cos(phi) + q sin(phi): a circle of diameter hypot(p, q) through the origin."""

    p: float
    q: float
    diameter: float
    center_angle: float
    rms_relative: float
    n_rows: int


def fit_circle_through_origin(phi, r, weights=None):
    """Least-squares fit of r(phi) = p cos(phi) + q sin(phi).

    ``rms_relative`` is the (weighted) RMS radial residual over the diameter.
    """
    phi = np.asarray(phi, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    w = np.ones_like(r) if weights is None else np.asarray(weights, dtype=np.float64)
    if phi.size < 3:
        raise ValueError("circle fit needs at least three points")
    basis = np.column_stack([np.cos(phi), np.sin(phi)])
    sw = np.sqrt(w)
    (p, q), *_ = np.linalg.lstsq(basis * sw[:, None], r * sw, rcond=None)
    diameter = float(math.hypot(p, q))
    if diameter == 0:
        raise ValueError("degenerate circle fit")
    resid = r - basis @ np.array([p, q])
    rms = math.sqrt(float((w * resid ** 2).sum() / w.sum()))
    return CircleFit(p=float(p), q=float(q), diameter=diameter,
                     center_angle=float(math.atan2(q, p)),
                     rms_relative=rms / diameter, n_rows=int(phi.size))


def ridge_circle_fit(grid, min_fraction=0.5):
    """Fit the ridge to a circle through the origin on the well-populated rows.

    Rows whose angular marginal is below ``min_fraction`` of its maximum are
    excluded: there the ridge sits in numerically negligible density. The
    weighted fit uses P(phi) as weights.
    """
    p = angular_marginal(grid)
    keep = p >= min_fraction * p.max()
    ridge = ridge_profile(grid)
    return fit_circle_through_origin(grid.spec.angles()[keep], ridge[keep], p[keep])


# -- Bessel magnitude scans -------------------------------------------------


def bessel_magnitude_scan(l, lam1, lam2, phi):
    """|I_{2l}(2 lam1 cos(phi/2) + 2i lam2 sin(phi/2))|^2 on ``phi`` (within [0, 2 pi])."""
    if int(l) != l or l < 0:
        raise ValueError(f"l must be a nonnegative integer, got {l}")
    if not (lam1 >= 0 and lam2 >= 0):
        raise ValueError("lambda_1 and lambda_2 must be nonnegative")
    phi = np.asarray(phi, dtype=np.float64)
    if np.any(phi < 0) or np.any(phi > TWO_PI):
        raise DomainError("scan angles must lie in [0, 2 pi]")
    z = 2.0 * lam1 * np.cos(0.5 * phi) + 2.0j * lam2 * np.sin(0.5 * phi)
    i = np.asarray(bessel_i_complex(2 * int(l), z))
    return i.real ** 2 + i.imag ** 2
