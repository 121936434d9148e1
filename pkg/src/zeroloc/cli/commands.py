"""The four subcommands. Each takes a resolved config and returns an exit status."""

import math
import os
import sys

import numpy as np

from .. import complex_special as cs
from .. import quantum_states as qs
from ..coherent_superposition import localized_state
from ..density_field import (
    ClassicalOrbit,
    angular_concentration,
    bessel_magnitude_scan,
    classical_trajectory,
    mean_ridge_radius,
    render_density,
    ridge_circle_fit,
    ridge_profile,
    total_mass,
)
from ..errors import NotBound, ZerolocError
from .config import Resolved, provenance
from .output import ensure_dir, write_csv, write_json, write_pgm

BOUND_CONDITION = "a bound E=0 state needs radial order > 1 (l > 1 under V_c)"
THETA_GRID = 128


def _error_record(exc):
    rec = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, NotBound):
        rec["condition"] = BOUND_CONDITION
        for attr in ("l", "order", "k"):
            value = getattr(exc, attr, None)
            if value is not None:
                rec[attr] = value
    return rec


class Report:
    def __init__(self):
        self.checks = []

    def bound(self, name, value, tolerance):
        """Pass when value <= tolerance."""
        self.checks.append({"name": name, "value": float(value), "tolerance": tolerance,
                            "comparison": "<=", "passed": bool(value <= tolerance)})

    def floor(self, name, value, tolerance):
        """Pass when value >= tolerance."""
        self.checks.append({"name": name, "value": float(value), "tolerance": tolerance,
                            "comparison": ">=", "passed": bool(value >= tolerance)})

    def info(self, name, value, note):
        self.checks.append({"name": name, "value": value, "tolerance": None,
                            "comparison": "reported", "passed": True, "note": note})

    def failure(self, name, exc):
        self.checks.append({"name": name, "value": None, "tolerance": None,
                            "comparison": "error", "passed": False, "error": _error_record(exc)})

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)


def _theta_grid(rc):
    r = np.linspace(rc.grid.r_min, rc.grid.r_max, THETA_GRID)[None, :]
    phi = (2.0 * math.pi * np.arange(THETA_GRID) / THETA_GRID)[:, None]
    return r, phi


def reflection_samples(n, seed):
    """(order, z, m) triples with order <= 20, |z| <= 10, |m| <= 3."""
    rng = np.random.default_rng(seed)
    orders = rng.integers(0, 21, size=n)
    ms = rng.integers(-3, 4, size=n)
    radius = 10.0 * np.sqrt(rng.random(n))
    angle = 2.0 * math.pi * rng.random(n)
    return orders, radius * np.exp(1j * angle), ms


def max_reflection_residual(orders, z, ms):
    worst = 0.0
    for nu in np.unique(orders):
        for m in np.unique(ms[orders == nu]):
            sel = (orders == nu) & (ms == m)
            res = np.asarray(cs.reflection_check_i(int(nu), z[sel], int(m)))
            worst = max(worst, float(res.max()))
    return worst


def _state_checks(report, rc, l, tol, r_grid, phi_grid):
    kind, dp = rc.kind, rc.dp
    tag = f"[{kind.value}, l={l}]"
    try:
        state = qs.full_state(kind, l, dp, rc.a0)
    except NotBound as exc:
        report.failure(f"bound_state{tag}", exc)
        return
    mode = state.angular
    report.bound(f"angular_ode{tag}", qs.angular_ode_residual(mode, phi_grid.ravel()), tol["angular_ode"])
    rho = np.geomspace(0.05, 20.0, 256)
    report.bound(f"radial_ode{tag}", qs.radial_ode_residual(state.radial, rho), tol["radial_ode"])
    n_quad = qs.radial_norm_quadrature(state.radial)
    report.bound(f"radial_norm{tag}", abs(n_quad - state.radial.norm_constant) / state.radial.norm_constant,
                 tol["radial_norm"])
    if not mode.fourier:
        c_series = qs.angular_norm_series(l, dp.lam)
        report.bound(f"angular_norm{tag}", abs(mode.norm_constant - c_series) / c_series, tol["angular_norm"])
    report.bound(f"theta_invariance{tag}", qs.theta_residual(state, r_grid, phi_grid), tol["theta"])
    lm = qs.angular_momentum_expectation(mode)
    report.bound(f"angular_momentum_agreement{tag}", lm.agreement, tol["angular_momentum"])
    if dp.lam == 0:
        report.bound(f"angular_momentum_exact{tag}", abs(lm.series - l), 0.0)
    report.info(f"angular_momentum_deviation{tag}", lm.deviation,
                "<L>/hbar - l from the coefficient series; reported, not asserted")


def cmd_verify(rc: Resolved):
    tol = rc.tol
    report = Report()
    r_grid, phi_grid = _theta_grid(rc)

    orders, z, ms = reflection_samples(rc.reflection_samples, rc.seed)
    report.bound("reflection_identity", max_reflection_residual(orders, z, ms), tol["reflection"])

    phi = 2.0 * math.pi * np.arange(64) / 64
    lambdas = sorted(set(rc.periodicity_lambdas) | ({rc.dp.lam} if rc.dp.lam > 0 else set()))
    worst = max(qs.periodicity_residual(l, lam, phi) for l in range(10) for lam in lambdas)
    report.bound("periodicity_integer_l", worst, tol["periodicity"])
    weakest = min(qs.periodicity_residual(l + 0.5, lam, phi) for l in range(3) for lam in lambdas)
    report.floor("periodicity_half_integer_violation", weakest, tol["half_integer_violation"])

    phys = rc.physical or rc.dp.physical(a0=rc.a0)
    vmax = float(np.max(np.abs(qs.potential_value(rc.kind, phys, r_grid, phi_grid))))
    sym = qs.hamiltonian_symmetry_residual(rc.kind, phys, r_grid, phi_grid)
    report.bound("hamiltonian_theta_symmetry", sym / vmax if vmax > 0 else 0.0, tol["hamiltonian_symmetry"])

    states = rc.verify_states
    if states is None:
        states = [k + 2 for k in range(rc.coherent.N + 1)]
    for l in states:
        _state_checks(report, rc, l, tol, r_grid, phi_grid)

    try:
        psi = localized_state(rc.kind, rc.coherent, rc.dp, rc.a0)
    except NotBound as exc:
        report.failure("localized_state", exc)
    else:
        if rc.coherent.theta0 == 0:
            report.bound("theta_invariance[localized]", qs.theta_residual(psi, r_grid, phi_grid), tol["theta"])
        else:
            report.info("theta_invariance[localized]", None, "skipped: weights are complex for theta0 != 0")

    doc = {"config": provenance(rc.raw), "checks": report.checks, "passed": report.passed}
    ensure_dir(rc.out)
    write_json(os.path.join(rc.out, "verify.json"), doc)
    for c in report.checks:
        status = "PASS" if c["passed"] else "FAIL"
        if c["comparison"] == "error":
            detail = f"{c['error']['type']}: {c['error']['message']}"
        elif c["comparison"] == "reported":
            detail = f"value={c['value']!r} ({c['note']})"
        else:
            detail = f"value={c['value']:.3e} {c['comparison']} {c['tolerance']:.1e}"
        print(f"{status} {c['name']}: {detail}")
    return 0 if report.passed else 1


def _overlay(rc):
    if rc.dp.lam != 0:
        return None
    # the superposition spreads over l = 2..N+2; use its mean angular momentum
    mean_l = rc.coherent.mean_l()
    if rc.physical is not None:
        orbit = ClassicalOrbit.from_physical(rc.physical, mean_l * rc.physical.hbar, rc.orbit_phi0)
    else:
        orbit = ClassicalOrbit(a=rc.dp.gamma * rc.a0 / mean_l, L=mean_l, phi0=rc.orbit_phi0)
    pts = classical_trajectory(orbit, rc.orbit_samples)
    return {"a": orbit.a, "L": orbit.L, "phi0": orbit.phi0, "mean_l": mean_l,
            "points": pts.tolist()}


def cmd_density(rc: Resolved):
    try:
        psi = localized_state(rc.kind, rc.coherent, rc.dp, rc.a0)
    except NotBound as exc:
        rec = _error_record(exc)
        print(f"error: {rec['type']}: {rec['message']}", file=sys.stderr)
        return 1
    polar = render_density(psi, rc.grid)
    image = render_density(psi, rc.image)
    ensure_dir(rc.out)

    r = rc.grid.radii()
    phi = rc.grid.angles()
    rows = ((phi[j], r[i], polar.values[j, i]) for j in range(phi.size) for i in range(r.size))
    write_csv(os.path.join(rc.out, "density.csv"), ["phi", "r", "density"], rows)
    write_pgm(os.path.join(rc.out, "density.pgm"), image.values)

    ridge = ridge_profile(polar)
    fit = ridge_circle_fit(polar)
    doc = {
        "config": provenance(rc.raw),
        "metadata": polar.metadata,
        "grid": rc.grid.to_dict(),
        "image": rc.image.to_dict(),
        "ridge_profile": {"phi": phi.tolist(), "r": ridge.tolist()},
        "mean_ridge_radius": mean_ridge_radius(polar),
        "angular_concentration": angular_concentration(polar),
        "total_mass": total_mass(polar),
        "circle_fit": {"diameter": fit.diameter, "center_angle": fit.center_angle,
                       "rms_relative": fit.rms_relative, "rows_used": fit.n_rows},
        "classical_overlay": _overlay(rc),
    }
    write_json(os.path.join(rc.out, "density.json"), doc)
    print(f"wrote density.csv, density.pgm, density.json to {rc.out}")
    return 0


def _mode_row(rc, l, r_grid, phi_grid):
    kind, dp = rc.kind, rc.dp
    row = {"l": l}
    errors = []
    try:
        mode = qs.make_angular_for(kind, l, dp.lam)
        row["C"] = mode.norm_constant
        lm = qs.angular_momentum_expectation(mode)
        row["L_quad"], row["L_series"] = lm.quadrature, lm.series
    except ZerolocError as exc:
        mode = None
        errors.append(f"{type(exc).__name__}: {exc}")
    try:
        radial = qs.make_radial_mode(kind, l, dp, rc.a0)
        row["N_closed"] = radial.norm_constant
        row["N_quad"] = qs.radial_norm_quadrature(radial)
        if mode is not None:
            state = qs.EigenState(kind=kind, l=l, angular=mode, radial=radial)
            row["theta_residual"] = qs.theta_residual(state, r_grid, phi_grid)
    except ZerolocError as exc:
        name = type(exc).__name__
        for col in ("N_closed", "N_quad", "theta_residual"):
            row.setdefault(col, name)
        errors.append(f"{name}: {exc}")
    row["errors"] = "; ".join(errors)
    return row


MODE_COLUMNS = ["l", "C", "N_closed", "N_quad", "L_quad", "L_series", "theta_residual", "errors"]


def cmd_modes(rc: Resolved):
    r_grid, phi_grid = _theta_grid(rc)
    rows = [_mode_row(rc, l, r_grid, phi_grid) for l in rc.l_range]
    ensure_dir(rc.out)
    write_csv(os.path.join(rc.out, "modes.csv"), MODE_COLUMNS,
              ([row.get(c, "") for c in MODE_COLUMNS] for row in rows))
    write_json(os.path.join(rc.out, "modes.json"), {"config": provenance(rc.raw), "rows": rows})
    print(f"wrote modes.csv, modes.json ({len(rows)} rows) to {rc.out}")
    return 0


def cmd_scan_bessel(rc: Resolved):
    phi = np.linspace(0.0, 2.0 * math.pi, rc.scan_n_phi)
    curves = [bessel_magnitude_scan(rc.scan_l, a, b, phi) for a, b in rc.scan_pairs]
    header = ["phi"] + [f"lam1={a!r} lam2={b!r}" for a, b in rc.scan_pairs]
    ensure_dir(rc.out)
    write_csv(os.path.join(rc.out, "scan.csv"), header,
              ([phi[i]] + [c[i] for c in curves] for i in range(phi.size)))
    summary = []
    for (a, b), c in zip(rc.scan_pairs, curves):
        j = int(np.argmax(c))
        summary.append({"lambda1": a, "lambda2": b, "max": float(c[j]), "argmax_phi": float(phi[j])})
    write_json(os.path.join(rc.out, "scan.json"),
               {"config": provenance(rc.raw), "l": rc.scan_l, "pairs": summary})
    print(f"wrote scan.csv, scan.json ({len(curves)} pairs) to {rc.out}")
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "density": cmd_density,
    "modes": cmd_modes,
    "scan-bessel": cmd_scan_bessel,
}
