"""Run configuration: a single JSON document, overridden by command-line flags."""

import copy
import json
import math
import re

from ..coherent_superposition import CoherentSpec
from ..density_field import GridSpec
from ..errors import ConfigError
from ..quantum_states import DimensionlessParams, PhysicalParams, PotentialKind

DEFAULTS = {
    "potential": "vc",
    "coherent": {"N": 7, "A": 1.0, "theta0": 0.0},
    "grid": {"nr": 256, "nphi": 512, "r_min": 1e-3, "r_max": 1.0},
    "image": {"nx": 256, "ny": 256, "half_width": 0.5},
    "orbit": {"phi0": 0.0, "n_samples": 256},
    "modes": {"l_min": 2, "l_max": 9},
    "scan": {"l": 2, "pairs": [[5.0, 5.0], [5.0, 0.0], [0.0, 5.0]], "n_phi": 721},
    "verify": {
        "seed": 20240229,
        "reflection_samples": 1000,
        "periodicity_lambdas": [0.1, 1.0, 10.0],
        "states": None,
        "tolerances": {
            "reflection": 1e-10,
            "periodicity": 1e-10,
            "half_integer_violation": 0.1,
            "angular_ode": 1e-8,
            "radial_ode": 1e-8,
            "radial_norm": 1e-6,
            "angular_norm": 1e-10,
            "theta": 1e-11,
            "hamiltonian_symmetry": 1e-12,
            "angular_momentum": 1e-8,
        },
    },
    "out": "zeroloc_out",
}

_TOP_KEYS = set(DEFAULTS) | {"physical", "dimensionless"}
_GRID_RE = re.compile(r"^\s*(\d+)\s*[xX]\s*(\d+)\s*$")


def _merge(base, extra, path=""):
    for key, value in extra.items():
        if key not in base:
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(base[key], dict) and key != "tolerances":
            if not isinstance(value, dict):
                raise ConfigError(f"config key {path + key!r} must be an object")
            _merge(base[key], value, path + key + ".")
        elif key == "tolerances":
            if not isinstance(value, dict):
                raise ConfigError("verify.tolerances must be an object")
            for name in value:
                if name not in base[key]:
                    raise ConfigError(f"unknown tolerance {name!r}")
            base[key].update(value)
        else:
            base[key] = value


def load_document(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    return doc


def parse_grid_flag(text):
    m = _GRID_RE.match(text)
    if not m:
        raise ConfigError(f"--grid must look like <nr>x<nphi>, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def resolve(doc, flags):
    """Merge defaults, the config document and flag overrides into one dict.

    ``flags`` maps flag names (lambda, potential, N, A, theta0, grid, out)
    to values, with None meaning "not given".
    """
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    has_phys = "physical" in doc
    has_dim = "dimensionless" in doc
    if has_phys and has_dim:
        raise ConfigError("give exactly one of 'physical' and 'dimensionless', not both")
    cfg = copy.deepcopy(DEFAULTS)
    _merge(cfg, {k: v for k, v in doc.items() if k not in ("physical", "dimensionless")})
    if has_phys:
        block = doc["physical"]
        if not isinstance(block, dict):
            raise ConfigError("'physical' must be an object")
        cfg["physical"] = {"mass": 1.0, "hbar": 1.0, "Gamma": 0.5, "Lambda": 0.0, "a0": 1.0}
        _merge(cfg["physical"], block, "physical.")
    else:
        block = doc.get("dimensionless", {})
        if not isinstance(block, dict):
            raise ConfigError("'dimensionless' must be an object")
        cfg["dimensionless"] = {"gamma": 1.0, "lambda": 0.0, "a0": 1.0}
        _merge(cfg["dimensionless"], block, "dimensionless.")

    if flags.get("potential") is not None:
        cfg["potential"] = flags["potential"]
    for name in ("N", "A", "theta0"):
        if flags.get(name) is not None:
            cfg["coherent"][name] = flags[name]
    if flags.get("grid") is not None:
        cfg["grid"]["nr"], cfg["grid"]["nphi"] = parse_grid_flag(flags["grid"])
    if flags.get("out") is not None:
        cfg["out"] = flags["out"]
    if flags.get("lambda") is not None:
        lam = float(flags["lambda"])
        if not (math.isfinite(lam) and lam >= 0):
            raise ConfigError(f"--lambda must be finite and nonnegative, got {lam}")
        if "physical" in cfg:
            p = cfg["physical"]
            p["Lambda"] = (lam * p["hbar"]) ** 2 / (2.0 * p["mass"])
        else:
            cfg["dimensionless"]["lambda"] = lam
    build(cfg)
    return cfg


class Resolved:
    """Typed views of a resolved config dict."""

    def __init__(self, cfg):
        self.raw = cfg
        self.kind = PotentialKind.parse(cfg["potential"])
        if "physical" in cfg:
            self.physical = PhysicalParams(**{k: float(v) for k, v in cfg["physical"].items()})
            self.dp = self.physical.dimensionless()
            self.a0 = self.physical.a0
            self.hbar = self.physical.hbar
        else:
            d = cfg["dimensionless"]
            self.dp = DimensionlessParams(gamma=float(d["gamma"]), lam=float(d["lambda"]))
            self.a0 = float(d["a0"])
            if not self.a0 > 0:
                raise ValueError("a0 must be positive")
            self.physical = None
            self.hbar = 1.0
        c = cfg["coherent"]
        self.coherent = CoherentSpec(N=c["N"], A=float(c["A"]), theta0=float(c["theta0"]))
        g = cfg["grid"]
        self.grid = GridSpec.polar(g["nr"], g["nphi"], float(g["r_min"]), float(g["r_max"]))
        im = cfg["image"]
        hw = float(im["half_width"])
        self.image = GridSpec.cartesian(im["nx"], im["ny"], (-hw, hw), (-hw, hw), float(g["r_min"]))
        self.orbit_phi0 = float(cfg["orbit"]["phi0"])
        self.orbit_samples = int(cfg["orbit"]["n_samples"])
        if self.orbit_samples < 3:
            raise ValueError("orbit.n_samples must be >= 3")
        m = cfg["modes"]
        self.l_range = range(int(m["l_min"]), int(m["l_max"]) + 1)
        if int(m["l_min"]) < 0 or len(self.l_range) == 0:
            raise ValueError("modes needs 0 <= l_min <= l_max")
        s = cfg["scan"]
        self.scan_l = int(s["l"])
        self.scan_pairs = [(float(a), float(b)) for a, b in s["pairs"]]
        if not self.scan_pairs:
            raise ValueError("scan.pairs must list at least one (lambda_1, lambda_2) pair")
        if any(a < 0 or b < 0 for a, b in self.scan_pairs):
            raise ValueError("scan pairs must be nonnegative")
        self.scan_n_phi = int(s["n_phi"])
        if self.scan_n_phi < 2:
            raise ValueError("scan.n_phi must be >= 2")
        v = cfg["verify"]
        self.seed = int(v["seed"])
        self.reflection_samples = int(v["reflection_samples"])
        self.periodicity_lambdas = [float(x) for x in v["periodicity_lambdas"]]
        self.verify_states = None if v["states"] is None else [int(x) for x in v["states"]]
        self.tol = {k: float(x) for k, x in v["tolerances"].items()}
        self.out = str(cfg["out"])


def build(cfg):
    try:
        return Resolved(cfg)
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def provenance(cfg):
    """The resolved config without the output directory, for embedding in outputs."""
    out = copy.deepcopy(cfg)
    out.pop("out", None)
    return out
