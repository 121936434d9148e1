"""Command-line front end: ``zeroloc {verify,density,modes,scan-bessel}``.

Exit status is 0 on success, 1 when a check or a state construction fails
and 2 for configuration errors.
"""

import argparse
import sys

from ..errors import ConfigError
from .commands import COMMANDS
from .config import build, load_document, resolve

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _add_common(p):
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory")
    p.add_argument("--lambda", dest="lam", type=float, help="dimensionless lambda")
    p.add_argument("--potential", choices=["vc", "vplus", "vminus"])
    p.add_argument("--N", type=int, help="number of superposed states minus one")
    p.add_argument("--A", type=float, help="|tau| of the coherent parameter")
    p.add_argument("--theta0", type=float, help="phase of the coherent parameter")
    p.add_argument("--grid", help="polar grid resolution as <nr>x<nphi>")


def build_parser():
    parser = argparse.ArgumentParser(prog="zeroloc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("verify", "run the identity and invariant checks"),
        ("density", "render |Psi_N|^2 and its localization statistics"),
        ("modes", "tabulate normalization constants and <L> per l"),
        ("scan-bessel", "scan |I_2l|^2 over phi for (lambda1, lambda2) pairs"),
    ):
        _add_common(sub.add_parser(name, help=help_text))
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, matching the config-error status
        return int(exc.code or 0)
    flags = {"lambda": args.lam, "potential": args.potential, "N": args.N, "A": args.A,
             "theta0": args.theta0, "grid": args.grid, "out": args.out}
    try:
        cfg = resolve(load_document(args.config), flags)
        rc = build(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](rc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
