"""Command-line entry point: ``photoexc {ground,limits,coefficients,ratios,zscan}``.

Exit codes: 0 success, 1 configuration error, 2 numerical non-convergence,
3 closed channel or energy outside the validity domain.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .quadrature import QuadratureError
from .ratios import DYNAMIC_WEIGHTS, KAPPA_CONVENTIONS, ClosedChannelError, DomainError
from .report import COMMANDS, ConfigError, RunConfig, run
from .wavefunction import DegenerateBasisError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_DOMAIN = 0, 1, 2, 3

log = logging.getLogger("photoexc")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photoexc",
        description="Excitation ratios for photoionization of heliumlike ions.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="flat key = value file; flags override it")
    parser.add_argument("--z", nargs="+", type=float, help="nuclear charges")
    parser.add_argument("--nmax", type=int)
    parser.add_argument("--lmax", type=int)
    parser.add_argument("--degree", type=int, help="basis degree i + j + k <= D")
    parser.add_argument("--alpha", type=float, help="fix the exponent instead of optimizing")
    parser.add_argument("--nu", type=float, help="infrared regulator (drops out)")
    parser.add_argument("--omega-min", type=float, help="eV")
    parser.add_argument("--omega-max", type=float, help="eV")
    parser.add_argument("--omega-points", type=int)
    parser.add_argument("--omega-scale", choices=("log", "linear"))
    parser.add_argument("--fit-zmin", type=float, help="lowest Z in the 1/Z series fit")
    parser.add_argument("--kappa", choices=KAPPA_CONVENTIONS)
    parser.add_argument("--dynamic", choices=sorted(DYNAMIC_WEIGHTS))
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--paper-style", action="store_true", default=None,
                        help="also write fixed-width .txt tables")
    parser.add_argument("--allow-low-omega", action="store_true", default=None,
                        help="accept energies below the validity floor (flagged)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    kwargs = RunConfig.from_file(args.config) if args.config else {}
    for key in ("nmax", "lmax", "degree", "alpha", "nu", "omega_min", "omega_max",
                "omega_points", "omega_scale", "fit_zmin", "kappa", "dynamic", "out", "format",
                "paper_style", "allow_low_omega"):
        value = getattr(args, key)
        if value is not None:
            kwargs[key] = value
    if args.z is not None:
        kwargs["z"] = tuple(args.z)
    return RunConfig(**kwargs).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = make_config(args)
    except (ConfigError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    try:
        result = run(args.command, config)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (ClosedChannelError, DomainError) as exc:
        log.error("%s", exc)
        return EXIT_DOMAIN
    except (QuadratureError, DegenerateBasisError, ArithmeticError) as exc:
        log.error("did not converge: %s", exc)
        return EXIT_NUMERIC
    if args.command == "ground" and any(row["status"] != "ok" for row in result):
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
