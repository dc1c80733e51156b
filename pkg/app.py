"""
cremona-lines: command-line entry point.

Subcommands:
- classify     vanishing adjoints, Kodaira dimension and contractibility
- adjoints     dimensions of ad_(n,m) for m = n, n+1, ...
- plurigenera  P_1..P_M and the bounded Kodaira verdict
- transform    apply a Cremona map and report the images of the lines
- contract     contraction certificate of a contractible arrangement
- verify       replay a certificate file from scratch
- realize      arrangement of a family or configuration

Exit codes: 0 success, 1 domain error or failed verification, 2 usage error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from src.models.config import Config
from src.models.errors import CremonaLinesError, UsageError
from src.models.schemas import RunConfig
from src.views.reports import render

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def setup_logging() -> logging.Logger:
    """Configura logging centralizado (stderr, e arquivo UTF-8 se LOG_FILE)"""
    handlers: List[logging.Handler] = []
    if Config.LOG_FILE:
        try:
            handlers.append(logging.FileHandler(Config.LOG_FILE, encoding="utf-8"))
        except OSError as e:
            print(f"Warning: Could not create file handler: {e}", file=sys.stderr)
    # stdout carries the report
    handlers.append(logging.StreamHandler(sys.stderr))

    logging.basicConfig(
        level=getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
        format=Config.LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
    return logging.getLogger(__name__)


def _input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help='configuration notation, e.g. "(6; {1,2,3}, {1,4,5})"')
    parser.add_argument("--lines", help="JSON arrangement file")
    parser.add_argument("--realize", help="family tag or notation, e.g. d2-triple or \"(d;d-2,3,2^{2(d-3)})\"")
    parser.add_argument("--d", type=int, help="degree for --realize")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cremona-lines", description="Cremona classification of unions of lines")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", "--realize-seed", dest="seed", type=int, default=Config.CREMONA_SEED)
    common.add_argument("--format", dest="output_format", choices=["text", "json"], default=Config.OUTPUT_FORMAT)
    common.add_argument("--output", "-o", help="write the certificate / arrangement to this file")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify an arrangement")
    _input_flags(p)
    p.add_argument("--kodaira-bound", type=int, default=Config.KODAIRA_BOUND)
    p.add_argument("--budget-depth", type=int, default=Config.SEARCH_MAX_DEPTH)
    p.add_argument("--budget-width", type=int, default=Config.SEARCH_MAX_WIDTH)

    p = sub.add_parser("adjoints", parents=[common], help="adjoint sequence for a given n")
    _input_flags(p)
    p.add_argument("-n", type=int, default=1)

    p = sub.add_parser("plurigenera", parents=[common], help="log plurigenera P_1..P_M")
    _input_flags(p)
    p.add_argument("--kodaira-bound", "-M", dest="kodaira_bound", type=int, default=Config.KODAIRA_BOUND)

    p = sub.add_parser("transform", parents=[common], help="apply a Cremona map")
    _input_flags(p)
    p.add_argument("--map", dest="map_spec", required=True, help='e.g. "quadratic:1,0,0;0,1,0;0,0,1" or a JSON map file')

    p = sub.add_parser("contract", parents=[common], help="write a contraction certificate")
    _input_flags(p)

    p = sub.add_parser("verify", parents=[common], help="replay a certificate file")
    p.add_argument("certificate")

    p = sub.add_parser("realize", parents=[common], help="write an arrangement file")
    _input_flags(p)
    return parser


def to_run_config(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if v is not None and k in RunConfig.model_fields}
    return RunConfig(**fields)


def main(argv: Optional[List[str]] = None) -> int:
    """Ponto de entrada principal da aplicação"""
    logger = setup_logging()

    validation = Config.validate_config()
    if not validation["valid"]:
        for error in validation["errors"]:
            logger.error(f"  - {error}")
        return EXIT_USAGE
    for warning in validation["warnings"]:
        logger.warning(f"  - {warning}")

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        run = to_run_config(args)
    except ValidationError as e:
        for err in e.errors():
            logger.error(f"❌ {err['msg']}")
        return EXIT_USAGE

    # controller imports pull in sympy/numpy; keep --help fast
    from src.controllers.cli_controller import CliController

    try:
        result = CliController(run).dispatch()
    except UsageError as e:
        logger.error(f"❌ {e}")
        return EXIT_USAGE
    except CremonaLinesError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_DOMAIN

    print(render(result.command, result.payload, run.output_format))
    return EXIT_OK if result.ok else EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
