import argparse
import logging
import sys

from pydantic import ValidationError

from divisum import __version__
from divisum.commands import cache, physics, table, verify
from divisum.config import settings
from divisum.exceptions import DivisumError, DomainError
from divisum.log import configure_logging
from divisum.schemas import CliConfig

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.PROJECT_NAME,
        description="Verify divisor-sum convolution identities and their cusp forms",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--precision-bits", type=int)
    parser.add_argument("--base-n", type=int, dest="base_N")
    parser.add_argument("--levels", type=int)
    parser.add_argument("--extrap-terms", type=int)
    parser.add_argument("--rel-tol", type=float)
    parser.add_argument(
        "--format", choices=["json", "csv", "text"], dest="output_format"
    )
    parser.add_argument("--cache-dir")
    parser.add_argument("--jobs", type=int)
    parser.add_argument(
        "--omit-timings", action="store_true", default=None, help="drop wall_ms"
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)

    subparsers = parser.add_subparsers(dest="command", required=True)
    verify.register(subparsers)
    physics.register(subparsers)
    table.register(subparsers)
    cache.register(subparsers)
    return parser


def _log_level(verbose: int) -> str:
    if verbose >= 2:
        return "DEBUG"
    if verbose == 1:
        return "INFO"
    return settings.LOG_LEVEL


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(_log_level(args.verbose))

    try:
        config = CliConfig.from_overrides(
            precision_bits=args.precision_bits,
            base_N=args.base_N,
            levels=args.levels,
            extrap_terms=args.extrap_terms,
            rel_tol=args.rel_tol,
            output_format=args.output_format,
            cache_dir=args.cache_dir,
            jobs=args.jobs,
            omit_timings=args.omit_timings,
        )
    except ValidationError as exc:
        parser.error(str(exc))

    try:
        return args.handler(args, config)
    except DomainError as exc:
        parser.error(str(exc))
    except DivisumError as exc:
        logger.error("%s failed: %s", args.command, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
