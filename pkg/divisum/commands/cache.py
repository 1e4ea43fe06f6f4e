import argparse

from divisum import schemas
from divisum.cache import cache_path, clear_cache
from divisum.commands import emit
from divisum.config import _parse_weights, settings
from divisum.log import timed_print
from divisum.modforms import dim_cusp
from divisum.verify import eigenforms_for


def cmd_cache_warm(args: argparse.Namespace, config) -> int:
    """Compute and store the eigenforms of each weight"""
    weights = _parse_weights(args.weights) if args.weights else settings.weights
    warmed, files = [], []
    for weight in weights:
        if dim_cusp(weight) == 0:
            continue
        if config.output_format == "text":
            timed_print(f"weight {weight}: computing eigenforms")
        eigenforms_for(weight, config.precision_bits, 1, config.cache_dir)
        warmed.append(weight)
        files.append(str(cache_path(weight, config.cache_dir)))
    response = schemas.CacheWarmResponse(weights=warmed, files=files)
    rows = [{"weight": w, "file": f} for w, f in zip(warmed, files)]
    lines = [f"weight {w}: {f}" for w, f in zip(warmed, files)]
    emit(config, response, rows, lines)
    return 0


def cmd_cache_clear(args: argparse.Namespace, config) -> int:
    """Delete every cached eigenform file"""
    removed = clear_cache(config.cache_dir)
    response = schemas.CacheClearResponse(removed=removed)
    emit(config, response, [response.model_dump()], [f"removed {removed} files"])
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("cache", help="manage the eigenform cache")
    commands = parser.add_subparsers(dest="action", required=True)

    warm = commands.add_parser("warm", help="precompute eigenforms")
    warm.add_argument("--weights", help="JSON list or comma-separated weights")
    warm.set_defaults(handler=cmd_cache_warm)

    clear = commands.add_parser("clear", help="delete cached eigenforms")
    clear.set_defaults(handler=cmd_cache_clear)
