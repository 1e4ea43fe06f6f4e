"""Eigenform disk cache, one JSON file per weight."""

import logging
import math
import os
import tempfile
from functools import lru_cache
from pathlib import Path

from mpmath import mp, mpf
from pydantic import ValidationError

from divisum.arith import PrecisionReal, unit_roundoff
from divisum.config import settings
from divisum.modforms import Eigenform, hecke_eigenforms
from divisum.schemas import EigenformCacheFile

logger = logging.getLogger(__name__)


def cache_path(weight: int, cache_dir: str | None = None) -> Path:
    return Path(cache_dir or settings.CACHE_DIR) / f"eigenforms_k{weight}.json"


def _digits(prec: int) -> int:
    return math.ceil(prec * math.log10(2)) + 3


def store_eigenforms(
    weight: int, forms: list[Eigenform], M: int, prec: int, cache_dir: str | None = None
) -> Path:
    """Write forms atomically (temporary file, then rename)."""
    path = cache_path(weight, cache_dir)
    path.parent.mkdir(parents=True, exist_ok=True)
    digits = _digits(prec)
    payload = EigenformCacheFile(
        weight=weight,
        M=M,
        precision_bits=prec,
        forms=[[mp.nstr(c.value, digits) for c in f.coeffs[:M]] for f in forms],
    )
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".eigenforms-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(payload.model_dump_json(indent=2))
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.info("cached %d eigenforms of weight %d at %s", len(forms), weight, path)
    return path


def load_eigenforms(
    weight: int, M: int, prec: int, cache_dir: str | None = None
) -> list[Eigenform] | None:
    """Cached forms with at least M terms and prec bits, or None."""
    path = cache_path(weight, cache_dir)
    if not path.exists():
        return None
    try:
        data = EigenformCacheFile.model_validate_json(path.read_text())
    except (OSError, ValidationError) as exc:
        logger.warning("ignoring unreadable cache file %s: %s", path, exc)
        return None
    if data.weight != weight or data.M < M or data.precision_bits < prec:
        return None
    stored = mpf(2) ** (-data.precision_bits + 4)
    forms = []
    for tag, row in enumerate(data.forms):
        coeffs = []
        with mp.workprec(prec):
            for text in row[:M]:
                value = mpf(text)
                coeffs.append(
                    PrecisionReal(value, abs(value) * (stored + unit_roundoff(prec)), prec)
                )
        forms.append(Eigenform(weight, tuple(coeffs), tag, prec))
    logger.debug("loaded %d eigenforms of weight %d from %s", len(forms), weight, path)
    return forms


@lru_cache(maxsize=None)
def _computed(weight: int, M: int, prec: int) -> tuple[Eigenform, ...]:
    return tuple(hecke_eigenforms(weight, M, prec))


def get_eigenforms(
    weight: int, M: int, prec: int, cache_dir: str | None = None
) -> list[Eigenform]:
    """Eigenforms of a weight, from disk when cache_dir is given and fresh enough."""
    if cache_dir is not None:
        forms = load_eigenforms(weight, M, prec, cache_dir)
        if forms is not None:
            return forms
    forms = list(_computed(weight, M, prec))
    if cache_dir is not None:
        store_eigenforms(weight, forms, M, prec, cache_dir)
    return forms


def clear_cache(cache_dir: str | None = None) -> int:
    """Remove every cached weight; returns the number of files deleted."""
    root = Path(cache_dir or settings.CACHE_DIR)
    if not root.is_dir():
        return 0
    removed = 0
    for path in root.glob("eigenforms_k*.json"):
        path.unlink()
        removed += 1
    logger.info("removed %d cache files from %s", removed, root)
    return removed
