import logging
import sys
import time
from datetime import datetime, timezone

LOG_FORMAT = "%(asctime)s %(levelname)-5.5s [%(name)s] %(message)s"


def timed_print(*args, **kwargs):
    """Print with an ISO8601 UTC timestamp prefix."""
    ts = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    print(ts, *args, **kwargs)


def configure_logging(level: str | int = "WARNING") -> None:
    """Route divisum log records to stderr with UTC timestamps."""
    handler = logging.StreamHandler(sys.stderr)
    formatter = logging.Formatter(LOG_FORMAT, datefmt="%Y-%m-%dT%H:%M:%SZ")
    formatter.converter = time.gmtime
    handler.setFormatter(formatter)
    root = logging.getLogger("divisum")
    root.handlers[:] = [handler]
    root.setLevel(level.upper() if isinstance(level, str) else level)
    root.propagate = False
