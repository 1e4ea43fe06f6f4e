import csv
import io
import json

from pydantic import BaseModel

from divisum.exceptions import DomainError
from divisum.schemas import CliConfig


def parse_n_range(text: str) -> list[int]:
    """Parse "a..b" (inclusive) or a single integer; n = 0 is rejected."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise DomainError(f"invalid n range {text!r}, expected a..b") from None
    if hi < lo:
        raise DomainError(f"empty n range {text!r}")
    if lo <= 0 <= hi:
        raise DomainError("n = 0 is not supported")
    return list(range(lo, hi + 1))


def _drop_key(data, key: str):
    if isinstance(data, dict):
        return {k: _drop_key(v, key) for k, v in data.items() if k != key}
    if isinstance(data, list):
        return [_drop_key(v, key) for v in data]
    return data


def to_json(payload: BaseModel, omit_timings: bool = False) -> str:
    data = payload.model_dump(mode="json", by_alias=True)
    if omit_timings:
        data = _drop_key(data, "wall_ms")
    return json.dumps(data, indent=2)


def to_csv(rows: list[dict]) -> str:
    output = io.StringIO()
    writer = None
    for row in rows:
        if writer is None:
            writer = csv.writer(output)
            writer.writerow(row.keys())
        writer.writerow(row.values())
    return output.getvalue()


def emit(
    config: CliConfig, payload: BaseModel, rows: list[dict], lines: list[str]
) -> None:
    """Print one result in the configured output format."""
    if config.output_format == "json":
        print(to_json(payload, config.omit_timings))
    elif config.output_format == "csv":
        if config.omit_timings:
            rows = [{k: v for k, v in row.items() if k != "wall_ms"} for row in rows]
        print(to_csv(rows), end="")
    else:
        for line in lines:
            print(line)
