"""Atomic CSV and JSON artifact writers."""

import csv
import json
import os
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from mrsde.common.constants import CSV_FORMAT
from mrsde.common.logger import get_logger

logger = get_logger(__name__)


def format_value(value: Any) -> str:
    """Format a CSV cell; floats use 17 significant digits."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, CSV_FORMAT)

    try:
        return format(float(value), CSV_FORMAT)
    except (TypeError, ValueError):
        return str(value)


def _atomic_write(path: Path, write: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    prefix = f".{path.name}."
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=prefix, suffix=".tmp")

    try:
        with os.fdopen(fd, "w", newline="") as fp:
            write(fp)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    comment: str | None = None,
) -> None:
    """Write rows to a CSV file via temp file and rename.

    Args:
    ----
        path: destination
        header: column names
        rows: row values
        comment: written first as a `# ...` line

    """

    def write(fp: Any) -> None:
        if comment is not None:
            fp.write(f"# {comment}\n")
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])

    _atomic_write(path, write)
    logger.info("Wrote %s", path)


def write_json(path: Path, payload: dict[str, Any]) -> None:
    """Write a JSON document via temp file and rename."""

    def write(fp: Any) -> None:
        json.dump(payload, fp, indent=2, sort_keys=True, allow_nan=True)
        fp.write("\n")

    _atomic_write(path, write)
    logger.info("Wrote %s", path)
