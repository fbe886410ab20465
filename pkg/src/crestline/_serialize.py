"""File formats shared by the CLI and the checkpoint layer.

Every writer replaces its target atomically: data goes to a temporary file in
the same directory, then `os.replace` swaps it in. A reader therefore sees
either the old file or the new one, never a torn write.

Numbers:

- JSON floats use Python's shortest round-trip repr (at most 17 significant
  digits, exact on reload); infinities are written as the string "inf"
- CSV cells use ``%.17g``
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from crestline._errors import ParseError

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

__all__ = [
    "to_jsonable",
    "from_jsonable_float",
    "dumps_json",
    "write_json",
    "read_json",
    "write_text",
    "write_csv",
    "read_csv",
    "json_lines",
    "CSV_FORMAT",
]

CSV_FORMAT = "%.17g"


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and infinities into plain JSON values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(value, Path):
        return str(value)
    return value


def from_jsonable_float(value: Any) -> float:
    """Inverse of `to_jsonable` for one float field ("inf" included)."""
    return float(value)


def dumps_json(payload: Any, *, indent: int | None = 2) -> str:
    """Serialize keeping insertion order of keys."""
    return json.dumps(to_jsonable(payload), indent=indent, allow_nan=False)


def write_text(path: Path, text: str) -> None:
    """Atomically write `text` to `path`, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def write_json(path: Path, payload: Any) -> None:
    """Atomically write `payload` as indented JSON."""
    write_text(path, dumps_json(payload) + "\n")


def read_json(path: Path) -> dict[str, Any]:
    """Read a JSON object.

    Raises:
        ParseError: If the file is missing or is not a JSON object.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path} must hold a JSON object")
    return data


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> None:
    """Atomically write a numeric CSV table at 17 significant digits."""
    lines = [",".join(header)]
    lines.extend(",".join(CSV_FORMAT % float(x) for x in row) for row in rows)
    write_text(path, "\n".join(lines) + "\n")


def read_csv(path: Path, header: Sequence[str]) -> np.ndarray:
    """Read a numeric CSV table with an exact header.

    Returns:
        Array of shape (rows, len(header)).

    Raises:
        ParseError: On a missing file, wrong header, ragged or non-numeric rows.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0].strip() != ",".join(header):
        raise ParseError(f"{path}: expected header {','.join(header)!r}")
    width = len(header)
    values: list[list[float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != width:
            raise ParseError(f"{path}:{lineno}: expected {width} columns, got {len(cells)}")
        try:
            values.append([float(c) for c in cells])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: non-numeric cell") from None
    return np.array(values, dtype=float).reshape(len(values), width)


def json_lines(records: Iterable[Mapping[str, Any]]) -> str:
    """One compact JSON object per line."""
    return "".join(dumps_json(rec, indent=None) + "\n" for rec in records)
