"""On-disk formats shared by the CLI, the experiments and the bindings.

All writers are atomic (temp file in the target directory, then rename),
so a failing run never leaves a partial artifact behind. Floats are
serialized with Python's shortest round-trip repr, which makes outputs
byte-stable for identical inputs.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import MalformedCsvError


def atomic_write_text(path, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, allow_nan=False) + "\n")


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _fmt(value: float) -> str:
    return repr(float(value))


def _csv_text(rows: Iterable[Sequence]) -> str:
    lines = [",".join(str(cell) for cell in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_attribution_csv(path, feature_names: Sequence[str], matrix, integer: bool = False) -> None:
    """First row is the feature names; every later row is one attribution."""
    rows: list[Sequence] = [list(feature_names)]
    if integer:
        arr = np.asarray(matrix, dtype=np.int64)
        rows.extend([str(int(v)) for v in row] for row in arr)
    else:
        arr = np.asarray(matrix, dtype=np.float64)
        rows.extend([_fmt(v) for v in row] for row in arr)
    atomic_write_text(path, _csv_text(rows))


def read_attribution_csv(path) -> tuple[list[str], np.ndarray]:
    names, rows = _read_rows(path, need_header=True)
    if not rows:
        return names, np.empty((0, len(names)))
    matrix = _parse_float_rows(path, rows, len(names))
    return names, matrix


def write_distance_csv(path, entries: np.ndarray) -> None:
    """n x n matrix, no header."""
    rows = ([_fmt(v) for v in row] for row in np.asarray(entries, dtype=np.float64))
    atomic_write_text(path, _csv_text(rows))


def read_distance_csv(path) -> np.ndarray:
    _names, rows = _read_rows(path, need_header=False)
    if not rows:
        raise MalformedCsvError(f"{path}: empty distance matrix")
    return _parse_float_rows(path, rows, len(rows[0]))


def write_vector_csv(path, values) -> None:
    """Single CSV row of floats (baselines and similar)."""
    arr = np.asarray(values, dtype=np.float64).ravel()
    atomic_write_text(path, _csv_text([[_fmt(v) for v in arr]]))


def read_vector_csv(path) -> np.ndarray:
    _names, rows = _read_rows(path, need_header=False)
    if len(rows) != 1:
        raise MalformedCsvError(f"{path}: expected exactly one row of values")
    return _parse_float_rows(path, rows, len(rows[0]))[0]


def _read_rows(path, need_header: bool) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise MalformedCsvError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise MalformedCsvError(f"{path}: file is empty")
    if need_header:
        header, body = rows[0], rows[1:]
    else:
        header, body = [], rows
    width = len(header) if need_header else len(body[0])
    for i, row in enumerate(body):
        if len(row) != width:
            raise MalformedCsvError(
                f"{path}: row {i + 1} has {len(row)} cells, expected {width}"
            )
    return header, body


def _parse_float_rows(path, rows: list[list[str]], width: int) -> np.ndarray:
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell)
            except ValueError as exc:
                raise MalformedCsvError(
                    f"{path}: cell ({i + 1},{j + 1}) is not a number: {cell!r}"
                ) from exc
    return out
