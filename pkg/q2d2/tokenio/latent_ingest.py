"""Reading latent vectors from CSV or raw float32 files."""

from __future__ import annotations

import io
import re
from pathlib import Path
from typing import IO, Union

import numpy as np
import pandas as pd

from q2d2.common.errors import IngestionError
from q2d2.constants import LATENT_TOLERANCE

FORMATS = ("csv", "raw")
RAW_DTYPE = np.dtype("<f4")

Source = Union[str, Path, bytes, IO]


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, (str, Path)):
        return Path(source).read_bytes()
    if isinstance(source, (bytes, bytearray, memoryview)):
        return bytes(source)
    data = source.read()
    return data.encode() if isinstance(data, str) else data


def _read_csv(data: bytes, d: int) -> np.ndarray:
    if not data.strip():
        return np.empty((0, d))
    # pandas pads short rows with NaN, so widths are checked on the raw lines
    rows = [line for line in data.splitlines() if line.strip()]
    for row, line in enumerate(rows):
        width = line.count(b",") + 1
        if width != d:
            raise IngestionError(f"Row width {width} does not match d={d}", row)
    try:
        frame = pd.read_csv(io.BytesIO(data), header=None, skip_blank_lines=True)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        row = int(match.group(1)) - 1 if match else -1
        raise IngestionError(f"Unreadable CSV: {e}", row) from e
    return frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)


def _read_raw(data: bytes, d: int) -> np.ndarray:
    row_bytes = RAW_DTYPE.itemsize * d
    if len(data) % row_bytes != 0:
        raise IngestionError(
            f"Raw input of {len(data)} bytes is not a whole number of {d}-wide rows",
            len(data) // row_bytes,
        )
    return np.frombuffer(data, dtype=RAW_DTYPE).reshape(-1, d).astype(np.float64)


def ingest_latents(
    source: Source, d: int, fmt: str = "csv", apply_tanh: bool = False
) -> np.ndarray:
    """Latent vectors of shape (n, d).

    Without apply_tanh every value must already lie in [-1, 1]. With it,
    values are passed through tanh first, as the encoder's projection does.
    """
    if fmt not in FORMATS:
        raise ValueError(f"Format must be one of {FORMATS}, got {fmt}")
    data = _read_bytes(source)
    latents = _read_csv(data, d) if fmt == "csv" else _read_raw(data, d)

    bad_rows = ~np.isfinite(latents).all(axis=1)
    if bad_rows.any():
        raise IngestionError("Non-finite value", int(np.argmax(bad_rows)))
    if apply_tanh:
        return np.tanh(latents)
    out_of_range = (np.abs(latents) > 1 + LATENT_TOLERANCE).any(axis=1)
    if out_of_range.any():
        row = int(np.argmax(out_of_range))
        raise IngestionError(
            "Value outside [-1, 1]; pass apply_tanh for unbounded input", row
        )
    return latents
