"""Structured text and CSV renderings of analytics reports."""

from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import IO, Iterable, List, Mapping, Union

import pandas as pd


def _flatten(record, prefix: str = "") -> dict:
    if dataclasses.is_dataclass(record):
        record = dataclasses.asdict(record)
    flat = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping) or dataclasses.is_dataclass(value):
            flat.update(_flatten(value, prefix=f"{name}."))
        elif isinstance(value, (tuple, list)):
            for j, item in enumerate(value):
                flat[f"{name}[{j}]"] = item
        else:
            flat[name] = value
    return flat


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def key_value_lines(record, prefix: str = "") -> List[str]:
    """One "key=value" line per field; nested fields are dotted, sequences indexed."""
    return [
        f"{key}={_format_value(value)}"
        for key, value in _flatten(record, prefix).items()
    ]


def records_to_frame(records: Iterable) -> pd.DataFrame:
    return pd.DataFrame([_flatten(record) for record in records])


def write_csv(records: Iterable, sink: Union[str, Path, IO[str]]) -> None:
    records_to_frame(records).to_csv(sink, index=False, float_format="%.10g")
