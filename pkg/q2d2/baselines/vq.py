"""Inference-only vector quantization against an explicit codebook."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from q2d2.common.errors import ConfigMismatchError, InvalidCodeError
from q2d2.common.nearest import argmin_entries
from q2d2.grid.pair_grid import PairGrid


@dataclass(frozen=True)
class VqCodebook:
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.float64)
        if entries.ndim != 2 or len(entries) == 0:
            raise ValueError(
                f"Codebook must be a nonempty (K, d) array, got {entries.shape}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_grid(cls, grid: PairGrid) -> VqCodebook:
        return cls(grid.coords)

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def d(self) -> int:
        return self.entries.shape[1]


def vq_quantize(z, cb: VqCodebook) -> Tuple[Union[int, np.ndarray], np.ndarray]:
    """Nearest entry by Euclidean distance, lowest index on ties."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != cb.d:
        raise ConfigMismatchError(cb.d, z.shape[-1])
    codes = argmin_entries(z.reshape(-1, cb.d), cb.entries)
    if z.ndim == 1:
        return int(codes[0]), cb.entries[codes[0]].copy()
    return codes, cb.entries[codes]


def vq_utilization(codes, cb: VqCodebook) -> float:
    """Distinct codes used over the codebook size."""
    codes = np.asarray(codes).reshape(-1)
    if len(codes) == 0:
        return 0.0
    bad = (codes < 0) | (codes >= cb.size)
    if bad.any():
        index = int(np.argmax(bad))
        raise InvalidCodeError(int(codes[index]), cb.size, position=index)
    return len(np.unique(codes)) / cb.size
