"""Codebook and per-pair usage over a token stream."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Set, Tuple

import numpy as np

from q2d2.codebook.codebook import CodebookLayout, encode_global
from q2d2.common.errors import InvalidStreamError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UtilizationReport:
    """Usage of the implicit codebook.

    pair_utilization is the minimum of per_pair_fraction, so 1.0 means every
    point of every pair grid was used at least once.
    """

    per_pair_used: Tuple[int, ...]
    per_pair_fraction: Tuple[float, ...]
    pair_utilization: float
    codebook_utilization: float
    distinct_codes: int
    frames_seen: int


class UtilizationAccumulator:
    """Single-writer usage counter; merge combines independent streams."""

    def __init__(self, layout: CodebookLayout):
        self.layout = layout
        self.pair_seen = [np.zeros(size, dtype=bool) for size in layout.pair_sizes]
        self.global_codes: Set[int] = set()
        self.frames_seen = 0

    def update(self, pair_codes) -> UtilizationAccumulator:
        codes = np.asarray(pair_codes, dtype=np.int64).reshape(-1, self.layout.n_pairs)
        for j, size in enumerate(self.layout.pair_sizes):
            column = codes[:, j]
            bad = (column < 0) | (column >= size)
            if bad.any():
                frame = int(np.argmax(bad))
                raise InvalidStreamError(
                    self.frames_seen + frame, j, int(column[frame]), size
                )
            self.pair_seen[j][column] = True
        if len(codes):
            self.global_codes.update(
                int(c) for c in np.unique(encode_global(codes, self.layout))
            )
        self.frames_seen += len(codes)
        return self

    def merge(self, other: UtilizationAccumulator) -> UtilizationAccumulator:
        if other.layout != self.layout:
            raise ValueError("Cannot merge accumulators over different codebooks")
        merged = UtilizationAccumulator(self.layout)
        merged.pair_seen = [a | b for a, b in zip(self.pair_seen, other.pair_seen)]
        merged.global_codes = self.global_codes | other.global_codes
        merged.frames_seen = self.frames_seen + other.frames_seen
        return merged

    def report(self) -> UtilizationReport:
        used = tuple(int(seen.sum()) for seen in self.pair_seen)
        fractions = tuple(
            n / size for n, size in zip(used, self.layout.pair_sizes)
        )
        return UtilizationReport(
            per_pair_used=used,
            per_pair_fraction=fractions,
            pair_utilization=min(fractions),
            codebook_utilization=len(self.global_codes) / self.layout.total_size,
            distinct_codes=len(self.global_codes),
            frames_seen=self.frames_seen,
        )


def measure_utilization(pair_codes, layout: CodebookLayout) -> UtilizationReport:
    return UtilizationAccumulator(layout).update(pair_codes).report()
