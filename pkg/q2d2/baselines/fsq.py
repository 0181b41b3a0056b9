"""Finite scalar quantization: every channel rounded to its own levels.

Channels are bounded by l_i / 2 and snapped to l_i uniform levels in
[-e_i, e_i], the same formulation as the Q2D2 bound step, so a pair of FSQ
channels matches a Q2D2 rectangle grid code for code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from q2d2.common.errors import ConfigMismatchError, DomainError
from q2d2.constants import LATENT_TOLERANCE
from q2d2.grid.pair_grid import check_levels, spread_from_levels, uniform_axis


@dataclass(frozen=True)
class FsqConfig:
    levels: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(check_levels(l) for l in self.levels))
        if not self.levels:
            raise ValueError("FSQ needs at least one channel")

    @property
    def d(self) -> int:
        return len(self.levels)

    def level_values(self, channel: int) -> np.ndarray:
        l = self.levels[channel]
        return uniform_axis(l, spread_from_levels(l))


def fsq_quantize(z, config: FsqConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Per-channel codes in [0, l_i) and the level values, for (d,) or (n, d)."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != config.d:
        raise ConfigMismatchError(config.d, z.shape[-1])
    bad = ~np.isfinite(z) | (np.abs(z) > 1 + LATENT_TOLERANCE)
    if bad.any():
        at = np.argwhere(bad)[0]
        raise DomainError(int(at[-1]), float(z[tuple(at)]))
    codes = np.empty(z.shape, dtype=np.int64)
    values = np.empty(z.shape, dtype=np.float64)
    for i, l in enumerate(config.levels):
        levels = config.level_values(i)
        bounded = z[..., i] * (l / 2)
        diff = bounded[..., None] - levels
        # first minimum: the lower level wins a tie
        codes[..., i] = np.argmin(diff * diff, axis=-1)
        values[..., i] = levels[codes[..., i]]
    return codes, values


def fsq_pair_codes(codes: np.ndarray, config: FsqConfig) -> np.ndarray:
    """Combine channel codes (2j, 2j+1) into row-major pair codes iy * lx + ix."""
    codes = np.asarray(codes)
    if config.d % 2 != 0:
        raise ConfigMismatchError(config.d + 1, config.d, what="even dimension")
    lx = np.asarray(config.levels[0::2], dtype=np.int64)
    return codes[..., 1::2] * lx + codes[..., 0::2]
