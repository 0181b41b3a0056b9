"""Full description of a Q2D2 quantizer: dimension, levels, per-pair tiling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np

from q2d2.common.errors import InvalidDimensionError, InvalidSpecError
from q2d2.constants import HEX_ROW_OFFSET, PRESETS, TilingKind
from q2d2.grid.grid_builder import build_grid
from q2d2.grid.pair_grid import PairGrid, PairGridSpec, check_levels


@dataclass(frozen=True, repr=False)
class QuantizerConfig:
    """Quantizer over d = 2P latent dimensions.

    Indices are 0-based: pair j covers dimensions (2j, 2j+1), with level
    counts levels[2j] on the grid's x axis and levels[2j+1] on its y axis.

    Args:
        levels: d level counts.
        tilings: P tiling kinds, one per pair.
        hex_offset: Row offset fraction used by every hexagon pair.
    """

    levels: Tuple[int, ...]
    tilings: Tuple[TilingKind, ...]
    hex_offset: float = HEX_ROW_OFFSET
    grids: Tuple[PairGrid, ...] = field(init=False, compare=False)

    def __post_init__(self):
        levels = tuple(check_levels(l) for l in self.levels)
        d = len(levels)
        if d < 2 or d % 2 != 0:
            raise InvalidDimensionError(d)
        tilings = tuple(TilingKind.parse(t) for t in self.tilings)
        if len(tilings) != d // 2:
            raise InvalidSpecError(
                f"Expected {d // 2} tilings for dimension {d}, got {len(tilings)}"
            )
        grids = tuple(
            build_grid(
                PairGridSpec.from_levels(
                    kind, levels[2 * j], levels[2 * j + 1], self.hex_offset
                )
            )
            for j, kind in enumerate(tilings)
        )
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "tilings", tilings)
        object.__setattr__(self, "grids", grids)

    @classmethod
    def uniform(
        cls,
        kind: Union[str, TilingKind],
        levels: Sequence[int],
        hex_offset: float = HEX_ROW_OFFSET,
    ) -> QuantizerConfig:
        """Same tiling for every pair."""
        kind = TilingKind.parse(kind)
        return cls(tuple(levels), (kind,) * (len(levels) // 2), hex_offset)

    @classmethod
    def from_preset(cls, name: str) -> QuantizerConfig:
        if name not in PRESETS:
            raise ValueError(f"Preset {name} not found, must be one of {list(PRESETS)}")
        kind, levels, _ = PRESETS[name]
        return cls.uniform(kind, levels)

    @property
    def d(self) -> int:
        return len(self.levels)

    @property
    def n_pairs(self) -> int:
        return len(self.tilings)

    @property
    def level_array(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=np.float64)

    def to_string(self) -> str:
        """Inverse of config_name.parse_config_string."""
        groups = []
        for j, kind in enumerate(self.tilings):
            pair = f"{self.levels[2 * j]},{self.levels[2 * j + 1]}"
            if groups and groups[-1][0] == kind:
                groups[-1][1].append(pair)
            else:
                groups.append((kind, [pair]))
        return "+".join(f"{kind.value}:{','.join(pairs)}" for kind, pairs in groups)

    def __repr__(self) -> str:
        return f"QuantizerConfig({self.to_string()!r})"
