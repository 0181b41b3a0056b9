"""The implicit product codebook over all pair grids.

Pair sizes are the realized point counts of the grids. For rhombic grids
that is 2 * lx * ly, twice the nominal lx * ly product, because a token is
only decodable when the radix covers every index the grid can emit.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
import pandas as pd

from q2d2.common.errors import InvalidCodeError
from q2d2.grid.pair_grid import PairGrid
from q2d2.quantizer.quantizer_config import QuantizerConfig

logger = logging.getLogger(__name__)

# Global codes at or above this bound fall back to exact Python integers.
INT64_LIMIT = 2**63


def pair_size(grid: PairGrid) -> int:
    return grid.n_points


def nominal_pair_size(grid: PairGrid) -> int:
    """The lx * ly product, which differs from pair_size for rhombic grids."""
    return grid.spec.lx * grid.spec.ly


@dataclass(frozen=True)
class CodebookLayout:
    pair_sizes: Tuple[int, ...]
    radix_offsets: Tuple[int, ...]
    total_size: int

    @classmethod
    def from_sizes(cls, pair_sizes: Sequence[int]) -> CodebookLayout:
        pair_sizes = tuple(int(size) for size in pair_sizes)
        if not pair_sizes or min(pair_sizes) < 1:
            raise ValueError(f"Pair sizes must be positive, got {pair_sizes}")
        places = [1]
        for size in pair_sizes[:-1]:
            places.append(places[-1] * size)
        return cls(pair_sizes, tuple(places), math.prod(pair_sizes))

    @classmethod
    def from_config(cls, config: QuantizerConfig) -> CodebookLayout:
        return cls.from_sizes([pair_size(grid) for grid in config.grids])

    @property
    def n_pairs(self) -> int:
        return len(self.pair_sizes)


@dataclass(frozen=True)
class TokenFrame:
    pair_codes: Tuple[int, ...]
    global_code: int

    @classmethod
    def from_pair_codes(cls, pair_codes, layout: CodebookLayout) -> TokenFrame:
        pair_codes = tuple(int(c) for c in pair_codes)
        return cls(pair_codes, encode_global(pair_codes, layout))


def total_size(layout: CodebookLayout) -> int:
    return layout.total_size


def _check_pair_codes(codes: np.ndarray, layout: CodebookLayout) -> None:
    for j, size in enumerate(layout.pair_sizes):
        column = codes[..., j]
        bad = (column < 0) | (column >= size)
        if np.any(bad):
            position = np.argwhere(np.atleast_1d(bad))[0]
            raise InvalidCodeError(
                int(np.atleast_1d(column)[tuple(position)]), size, position=j
            )


def encode_global(pair_codes, layout: CodebookLayout):
    """Mixed-radix composition: sum of pair_codes[j] * place[j].

    A single tuple gives a Python int; an (n, P) array gives an (n,) array
    (int64, or object dtype when |C| does not fit in 63 bits).
    """
    codes = np.asarray(pair_codes)
    if codes.shape[-1:] != (layout.n_pairs,):
        raise ValueError(
            f"Expected {layout.n_pairs} pair codes, got shape {codes.shape}"
        )
    _check_pair_codes(codes, layout)
    if codes.ndim == 1:
        return sum(int(c) * place for c, place in zip(codes, layout.radix_offsets))
    if layout.total_size < INT64_LIMIT:
        places = np.asarray(layout.radix_offsets, dtype=np.int64)
        return codes.astype(np.int64) @ places
    places = np.asarray(layout.radix_offsets, dtype=object)
    return codes.astype(object) @ places


def decode_global(code, layout: CodebookLayout):
    """Inverse of encode_global."""
    if isinstance(code, (int, np.integer)):
        code = int(code)
        if not 0 <= code < layout.total_size:
            raise InvalidCodeError(code, layout.total_size)
        pair_codes = []
        for size in layout.pair_sizes:
            code, digit = divmod(code, size)
            pair_codes.append(digit)
        return tuple(pair_codes)
    codes = np.asarray(code)
    dtype = np.int64 if layout.total_size < INT64_LIMIT else object
    remaining = codes.astype(dtype)
    bad = (remaining < 0) | (remaining >= layout.total_size)
    if np.any(bad):
        raise InvalidCodeError(int(remaining[np.argmax(bad)]), layout.total_size)
    out = np.empty(codes.shape + (layout.n_pairs,), dtype=np.int64)
    for j, size in enumerate(layout.pair_sizes):
        out[..., j] = (remaining % size).astype(np.int64)
        remaining = remaining // size
    return out


def bits_per_token(layout: CodebookLayout) -> float:
    return math.log2(layout.total_size)


def bandwidth(layout: CodebookLayout, tokens_per_second: float) -> float:
    """Raw bitrate in bits/s."""
    if tokens_per_second <= 0:
        raise ValueError(f"Tokens per second must be positive, got {tokens_per_second}")
    return tokens_per_second * bits_per_token(layout)


def bitrate_report(config: QuantizerConfig, tokens_per_second: float) -> pd.DataFrame:
    """Realized and nominal codebook accounting side by side.

    The nominal row multiplies the lx * ly products; the realized row
    uses the grids' actual point counts. They differ only for rhombic pairs.
    """
    realized = CodebookLayout.from_config(config)
    nominal = CodebookLayout.from_sizes([nominal_pair_size(g) for g in config.grids])
    rows = []
    for name, layout in (("realized", realized), ("nominal", nominal)):
        bits = bits_per_token(layout)
        rows.append(
            {
                "count": name,
                "codebook_size": layout.total_size,
                "bits_per_token": bits,
                "tokens_per_second": tokens_per_second,
                "bits_per_second": (
                    bandwidth(layout, tokens_per_second)
                    if tokens_per_second > 0
                    else np.nan
                ),
            }
        )
    if realized.total_size != nominal.total_size:
        logger.info(
            "Realized codebook %d differs from nominal %d",
            realized.total_size,
            nominal.total_size,
        )
    return pd.DataFrame(rows)


def parameter_count(
    config: QuantizerConfig,
    input_dim: int,
    output_dim: int,
    vq_embedding_dim: int,
) -> dict:
    """Learnable parameters of Q2D2 versus a VQ codebook of the same size.

    Q2D2 learns only its affine in/out projections, so its count scales with
    d; a VQ codebook stores |C| embeddings of width vq_embedding_dim.
    """
    layout = CodebookLayout.from_config(config)
    d = config.d
    return {
        "codebook_size": layout.total_size,
        "q2d2_projection_parameters": (input_dim * d + d)
        + (d * output_dim + output_dim),
        "q2d2_codebook_parameters": 0,
        "vq_codebook_parameters": layout.total_size * vq_embedding_dim,
    }
