"""The quantization pipeline: bound, pair, snap each pair to its grid.

Indexing is 0-based throughout: pair j covers dimensions (2j, 2j+1).

Every operation takes one frame of shape (d,) or a batch of shape (n, d).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from q2d2.common.errors import (
    ConfigMismatchError,
    DomainError,
    InvalidCodeError,
    InvalidDimensionError,
)
from q2d2.constants import LATENT_TOLERANCE
from q2d2.grid.pair_grid import GridPoint, PairGrid
from q2d2.quantizer.nearest_grid import nearest_codes
from q2d2.quantizer.quantizer_config import QuantizerConfig


@dataclass(frozen=True)
class QuantizedVector:
    """Chosen grid points in bounded space and their per-pair codes.

    values has shape (..., d); pair_codes has shape (..., P).
    """

    values: np.ndarray
    pair_codes: np.ndarray


def _as_frames(values, config: QuantizerConfig) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim not in (1, 2):
        raise ConfigMismatchError(2, values.ndim, what="array rank at most")
    if values.shape[-1] != config.d:
        raise ConfigMismatchError(config.d, values.shape[-1])
    return values


def check_latent(z, config: QuantizerConfig) -> np.ndarray:
    """Validate that z lies in [-1, 1]^d (up to LATENT_TOLERANCE)."""
    z = _as_frames(z, config)
    bad = ~np.isfinite(z) | (np.abs(z) > 1 + LATENT_TOLERANCE)
    if bad.any():
        at = np.argwhere(bad)[0]
        index = int(at[0]) if z.ndim == 1 else tuple(int(i) for i in at)
        raise DomainError(index, float(z[tuple(at)]))
    return z


def bound(z, config: QuantizerConfig) -> np.ndarray:
    """Scale each latent entry by l_i / 2."""
    z = check_latent(z, config)
    return z * (config.level_array / 2)


def pair(zb) -> List[np.ndarray]:
    """Group adjacent entries into P coordinate pairs, in order.

    Pair j is an array of shape (..., 2) holding entries (2j, 2j+1).
    """
    zb = np.asarray(zb, dtype=np.float64)
    d = zb.shape[-1]
    if d < 2 or d % 2 != 0:
        raise InvalidDimensionError(d)
    paired = zb.reshape(zb.shape[:-1] + (d // 2, 2))
    return [paired[..., j, :] for j in range(d // 2)]


def quantize_pair(p, grid: PairGrid) -> Tuple[int, GridPoint]:
    """Closest grid point to one coordinate pair, lowest index on ties."""
    code = int(nearest_codes(np.asarray(p, dtype=np.float64).reshape(1, 2), grid)[0])
    return code, grid.point(code)


def quantize_pairs(points, grid: PairGrid, method: str = "brute") -> np.ndarray:
    """Vectorised quantize_pair: codes for an (n, 2) array."""
    return nearest_codes(points, grid, method)


def quantize(z, config: QuantizerConfig, method: str = "brute") -> QuantizedVector:
    zb = bound(z, config)
    batch = zb.reshape(-1, config.d)
    codes = np.empty((len(batch), config.n_pairs), dtype=np.int64)
    values = np.empty_like(batch)
    for j, (p, grid) in enumerate(zip(pair(batch), config.grids)):
        codes[:, j] = quantize_pairs(p, grid, method)
        values[:, 2 * j : 2 * j + 2] = grid.coords[codes[:, j]]
    return QuantizedVector(
        values=values.reshape(zb.shape),
        pair_codes=codes.reshape(zb.shape[:-1] + (config.n_pairs,)),
    )


def dequantize(codes, config: QuantizerConfig) -> QuantizedVector:
    """Look the grid points of per-pair codes back up."""
    codes = np.asarray(codes)
    if codes.shape[-1:] != (config.n_pairs,):
        got = codes.shape[-1] if codes.ndim else 0
        raise ConfigMismatchError(config.n_pairs, got, what="pair count")
    if not np.issubdtype(codes.dtype, np.integer):
        flat = codes.reshape(-1)
        fractional = flat != np.floor(flat)
        if fractional.any():
            raise InvalidCodeError(
                flat[np.argmax(fractional)], config.grids[0].n_points
            )
    batch = codes.reshape(-1, config.n_pairs).astype(np.int64)
    values = np.empty((len(batch), config.d), dtype=np.float64)
    for j, grid in enumerate(config.grids):
        column = batch[:, j]
        bad = (column < 0) | (column >= grid.n_points)
        if bad.any():
            frame = int(np.argmax(bad))
            raise InvalidCodeError(
                int(column[frame]), grid.n_points, position=(frame, j)
            )
        values[:, 2 * j : 2 * j + 2] = grid.coords[column]
    return QuantizedVector(
        values=values.reshape(codes.shape[:-1] + (config.d,)),
        pair_codes=batch.reshape(codes.shape),
    )


def unbound(q: QuantizedVector, config: QuantizerConfig) -> np.ndarray:
    """Inverse of the bound scaling, values * 2 / l_i.

    The outermost rhombic midpoints sit at l / 2 and map to 1 up to
    rounding, so results can leave [-1, 1] by an ulp; that is allowed.
    """
    values = _as_frames(q.values, config)
    return values * (2 / config.level_array)


def snap_backward(upstream) -> np.ndarray:
    """Straight-through gradient of the snap-to-grid step: the identity."""
    return np.array(upstream, dtype=np.float64, copy=True)


def bound_backward(upstream, config: QuantizerConfig) -> np.ndarray:
    """Gradient of the linear bound scaling, upstream * l_i / 2."""
    return np.asarray(upstream, dtype=np.float64) * (config.level_array / 2)


def ste_forward_backward(
    z, config: QuantizerConfig, upstream_grad
) -> Tuple[QuantizedVector, np.ndarray]:
    """Quantize z and carry a bounded-space gradient back to z.

    The snap step passes the gradient through unchanged; the bound scaling
    multiplies it by l_i / 2.
    """
    q = quantize(z, config)
    upstream_grad = _as_frames(upstream_grad, config)
    return q, bound_backward(snap_backward(upstream_grad), config)
