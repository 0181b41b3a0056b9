"""Quantization distortion and packing efficiency of grids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from shapely.geometry import box

from q2d2.common.errors import DomainError
from q2d2.grid.pair_grid import PairGrid
from q2d2.quantizer.nearest_grid import nearest_codes
from q2d2.quantizer.quantizer import bound, pair, quantize, unbound
from q2d2.quantizer.quantizer_config import QuantizerConfig

SPACES = ("bounded", "latent")
MIN_PACKING_SAMPLES = 10_000


@dataclass(frozen=True)
class MseReport:
    """Mean squared error per pair and summed over pairs."""

    per_pair: Tuple[float, ...]
    total: float
    frames: int
    space: str


def quantization_mse(
    latents, config: QuantizerConfig, space: str = "bounded", method: str = "brute"
) -> MseReport:
    """Mean over frames of the squared pair error.

    In bounded space the error is measured between z'' and its grid point.
    In latent space both are first mapped back by 2 / l_i, which puts
    configs with different level counts on one scale.
    """
    if space not in SPACES:
        raise ValueError(f"Space must be one of {SPACES}, got {space}")
    latents = np.asarray(latents, dtype=np.float64).reshape(-1, config.d)
    if len(latents) == 0:
        return MseReport(tuple(0.0 for _ in range(config.n_pairs)), 0.0, 0, space)
    q = quantize(latents, config, method)
    if space == "bounded":
        target, approx = bound(latents, config), q.values
    else:
        target, approx = latents, unbound(q, config)
    per_pair = tuple(
        float(np.mean(np.sum((a - b) ** 2, axis=-1)))
        for a, b in zip(pair(target), pair(approx))
    )
    return MseReport(per_pair, float(sum(per_pair)), len(latents), space)


@dataclass(frozen=True)
class PackingReport:
    """Normalized second moment: mse * n_points / area (lower is denser)."""

    normalized_second_moment: float
    mse: float
    n_points: int
    area: float
    samples: int


def packing_region(grid: PairGrid) -> Tuple[float, float, float, float]:
    """Box around the realized points, padded by half a spacing per axis.

    For rectangle grids this is [-e - dx/2, e + dx/2] x [-e - dy/2, e + dy/2],
    the exact union of the Voronoi cells.
    """
    min_x, min_y, max_x, max_y = grid.bounds
    hx, hy = grid.dx / 2, grid.dy / 2
    return (min_x - hx, min_y - hy, max_x + hx, max_y + hy)


def packing_efficiency(
    grid: PairGrid,
    samples: int = 1_000_000,
    seed: int = 0,
    region: Optional[Tuple[float, float, float, float]] = None,
    method: str = "fast",
) -> PackingReport:
    if samples < MIN_PACKING_SAMPLES:
        raise ValueError(
            f"Packing needs at least {MIN_PACKING_SAMPLES} samples, got {samples}"
        )
    region = packing_region(grid) if region is None else tuple(region)
    area = box(*region).area
    if not np.isfinite(area) or area <= 0:
        raise DomainError(region, area)
    rng = np.random.default_rng(seed)
    points = rng.uniform(region[:2], region[2:], size=(samples, 2))
    codes = nearest_codes(points, grid, method)
    error = points - grid.coords[codes]
    mse = float(np.mean(np.sum(error * error, axis=1)))
    return PackingReport(
        normalized_second_moment=mse * grid.n_points / area,
        mse=mse,
        n_points=grid.n_points,
        area=area,
        samples=samples,
    )
