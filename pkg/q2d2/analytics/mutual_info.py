"""Dependence between the two coordinates of a pair, before and after snapping.

All values are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from shapely.geometry import MultiPoint, box
from shapely.ops import voronoi_diagram

from q2d2.common.errors import DomainError, EstimationError
from q2d2.grid.pair_grid import PairGrid
from q2d2.quantizer.nearest_grid import nearest_codes
from q2d2.quantizer.quantizer import bound, pair
from q2d2.quantizer.quantizer_config import QuantizerConfig

MODES = ("pre", "post")
MIN_FRAMES = 1000
MIN_BINS = 4


@dataclass(frozen=True)
class MiReport:
    per_pair_mi_pre: Tuple[float, ...]
    per_pair_mi_post: Tuple[float, ...]
    histogram_bins: int
    bias_bound: float
    frames: int
    units: str = "bits"


def bounded_domain(grid: PairGrid) -> Tuple[float, float, float, float]:
    """Image of [-1, 1]^2 under the bound scaling of this grid's levels."""
    hx, hy = grid.spec.lx / 2, grid.spec.ly / 2
    return (-hx, -hy, hx, hy)


def histogram_bias_bound(bins: int, n: int) -> float:
    """Leading-order upward bias of the plug-in estimate on a bins x bins table."""
    return (bins - 1) ** 2 / (2 * n * math.log(2))


def _plug_in(joint: np.ndarray) -> float:
    joint = joint / joint.sum()
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    mi = np.sum(joint[nz] * np.log2(joint[nz] / (px @ py)[nz]))
    return max(float(mi), 0.0)


def _identity_counts(xs: np.ndarray, ys: np.ndarray, weights=None) -> np.ndarray:
    _, ix = np.unique(xs, return_inverse=True)
    _, iy = np.unique(ys, return_inverse=True)
    ix, iy = ix.reshape(-1), iy.reshape(-1)
    joint = np.zeros((ix.max() + 1, iy.max() + 1))
    np.add.at(joint, (ix, iy), 1.0 if weights is None else weights)
    return joint


def mutual_information(
    pairs,
    mode: str = "pre",
    bins: int = 16,
    grid: Optional[PairGrid] = None,
    domain: Optional[Tuple[float, float, float, float]] = None,
) -> float:
    """Plug-in MI of an (n, 2) stream of bounded pair coordinates.

    pre: equal-width bins x bins histogram over the bounded domain (taken
    from the grid if given, else from the data extent). post: the stream
    is snapped to grid and MI is computed over the exact grid-point
    coordinates, one category per distinct x and per distinct y.
    """
    if mode not in MODES:
        raise ValueError(f"Mode must be one of {MODES}, got {mode}")
    pairs = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    if len(pairs) < MIN_FRAMES:
        raise EstimationError(
            f"Mutual information needs at least {MIN_FRAMES} frames, got {len(pairs)}"
        )
    if mode == "post":
        if grid is None:
            raise ValueError("Post-quantization MI needs a grid")
        snapped = grid.coords[nearest_codes(pairs, grid, "fast")]
        return _plug_in(_identity_counts(snapped[:, 0], snapped[:, 1]))

    if bins < MIN_BINS:
        raise EstimationError(
            f"Histogram MI needs at least {MIN_BINS} bins, got {bins}"
        )
    if domain is None:
        domain = bounded_domain(grid) if grid is not None else (
            *pairs.min(axis=0),
            *pairs.max(axis=0),
        )
    x0, y0, x1, y1 = domain
    if not (x1 > x0 and y1 > y0):
        raise DomainError(domain, 0.0)
    joint, _, _ = np.histogram2d(
        pairs[:, 0], pairs[:, 1], bins=bins, range=[[x0, x1], [y0, y1]]
    )
    return _plug_in(joint)


def cell_probabilities(
    grid: PairGrid, region: Optional[Tuple[float, float, float, float]] = None
) -> np.ndarray:
    """Mass of each grid point's Voronoi cell under a uniform input on region.

    Entry k is the probability that a uniform point of the box lands
    closest to grid point k.
    """
    region = bounded_domain(grid) if region is None else tuple(region)
    clip = box(*region)
    if clip.area <= 0:
        raise DomainError(region, clip.area)
    cells = voronoi_diagram(MultiPoint([tuple(p) for p in grid.coords]), envelope=clip)
    probabilities = np.zeros(grid.n_points)
    for cell in cells.geoms:
        clipped = cell.intersection(clip)
        if clipped.is_empty or clipped.area == 0:
            continue
        inside = clipped.representative_point()
        code = nearest_codes(np.array([[inside.x, inside.y]]), grid)[0]
        probabilities[code] += clipped.area / clip.area
    return probabilities


def quantized_mutual_information(
    grid: PairGrid, region: Optional[Tuple[float, float, float, float]] = None
) -> float:
    """Exact MI between snapped x and snapped y under a uniform box input.

    Zero for rectangle grids on any axis-aligned box, since each cell
    is a product of an x interval and a y interval.
    """
    weights = cell_probabilities(grid, region)
    return _plug_in(_identity_counts(grid.coords[:, 0], grid.coords[:, 1], weights))


def mi_report(latents, config: QuantizerConfig, bins: int = 16) -> MiReport:
    latents = np.asarray(latents, dtype=np.float64).reshape(-1, config.d)
    pairs = pair(bound(latents, config))
    pre, post = [], []
    for p, grid in zip(pairs, config.grids):
        pre.append(mutual_information(p, "pre", bins, grid=grid))
        post.append(mutual_information(p, "post", grid=grid))
    return MiReport(
        per_pair_mi_pre=tuple(pre),
        per_pair_mi_post=tuple(post),
        histogram_bins=bins,
        bias_bound=histogram_bias_bound(bins, len(latents)),
        frames=len(latents),
    )
