"""Nearest grid point search: brute-force reference and accelerated path.

Both paths score candidates with the same squared-distance expression and
take the lowest code among equal distances, so they agree bit for bit.
"""
import numpy as np

from q2d2.common.nearest import argmin_entries
from q2d2.constants import TilingKind
from q2d2.grid.pair_grid import PairGrid

# Candidates drawn from the k-d tree for non-rectangular grids; at most six
# grid points are ever equidistant from a query.
TREE_CANDIDATES = 12
METHODS = ("brute", "fast")


def nearest_codes(
    points: np.ndarray, grid: PairGrid, method: str = "brute"
) -> np.ndarray:
    """Code of the closest grid point for each row of an (n, 2) array."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if method == "brute":
        return argmin_entries(points, grid.coords)
    elif method == "fast":
        if grid.kind == TilingKind.RECTANGLE:
            candidates = _rectangle_candidates(points, grid)
        else:
            candidates = _tree_candidates(points, grid)
        return _best_candidate(points, grid, candidates)
    else:
        raise ValueError(f"Method must be one of {METHODS}, got {method}")


def _axis_window(values: np.ndarray, l: int, e: float, spacing: float) -> np.ndarray:
    centre = np.clip(np.rint((values + e) / spacing), 0, l - 1).astype(np.int64)
    window = centre[:, None] + np.arange(-1, 2)
    return np.clip(window, 0, l - 1)


def _rectangle_candidates(points: np.ndarray, grid: PairGrid) -> np.ndarray:
    spec = grid.spec
    ix = _axis_window(points[:, 0], spec.lx, spec.ex, spec.dx)
    iy = _axis_window(points[:, 1], spec.ly, spec.ey, spec.dy)
    # y outer, x inner keeps candidate codes ascending
    return (iy[:, :, None] * spec.lx + ix[:, None, :]).reshape(len(points), -1)


def _tree_candidates(points: np.ndarray, grid: PairGrid) -> np.ndarray:
    k = min(TREE_CANDIDATES, grid.n_points)
    _, index = grid.tree.query(points, k=k)
    index = np.asarray(index, dtype=np.int64).reshape(len(points), k)
    return np.sort(index, axis=1)


def _best_candidate(
    points: np.ndarray, grid: PairGrid, candidates: np.ndarray
) -> np.ndarray:
    entries = grid.coords[candidates]
    diff = points[:, None, :] - entries
    distances = np.sum(diff * diff, axis=-1)
    best = np.argmin(distances, axis=1)
    return candidates[np.arange(len(points)), best]


