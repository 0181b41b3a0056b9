"""Exhaustive nearest-entry search shared by the grid quantizer and VQ."""
import numpy as np

# Rows per distance block; keeps the (rows, entries) matrix small.
CHUNK_ROWS = 4096


def squared_distances(points: np.ndarray, entries: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, shape (len(points), len(entries)).

    Coordinates are differenced and squared per axis and summed in axis
    order, so a 2-column input gives exactly (px-gx)**2 + (py-gy)**2.
    """
    diff = points[:, None, :] - entries[None, :, :]
    return np.sum(diff * diff, axis=-1)


def argmin_entries(points: np.ndarray, entries: np.ndarray) -> np.ndarray:
    """Index of the closest entry for each point, lowest index on ties."""
    points = np.asarray(points, dtype=np.float64)
    entries = np.asarray(entries, dtype=np.float64)
    codes = np.empty(len(points), dtype=np.int64)
    for start in range(0, len(points), CHUNK_ROWS):
        block = points[start : start + CHUNK_ROWS]
        # np.argmin returns the first minimum
        codes[start : start + len(block)] = np.argmin(
            squared_distances(block, entries), axis=1
        )
    return codes
