import numpy as np

from q2d2.constants import TilingKind
from q2d2.grid.pair_grid import PairGrid, PairGridSpec, require_kind, uniform_axis


def build_hexagon(spec: PairGridSpec) -> PairGrid:
    """Hexagonal grid with l rows of l points.

    Rows are dy = dx*sqrt(3)/2 apart and centred on y = 0, so the lattice is
    geometrically hexagonal; a uniform [-e, e] row placement would give
    rows dx apart and break the six-neighbour equidistance. Even rows shift
    by +hex_offset*dx and odd rows by -hex_offset*dx.
    """
    require_kind(spec, TilingKind.HEXAGON)
    l = spec.lx
    dx, dy = spec.dx, spec.dy
    xs = uniform_axis(l, spec.ex)
    ys = (np.arange(l, dtype=np.float64) - (l - 1) / 2) * dy
    shift = spec.hex_offset * dx
    rows = []
    for i, y in enumerate(ys):
        x_offset = -shift if i % 2 == 1 else shift
        rows.append(np.column_stack([xs + x_offset, np.full(l, y)]))
    return PairGrid(spec, np.concatenate(rows))


def hexagon_neighbor_distances(grid: PairGrid, slack: float = 1.001) -> np.ndarray:
    """Six nearest-neighbour distances of every interior point.

    A point is interior when six neighbours lie within slack * dx.
    Returns an (n_interior, 6) array.
    """
    k = min(7, grid.n_points)
    distances, _ = grid.tree.query(grid.coords, k=k)
    if k < 7:
        return np.empty((0, 6))
    neighbours = distances[:, 1:]
    interior = np.all(neighbours <= slack * grid.dx, axis=1)
    return neighbours[interior]
