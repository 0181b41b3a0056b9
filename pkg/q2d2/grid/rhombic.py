import numpy as np

from q2d2.constants import TilingKind
from q2d2.grid.pair_grid import PairGrid, PairGridSpec, require_kind
from q2d2.grid.rectangle import rectangle_coords


def build_rhombic(spec: PairGridSpec) -> PairGrid:
    """Base lattice followed by its midpoint lattice.

    The midpoints are the base lattice translated by (dx/2, dy/2), so the
    last row and column sit outside [-e, e]. They are kept; the grid has
    2 * lx * ly points.
    """
    require_kind(spec, TilingKind.RHOMBIC)
    base = rectangle_coords(spec.lx, spec.ly, spec.ex, spec.ey)
    midpoints = base + np.array([spec.dx / 2, spec.dy / 2])
    return PairGrid(spec, np.concatenate([base, midpoints]))
