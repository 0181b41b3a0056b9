import numpy as np

from q2d2.constants import TilingKind
from q2d2.grid.pair_grid import PairGrid, PairGridSpec, require_kind, uniform_axis


def rectangle_coords(lx: int, ly: int, ex: float, ey: float) -> np.ndarray:
    """Cartesian product of the two axes, row-major: y outer, x inner."""
    xs = uniform_axis(lx, ex)
    ys = uniform_axis(ly, ey)
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def build_rectangle(spec: PairGridSpec) -> PairGrid:
    require_kind(spec, TilingKind.RECTANGLE)
    return PairGrid(spec, rectangle_coords(spec.lx, spec.ly, spec.ex, spec.ey))
