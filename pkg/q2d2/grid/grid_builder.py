from typing import Callable, Dict

from q2d2.common.errors import InvalidSpecError
from q2d2.constants import TilingKind
from q2d2.grid.hexagon import build_hexagon
from q2d2.grid.pair_grid import PairGrid, PairGridSpec
from q2d2.grid.rectangle import build_rectangle
from q2d2.grid.rhombic import build_rhombic

BUILDERS: Dict[TilingKind, Callable[[PairGridSpec], PairGrid]] = {
    TilingKind.RECTANGLE: build_rectangle,
    TilingKind.HEXAGON: build_hexagon,
    TilingKind.RHOMBIC: build_rhombic,
}


def build_grid(spec: PairGridSpec) -> PairGrid:
    if spec.kind not in BUILDERS:
        raise InvalidSpecError(f"Tiling {spec.kind} not supported")
    return BUILDERS[spec.kind](spec)
