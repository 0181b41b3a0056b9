"""Module for the 2D tiling grids each latent pair is snapped to."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from q2d2.common.errors import InvalidLevelsError, InvalidSpecError
from q2d2.constants import HEX_ROW_OFFSET, MAX_LEVELS, MIN_LEVELS, TilingKind


def check_levels(l) -> int:
    if isinstance(l, (bool, np.bool_)) or not isinstance(l, (int, np.integer)):
        raise InvalidLevelsError(l)
    if not MIN_LEVELS <= l <= MAX_LEVELS:
        raise InvalidLevelsError(l)
    return int(l)


def spread_from_levels(l: int) -> float:
    """Half-width of a grid axis, (l - 1) / 2."""
    l = check_levels(l)
    return (l - 1) / 2


def axis_spacing(l: int, e: float) -> float:
    return 2 * e / (l - 1)


def uniform_axis(l: int, e: float) -> np.ndarray:
    """l uniformly spaced values over [-e, e].

    Built as (index - centre) * spacing from exact integer indices, so the
    result is exactly antisymmetric and never accumulates rounding.
    """
    index = np.arange(l, dtype=np.float64) - (l - 1) / 2
    return index * axis_spacing(l, e)


class GridPoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class PairGridSpec:
    """Tiling definition for one latent pair.

    Args:
        kind: The tiling kind.
        lx, ly: Level counts along x and y.
        ex, ey: Spread factors along x and y.
        hex_offset: Row shift of hexagon grids as a fraction of dx. Even rows
            move by +hex_offset*dx, odd rows by -hex_offset*dx.
    """

    kind: TilingKind
    lx: int
    ly: int
    ex: float
    ey: float
    hex_offset: float = HEX_ROW_OFFSET

    def __post_init__(self):
        if not isinstance(self.kind, TilingKind):
            raise InvalidSpecError(f"Unknown tiling kind {self.kind!r}")
        for l in (self.lx, self.ly):
            try:
                check_levels(l)
            except InvalidLevelsError as exc:
                raise InvalidSpecError(str(exc)) from exc
        for e in (self.ex, self.ey):
            if not np.isfinite(e) or e <= 0:
                raise InvalidSpecError(f"Spread factor must be positive, got {e}")
        if self.kind == TilingKind.HEXAGON and self.lx != self.ly:
            raise InvalidSpecError(
                f"Hexagon grids take one level count, got lx={self.lx} ly={self.ly}"
            )
        if not 0 <= self.hex_offset <= 0.5:
            raise InvalidSpecError(
                f"Hexagon offset must be in [0, 0.5], got {self.hex_offset}"
            )

    @classmethod
    def from_levels(
        cls,
        kind: TilingKind,
        lx: int,
        ly: Optional[int] = None,
        hex_offset: float = HEX_ROW_OFFSET,
    ) -> PairGridSpec:
        ly = lx if ly is None else ly
        try:
            ex, ey = spread_from_levels(lx), spread_from_levels(ly)
        except InvalidLevelsError as exc:
            raise InvalidSpecError(str(exc)) from exc
        return cls(TilingKind.parse(kind), lx, ly, ex, ey, hex_offset)

    @property
    def dx(self) -> float:
        return axis_spacing(self.lx, self.ex)

    @property
    def dy(self) -> float:
        if self.kind == TilingKind.HEXAGON:
            return self.dx * np.sqrt(3) / 2
        return axis_spacing(self.ly, self.ey)


@dataclass(frozen=True, repr=False, eq=False)
class PairGrid:
    """An immutable, canonically ordered point set for one tiling.

    Args:
        spec: The spec the grid was built from.
        coords: (n, 2) array of x, y coordinates; made read-only here.
    """

    spec: PairGridSpec
    coords: np.ndarray
    _tree: List[cKDTree] = field(default_factory=list, compare=False)

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != 2 or len(coords) == 0:
            raise InvalidSpecError(
                f"Grid coordinates must be (n, 2), got {coords.shape}"
            )
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def kind(self) -> TilingKind:
        return self.spec.kind

    @property
    def dx(self) -> float:
        return self.spec.dx

    @property
    def dy(self) -> float:
        return self.spec.dy

    @property
    def n_points(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return self.n_points

    def point(self, index: int) -> GridPoint:
        if not 0 <= index < self.n_points:
            raise IndexError(f"Point index must be between 0 and {self.n_points-1}")
        x, y = self.coords[index]
        return GridPoint(float(x), float(y))

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        """(min_x, min_y, max_x, max_y) of the realized points."""
        lo = self.coords.min(axis=0)
        hi = self.coords.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    @property
    def tree(self) -> cKDTree:
        if not self._tree:
            self._tree.append(cKDTree(self.coords))
        return self._tree[0]

    def unique_levels(self, axis: int, within_extent: bool = False) -> int:
        """Number of distinct coordinate values along one axis.

        With within_extent, only values inside the nominal spread
        [-e, e] of that axis are counted.
        """
        values = np.unique(self.coords[:, axis])
        if within_extent:
            e = self.spec.ex if axis == 0 else self.spec.ey
            values = values[np.abs(values) <= e]
        return len(values)

    def min_distance(self) -> float:
        if self.n_points < 2:
            return float("inf")
        distances, _ = self.tree.query(self.coords, k=2)
        return float(distances[:, 1].min())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairGrid):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.coords, other.coords)

    def __hash__(self) -> int:
        return hash((self.spec, self.coords.tobytes()))

    def __repr__(self) -> str:
        return (
            "Pair grid:\n"
            f" Tiling:  {self.kind.value}\n"
            f" Levels:  {self.spec.lx} x {self.spec.ly}\n"
            f" Spread:  {self.spec.ex} x {self.spec.ey}\n"
            f" Spacing: {self.dx:.6g} x {self.dy:.6g}\n"
            f" Points:  {self.n_points}"
        )


def require_kind(spec: PairGridSpec, kind: TilingKind) -> None:
    if spec.kind != kind:
        raise InvalidSpecError(f"Expected a {kind.value} spec, got {spec.kind.value}")
