"""CSV and SVG renderings of a grid, for documentation and inspection."""
from pathlib import Path
from typing import IO, Union

import pandas as pd
from shapely.geometry import MultiPoint

from q2d2.grid.pair_grid import PairGrid

GRID_COLUMNS = ["index", "x", "y"]


def grid_to_frame(grid: PairGrid) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "index": range(grid.n_points),
            "x": grid.coords[:, 0],
            "y": grid.coords[:, 1],
        },
        columns=GRID_COLUMNS,
    )


def write_grid_csv(grid: PairGrid, sink: Union[str, Path, IO[str]]) -> None:
    # repr-exact floats so the CSV reproduces the coordinates bit for bit
    grid_to_frame(grid).to_csv(sink, index=False, float_format="%.17g")


def grid_to_svg(grid: PairGrid, size: int = 480, point_radius: float = 0.15) -> str:
    """A standalone SVG scatter of the grid points, y axis pointing up."""
    min_x, min_y, max_x, max_y = grid.bounds
    margin = max(grid.dx, grid.dy)
    width = max_x - min_x + 2 * margin
    height = max_y - min_y + 2 * margin
    # shapely draws each point as a circle of radius 3 * scale_factor
    scale = point_radius * min(grid.dx, grid.dy) / 3
    body = MultiPoint(grid.coords).svg(scale_factor=scale, fill_color="#1f77b4")
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{int(size * height / width)}" '
        f'viewBox="{min_x - margin} {min_y - margin} {width} {height}">\n'
        f'<title>{grid.kind.value} {grid.spec.lx}x{grid.spec.ly} '
        f"({grid.n_points} points)</title>\n"
        f'<g transform="matrix(1,0,0,-1,0,{min_y + max_y})">{body}</g>\n'
        "</svg>\n"
    )
