import math
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from q2d2.common.errors import InvalidLevelsError, InvalidSpecError
from q2d2.constants import TilingKind
from q2d2.grid import grid_dump
from q2d2.grid.grid_builder import build_grid
from q2d2.grid.hexagon import build_hexagon, hexagon_neighbor_distances
from q2d2.grid.pair_grid import PairGridSpec, spread_from_levels, uniform_axis
from q2d2.grid.rectangle import build_rectangle
from q2d2.grid.rhombic import build_rhombic

LEVELS = [2, 3, 5, 7, 9, 11]


def spec(kind, lx, ly=None, hex_offset=0.25):
    return PairGridSpec.from_levels(kind, lx, ly, hex_offset)


def point_set(grid):
    return {(float(x), float(y)) for x, y in grid.coords}


class TestCase(unittest.TestCase):
    def test_spread_from_levels(self):
        self.assertEqual(spread_from_levels(7), 3.0)
        self.assertEqual(spread_from_levels(2), 0.5)
        self.assertEqual(spread_from_levels(11), 5.0)
        with self.assertRaises(InvalidLevelsError):
            spread_from_levels(1)
        with self.assertRaises(InvalidLevelsError):
            spread_from_levels(256)
        with self.assertRaises(InvalidLevelsError):
            spread_from_levels(3.0)

    def test_uniform_axis_antisymmetric(self):
        for l in range(2, 40):
            axis = uniform_axis(l, spread_from_levels(l))
            np.testing.assert_array_equal(axis, -axis[::-1])
            np.testing.assert_allclose(np.diff(axis), 1.0, rtol=0, atol=1e-12)

    def test_rectangle_3x3(self):
        grid = build_rectangle(spec(TilingKind.RECTANGLE, 3))
        expected = {(float(x), float(y)) for x in (-1, 0, 1) for y in (-1, 0, 1)}
        self.assertEqual(point_set(grid), expected)
        # row-major, y outer and x inner
        self.assertEqual(tuple(grid.point(0)), (-1.0, -1.0))
        self.assertEqual(tuple(grid.point(1)), (0.0, -1.0))
        self.assertEqual(tuple(grid.point(3)), (-1.0, 0.0))

    def test_rectangle_2x2(self):
        grid = build_rectangle(spec(TilingKind.RECTANGLE, 2))
        self.assertEqual(
            point_set(grid),
            {(-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5)},
        )

    def test_rectangle_7x7_spacing(self):
        grid = build_rectangle(spec(TilingKind.RECTANGLE, 7))
        self.assertEqual(grid.n_points, 49)
        self.assertEqual(grid.dx, 1.0)
        self.assertEqual(grid.dy, 1.0)
        self.assertAlmostEqual(grid.min_distance(), 1.0, places=12)

    def test_rectangle_symmetry(self):
        for lx in LEVELS:
            for ly in LEVELS:
                grid = build_rectangle(spec(TilingKind.RECTANGLE, lx, ly))
                self.assertEqual(point_set(grid), {(-x, -y) for x, y in point_set(grid)})

    def test_hexagon_2(self):
        grid = build_hexagon(spec(TilingKind.HEXAGON, 2))
        self.assertEqual(grid.dx, 1.0)
        self.assertAlmostEqual(grid.dy, math.sqrt(3) / 2, places=15)
        np.testing.assert_allclose(grid.coords[:2, 0], [-0.25, 0.75])
        np.testing.assert_allclose(grid.coords[2:, 0], [-0.75, 0.25])

    def test_hexagon_equidistant_neighbours(self):
        for l in LEVELS:
            grid = build_hexagon(spec(TilingKind.HEXAGON, l))
            neighbours = hexagon_neighbor_distances(grid)
            if l >= 3:
                self.assertGreater(len(neighbours), 0)
            np.testing.assert_allclose(neighbours, grid.dx, rtol=1e-9, atol=0)

    def test_hexagon_7_interior_count(self):
        grid = build_hexagon(spec(TilingKind.HEXAGON, 7))
        self.assertEqual(grid.n_points, 49)
        self.assertGreaterEqual(len(hexagon_neighbor_distances(grid)), 25)

    def test_hexagon_row_offset(self):
        for l in LEVELS:
            grid = build_hexagon(spec(TilingKind.HEXAGON, l))
            rows = grid.coords[:, 0].reshape(l, l)
            for i in range(l - 1):
                np.testing.assert_allclose(
                    np.abs(rows[i + 1] - rows[i]), grid.dx / 2, rtol=1e-12
                )
            ys = grid.coords[:, 1].reshape(l, l)
            self.assertTrue(np.all(ys == ys[:, :1]))

    def test_hexagon_offset_variants(self):
        # zero offset stacks rows; the neighbour distances are then dx and dy
        flat = build_hexagon(spec(TilingKind.HEXAGON, 7, hex_offset=0.0))
        self.assertEqual(len(hexagon_neighbor_distances(flat)), 0)
        self.assertAlmostEqual(flat.min_distance(), flat.dy, places=12)
        half = build_hexagon(spec(TilingKind.HEXAGON, 7, hex_offset=0.5))
        rows = half.coords[:, 0].reshape(7, 7)
        np.testing.assert_allclose(rows[1] - rows[0], -half.dx, atol=1e-12)

    def test_hexagon_requires_square_levels(self):
        with self.assertRaises(InvalidSpecError):
            spec(TilingKind.HEXAGON, 7, 5)

    def test_rhombic_2x2(self):
        grid = build_rhombic(spec(TilingKind.RHOMBIC, 2))
        self.assertEqual(grid.n_points, 8)
        corners = {(-0.5, -0.5), (0.5, -0.5), (-0.5, 0.5), (0.5, 0.5)}
        self.assertEqual(point_set(grid), corners | {(x + 0.5, y + 0.5) for x, y in corners})

    def test_rhombic_3x3(self):
        self.assertEqual(build_rhombic(spec(TilingKind.RHOMBIC, 3)).n_points, 18)

    def test_rhombic_unique_y(self):
        grid = build_rhombic(spec(TilingKind.RHOMBIC, 7, 6))
        self.assertEqual(grid.n_points, 84)
        self.assertEqual(grid.unique_levels(1), 12)
        self.assertEqual(grid.unique_levels(1, within_extent=True), 11)
        self.assertEqual(grid.unique_levels(0), 14)

    def test_rhombic_structure(self):
        for l in LEVELS:
            grid = build_rhombic(spec(TilingKind.RHOMBIC, l, 7))
            half = grid.n_points // 2
            np.testing.assert_array_equal(
                grid.coords[half:], grid.coords[:half] + np.array([grid.dx / 2, grid.dy / 2])
            )

    def test_build_grid_dispatch(self):
        for kind, builder in (
            (TilingKind.RECTANGLE, build_rectangle),
            (TilingKind.HEXAGON, build_hexagon),
            (TilingKind.RHOMBIC, build_rhombic),
        ):
            s = spec(kind, 5)
            self.assertEqual(build_grid(s), builder(s))

    def test_wrong_builder(self):
        with self.assertRaises(InvalidSpecError):
            build_hexagon(spec(TilingKind.RECTANGLE, 3))

    def test_coords_read_only(self):
        grid = build_grid(spec(TilingKind.RECTANGLE, 3))
        with self.assertRaises(ValueError):
            grid.coords[0, 0] = 5.0

    def test_point_index(self):
        grid = build_grid(spec(TilingKind.RECTANGLE, 3))
        with self.assertRaises(IndexError):
            grid.point(9)

    @settings(deadline=None, max_examples=60)
    @given(
        kind=st.sampled_from(list(TilingKind)),
        lx=st.integers(2, 16),
        ly=st.integers(2, 16),
    )
    def test_counts_and_determinism(self, kind, lx, ly):
        if kind == TilingKind.HEXAGON:
            ly = lx
        s = spec(kind, lx, ly)
        grid = build_grid(s)
        expected = 2 * lx * ly if kind == TilingKind.RHOMBIC else lx * ly
        self.assertEqual(grid.n_points, expected)
        self.assertGreater(grid.min_distance(), 0)
        np.testing.assert_array_equal(grid.coords, build_grid(s).coords)

    def test_grid_frame(self):
        grid = build_grid(spec(TilingKind.RHOMBIC, 7))
        frame = grid_dump.grid_to_frame(grid)
        self.assertEqual(list(frame.columns), grid_dump.GRID_COLUMNS)
        self.assertEqual(len(frame), 98)
        np.testing.assert_array_equal(frame[["x", "y"]].to_numpy(), grid.coords)

    def test_grid_svg(self):
        grid = build_grid(spec(TilingKind.HEXAGON, 3))
        svg = grid_dump.grid_to_svg(grid)
        self.assertTrue(svg.startswith("<svg"))
        self.assertEqual(svg.count("<circle"), 9)

    def test_repr(self):
        text = repr(build_grid(spec(TilingKind.RHOMBIC, 3)))
        self.assertIn("rhombic", text)
        self.assertIn("18", text)


suite = unittest.TestLoader().loadTestsFromTestCase(TestCase)
