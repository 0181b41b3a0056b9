import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from q2d2.common.errors import (
    ConfigMismatchError,
    DomainError,
    InvalidCodeError,
    InvalidDimensionError,
    InvalidSpecError,
)
from q2d2.common.nearest import argmin_entries
from q2d2.constants import TilingKind
from q2d2.grid.grid_builder import build_grid
from q2d2.grid.pair_grid import PairGridSpec
from q2d2.quantizer import quantizer
from q2d2.quantizer.config_name import parse_config_string
from q2d2.quantizer.nearest_grid import nearest_codes
from q2d2.quantizer.quantizer_config import QuantizerConfig

LEVELS = [2, 3, 5, 7, 9, 11]
N_ORACLE = 10_000


def grid_for(kind, l, ly=None):
    return build_grid(PairGridSpec.from_levels(kind, l, ly))


class TestCase(unittest.TestCase):
    def test_bound(self):
        config = QuantizerConfig.uniform("rect", [7, 7])
        np.testing.assert_array_equal(quantizer.bound([1.0, 1.0], config), [3.5, 3.5])
        np.testing.assert_array_equal(quantizer.bound([0.0, 0.0], config), [0.0, 0.0])
        config = QuantizerConfig.uniform("rect", [5, 9])
        np.testing.assert_array_equal(quantizer.bound([-1.0, 0.5], config), [-2.5, 2.25])

    def test_bound_errors(self):
        config = QuantizerConfig.uniform("rect", [7, 7])
        with self.assertRaises(ConfigMismatchError):
            quantizer.bound([0.0, 0.0, 0.0], config)
        with self.assertRaises(DomainError) as ctx:
            quantizer.bound([0.0, 1.5], config)
        self.assertEqual(ctx.exception.index, 1)
        self.assertEqual(ctx.exception.value, 1.5)
        with self.assertRaises(DomainError):
            quantizer.bound([np.nan, 0.0], config)
        # within tolerance
        quantizer.bound([1 + 1e-13, -1 - 1e-13], config)

    def test_pair(self):
        pairs = quantizer.pair(np.array([1.0, 2.0, 3.0, 4.0]))
        self.assertEqual([p.tolist() for p in pairs], [[1.0, 2.0], [3.0, 4.0]])
        self.assertEqual(len(quantizer.pair(np.array([1.0, 2.0]))), 1)
        v = np.arange(6.0)
        np.testing.assert_array_equal(np.concatenate(quantizer.pair(v)), v)
        with self.assertRaises(InvalidDimensionError):
            quantizer.pair(np.arange(5.0))

    def test_quantize_pair(self):
        grid = grid_for(TilingKind.RECTANGLE, 3)
        code, point = quantizer.quantize_pair((0.4, 0.6), grid)
        self.assertEqual(tuple(point), (0.0, 1.0))
        self.assertEqual(code, 7)
        code, point = quantizer.quantize_pair((-1.0, 1.0), grid)
        self.assertEqual(tuple(point), (-1.0, 1.0))

    def test_quantize_pair_hexagon(self):
        grid = grid_for(TilingKind.HEXAGON, 7)
        p = np.array([0.72, 0.7])
        code, point = quantizer.quantize_pair(p, grid)
        squared = ((grid.coords - p) ** 2).sum(axis=1)
        self.assertEqual(code, int(np.argmin(squared)))
        # upper-left neighbour: row 4 (y = dy, shifted +dx/4), column 3
        self.assertEqual(code, 4 * 7 + 3)
        self.assertAlmostEqual(point.x, 0.25, places=12)
        self.assertAlmostEqual(point.y, np.sqrt(3) / 2, places=12)
        self.assertLess(point.x, p[0])
        self.assertGreater(point.y, p[1])

    def test_quantize_pair_tie(self):
        # (0.5, 0) is equidistant from (0, 0) and (1, 0); the lower index wins
        grid = grid_for(TilingKind.RECTANGLE, 3)
        code, point = quantizer.quantize_pair((0.5, 0.0), grid)
        self.assertEqual(code, 4)
        self.assertEqual(tuple(point), (0.0, 0.0))

    def test_quantize_examples(self):
        config = QuantizerConfig.uniform("rect", [3, 3])
        q = quantizer.quantize([0.9, -0.9], config)
        np.testing.assert_array_equal(q.values, [1.0, -1.0])
        for levels in ([3, 3], [7, 7, 7, 7], [5, 9, 11, 3]):
            config = QuantizerConfig.uniform("rect", levels)
            q = quantizer.quantize(np.zeros(len(levels)), config)
            np.testing.assert_array_equal(q.values, 0.0)

    def test_nearest_oracle(self):
        rng = np.random.default_rng(0)
        for kind in TilingKind:
            for l in LEVELS:
                grid = grid_for(kind, l)
                lo, _, hi, _ = grid.bounds
                span = max(abs(lo), abs(hi)) + grid.dx
                points = rng.uniform(-span, span, size=(N_ORACLE, 2))
                reference = np.argmin(
                    ((points[:, None, :] - grid.coords[None]) ** 2).sum(axis=-1), axis=1
                )
                brute = nearest_codes(points, grid, "brute")
                fast = nearest_codes(points, grid, "fast")
                np.testing.assert_array_equal(brute, reference)
                np.testing.assert_array_equal(fast, brute)

    def test_fast_path_on_ties(self):
        # midpoints between grid points are exact ties
        for kind in TilingKind:
            grid = grid_for(kind, 7)
            coords = grid.coords
            mids = (coords[:, None, :] + coords[None, :8, :]) / 2
            points = mids.reshape(-1, 2)
            np.testing.assert_array_equal(
                nearest_codes(points, grid, "fast"), nearest_codes(points, grid, "brute")
            )

    def test_nearest_method(self):
        with self.assertRaises(ValueError):
            nearest_codes(np.zeros((1, 2)), grid_for(TilingKind.RECTANGLE, 3), "slow")

    def test_factorizes_on_rectangle(self):
        rng = np.random.default_rng(1)
        grid = grid_for(TilingKind.RECTANGLE, 7, 5)
        points = rng.uniform(-4, 4, size=(N_ORACLE, 2))
        codes = nearest_codes(points, grid)
        xs = np.unique(grid.coords[:, 0])
        ys = np.unique(grid.coords[:, 1])
        ix = argmin_entries(points[:, :1], xs[:, None])
        iy = argmin_entries(points[:, 1:], ys[:, None])
        np.testing.assert_array_equal(codes, iy * 7 + ix)

    def test_error_bounds(self):
        rng = np.random.default_rng(2)
        rect = grid_for(TilingKind.RECTANGLE, 9)
        points = rng.uniform(-4.5, 4.5, size=(N_ORACLE, 2))
        error = np.abs(points - rect.coords[nearest_codes(points, rect)])
        self.assertTrue(np.all(error <= rect.dx / 2 + 1e-12))

        hexagon = grid_for(TilingKind.HEXAGON, 9)
        min_x, min_y, max_x, max_y = hexagon.bounds
        points = rng.uniform([min_x, min_y], [max_x, max_y], size=(N_ORACLE, 2))
        distance = np.linalg.norm(
            points - hexagon.coords[nearest_codes(points, hexagon)], axis=1
        )
        self.assertTrue(np.all(distance <= hexagon.dx / np.sqrt(3) + 1e-12))

    def test_dequantize_round_trip(self):
        rng = np.random.default_rng(3)
        config = parse_config_string("rect:7,5+hex:9,9+rhombic:7,6")
        z = rng.uniform(-1, 1, size=(1000, 6))
        q = quantizer.quantize(z, config)
        back = quantizer.dequantize(q.pair_codes, config)
        np.testing.assert_array_equal(back.values, q.values)
        for j, grid in enumerate(config.grids):
            np.testing.assert_array_equal(
                q.values[:, 2 * j : 2 * j + 2], grid.coords[q.pair_codes[:, j]]
            )

    def test_dequantize_examples(self):
        config = QuantizerConfig.uniform("rect", [3, 3])
        np.testing.assert_array_equal(quantizer.dequantize([0], config).values, [-1.0, -1.0])
        config = QuantizerConfig.uniform("rhombic", [7, 7, 5, 5])
        values = quantizer.dequantize([0, 0], config).values
        np.testing.assert_array_equal(values, [-3.0, -3.0, -2.0, -2.0])

    def test_dequantize_errors(self):
        config = QuantizerConfig.uniform("rect", [3, 3, 3, 3])
        with self.assertRaises(InvalidCodeError) as ctx:
            quantizer.dequantize([[0, 0], [0, 9]], config)
        self.assertEqual(ctx.exception.position, (1, 1))
        with self.assertRaises(InvalidCodeError):
            quantizer.dequantize([-1, 0], config)
        with self.assertRaises(InvalidCodeError):
            quantizer.dequantize([0.5, 0], config)
        with self.assertRaises(ConfigMismatchError):
            quantizer.dequantize([0, 0, 0], config)

    @settings(deadline=None, max_examples=50)
    @given(z=arrays(np.float64, 6, elements=st.floats(-1, 1)))
    def test_idempotence(self, z):
        config = QuantizerConfig.uniform("rhombic", [7] * 6)
        q = quantizer.quantize(z, config)
        again = quantizer.quantize(np.clip(quantizer.unbound(q, config), -1, 1), config)
        inside = np.all(np.abs(quantizer.unbound(q, config)) <= 1)
        if inside:
            np.testing.assert_array_equal(again.pair_codes, q.pair_codes)

    def test_idempotence_rectangle(self):
        config = QuantizerConfig.uniform("rect", [7, 5, 3, 9])
        rng = np.random.default_rng(4)
        q = quantizer.quantize(rng.uniform(-1, 1, size=(500, 4)), config)
        again = quantizer.quantize(quantizer.unbound(q, config), config)
        np.testing.assert_array_equal(again.pair_codes, q.pair_codes)
        np.testing.assert_array_equal(again.values, q.values)

    def test_unbound(self):
        config = QuantizerConfig.uniform("rect", [7, 7])
        q = quantizer.QuantizedVector(np.array([3.5, 0.0]), np.array([0]))
        np.testing.assert_array_equal(quantizer.unbound(q, config), [1.0, 0.0])
        config = QuantizerConfig.uniform("rhombic", [3, 3])
        last = quantizer.dequantize([17], config)
        np.testing.assert_array_equal(quantizer.unbound(last, config), [1.0, 1.0])
        # the outermost midpoint sits at l / 2, which unbounds to 1
        for l in LEVELS:
            config = QuantizerConfig.uniform("rhombic", [l, l])
            last = quantizer.dequantize([2 * l * l - 1], config)
            np.testing.assert_allclose(
                quantizer.unbound(last, config), 1.0, rtol=0, atol=1e-15
            )

    def test_ste(self):
        config = QuantizerConfig.uniform("rhombic", [7, 5, 9, 3])
        z = np.array([0.3, -0.2, 0.9, 0.0])
        for k in range(4):
            upstream = np.zeros(4)
            upstream[k] = 1.0
            q, grad = quantizer.ste_forward_backward(z, config, upstream)
            expected = np.zeros(4)
            expected[k] = config.levels[k] / 2
            np.testing.assert_array_equal(grad, expected)
        _, grad = quantizer.ste_forward_backward(z, config, np.zeros(4))
        np.testing.assert_array_equal(grad, 0.0)
        upstream = np.random.default_rng(5).normal(size=4)
        np.testing.assert_array_equal(quantizer.snap_backward(upstream), upstream)

    def test_config_validation(self):
        with self.assertRaises(InvalidDimensionError):
            QuantizerConfig((7, 7, 7), (TilingKind.RECTANGLE,))
        with self.assertRaises(InvalidSpecError):
            QuantizerConfig((7, 7, 7, 7), (TilingKind.RECTANGLE,))
        with self.assertRaises(InvalidSpecError):
            QuantizerConfig.uniform("hex", [7, 5])

    def test_parse_config_string(self):
        config = parse_config_string("rhombic:7,7,7,7,7,7")
        self.assertEqual(config.levels, (7,) * 6)
        self.assertEqual(config.tilings, (TilingKind.RHOMBIC,) * 3)
        mixed = parse_config_string("rect:7,7+hex:9,9+rhombus:7,7")
        self.assertEqual(
            mixed.tilings, (TilingKind.RECTANGLE, TilingKind.HEXAGON, TilingKind.RHOMBIC)
        )
        self.assertEqual(mixed.to_string(), "rectangle:7,7+hexagon:9,9+rhombic:7,7")
        self.assertEqual(parse_config_string(mixed.to_string()), mixed)
        for bad in ("rhombic:7,7,7", "rhombic", "7,7", "square:7,7"):
            with self.assertRaises(ValueError):
                parse_config_string(bad)

    def test_from_preset(self):
        config = QuantizerConfig.from_preset("3.3kbps")
        self.assertEqual(config.levels, (9, 9, 7, 7, 7, 7))
        with self.assertRaises(ValueError):
            QuantizerConfig.from_preset("2kbps")


suite = unittest.TestLoader().loadTestsFromTestCase(TestCase)
