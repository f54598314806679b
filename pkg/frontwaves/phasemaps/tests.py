import math

import numpy as np
from django.test import SimpleTestCase

from fronts.dispersion import DispersionModel, Kind, Sheet
from fronts.exceptions import DomainError
from fronts.phase import stph_line

from .grid import (
    PhaseGrid,
    Quantity,
    Window,
    build_grid,
    default_window,
    extract_contours,
    polyline_rows,
    real_axis_crossings,
    saddle_phases,
    saddle_points,
)

NONREL = DispersionModel(Kind.NONRELATIVISTIC, mass=1.0)
REL = DispersionModel(Kind.RELATIVISTIC, mass=1.0, light_speed=1.0)


def parabola_deviation(resolution):
    grid = build_grid(NONREL, 2.0, 1.0, Window(-4.0, 4.0, -3.0, 1.5), resolution)
    lines = extract_contours(grid, [1.0])
    points = np.concatenate([line.points for line in lines])
    points = points[points[:, 0] < 1.8]
    return np.max(np.abs(points[:, 1] - stph_line(NONREL, 2.0, 1.0, points[:, 0]))), grid


class PhaseGridTests(SimpleTestCase):
    def test_saddle_node_normalizes_to_one(self):
        grid = build_grid(NONREL, 2.0, 1.0, Window(1.0, 3.0, -1.0, 1.0), (3, 3))
        self.assertAlmostEqual(grid.normalization, -2.0)
        self.assertAlmostEqual(grid.normalized[1, 1], 1.0)
        self.assertTrue(grid.cut_mask[1, 1])

    def test_stph_node_has_unit_real_part(self):
        grid = build_grid(NONREL, 2.0, 1.0, Window(-1.0, 1.0, 0.0, 2.0), (3, 3))
        self.assertAlmostEqual(grid.normalized[1, 1].real, 1.0)

    def test_relativistic_normalization(self):
        grid = build_grid(REL, 4.0, 3.0, Window(-2.0, 2.0, -1.0, 1.0), (11, 11))
        self.assertAlmostEqual(grid.normalization, math.sqrt(7.0))
        grid = build_grid(REL, 3.0, 5.0, Window(-2.0, 2.0, -1.0, 1.0), (11, 11))
        self.assertAlmostEqual(grid.normalization, 4.0)

    def test_values_finite(self):
        grid = build_grid(REL, 3.0, 5.0, Window(-2.0, 2.0, -1.0, 1.0), (21, 21))
        self.assertTrue(np.all(np.isfinite(grid.values)))

    def test_lower_sheet_mirrors_upper(self):
        window = Window(-3.0, 3.0, -2.0, 2.0)
        for model in (NONREL, REL):
            upper = build_grid(model, 1.0, 2.0, window, (31, 40), Sheet.UPPER)
            lower = build_grid(model, 1.0, 2.0, window, (31, 40), Sheet.LOWER)
            np.testing.assert_allclose(lower.values[::-1], np.conj(upper.values), rtol=1e-12, atol=1e-12)

    def test_degenerate_window(self):
        with self.assertRaises(DomainError):
            Window(1.0, 1.0, -1.0, 1.0)
        with self.assertRaises(DomainError):
            build_grid(NONREL, 1.0, 1.0, Window(-1.0, 1.0, -1.0, 1.0), (1, 5))

    def test_default_window_holds_saddle_and_pole(self):
        window = default_window(NONREL, 2.0, 1.0, omega0=-3.0)
        self.assertLess(window.omega_r_min, -3.0)
        self.assertGreater(window.omega_r_max, 2.0)
        self.assertLess(window.omega_i_min, 0.0)
        self.assertGreater(window.omega_i_max, 0.0)


class ContourTests(SimpleTestCase):
    def test_stph_polyline_follows_parabola(self):
        deviation, grid = parabola_deviation((161, 91))
        dx, dy = grid.spacing
        self.assertLess(deviation, 2.0 * math.hypot(dx, dy))

    def test_refinement_shrinks_deviation(self):
        coarse, _ = parabola_deviation((41, 24))
        fine, _ = parabola_deviation((81, 47))
        self.assertLess(fine, 0.6 * coarse)

    def test_constant_grid_has_no_contours(self):
        omega_r = np.linspace(0.0, 1.0, 5)
        omega_i = np.linspace(0.0, 1.0, 5)
        grid = PhaseGrid(
            window=Window(0.0, 1.0, 0.0, 1.0),
            sheet=Sheet.UPPER,
            omega_r=omega_r,
            omega_i=omega_i,
            values=np.ones((5, 5), dtype=complex),
            cut_mask=np.zeros((5, 5), dtype=bool),
            normalization=1.0,
        )
        self.assertEqual(extract_contours(grid, [0.5, 2.0]), [])

    def test_polylines_stop_at_the_cut(self):
        grid = build_grid(NONREL, 2.0, 1.0, Window(-4.0, 4.0, -3.0, 1.5), (161, 91))
        dx, dy = grid.spacing
        for line in extract_contours(grid, [1.0, -2.0, 3.0]):
            on_cut = (line.points[:, 0] > dx) & (np.abs(line.points[:, 1]) < 0.999 * dy)
            self.assertFalse(np.any(on_cut))

    def test_nonrelativistic_crossings(self):
        grid = build_grid(NONREL, 2.0, 1.0, Window(-4.0, 4.0, -3.0, 1.5), (161, 91))
        lines = extract_contours(grid, [1.0])
        crossings = real_axis_crossings(NONREL, 2.0, 1.0, grid, lines, 1.0)
        self.assertEqual(len(crossings), 2)
        self.assertAlmostEqual(crossings[0], -2.0, places=9)
        self.assertAlmostEqual(crossings[1], 2.0, places=6)

    def test_relativistic_stph_lines_inside_light_cone(self):
        grid = build_grid(REL, 0.8, 1.0, Window(-2.5, 2.5, -2.0, 1.0), (251, 151))
        plus = extract_contours(grid, [1.0])
        minus = extract_contours(grid, [-1.0])
        self.assertTrue(plus)
        self.assertTrue(minus)
        crossings = real_axis_crossings(REL, 0.8, 1.0, grid, plus, 1.0)
        self.assertEqual(len(crossings), 2)
        self.assertAlmostEqual(crossings[0], 0.6, places=9)
        self.assertAlmostEqual(crossings[1], 1.0 / 0.6, places=6)
        self.assertAlmostEqual(crossings[0] * crossings[1], 1.0, places=6)
        mirrored = real_axis_crossings(REL, 0.8, 1.0, grid, minus, -1.0)
        self.assertAlmostEqual(mirrored[0], -1.0 / 0.6, places=6)
        self.assertAlmostEqual(mirrored[1], -0.6, places=9)

    def test_no_saddle_outside_light_cone(self):
        self.assertEqual(saddle_points(REL, 4.0, 3.0), [])
        self.assertEqual(len(saddle_points(REL, 0.8, 1.0)), 2)

    def test_saddle_phases(self):
        plus, minus = saddle_phases(REL, 3.0, 5.0)
        self.assertIs(plus.sheet, Sheet.UPPER)
        self.assertAlmostEqual(plus.omega, 1.25)
        self.assertAlmostEqual(plus.value, 4.0)
        self.assertAlmostEqual(minus.value, -4.0)
        self.assertEqual(saddle_phases(REL, 4.0, 3.0), [])

    def test_imaginary_levels(self):
        grid = build_grid(NONREL, 2.0, 1.0, Window(-4.0, 4.0, -3.0, 1.5), (81, 46))
        lines = extract_contours(grid, [0.5, 1.0], Quantity.IM_NORMALIZED)
        self.assertTrue(lines)
        self.assertTrue(all(line.quantity is Quantity.IM_NORMALIZED for line in lines))

    def test_polyline_rows(self):
        grid = build_grid(NONREL, 2.0, 1.0, Window(-4.0, 4.0, -3.0, 1.5), (41, 24))
        lines = extract_contours(grid, [1.0])
        rows = list(polyline_rows(lines))
        self.assertEqual(len(rows), sum(len(line.points) for line in lines))
        self.assertEqual(rows[0][:3], ["re", 1.0, "upper"])
