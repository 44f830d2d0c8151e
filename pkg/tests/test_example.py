"""
Tests for the explicit band: layout, reflections, the (d, e) solve and the
folded band report
"""

import math
import random
from fractions import Fraction

import mpmath
import pytest

from utils.errors import InvalidLayout
from utils.example import (
    DEFAULT_ABC,
    FoldParams,
    band_from_params,
    compose,
    layout,
    midpoint_offset,
    reflection,
    solve_de,
    swap_residual,
)


@pytest.fixture(scope="module")
def solution():
    with mpmath.workprec(128):
        return solve_de(*DEFAULT_ABC)


@pytest.fixture
def params(solution):
    return FoldParams(*DEFAULT_ABC, solution.d, solution.e)


class TestReflections:

    def test_reflect_in_x_axis(self):
        r = reflection((0, 0), (1, 0))
        assert r((mpmath.mpf(1), mpmath.mpf(2))) == (1, -2)

    def test_involution_fixes_the_line(self):
        p, q = (mpmath.mpf(0), mpmath.mpf("0.3")), (mpmath.mpf(1), mpmath.mpf("0.9"))
        r = reflection(p, q)
        z = (mpmath.mpf("0.25"), mpmath.mpf("2.5"))
        back = r(r(z))
        assert abs(back[0] - z[0]) < 1e-35 and abs(back[1] - z[1]) < 1e-35
        for point in (p, q):
            image = r(point)
            assert abs(image[0] - point[0]) < 1e-35 and abs(image[1] - point[1]) < 1e-35

    def test_reflections_are_isometries(self):
        rng = random.Random(13)

        def point():
            return (mpmath.mpf(rng.uniform(-3, 3)), mpmath.mpf(rng.uniform(-3, 3)))

        for _ in range(200):
            r = reflection(point(), point())
            z, w = point(), point()
            (z1, z2), (w1, w2) = r(z), r(w)
            before = mpmath.hypot(z[0] - w[0], z[1] - w[1])
            after = mpmath.hypot(z1 - w1, z2 - w2)
            assert abs(before - after) < mpmath.mpf("1e-30")

    def test_compose_applies_right_to_left(self):
        rx = reflection((0, 0), (1, 0))
        rd = reflection((0, 0), (1, 1))
        z = (mpmath.mpf(2), mpmath.mpf(1))
        assert compose(rx, rd)(z) == rx(rd(z)) == (1, -2)


class TestLayout:

    def test_nonpositive_parameter(self):
        with pytest.raises(InvalidLayout, match="parameter a"):
            layout(FoldParams(0, Fraction(18, 53), Fraction(33, 128), Fraction(1, 5), Fraction(2, 5)))

    def test_line_five_must_clear_line_three(self):
        with pytest.raises(InvalidLayout, match="must exceed c"):
            layout(FoldParams(Fraction(1, 10), Fraction(1, 10), 2, Fraction(1, 10), Fraction(1, 10)))

    def test_half_turn_symmetry(self, params):
        fold = layout(params)
        assert fold.half_turn_residual() < mpmath.mpf("1e-35")
        assert abs(fold.lam - params.lam) < mpmath.mpf("1e-35")

    def test_flat_band(self, params):
        flat = band_from_params(params)
        assert flat.n_facets == 8
        assert abs(flat.lam - params.lam) < mpmath.mpf("1e-35")

    def test_boundary_corner(self, params):
        assert layout(params).boundary_corner == pytest.approx(2 * math.atan(5 / 27))


class TestSolve:

    def test_matches_reference_digits(self, solution, sim_data):
        assert abs(solution.d - mpmath.mpf(sim_data["d"])) < mpmath.mpf("1e-30")
        assert abs(solution.e - mpmath.mpf(sim_data["e"])) < mpmath.mpf("1e-30")

    def test_residual_and_conditioning(self, solution):
        assert solution.residual < mpmath.mpf("1e-28")
        assert solution.iterations < 200
        assert math.isfinite(solution.condition)

    def test_interval_brackets_the_root(self, solution):
        lo, hi = solution.interval(solution.d)
        assert mpmath.mpf(lo) < solution.d < mpmath.mpf(hi)
        assert mpmath.mpf(hi) - mpmath.mpf(lo) < mpmath.mpf("2e-30")

    def test_m1_is_swapped_by_line_one(self, params):
        first, second = swap_residual(layout(params))
        assert max(abs(v) for v in first + second) < mpmath.mpf("1e-28")

    def test_lambda_below_sqrt3(self, params, sim_data):
        gap = float(params.lam - mpmath.sqrt(3))
        assert -0.0018 < gap < -0.0016
        assert gap == pytest.approx(sim_data["lambda_minus_sqrt3"], abs=1e-7)

    def test_midpoint_offset(self, params, sim_data):
        dx, dy = midpoint_offset(layout(params))
        assert (dx, dy) == pytest.approx((0.0054, 0.0010), abs=1e-3)
        assert (dx, dy) == pytest.approx(tuple(sim_data["midpoint_offset"]), abs=1e-7)


@pytest.mark.slow
class TestFoldedExample:

    def test_report_passes(self, sim):
        _, report = sim
        assert report.passed, report.checks

    def test_normalized_position(self, sim, sim_data):
        _, report = sim
        x, y = report.normalized_xy
        assert x == pytest.approx(sim_data["normalized_x"], abs=1e-6)
        assert abs(y) < 1e-6
        assert report.m1_right_of_l1
        assert report.in_omegahat

    def test_band_closes(self, sim):
        band, report = sim
        assert band.n_facets == 8
        assert report.closure_residual < 1e-9
        assert report.pitch_backtrack < math.pi / 30


@pytest.mark.slow
def test_solution_moves_smoothly_with_a(solution):
    shifted = Fraction(DEFAULT_ABC[0]) + Fraction(1, 10 ** 6)
    with mpmath.workprec(128):
        moved = solve_de(shifted, *DEFAULT_ABC[1:])
    assert moved.residual < mpmath.mpf("1e-28")
    drift = abs(moved.d - solution.d) + abs(moved.e - solution.e)
    assert 0 < drift < mpmath.mpf("1e-3")
