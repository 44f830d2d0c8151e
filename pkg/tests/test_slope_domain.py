"""
Tests for the constraint functions and the regions Omega and Omega_hat
"""

import math
from fractions import Fraction

import matplotlib.path as mpath
import mpmath
import numpy as np
import pytest

from utils.algebra import Scalar, SQRT3
from utils.errors import PsiPole
from utils.slope_domain import (
    ASPECT_WORST_CASE,
    SlopePair,
    aspect_lower_bound,
    b_at_most_a,
    constraint_bounds,
    df_dt,
    dg_dt,
    eval_constraints,
    omega_contains,
    omega_vertices,
    omegahat_contains,
    phi_array,
    psi_hat,
    sample_omega_boundary,
    slopes_in_omega_eps,
)

VERTEX = SlopePair(Scalar(0), Scalar(0, Fraction(-1, 3)))


class TestConstraints:

    def test_vertex_exact(self):
        values = eval_constraints(VERTEX, mode="exact")
        for name in ("f", "g", "phi", "psi"):
            assert getattr(values, name).evaluate_exact({}) == SQRT3
        assert values.B.evaluate_exact({}) == 1
        assert values.T.evaluate_exact({}) == Scalar(0, Fraction(2, 3))

    def test_right_vertex(self):
        with mpmath.workprec(200):
            a = (mpmath.sqrt(27) - mpmath.sqrt(11)) / 4
            values = eval_constraints(SlopePair(a, -a / 2), mode="mp")
            assert abs(values.f - mpmath.sqrt(3)) < mpmath.mpf(10) ** -50
            assert abs(values.g - mpmath.sqrt(3)) < mpmath.mpf(10) ** -50

    def test_float_mode(self):
        values = eval_constraints(SlopePair(0.2, -0.4))
        assert values.f == pytest.approx(1.67703, abs=1e-5)
        assert values.g == pytest.approx(1.70651, abs=1e-5)
        assert values.phi == pytest.approx(1.70651, abs=1e-5)

    def test_psi_pole(self):
        with pytest.raises(PsiPole):
            eval_constraints(SlopePair(Fraction(-3, 4), Fraction(7, 24)), mode="exact")

    def test_psi_hat_vanishes_at_vertex(self):
        assert psi_hat(SlopePair(0.0, float(-1 / mpmath.sqrt(3)))) == pytest.approx(0.0, abs=1e-12)

    def test_phi_array_matches_scalar(self):
        bs = np.array([0.0, 0.2, 0.4])
        ts = np.array([-0.5, -0.4, -0.3])
        expected = [eval_constraints(SlopePair(b, t)).phi for b, t in zip(bs, ts)]
        np.testing.assert_allclose(phi_array(bs, ts), expected, rtol=1e-12)

    def test_dg_dt_positive(self):
        for b in np.linspace(-1, 1, 9):
            for t in np.linspace(-5, 5, 11):
                assert dg_dt(b, t) > 0

    def test_df_dt_negative(self):
        for t in np.linspace(-5, 5, 11):
            assert df_dt(0.2, t) < 0
        assert df_dt(0.0, 0.0) == -1.0

    def test_constraint_bounds_average(self):
        s = SlopePair(0.2, -0.4)
        values = eval_constraints(s)
        bounds = constraint_bounds(s, values.phi)
        assert bounds["S - g"] == pytest.approx(0.0, abs=1e-12)
        assert bounds["S - f"] > 0
        assert bounds["2R - T"] == pytest.approx(bounds["S - f"], abs=1e-12)


class TestAspectBound:

    def test_worst_case(self):
        assert aspect_lower_bound(Fraction(1, 4), mode="exact") == ASPECT_WORST_CASE
        assert aspect_lower_bound(0.25) == pytest.approx(float(SQRT3) - 1 / 24)

    def test_pointwise_above_worst_case(self):
        for b in np.linspace(0, 0.5, 21):
            assert aspect_lower_bound(b) >= float(ASPECT_WORST_CASE) - 1e-15


class TestMembership:

    def test_vertex_not_in_open_region(self):
        assert omega_contains(VERTEX, 0) is False

    def test_enlarged_region_contains_vertex(self):
        assert omega_contains(VERTEX, Fraction(1, 100)) is True
        assert slopes_in_omega_eps(0, -0.57735026919, 0.001) is True

    def test_interior_point(self):
        assert omega_contains(SlopePair(0.2, -0.4)) is True
        assert omegahat_contains(SlopePair(0.2, -0.4)) is True

    def test_trapezoid(self):
        assert omegahat_contains(VERTEX) is True
        assert omegahat_contains(SlopePair(0.6, -0.2)) is False
        assert omegahat_contains(SlopePair(-0.01, -0.5)) is False

    def test_b_at_most_a(self):
        assert b_at_most_a(Scalar(Fraction(46, 100)))
        assert not b_at_most_a(Scalar(Fraction(48, 100)))

    def test_negative_eps(self):
        with pytest.raises(ValueError):
            omega_contains(VERTEX, -1)

    def test_omega_inside_trapezoid_on_grid(self):
        for b in np.linspace(-0.2, 0.6, 17):
            for t in np.linspace(-0.7, 0.0, 15):
                s = SlopePair(float(b), float(t))
                if omega_contains(s):
                    assert omegahat_contains(s)


class TestRandomPoints:

    @pytest.fixture(scope="class")
    def points(self):
        rng = np.random.default_rng(2718)
        return np.column_stack([rng.uniform(-0.1, 0.6, 10 ** 4), rng.uniform(-0.7, -0.1, 10 ** 4)])

    def test_derivative_signs(self):
        rng = np.random.default_rng(1)
        b = rng.uniform(-3, 3, 10 ** 4)
        t = rng.uniform(-50, 50, 10 ** 4)
        assert (df_dt(b, t) < 0).all()
        assert (dg_dt(b, t) > 0).all()

    @pytest.mark.slow
    def test_membership_matches_float_phi(self, points):
        phi = phi_array(points[:, 0], points[:, 1])
        r3 = math.sqrt(3)
        decided = 0
        for (b, t), value in zip(points, phi):
            if abs(value - r3) < 1e-9:
                continue
            assert omega_contains(SlopePair(float(b), float(t))) is bool(value < r3)
            decided += 1
        assert decided > 9990

    @pytest.mark.slow
    def test_omega_inside_trapezoid(self, points):
        inside = 0
        for b, t in points:
            s = SlopePair(float(b), float(t))
            if omega_contains(s):
                inside += 1
                assert omegahat_contains(s)
        assert inside > 100

    @pytest.mark.slow
    def test_enlargement_is_monotone(self, points):
        grown = 0
        for b, t in points[:1000]:
            s = SlopePair(float(b), float(t))
            if omega_contains(s):
                assert omega_contains(s, Fraction(1, 100))
            else:
                grown += omega_contains(s, Fraction(1, 100))
        assert grown > 0


class TestBoundary:

    def test_endpoints(self):
        points = sample_omega_boundary(64)
        left = min(points)
        right = max(points)
        vertices = omega_vertices()
        assert np.hypot(left[0] - vertices["left"][0], left[1] - vertices["left"][1]) < 1e-6
        assert np.hypot(right[0] - vertices["right"][0], right[1] - vertices["right"][1]) < 1e-6

    def test_closed(self):
        points = sample_omega_boundary(16)
        assert points[0] == points[-1]

    def test_enlargement_contains_original(self):
        outer = mpath.Path(np.array(sample_omega_boundary(64, 0.1)))
        inner = sample_omega_boundary(8, 0)
        assert all(outer.contains_point(p) for p in inner)

    def test_wide_enlargement_is_not_clipped(self):
        level = math.sqrt(3) + 1
        points = sample_omega_boundary(64, 1)
        left, right = min(points), max(points)
        # at eps = 1 the two boundary graphs meet exactly at b = -1
        assert left[0] == pytest.approx(-1.0, abs=1e-9)
        assert right[0] > 1.0
        for b, t in (left, right):
            assert b - t + math.sqrt(1 + t * t) == pytest.approx(level, abs=1e-9)
            assert -b + t + math.sqrt(5 + 4 * b * b + t * t) == pytest.approx(level, abs=1e-6)

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            sample_omega_boundary(4)
