"""
Tests for exact Q(sqrt 3) arithmetic, Sturm counting and radical elimination
"""

import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

from utils.algebra import (
    Poly,
    Scalar,
    SQRT3,
    const,
    eliminate_radicals,
    isolate_roots,
    poly_from_ints,
    radicand_violations,
    scalar_sign,
    sqrt,
    sturm_count,
    sturm_sequence,
    var,
)
from utils.certificates import PRINTED_DEGREE8, PRINTED_QUARTIC, x_function, y_function
from utils.errors import NotReducible, ZeroPolynomial
from utils.slope_domain import UPPER_LINE


def _line(expr, line):
    slope, intercept = line
    return expr.substitute({"t": const(slope) * var("b") + const(intercept)})


# =============================================================================
# SCALARS
# =============================================================================

class TestScalar:

    @pytest.mark.parametrize("value, expected", [
        (2 - SQRT3, 1),
        (SQRT3 - 2, -1),
        (80 * SQRT3 - 79, 1),
        (Scalar(Fraction(7, 4)) - SQRT3, 1),
        (Scalar(0), 0),
    ])
    def test_sign(self, value, expected):
        assert scalar_sign(value) == expected

    def test_sign_matches_float_away_from_zero(self):
        rng = random.Random(7)
        for _ in range(300):
            x = Scalar(Fraction(rng.randint(-500, 500), rng.randint(1, 40)),
                       Fraction(rng.randint(-500, 500), rng.randint(1, 40)))
            approx = float(x)
            if abs(approx) > 1e-9:
                assert x.sign() == (1 if approx > 0 else -1)

    def test_field_identities(self):
        x = Scalar(Fraction(3, 5), Fraction(-2, 7))
        assert x * x.inverse() == 1
        assert (x + SQRT3) - SQRT3 == x
        assert SQRT3 * SQRT3 == 3
        assert x.norm() == x.p ** 2 - 3 * x.q ** 2

    def test_ordering(self):
        assert Scalar(Fraction(173, 100)) < SQRT3 < Scalar(Fraction(174, 100))
        assert abs(SQRT3 - 2) == 2 - SQRT3

    def test_exact_square_roots(self):
        assert Scalar(4, 2).sqrt() == Scalar(1, 1)
        assert Scalar(Fraction(4, 3)).sqrt() == Scalar(0, Fraction(2, 3))
        assert Scalar(2).sqrt() is None
        assert Scalar(-1).sqrt() is None

    def test_field_axioms_on_random_elements(self):
        rng = random.Random(11)

        def element():
            return Scalar(Fraction(rng.randint(-60, 60), rng.randint(1, 12)),
                          Fraction(rng.randint(-60, 60), rng.randint(1, 12)))

        for _ in range(500):
            x, y, z = element(), element(), element()
            assert (x + y) + z == x + (y + z)
            assert (x * y) * z == x * (y * z)
            assert x * (y + z) == x * y + x * z
            assert x * y == y * x
            if not y.is_zero():
                assert (x / y) * y == x

    def test_floats_are_rejected(self):
        with pytest.raises(TypeError):
            Scalar.of(0.5)


# =============================================================================
# POLYNOMIALS
# =============================================================================

class TestPoly:

    def test_division(self):
        x = Poly.x()
        q, r = (x * x - 1).divmod(x - 1)
        assert q == x + 1
        assert r.is_zero()

    def test_associates(self):
        p = Poly((1, SQRT3, 2))
        assert p.is_associate(p * Scalar(-3, 1))
        assert not p.is_associate(p * Poly.x())

    def test_cauchy_bound_encloses_roots(self):
        p = poly_from_ints([-6, 11, -6, 1])   # roots 1, 2, 3
        assert p.cauchy_bound() > 3

    def test_derivative_is_linear(self):
        rng = random.Random(5)

        def poly():
            return Poly(tuple(Scalar(Fraction(rng.randint(-9, 9), rng.randint(1, 5)), rng.randint(-3, 3))
                              for _ in range(rng.randint(1, 9))))

        for _ in range(200):
            p, q = poly(), poly()
            c = Scalar(Fraction(rng.randint(-9, 9), rng.randint(1, 5)), rng.randint(-2, 2))
            assert (p * c + q).derivative() == p.derivative() * c + q.derivative()
            assert (p * q).derivative() == p.derivative() * q + p * q.derivative()

    def test_sturm_sequence_of_zero(self):
        with pytest.raises(ZeroPolynomial):
            sturm_sequence(Poly())


# =============================================================================
# STURM COUNTS
# =============================================================================

class TestSturmCount:

    def test_simple_interval(self):
        assert sturm_count(poly_from_ints([-1, 0, 1]), -2, 0) == 1

    def test_half_open_convention(self):
        p = poly_from_ints([0, -1, 1])        # roots 0 and 1
        evidence = []
        assert sturm_count(p, 0, 1, evidence) == 1
        assert sturm_count(p, -1, 0) == 1
        assert any(r["event"] == "endpoint-shrink" for r in evidence)

    def test_unbounded(self):
        p = poly_from_ints([-6, 11, -6, 1])
        assert sturm_count(p, None, None) == 3
        assert sturm_count(p, None, 2) == 2

    def test_multiple_roots_counted_once(self):
        x = Poly.x()
        p = (x - 1) ** 3 * (x + 2)
        assert sturm_count(p, None, None) == 2

    def test_quadratic_field_coefficients(self):
        x = Poly.x()
        assert sturm_count(x - SQRT3, 1, Fraction(7, 4)) == 1
        assert sturm_count(x * x - 3, 0, 2) == 1

    def test_zero_polynomial(self):
        with pytest.raises(ZeroPolynomial):
            sturm_count(Poly(), 0, 1)

    def test_empty_interval(self):
        with pytest.raises(ValueError):
            sturm_count(Poly.x(), 1, 1)

    def test_printed_polynomials_have_no_roots_near_zero(self):
        assert sturm_count(PRINTED_DEGREE8, 0, Fraction(1, 2)) == 0
        assert sturm_count(PRINTED_QUARTIC, 0, Fraction(1, 2)) == 0

    def test_against_sympy(self):
        rng = random.Random(2024)
        x = sympy.Symbol("x")
        for _ in range(500):
            degree = rng.randint(1, 8)
            coeffs = [rng.randint(-9, 9) for _ in range(degree)] + [rng.choice([-3, -2, -1, 1, 2, 3])]
            p = poly_from_ints(coeffs)
            lo = Fraction(rng.randint(-40, 10), 8)
            hi = lo + Fraction(rng.randint(1, 40), 8)
            if p(lo).is_zero():
                continue
            oracle = sympy.Poly(list(reversed(coeffs)), x).count_roots(sympy.Rational(lo.numerator, lo.denominator),
                                                                    sympy.Rational(hi.numerator, hi.denominator))
            assert sturm_count(p, lo, hi) == oracle, (coeffs, lo, hi)


# =============================================================================
# ROOT ISOLATION
# =============================================================================

class TestIsolateRoots:

    def test_sqrt3(self):
        intervals = isolate_roots(poly_from_ints([-3, 0, 1]), 0, 2, Fraction(1, 10 ** 4))
        assert len(intervals) == 1
        lo, hi = intervals[0]
        assert lo < SQRT3 <= hi
        assert hi - lo <= Fraction(1, 10 ** 4)

    def test_degree8_closest_root(self):
        intervals = isolate_roots(PRINTED_DEGREE8, 0, 1, Fraction(1, 10 ** 5))
        assert len(intervals) == 1
        lo, hi = intervals[0]
        assert 0.62431 < float(lo) < float(hi) < 0.62434

    def test_quartic_real_roots(self):
        intervals = isolate_roots(PRINTED_QUARTIC, None, None, Fraction(1, 10 ** 3))
        assert len(intervals) == 2
        (lo_neg, hi_neg), (lo_pos, hi_pos) = intervals
        assert float(lo_neg) < -2.4403 < float(hi_neg) <= 0
        assert Fraction(1, 2) < float(lo_pos) < 2.0422 < float(hi_pos)
        assert PRINTED_QUARTIC(Scalar(0)) > 0

    def test_against_float_bisection(self):
        rng = random.Random(31)
        for _ in range(40):
            roots = sorted(rng.sample([Fraction(k, 4) for k in range(-16, 17)], rng.randint(1, 6)))
            p = poly_from_ints([1, 0, 1])
            for r in roots:
                p = p * Poly((-r, 1))
            intervals = isolate_roots(p, None, None, Fraction(1, 10 ** 12))
            assert len(intervals) == len(roots)
            for (lo, hi), r in zip(intervals, roots):
                assert lo < r <= hi
                assert hi - lo <= Fraction(1, 10 ** 12)

            # independent float bisection from a sign-change scan
            grid = np.linspace(-4.1237, 4.1311, 3301)
            values = np.array([p.eval_float(float(g)) for g in grid])
            found = []
            for k in np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]:
                a, b = grid[k], grid[k + 1]
                while b - a > 1e-12:
                    m = (a + b) / 2
                    if np.sign(p.eval_float(m)) == np.sign(p.eval_float(a)):
                        a = m
                    else:
                        b = m
                found.append((a + b) / 2)
            assert len(found) == len(roots)
            for x, (lo, hi) in zip(found, intervals):
                assert float(lo) - 1e-8 <= x <= float(hi) + 1e-8

    def test_root_at_bisection_midpoint(self):
        intervals = isolate_roots(poly_from_ints([0, -1, 1]), -1, 3, Fraction(1, 100))
        assert len(intervals) == 2

    def test_invalid_width(self):
        with pytest.raises(ValueError):
            isolate_roots(Poly.x(), -1, 1, 0)


# =============================================================================
# RADICAL ELIMINATION
# =============================================================================

class TestElimination:

    def test_square_completion(self):
        b = var("b")
        p = eliminate_radicals(b + 1 * sqrt(4))
        assert p.is_associate(poly_from_ints([-4, 0, 1]))

    def test_nested(self):
        b = var("b")
        # sqrt(1 + sqrt(b)) - 2 = 0  =>  b = 9
        p = eliminate_radicals(sqrt(1 + sqrt(b)) - 2)
        assert p(9).is_zero()

    def test_quotient(self):
        b = var("b")
        p = eliminate_radicals(1 / sqrt(1 + b * b) - Fraction(1, 2))
        assert p(SQRT3).is_zero()

    def test_degree8_from_x_function(self):
        p = eliminate_radicals(_line(x_function(Fraction(1, 18)), UPPER_LINE))
        assert p.degree == 8
        assert p.is_associate(PRINTED_DEGREE8)

    def test_quartic_from_y_function(self):
        p = eliminate_radicals(_line(y_function(Fraction(1, 30)), UPPER_LINE))
        assert p.is_associate(PRINTED_QUARTIC)

    def test_known_zeros_survive_elimination(self):
        rng = random.Random(97)
        b = var("b")
        for n in range(1000):
            r = Fraction(rng.randint(-20, 20), rng.randint(1, 9))
            s1 = abs(r) + Fraction(rng.randint(1, 20), rng.randint(1, 9))
            s2 = abs(r) + Fraction(rng.randint(1, 20), rng.randint(1, 9))
            c1, c2 = s1 * s1 - r * r, s2 * s2 - r * r
            if n % 2:
                k = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
                e = sqrt(b * b + c1) + b * k - (s1 + k * r)
            else:
                e = sqrt(b * b + c1) + sqrt(b * b + c2) - (s1 + s2)
            p = eliminate_radicals(e)
            assert not p.is_zero()
            assert p(r).is_zero(), (r, s1, s2)

    def test_identically_zero(self):
        b = var("b")
        with pytest.raises(NotReducible):
            eliminate_radicals(sqrt(b * b) * sqrt(b * b) - b * b)

    def test_exact_evaluation_of_non_square(self):
        with pytest.raises(NotReducible):
            sqrt(2).evaluate_exact({})


def test_radicand_violations_reports_negative_arguments():
    e = sqrt(var("b") - 1) + sqrt(var("b") + 4)
    bad = radicand_violations(e, [{"b": 2}, {"b": 0}, {"b": -5}])
    assert [v["point"] for v in bad] == [{"b": "0"}, {"b": "-5"}, {"b": "-5"}]
    assert bad[0]["value"] == pytest.approx(-1.0)
