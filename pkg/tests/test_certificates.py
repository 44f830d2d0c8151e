"""
Tests for the certificate Verdicts
"""

import json
import math
import random
from fractions import Fraction

import mpmath
import pytest

from utils.algebra import BiPoly, Scalar, SQRT3
from utils.certificates import (
    CERTIFICATES,
    METHODS,
    PRINTED_P,
    QUARTIC_DEVIATION,
    Step,
    Verdict,
    get_certificate,
    run_all,
    verify_aspect_statement1,
    verify_pitch_constant,
    verify_slope_theorem,
    verify_triangle_statement3,
    verify_xy_bounds,
)
from utils.errors import UnknownCertificate
from utils.monitor import CertificateMonitor


def _step(verdict, description):
    return next(step for step in verdict.steps if step.description == description)


@pytest.mark.slow
class TestSlopeTheorem:

    def test_passes(self):
        verdict = verify_slope_theorem()
        assert verdict.passed, [s.description for s in verdict.failed_steps()]

    def test_vertex_identity(self):
        step = _step(verify_slope_theorem(), "vertex (0, -1/sqrt3)")
        assert step.witness["f - sqrt3"] == "0"
        assert step.method == "exact-identity"

    def test_minimizer_witness(self):
        step = _step(verify_slope_theorem(), "g on t = (2/3)b - 1/2")
        assert 1e-5 < step.witness["g_minus_sqrt3_at_b_star"] < 3e-5
        assert step.witness["roots"] == 0

    def test_deviations_recorded(self):
        assert len(verify_slope_theorem().deviations) == 2


@pytest.mark.slow
class TestAspect:

    def test_passes(self):
        verdict = verify_aspect_statement1()
        assert verdict.passed, [s.description for s in verdict.failed_steps()]

    def test_printed_form_of_p_on_z_is_off(self):
        step = _step(verify_aspect_statement1(), "(3/4)P on Z")
        assert step.passed
        assert step.witness["matches_printed_form"] is False

    def test_second_derivative_at_zero(self):
        step = _step(verify_aspect_statement1(), "P' and P'' on Z")
        assert step.witness["P''_on_Z"][0] == "54"

    def test_identity_independent_of_term_order(self):
        rng = random.Random(11)
        terms = list(PRINTED_P.terms)
        for _ in range(5):
            rng.shuffle(terms)
            shuffled = BiPoly()
            for (i, j), v in terms:
                shuffled = BiPoly({(i, j): v}) + shuffled
            assert shuffled == PRINTED_P
            third = shuffled.partial_t().partial_t().partial_t()
            assert third == BiPoly({(1, 0): 108})


@pytest.mark.slow
class TestXYBounds:

    def test_passes(self):
        verdict = verify_xy_bounds()
        assert verdict.passed, [s.description for s in verdict.failed_steps()]
        assert len(verdict.steps) == 4

    def test_quartic_inventory(self):
        step = _step(verify_xy_bounds(), "printed quartic")
        assert step.passed
        assert step.witness["negative_roots"] == 1
        assert step.witness["positive_roots"] == 1
        assert step.witness["roots_in(0,1/2]"] == 0
        lo, hi = step.witness["positive_root"]
        assert lo < 2.0422 < hi

    def test_quartic_sign_correction_recorded(self):
        verdict = verify_xy_bounds()
        assert QUARTIC_DEVIATION in verdict.deviations
        assert QUARTIC_DEVIATION not in verify_xy_bounds(y_bound=Fraction(1, 29)).deviations

    def test_anchor_value(self):
        step = _step(verify_xy_bounds(), "x function positive")
        assert step.witness["anchor_value"]["lo"] == pytest.approx(0.02141, abs=1e-5)

    def test_too_small_x_bound_fails(self):
        verdict = verify_xy_bounds(x_bound=Fraction(1, 40))
        assert not verdict.passed
        step = _step(verdict, "x function positive")
        assert not step.passed
        assert step.witness["anchor_value"]["hi"] < 0
        assert step.witness["roots"] > 0

    def test_larger_x_bound_still_passes(self):
        # f grows with x, so a weaker bound keeps the certificate valid
        verdict = verify_xy_bounds(x_bound=Fraction(1, 17))
        assert _step(verdict, "x function positive").passed


@pytest.mark.slow
class TestTriangle:

    def test_passes(self):
        verdict = verify_triangle_statement3()
        assert verdict.passed, [s.description for s in verdict.failed_steps()]

    def test_ratio_window(self):
        step = _step(verify_triangle_statement3(), "altitude/base ratio")
        assert 1.129 < step.witness["value"]["lo"] <= step.witness["value"]["hi"] < 1.13

    def test_left_angle(self):
        step = _step(verify_triangle_statement3(), "left angle")
        assert step.passed and step.method == "exact-identity"
        assert Fraction(step.witness["tan_of_sum"]) == Fraction(45200, 41701)
        assert Fraction(step.witness["uv"]) < 1
        assert 4 * step.witness["angle_sum"] == pytest.approx(3.3026, abs=1e-3)

    def test_top_and_bottom_angles(self):
        step = _step(verify_triangle_statement3(), "top and bottom angles")
        assert step.passed
        assert step.witness["atan(4/3)"] > math.pi / 4

    def test_no_step_raised(self):
        verdict = verify_triangle_statement3()
        assert not [s.description for s in verdict.steps if "error" in s.witness]


class TestPitch:

    def test_passes(self):
        verdict = verify_pitch_constant()
        assert verdict.passed
        chain = _step(verdict, "pitch chain")
        assert chain.witness["2theta_upper"]["lo"] == pytest.approx(0.2029212, abs=1e-6)

    def test_tiny_excess(self):
        bound = SQRT3 + Fraction(1, 10 ** 100)
        verdict = verify_pitch_constant(aspect_bound=bound)
        assert verdict.passed
        assert _step(verdict, "pitch chain").witness["precision_bits"] >= 390

    def test_large_excess_fails(self):
        verdict = verify_pitch_constant(aspect_bound=SQRT3 + Fraction(1, 100))
        assert not verdict.passed

    def test_global_precision_untouched(self):
        before = mpmath.mp.prec
        verify_pitch_constant(aspect_bound=SQRT3 + Fraction(1, 10 ** 100))
        assert mpmath.mp.prec == before


class TestVerdicts:

    def test_passed_requires_every_step(self):
        good = Step("a", "a holds", "sturm", True, {})
        bad = Step("b", "b holds", "interval", False, {})
        assert Verdict("x", "x", (good,)).passed
        assert not Verdict("x", "x", (good, bad)).passed
        assert not Verdict("x", "x", ()).passed

    def test_dict_round_trip(self):
        verdict = verify_pitch_constant()
        data = json.loads(json.dumps(verdict.to_dict()))
        assert Verdict.from_dict(data) == verdict

    def test_methods_are_known(self):
        for step in verify_pitch_constant().steps:
            assert step.method in METHODS

    def test_deterministic(self):
        assert verify_pitch_constant().to_dict() == verify_pitch_constant().to_dict()

    def test_unknown_certificate(self):
        with pytest.raises(UnknownCertificate):
            get_certificate("bogus")
        with pytest.raises(UnknownCertificate):
            run_all(["pitch", "bogus"])

    def test_registry(self):
        assert list(CERTIFICATES) == ["slope", "aspect", "xy", "triangle", "pitch"]


@pytest.mark.slow
class TestRunAll:

    def test_parallel_matches_sequential(self):
        monitor = CertificateMonitor()
        parallel = run_all(parallel=True, monitor=monitor)
        sequential = run_all(parallel=False)
        assert [v.to_dict() for v in parallel] == [v.to_dict() for v in sequential]
        assert all(v.passed for v in parallel)
        metrics = monitor.get_metrics()
        assert metrics["total_runs"] == 5
        assert metrics["passed"] == 5
