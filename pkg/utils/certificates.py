"""
Certificates
============

Machine verification of the inequality certificates behind the slope
theorem and the three statements about special immersed bands, plus the
pitch constant.

Each ``verify_*`` function returns a Verdict: an ordered list of Steps,
each tagged with the method that decided it (exact-identity, sturm,
interval or numeric-eval) and a JSON-ready witness that is enough to
re-check the step by hand. Failures never raise; an exception inside a
step turns that step into a failed step.

Numerics run in private mpmath contexts so that certificates can run in
parallel threads without touching the global precision.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import mpmath

from utils.algebra import (
    BiPoly,
    Poly,
    RadicalExpr,
    Scalar,
    SQRT3,
    const,
    eliminate_radicals,
    eliminate_radicals_bivariate,
    isolate_roots,
    poly_from_ints,
    sqrt,
    sturm_count,
    var,
)
from utils.errors import UnknownCertificate
from utils.monitor import CertificateMonitor
from utils.slope_domain import (
    ASPECT_WORST_CASE,
    DG_DT_NOTE,
    LOWER_LINE,
    STEEP_LINE,
    THIRD_LINE_DEVIATION,
    UPPER_LINE,
    constraint_exprs,
)

logger = logging.getLogger(__name__)

EXACT = "exact-identity"
STURM = "sturm"
INTERVAL = "interval"
NUMERIC = "numeric-eval"
METHODS = (EXACT, STURM, INTERVAL, NUMERIC)

BOX_GRID = 64
X_BOUND = Fraction(1, 18)
Y_BOUND = Fraction(1, 30)
PITCH_MARGIN = Fraction(1, 10 ** 6)


# =============================================================================
# VERDICTS
# =============================================================================

@dataclass(frozen=True)
class Step:
    """One checked claim with its evidence"""
    description: str
    claim: str
    method: str
    passed: bool
    witness: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "description": self.description,
            "claim": self.claim,
            "method": self.method,
            "passed": self.passed,
            "witness": self.witness,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Step":
        return cls(data["description"], data["claim"], data["method"],
                   bool(data["passed"]), dict(data.get("witness", {})))


@dataclass(frozen=True)
class Verdict:
    """Outcome of one certificate; passes iff every step passes"""
    name: str
    title: str
    steps: Tuple[Step, ...] = ()
    deviations: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return bool(self.steps) and all(step.passed for step in self.steps)

    def failed_steps(self) -> List[Step]:
        return [step for step in self.steps if not step.passed]

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "title": self.title,
            "passed": self.passed,
            "steps": [step.to_dict() for step in self.steps],
            "deviations": list(self.deviations),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Verdict":
        return cls(
            name=data["name"],
            title=data.get("title", data["name"]),
            steps=tuple(Step.from_dict(s) for s in data.get("steps", [])),
            deviations=tuple(data.get("deviations", [])),
        )


class _Recorder:
    """Collects steps; exceptions inside a check become failed steps"""

    def __init__(self, name: str):
        self.name = name
        self.steps: List[Step] = []

    def run(self, description: str, claim: str, method: str,
            check: Callable[[], Tuple[bool, Dict]]) -> bool:
        try:
            passed, witness = check()
        except Exception as exc:
            logger.warning("certificate %s, step %r raised %s: %s",
                           self.name, description, type(exc).__name__, exc)
            passed, witness = False, {"error": f"{type(exc).__name__}: {exc}"}
        self.steps.append(Step(description, claim, method, bool(passed), witness))
        logger.debug("certificate %s, step %r: %s", self.name, description, "pass" if passed else "FAIL")
        return bool(passed)

    def verdict(self, title: str, deviations: Sequence[str] = ()) -> Verdict:
        verdict = Verdict(self.name, title, tuple(self.steps), tuple(deviations))
        logger.info("certificate %s: %s (%d steps)", self.name,
                    "PASS" if verdict.passed else "FAIL", len(verdict.steps))
        return verdict


# =============================================================================
# HELPERS
# =============================================================================

def _bits(minimum: int = 128) -> int:
    return max(mpmath.mp.prec, minimum)


def _mp_context(minimum: int = 128):
    ctx = mpmath.MPContext()
    ctx.prec = _bits(minimum)
    return ctx


def _iv_context(minimum: int = 128):
    ctx = mpmath.MPIntervalContext()
    ctx.prec = _bits(minimum)
    return ctx


def _iv_span(ctx, lo: Fraction, hi: Fraction):
    """Interval containing the rational range [lo, hi]"""
    return ctx.mpf([Scalar(lo).to_mpf(ctx).a, Scalar(hi).to_mpf(ctx).b])


def _iv_witness(x) -> Dict[str, float]:
    return {"lo": float(x.a), "hi": float(x.b)}


def _atan(ctx, q: Fraction):
    return ctx.atan(ctx.mpf(q.numerator) / q.denominator)


def _poly_witness(p: Poly) -> List[str]:
    return [str(c) for c in p.coeffs]


def _bipoly_witness(p: BiPoly) -> Dict[str, str]:
    return {f"b^{i} t^{j}": str(v) for (i, j), v in p.terms}


def _line_expr(line) -> RadicalExpr:
    slope, intercept = line
    return const(slope) * var("b") + const(intercept)


def _on_line(expr: RadicalExpr, line) -> RadicalExpr:
    """Restrict an expression in (b, t) to t = slope*b + intercept"""
    return expr.substitute({"t": _line_expr(line)})


def _value_at(expr: RadicalExpr, ctx, b: Fraction):
    return expr.evaluate({"b": Scalar.of(b).to_mpf(ctx)}, ctx)


def _positive_on(poly: Poly, lo: Fraction, hi: Fraction, anchor_expr: RadicalExpr,
                 anchor: Fraction, ctx) -> Tuple[bool, Dict]:
    """
    No root of poly in (lo, hi] plus a positive anchor value

    anchor_expr is the function whose zeros poly contains; its value at the
    anchor is enclosed with interval arithmetic.
    """
    evidence: list = []
    roots = sturm_count(poly, lo, hi, evidence)
    value = _value_at(anchor_expr, ctx, b=anchor)
    witness = {
        "polynomial": _poly_witness(poly),
        "interval": f"({lo}, {hi}]",
        "roots": roots,
        "anchor": str(anchor),
        "anchor_value": _iv_witness(value),
        "evidence": evidence,
    }
    return roots == 0 and value.a > 0, witness


def _poly_positive_on(poly: Poly, lo: Fraction, hi: Fraction) -> Tuple[bool, Dict]:
    """No root of an exact polynomial in (lo, hi] plus an exact positive midpoint value"""
    evidence: list = []
    roots = sturm_count(poly, lo, hi, evidence)
    anchor = (lo + hi) / 2
    value = poly(anchor)
    witness = {
        "polynomial": _poly_witness(poly),
        "interval": f"({lo}, {hi}]",
        "roots": roots,
        "anchor": str(anchor),
        "anchor_value": str(value),
        "evidence": evidence,
    }
    return roots == 0 and value.sign() > 0, witness


def _omega_a(ctx):
    return (ctx.sqrt(27) - ctx.sqrt(11)) / 4


# =============================================================================
# SLOPE THEOREM
# =============================================================================

def _boundary_intersection_poly() -> Tuple[Poly, Poly]:
    """
    Numerator of t_f(b) - t_g(b) from the closed forms of the two graphs

    With c = sqrt3 - b and d = sqrt3 + b the graphs are t_f = (1 - c^2)/(2c)
    and t_g = (d^2 - 5 - 4b^2)/(2d); they meet where the returned N vanishes.
    """
    b = Poly.x()
    c = Poly.constant(SQRT3) - b
    d = Poly.constant(SQRT3) + b
    n = (1 - c * c) * d - (d * d - 5 - 4 * b * b) * c
    m = Poly((2, -3 * SQRT3, 2))
    return n, m


def verify_slope_theorem() -> Verdict:
    """
    The g-boundary lies below the f-boundary between the two vertices, and
    Omega sits inside the closed trapezoid.
    """
    rec = _Recorder("slope")
    exprs = constraint_exprs()
    f_minus = exprs["f"] - const(SQRT3)
    g_minus = exprs["g"] - const(SQRT3)
    ctx = _iv_context()
    mp = _mp_context()
    a = _omega_a(mp)

    def vertex_left():
        b0, t0 = Scalar(0), Scalar(0, Fraction(-1, 3))
        env = {"b": b0, "t": t0}
        fv = f_minus.evaluate_exact(env)
        gv = g_minus.evaluate_exact(env)
        return fv.is_zero() and gv.is_zero(), {"point": ["0", str(t0)], "f - sqrt3": str(fv), "g - sqrt3": str(gv)}

    rec.run("vertex (0, -1/sqrt3)", "f = g = sqrt3 at (0, -1/sqrt3)", EXACT, vertex_left)

    def vertex_right():
        half = (Fraction(-1, 2), Scalar(0))
        ef = eliminate_radicals(_on_line(f_minus, half))
        eg = eliminate_radicals(_on_line(g_minus, half))
        _, m = _boundary_intersection_poly()
        roots = isolate_roots(m, 0, 1, Fraction(1, 10 ** 12))
        fv = _on_line(f_minus, half).evaluate({"b": a}, mp)
        gv = _on_line(g_minus, half).evaluate({"b": a}, mp)
        residual = max(abs(fv), abs(gv))
        ok = ef.is_associate(m) and eg.is_associate(m) and len(roots) == 1 and residual < mp.mpf(10) ** -30
        lo, hi = roots[0] if roots else (Scalar(0), Scalar(0))
        return ok, {
            "line": "t = -b/2",
            "eliminated_f": _poly_witness(ef),
            "eliminated_g": _poly_witness(eg),
            "minimal_polynomial": _poly_witness(m),
            "root_interval": [float(lo), float(hi)],
            "a": mp.nstr(a, 30),
            "residual": mp.nstr(residual, 5),
        }

    rec.run("vertex (a, -a/2)", "f - sqrt3 and g - sqrt3 on t = -b/2 reduce to 2b^2 - 3sqrt3 b + 2, "
            "whose root in (0, 1] is a", EXACT, vertex_right)

    def intersection():
        n, m = _boundary_intersection_poly()
        expected = Poly((0, -2)) * m
        count = sturm_count(n, -1, 1)
        return n == expected and count == 2, {
            "numerator": _poly_witness(n),
            "factored": "-2b(2b^2 - 3sqrt3 b + 2)",
            "roots_in(-1,1]": count,
        }

    rec.run("boundary intersections", "the f- and g-boundaries meet only at b = 0 and b = a on [-1, 1]",
            STURM, intersection)

    def derivative_signs():
        b, t = BiPoly.b(), BiPoly.t()
        f_gap = (1 + t * t) - t * t
        g_gap = (5 + 4 * b * b + t * t) - t * t
        ok = f_gap == BiPoly.constant(1) and g_gap == BiPoly.constant(5) + BiPoly({(2, 0): 4})
        return ok, {"T^2 - t^2": _bipoly_witness(f_gap), "(5+4b^2+t^2) - t^2": _bipoly_witness(g_gap),
                    "note": DG_DT_NOTE}

    rec.run("monotonicity in t", "df/dt = -1 + t/T < 0 and dg/dt = 1 + t/sqrt(5+4b^2+t^2) > 0",
            EXACT, derivative_signs)

    def ends():
        witness = {}
        ok = True
        for b in (-1, 1):
            c = mp.sqrt(3) - b
            d = mp.sqrt(3) + b
            tf = (1 - c * c) / (2 * c)
            tg = (d * d - 5 - 4 * b * b) / (2 * d)
            witness[str(b)] = {"t_f": float(tf), "t_g": float(tg)}
            ok = ok and c > 0 and d > 0 and tg < tf
        return ok, witness

    rec.run("boundary order at b = -1 and b = 1", "t_g(b) < t_f(b) at b = -1 and b = 1", NUMERIC, ends)

    def upper_line():
        restricted = _on_line(g_minus, UPPER_LINE)
        p = eliminate_radicals(restricted)
        total = sturm_count(p, None, None)
        ok, witness = _positive_on(p, Fraction(-1, 2), Fraction(1, 2), restricted, Fraction(0), ctx)
        witness["real_roots"] = total

        # minimizer of g along the line: C'^2 = (4/9) C
        C = Poly((Fraction(21, 4), Fraction(-2, 3), Fraction(40, 9)))
        q = C.derivative() ** 2 - C * Fraction(4, 9)
        printed = Poly((Fraction(-51, 8), -39, 260))
        b_star = (39 + mp.sqrt(8151)) / 520
        gap = restricted.evaluate({"b": b_star}, mp)
        witness.update({
            "minimizer": "(39 + sqrt 8151)/520",
            "b_star": mp.nstr(b_star, 20),
            "g_minus_sqrt3_at_b_star": float(gap),
            "minimizer_polynomial": _poly_witness(q),
        })
        in_band = mp.mpf(10) ** -5 < gap < 3 * mp.mpf(10) ** -5
        return ok and total == 0 and q.is_associate(printed) and in_band, witness

    rec.run("g on t = (2/3)b - 1/2", "g(b, (2/3)b - 1/2) > sqrt3 for b in [0, a]; minimum about sqrt3 + 0.00002",
            STURM, upper_line)

    def lower_line():
        restricted = _on_line(f_minus, LOWER_LINE)
        p = eliminate_radicals(restricted)
        ok, witness = _positive_on(p, Fraction(0), Fraction(1, 2), restricted, Fraction(1, 4), ctx)
        witness["infimum_at"] = "b = 0, where f = sqrt3 exactly"
        return ok and p.is_associate(Poly((0, 0, 1))), witness

    rec.run("f on t = (2/3)b - 1/sqrt3", "f(b, (2/3)b - 1/sqrt3) > sqrt3 for b in (0, a]", STURM, lower_line)

    def steep_line():
        restricted = _on_line(g_minus, STEEP_LINE)
        p = eliminate_radicals(restricted)
        ok, witness = _positive_on(p, Fraction(0), Fraction(1, 2), restricted, Fraction(1, 4), ctx)
        return ok and p.is_associate(Poly((0, 0, 1))), witness

    rec.run("g on t = (4/3)b - 1/sqrt3", "g(b, (4/3)b - 1/sqrt3) > sqrt3 for b in (0, a]", STURM, steep_line)

    return rec.verdict("Gamma_g lies below Gamma_f; Omega inside the closed trapezoid",
                       [THIRD_LINE_DEVIATION, DG_DT_NOTE])


# =============================================================================
# ASPECT RATIO
# =============================================================================

PRINTED_P = BiPoly({
    (6, 0): 4,
    (5, 1): -8,
    (5, 0): -16,
    (4, 1): 20,
    (4, 0): Scalar(12, 12),
    (3, 1): Scalar(-8, -24),
    (3, 0): Scalar(-8, -24),
    (2, 2): 9,
    (2, 1): Scalar(12, 30),
    (2, 0): Scalar(59, -12),
    (1, 3): 18,
    (1, 1): -42,
    (1, 0): Scalar(0, -12),
    (0, 2): 27,
    (0, 1): Scalar(0, 18),
    (0, 0): 9,
})

PRINTED_P2_ON_Z = Poly((54, Scalar(0, -36), 90))
PRINTED_P1_ON_Z = Poly((0, 12, 12, Scalar(28, -24), 20, -8))

# (3/4)P on Z = b^2(21 - 12sqrt3 + 18b - 10sqrt3 b + 12b^2 - 8sqrt3 b^2 - 2b^3) + b^5(2sqrt3 - b)
CORRECTED_P_ON_Z = Poly((0, 0, Scalar(21, -12), Scalar(18, -10), Scalar(12, -8), Scalar(-2, 2), -1))
# same with -2b^2 in place of -2b^3 inside the bracket
MISPRINTED_P_ON_Z = Poly((0, 0, Scalar(21, -12), Scalar(18, -10), Scalar(10, -8), Scalar(0, 2), -1))

ASPECT_DEVIATION = (
    "(3/4)P on Z is printed with -2b^2 inside the bracket; the identity holds with -2b^3"
)


def verify_aspect_statement1() -> Verdict:
    """S_j >= sqrt3 - b(1-2b)/3 >= sqrt3 - 1/24 via psi_hat >= 0 on Z"""
    rec = _Recorder("aspect")
    exprs = constraint_exprs()
    interval = (Fraction(0), Fraction(1, 2))

    def elimination():
        evidence: list = []
        p = eliminate_radicals_bivariate(exprs["psi_hat"], evidence=evidence)
        return p.is_associate(PRINTED_P), {"eliminated": _bipoly_witness(p), "printed": _bipoly_witness(PRINTED_P),
                                           "evidence": evidence}

    rec.run("eliminate psi_hat", "radical elimination of psi_hat reproduces P up to a constant", EXACT, elimination)

    def vertex():
        value = PRINTED_P(Scalar(0), Scalar(0, Fraction(-1, 3)))
        return value.is_zero(), {"P(0, -1/sqrt3)": str(value)}

    rec.run("P at the vertex", "P(0, -1/sqrt3) = 0", EXACT, vertex)

    def third_derivative():
        p3 = PRINTED_P.partial_t().partial_t().partial_t()
        return p3 == BiPoly({(1, 0): 108}), {"d3P/dt3": _bipoly_witness(p3)}

    rec.run("third t-derivative", "d^3P/dt^3 = 108b", EXACT, third_derivative)

    slope, intercept = LOWER_LINE

    def derivatives_on_z():
        p1 = PRINTED_P.partial_t().restrict_to_line(slope, intercept)
        p2 = PRINTED_P.partial_t().partial_t().restrict_to_line(slope, intercept)
        ok = p1 == PRINTED_P1_ON_Z and p2 == PRINTED_P2_ON_Z
        return ok, {"P'_on_Z": _poly_witness(p1), "P''_on_Z": _poly_witness(p2)}

    rec.run("P' and P'' on Z", "P'' = 54 - 36sqrt3 b + 90b^2 and P' = b(12 + 12b + 28b^2 - 24sqrt3 b^2) "
            "+ b^4(20 - 8b) on t = (2/3)b - 1/sqrt3", EXACT, derivatives_on_z)

    def p_on_z():
        p0 = PRINTED_P.restrict_to_line(slope, intercept) * Fraction(3, 4)
        return p0 == CORRECTED_P_ON_Z, {
            "(3/4)P_on_Z": _poly_witness(p0),
            "matches_printed_form": p0 == MISPRINTED_P_ON_Z,
        }

    rec.run("(3/4)P on Z", "(3/4)P on Z = b^2(21 - 12sqrt3 + 18b - 10sqrt3 b + 12b^2 - 8sqrt3 b^2 - 2b^3) "
            "+ b^5(2sqrt3 - b)", EXACT, p_on_z)

    for label, poly in (("P''", PRINTED_P2_ON_Z), ("P'", PRINTED_P1_ON_Z), ("P", CORRECTED_P_ON_Z)):
        rec.run(f"{label} positive on Z", f"{label} > 0 on Z for b in (0, 1/2)", STURM,
                lambda poly=poly: _poly_positive_on(poly, *interval))

    def worst_case():
        b = Poly.x()
        lhs = Fraction(1, 24) - b * (1 - 2 * b) * Fraction(1, 3)
        rhs = (b - Fraction(1, 4)) ** 2 * Fraction(2, 3)
        return lhs == rhs, {
            "pointwise_bound": "sqrt3 - b(1-2b)/3",
            "worst_case": str(ASPECT_WORST_CASE),
            "worst_case_float": float(ASPECT_WORST_CASE),
            "at_b": "1/4",
        }

    rec.run("worst case", "1/24 - b(1-2b)/3 = (2/3)(b - 1/4)^2, so S_j >= sqrt3 - 1/24", EXACT, worst_case)

    return rec.verdict("Aspect bound: S_j >= sqrt3 - 1/24", [ASPECT_DEVIATION])


# =============================================================================
# x AND y BOUNDS
# =============================================================================

PRINTED_DEGREE8 = poly_from_ints([
    379204871936, -2821217402880, -3788174241792, 59974706921472, -81516306161664,
    -11284439629824, 30126667530240, 0, -2821109907456,
])
PRINTED_QUARTIC = Poly((Scalar(-79, 80), -600, Scalar(1600, -40), 0, -300))

QUARTIC_DEVIATION = (
    "the printed quartic is said to have two negative real roots; q(0) = 80sqrt3 - 79 > 0 with a "
    "negative leading coefficient, so it has one negative and one positive root (near 2.042), "
    "neither in (0, 1/2]"
)


def x_function(x_bound: Fraction) -> RadicalExpr:
    """T/2 + sqrt((B + x)^2 + T^2/4) - sqrt3 in (b, t)"""
    b, t = var("b"), var("t")
    B = sqrt(1 + b * b)
    T = sqrt(1 + t * t)
    return T / 2 + sqrt((B + x_bound) * (B + x_bound) + T * T / 4) - const(SQRT3)


def y_function(y_bound: Fraction) -> RadicalExpr:
    """sqrt(B^2 + (T/2 + y)^2) + T/2 + y - sqrt3 in (b, t)"""
    b, t = var("b"), var("t")
    T = sqrt(1 + t * t)
    shifted = T / 2 + y_bound
    return sqrt(1 + b * b + shifted * shifted) + shifted - const(SQRT3)


def verify_xy_bounds(x_bound: Fraction = X_BOUND, y_bound: Fraction = Y_BOUND) -> Verdict:
    """
    x < x_bound and |y| < y_bound along t = (2/3)b - 1/2 for b in (0, 1/2]

    The comparison with the printed polynomials is part of the certificate
    only for the printed constants 1/18 and 1/30.
    """
    rec = _Recorder("xy")
    deviations: List[str] = []
    x_bound, y_bound = Fraction(x_bound), Fraction(y_bound)
    ctx = _iv_context()
    interval = (Fraction(0), Fraction(1, 2))

    phi = _on_line(x_function(x_bound), UPPER_LINE)
    h = _on_line(y_function(y_bound), UPPER_LINE)

    def x_positive():
        p = eliminate_radicals(phi)
        ok, witness = _positive_on(p, *interval, phi, Fraction(0), ctx)
        witness["x"] = str(x_bound)
        return ok, witness

    rec.run("x function positive", f"f(b, (2/3)b - 1/2, {x_bound}) > 0 for b in [0, 1/2]", STURM, x_positive)

    if x_bound == X_BOUND:
        def x_printed():
            p = eliminate_radicals(phi)
            evidence: list = []
            lo, hi = Fraction(62432, 10 ** 5), Fraction(62433, 10 ** 5)
            below = sturm_count(PRINTED_DEGREE8, 0, lo, evidence)
            inside = sturm_count(PRINTED_DEGREE8, lo, hi, evidence)
            return p.is_associate(PRINTED_DEGREE8) and below == 0 and inside == 1, {
                "eliminated": _poly_witness(p),
                "roots_in(0,0.62432]": below,
                "roots_in(0.62432,0.62433]": inside,
            }

        rec.run("printed degree-8 polynomial", "the eliminated polynomial equals the printed one up to a constant; "
                "its smallest positive root lies in [0.62432, 0.62433]", STURM, x_printed)

    def y_positive():
        p = eliminate_radicals(h)
        ok, witness = _positive_on(p, *interval, h, Fraction(0), ctx)
        witness["y"] = str(y_bound)
        return ok, witness

    rec.run("y function positive", f"h(b, (2/3)b - 1/2, {y_bound}) > 0 for b in [0, 1/2]", STURM, y_positive)

    if y_bound == Y_BOUND:
        def y_printed():
            p = eliminate_radicals(h)
            negative = sturm_count(PRINTED_QUARTIC, None, 0)
            positive = sturm_count(PRINTED_QUARTIC, 0, None)
            inside = sturm_count(PRINTED_QUARTIC, *interval)
            beyond = isolate_roots(PRINTED_QUARTIC, interval[1], None, Fraction(1, 1000))
            ok = (p.is_associate(PRINTED_QUARTIC) and negative == 1 and positive == 1
                  and inside == 0 and len(beyond) == 1)
            return ok, {"eliminated": _poly_witness(p), "negative_roots": negative,
                        "positive_roots": positive, "roots_in(0,1/2]": inside,
                        "positive_root": [float(x) for x in beyond[0]] if beyond else None}

        rec.run("printed quartic", "the eliminated polynomial equals the printed quartic up to a constant; "
                "it has one negative root, one root beyond 1/2 and no root in (0, 1/2]",
                STURM, y_printed)
        deviations.append(QUARTIC_DEVIATION)

    return rec.verdict(f"Position bounds: x < {x_bound} and |y| < {y_bound}", deviations)


# =============================================================================
# TRIANGLE ANGLES
# =============================================================================

TRIANGLE_DEVIATION = (
    "(B + 1/18)/T reaches about 1.1407 on the closed trapezoid at (a, (2/3)a - 1/2); "
    "the bound 1.13 holds on Omega, which lies in {b <= a, t <= -a/2}"
)
RATIO_BOUND = Fraction(113, 100)


def verify_triangle_statement3() -> Verdict:
    """All angles of the convex hull triangle exceed pi/4"""
    rec = _Recorder("triangle")
    ctx = _iv_context()
    a = _omega_a(ctx)
    b_range = (Fraction(0), Fraction(1, 2))
    t_range = (Fraction(-3, 5), Fraction(-1, 6))

    def monotone():
        lowest_db = lowest_dt = None
        db_step = (b_range[1] - b_range[0]) / BOX_GRID
        dt_step = (t_range[1] - t_range[0]) / BOX_GRID
        for i in range(BOX_GRID):
            b = _iv_span(ctx, b_range[0] + i * db_step, b_range[0] + (i + 1) * db_step)
            B = ctx.sqrt(1 + b * b)
            for j in range(BOX_GRID):
                t = _iv_span(ctx, t_range[0] + j * dt_step, t_range[0] + (j + 1) * dt_step)
                T = ctx.sqrt(1 + t * t)
                d_db = b / (B * T)
                d_dt = -(B + ctx.mpf(1) / 18) * t / (T * T * T)
                lowest_db = d_db.a if lowest_db is None or d_db.a < lowest_db else lowest_db
                lowest_dt = d_dt.a if lowest_dt is None or d_dt.a < lowest_dt else lowest_dt
        top = (ctx.mpf(2) / 3) * a - ctx.mpf(1) / 2
        covers = top.b < -ctx.mpf(1) / 6 and a.b < ctx.mpf(1) / 2 and -ctx.sqrt(3).b / 3 > -ctx.mpf(3) / 5
        return lowest_db >= 0 and lowest_dt >= 0 and covers, {
            "boxes": BOX_GRID * BOX_GRID,
            "b_range": [str(x) for x in b_range],
            "t_range": [str(x) for x in t_range],
            "min_dF_db": float(lowest_db),
            "min_dF_dt": float(lowest_dt),
        }

    rec.run("monotonicity of (B + 1/18)/T", "dF/db >= 0 and dF/dt >= 0 on a box cover of the closed trapezoid",
            INTERVAL, monotone)

    def omega_below():
        highest = None
        step = (b_range[1] - b_range[0]) / BOX_GRID
        for i in range(BOX_GRID):
            b = _iv_span(ctx, b_range[0] + i * step, b_range[0] + (i + 1) * step)
            dg = -1 + 4 * b / ctx.sqrt(5 + 4 * b * b + a * a / 4)
            highest = dg.b if highest is None or dg.b > highest else highest
        g_vertex = -a - a / 2 + ctx.sqrt(5 + 4 * a * a + a * a / 4) - ctx.sqrt(3)
        return highest < 0, {"boxes": BOX_GRID, "max_dg_db": float(highest),
                             "g(a, -a/2) - sqrt3": _iv_witness(g_vertex)}

    rec.run("Omega below t = -a/2", "dg/db(b, -a/2) < 0 on [0, a] and g(a, -a/2) = sqrt3, "
            "so every point of Omega has t < -a/2", INTERVAL, omega_below)

    def ratio():
        B = ctx.sqrt(1 + a * a)
        T = ctx.sqrt(1 + a * a / 4)
        value = (B + ctx.mpf(1) / 18) / T
        ok = value.a > ctx.mpf(1128) / 1000 and value.b < ctx.mpf(1130) / 1000
        return ok, {"at": "(a, -a/2)", "value": _iv_witness(value), "bound": str(RATIO_BOUND)}

    rec.run("altitude/base ratio", "(B + 1/18)/T at the right vertex is 1.129... < 1.13", INTERVAL, ratio)

    def base_and_foot():
        base_sq_max = 1 + Fraction(1, 3)
        foot = Fraction(5, 8) + Fraction(1, 8)
        ok = base_sq_max < Fraction(25, 16) and foot <= Fraction(3, 4)
        return ok, {"T^2_max": str(base_sq_max), "base_bound": "5/4", "foot_bound": str(foot)}

    rec.run("base and foot", "T < 5/4 on Omega and the foot of the altitude is within 3/4 of the top "
            "and bottom vertices", EXACT, base_and_foot)

    def top_bottom():
        ratio = Fraction(4, 3)
        return ratio > 1, {"tan_angle": str(ratio), "tan(pi/4)": "1",
                           "atan(4/3)": float(_atan(_mp_context(), ratio))}

    rec.run("top and bottom angles", "atan(4/3) > pi/4, since tan increases on (0, pi/2) and 4/3 > 1",
            EXACT, top_bottom)

    def left():
        u = Fraction(3, 8) / RATIO_BOUND
        v = Fraction(5, 8) / RATIO_BOUND
        # u, v > 0 and uv < 1 keep atan u + atan v inside (0, pi/2)
        tan_sum = (u + v) / (1 - u * v) if u * v < 1 else None
        ok = u > 0 and v > 0 and tan_sum is not None and tan_sum > 1
        mp = _mp_context()
        return ok, {"u": str(u), "v": str(v), "uv": str(u * v),
                    "tan_of_sum": str(tan_sum), "angle_sum": float(_atan(mp, u) + _atan(mp, v))}

    rec.run("left angle", "atan((3/8)/1.13) + atan((5/8)/1.13) > pi/4, as (u + v)/(1 - uv) > 1 with uv < 1",
            EXACT, left)

    return rec.verdict("Hull triangle: angles exceed pi/4", [TRIANGLE_DEVIATION])


# =============================================================================
# PITCH CONSTANT
# =============================================================================

PITCH_FLAG = (
    "the upper bound on l_1 is read as l_1 = 2*lambda - l_2 <= 2*sqrt3 - (sqrt3 - 1/24); "
    "the aspect lower bound bounds l_2 from below"
)


def verify_pitch_constant(aspect_bound: Optional[Scalar] = None) -> Verdict:
    """
    2*theta < l_1 - pi/2 < sqrt3 + 1/24 - pi/2 < pi/15, hence theta < pi/30

    Args:
        aspect_bound: Exact upper bound for lambda; defaults to sqrt3
    """
    rec = _Recorder("pitch")
    bound = SQRT3 if aspect_bound is None else Scalar.of(aspect_bound)
    excess = bound - SQRT3
    minimum = 128
    if not excess.is_zero():
        # keep the excess visible in the enclosure
        magnitude = max(abs(excess.p), abs(excess.q))
        minimum = max(128, magnitude.denominator.bit_length() - magnitude.numerator.bit_length() + 64)
    ctx = _iv_context(minimum)

    ell1_upper = 2 * bound - ASPECT_WORST_CASE

    def ell1():
        ok = excess.sign() >= 0
        if excess.is_zero():
            ok = ok and ell1_upper == SQRT3 + Fraction(1, 24)
        return ok, {"lambda_bound": str(bound), "l2_lower": str(ASPECT_WORST_CASE),
                    "l1_upper": str(ell1_upper)}

    rec.run("upper bound on l_1", "l_1 = 2*lambda - l_2 < 2*bound - (sqrt3 - 1/24)", EXACT, ell1)

    two_theta = ell1_upper.to_mpf(ctx) - ctx.pi / 2
    limit = ctx.pi / 15

    def chain():
        margin = limit - two_theta
        ok = margin.a > Scalar(PITCH_MARGIN).to_mpf(ctx).b
        return ok, {"2theta_upper": _iv_witness(two_theta), "pi/15": _iv_witness(limit),
                    "margin": _iv_witness(margin), "required_margin": str(PITCH_MARGIN),
                    "precision_bits": ctx.prec}

    rec.run("pitch chain", "l_1 >= pi/2 + 2theta gives 2theta < sqrt3 + 1/24 - pi/2 < pi/15", INTERVAL, chain)

    def theta():
        upper = two_theta / 2
        cap = ctx.pi / 30
        return upper.b < cap.a, {"theta_upper": _iv_witness(upper), "pi/30": _iv_witness(cap)}

    rec.run("theta bound", "theta < pi/30", INTERVAL, theta)

    return rec.verdict("Pitch constant: theta < pi/30", [PITCH_FLAG])


# =============================================================================
# REGISTRY
# =============================================================================

CERTIFICATES: Dict[str, Callable[[], Verdict]] = {
    "slope": verify_slope_theorem,
    "aspect": verify_aspect_statement1,
    "xy": verify_xy_bounds,
    "triangle": verify_triangle_statement3,
    "pitch": verify_pitch_constant,
}


def get_certificate(name: str) -> Callable[[], Verdict]:
    try:
        return CERTIFICATES[name]
    except KeyError:
        raise UnknownCertificate(f"unknown certificate {name!r}; choose from {', '.join(CERTIFICATES)} or all")


def run_certificate(name: str, monitor: Optional[CertificateMonitor] = None) -> Verdict:
    """Run one registered certificate, timing it when a monitor is given"""
    fn = get_certificate(name)
    if monitor is None:
        return fn()
    with monitor.timed(name) as outcome:
        verdict = fn()
        outcome['passed'] = verdict.passed
    return verdict


def run_all(names: Optional[Sequence[str]] = None, parallel: bool = True,
            monitor: Optional[CertificateMonitor] = None) -> List[Verdict]:
    """
    Run several certificates, in registry order

    Args:
        names: Certificate ids; all registered ids by default
        parallel: Run in a thread pool
        monitor: Optional run statistics sink

    Returns:
        Verdicts in the order of ``names``
    """
    names = list(CERTIFICATES) if names is None else list(names)
    for name in names:
        get_certificate(name)
    start = time.perf_counter()
    if parallel and len(names) > 1:
        with ThreadPoolExecutor(max_workers=len(names)) as pool:
            verdicts = list(pool.map(lambda n: run_certificate(n, monitor), names))
    else:
        verdicts = [run_certificate(n, monitor) for n in names]
    logger.info("ran %d certificates in %.2fs", len(verdicts), time.perf_counter() - start)
    return verdicts
