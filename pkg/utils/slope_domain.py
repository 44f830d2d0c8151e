"""
Slope Domain
============

The constraint functions on slope pairs (b, t) of the special bends:

    B = sqrt(1 + b^2),  T = sqrt(1 + t^2)
    f(b, t) = b - t + T
    g(b, t) = -b + t + sqrt(4B^2 + T^2)
    phi = max(f, g)
    psi(b, t) = (2 + b^2 + t^2 + bT - tT) / (b - t + T)
    psi_hat(b, t) = psi(b, t) + b(1 - 2b)/3 - sqrt(3)

the open region Omega = {phi < sqrt 3}, its enlargement Omega_eps and the
closed trapezoid Omega_hat bounded by b = 0, b = a and the lines
t = (2/3)b - 1/sqrt3, t = (2/3)b - 1/2, t = (4/3)b - 1/sqrt3.

Three evaluation modes are offered: "float" (Python floats, computed at the
mpmath working precision), "mp" (mpmath values) and "exact" (RadicalExpr
values over Q(sqrt 3) for Scalar inputs).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple, Union

import mpmath
import numpy as np

from utils.algebra import (
    RadicalExpr,
    Scalar,
    SQRT3,
    const,
    sqrt,
    var,
)
from utils.errors import NotReducible, PsiPole

logger = logging.getLogger(__name__)

Real = Union[int, float, Fraction, Scalar, "mpmath.mpf"]

# the closed-trapezoid lines, exact
LOWER_LINE = (Fraction(2, 3), Scalar(0, Fraction(-1, 3)))       # t = (2/3)b - 1/sqrt3
UPPER_LINE = (Fraction(2, 3), Scalar(Fraction(-1, 2)))          # t = (2/3)b - 1/2
STEEP_LINE = (Fraction(4, 3), Scalar(0, Fraction(-1, 3)))       # t = (4/3)b - 1/sqrt3

VERTEX = (Scalar(0), Scalar(0, Fraction(-1, 3)))                 # (0, -1/sqrt3)

THIRD_LINE_DEVIATION = (
    "third boundary line printed as t=(4/3)t-(1/sqrt3); read as t=(4/3)b-1/sqrt3, "
    "the line through the vertex (0,-1/sqrt3) tangent to the g-boundary"
)
DG_DT_NOTE = (
    "printed dg/dt = 1 + t/(5+5b^2+t^2); implemented derivative of g is "
    "1 + t/sqrt(5+4b^2+t^2)"
)


def omega_a(ctx=mpmath.mp):
    """Right end a = (sqrt27 - sqrt11)/4 of the trapezoid"""
    return (ctx.sqrt(27) - ctx.sqrt(11)) / 4


OMEGA_A = float(omega_a())


def omega_vertices() -> Dict[str, Tuple[float, float]]:
    """The two points where the f- and g-boundaries meet"""
    a = omega_a()
    return {
        "left": (0.0, float(-1 / mpmath.sqrt(3))),
        "right": (float(a), float(-a / 2)),
    }


def b_at_most_a(b: Scalar) -> bool:
    """Exact test b <= (3 sqrt3 - sqrt11)/4, i.e. 3sqrt3 - 4b >= sqrt11"""
    rest = 3 * SQRT3 - 4 * b
    return rest.sign() >= 0 and (rest * rest - 11).sign() >= 0


# =============================================================================
# SLOPE PAIRS
# =============================================================================

def _exact(value: Real) -> Scalar:
    """Exact Scalar of an int, Fraction, float or Scalar"""
    if isinstance(value, Scalar):
        return value
    if isinstance(value, float):
        return Scalar(Fraction(value))
    if isinstance(value, (int, Fraction)):
        return Scalar(Fraction(value))
    man, exp = mpmath.mpf(value).man_exp
    return Scalar(Fraction(int(man)) * Fraction(2) ** int(exp))


def _mp(value: Real):
    if isinstance(value, Scalar):
        return value.to_mpf()
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


@dataclass(frozen=True)
class SlopePair:
    """Slopes (b, t) of the special bends"""
    b: Real
    t: Real

    @property
    def B(self):
        return mpmath.sqrt(1 + _mp(self.b) ** 2)

    @property
    def T(self):
        return mpmath.sqrt(1 + _mp(self.t) ** 2)

    def exact(self) -> Tuple[Scalar, Scalar]:
        return _exact(self.b), _exact(self.t)

    def as_floats(self) -> Tuple[float, float]:
        return float(_mp(self.b)), float(_mp(self.t))


@dataclass(frozen=True)
class ConstraintValues:
    """Closed-form constraint quantities at one slope pair"""
    B: object
    T: object
    f: object
    g: object
    phi: object
    psi: object


# =============================================================================
# EXPRESSIONS
# =============================================================================

def constraint_exprs() -> Dict[str, RadicalExpr]:
    """RadicalExpr forms of B, T, f, g, psi and psi_hat in variables b, t"""
    b, t = var("b"), var("t")
    B = sqrt(1 + b * b)
    T = sqrt(1 + t * t)
    f = b - t + T
    g = -b + t + sqrt(4 * (1 + b * b) + (1 + t * t))
    psi = (2 + b * b + t * t + b * T - t * T) / (b - t + T)
    psi_hat = psi + b * (1 - 2 * b) / 3 - const(SQRT3)
    return {"B": B, "T": T, "f": f, "g": g, "psi": psi, "psi_hat": psi_hat}


def _at(expr: RadicalExpr, b: Scalar, t: Scalar) -> RadicalExpr:
    return expr.substitute({"b": const(b), "t": const(t)})


def _compare(expr: RadicalExpr) -> int:
    """
    Sign of a variable-free expression

    A numeric evaluation at 128 bits or more decides unless the value is below
    the noise floor; then exact evaluation is attempted, and equality is
    assumed if the expression is not exactly evaluable.
    """
    with mpmath.workprec(max(mpmath.mp.prec, 128)):
        value = expr.evaluate({})
        noise = mpmath.mpf(2) ** (-(mpmath.mp.prec // 2 + 32))
        if abs(value) > noise:
            return 1 if value > 0 else -1
    try:
        return expr.evaluate_exact({}).sign()
    except NotReducible:
        return 0


def eval_constraints(s: SlopePair, mode: str = "float") -> ConstraintValues:
    """
    Evaluate B, T, f, g, phi and psi at a slope pair

    Args:
        s: Slope pair
        mode: "float", "mp" or "exact" (exact needs Scalar-convertible inputs
            and returns RadicalExpr values)

    Returns:
        ConstraintValues
    """
    exprs = constraint_exprs()
    if mode == "exact":
        b, t = s.exact()
        values = {name: _at(expr, b, t) for name, expr in exprs.items()}
        pole_expr = const(b - t) + values["T"]
        if _compare(pole_expr) == 0:
            raise PsiPole(f"b - t + T vanishes at ({b}, {t})")
        diff = values["f"] - values["g"]
        phi = values["f"] if _compare(diff) >= 0 else values["g"]
        return ConstraintValues(values["B"], values["T"], values["f"], values["g"], phi, values["psi"])

    b, t = _mp(s.b), _mp(s.t)
    B = mpmath.sqrt(1 + b * b)
    T = mpmath.sqrt(1 + t * t)
    f = b - t + T
    g = -b + t + mpmath.sqrt(4 * B * B + T * T)
    den = b - t + T
    if den == 0:
        raise PsiPole(f"b - t + T vanishes at ({s.b}, {s.t})")
    psi = (2 + b * b + t * t + b * T - t * T) / den
    phi = max(f, g)
    if mode == "mp":
        return ConstraintValues(B, T, f, g, phi, psi)
    return ConstraintValues(*(float(v) for v in (B, T, f, g, phi, psi)))


def psi_hat(s: SlopePair) -> float:
    values = eval_constraints(s, mode="mp")
    b = _mp(s.b)
    return float(values.psi + b * (1 - 2 * b) / 3 - mpmath.sqrt(3))


def aspect_lower_bound(b: Real, mode: str = "float"):
    """
    Pointwise lower bound sqrt3 - b(1-2b)/3 on S_j; worst case sqrt3 - 1/24

    Args:
        b: Slope of the bottom special bend
        mode: "float" or "exact"
    """
    if mode == "exact":
        b = _exact(b)
        return SQRT3 - b * (1 - 2 * b) / 3
    b = _mp(b)
    return float(mpmath.sqrt(3) - b * (1 - 2 * b) / 3)


ASPECT_WORST_CASE = SQRT3 - Fraction(1, 24)


def constraint_bounds(s: SlopePair, S: Real) -> Dict[str, float]:
    """
    Averaged constraints 2R >= T and L >= sqrt(B^2 + T^2/4)

    With L = (S + b - t)/2 and R = (S - b + t)/2 these read S >= g and S >= f.
    """
    b, t, S = _mp(s.b), _mp(s.t), _mp(S)
    B, T = s.B, s.T
    L = (S + b - t) / 2
    R = (S - b + t) / 2
    values = eval_constraints(s, mode="mp")
    return {
        "L": float(L),
        "R": float(R),
        "2R - T": float(2 * R - T),
        "L - sqrt(B^2+T^2/4)": float(L - mpmath.sqrt(B * B + T * T / 4)),
        "S - f": float(S - values.f),
        "S - g": float(S - values.g),
    }


# =============================================================================
# DERIVATIVES
# =============================================================================

def df_dt(b: float, t: float) -> float:
    return -1.0 + t / np.sqrt(1.0 + t * t)


def dg_dt(b: float, t: float) -> float:
    return 1.0 + t / np.sqrt(5.0 + 4.0 * b * b + t * t)


def phi_array(b: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Vectorized phi for sampling and plotting"""
    b = np.asarray(b, dtype=float)
    t = np.asarray(t, dtype=float)
    T = np.sqrt(1.0 + t * t)
    f = b - t + T
    g = -b + t + np.sqrt(4.0 * (1.0 + b * b) + T * T)
    return np.maximum(f, g)


# =============================================================================
# MEMBERSHIP
# =============================================================================

def omega_contains(s: SlopePair, eps: Real = 0) -> bool:
    """
    True iff phi(b, t) < sqrt3 + eps

    Inputs are taken exactly (floats as their binary rationals), so the decision
    does not depend on float rounding of phi.
    """
    b, t = s.exact()
    eps_exact = _exact(eps)
    if eps_exact.sign() < 0:
        raise ValueError("eps must be nonnegative")
    exprs = constraint_exprs()
    bound = const(SQRT3 + eps_exact)
    for name in ("f", "g"):
        diff = _at(exprs[name], b, t) - bound
        if _compare(diff) >= 0:
            return False
    return True


def omegahat_contains(s: SlopePair, tol: Real = 0) -> bool:
    """
    Membership in the closed trapezoid Omega_hat

    Args:
        s: Slope pair (floats are taken as exact binary rationals)
        tol: Nonnegative slack applied to every inequality

    Returns:
        True if 0 <= b <= a and the three line inequalities hold
    """
    b, t = s.exact()
    tol = _exact(tol)

    def line(spec):
        slope, intercept = spec
        return b * slope + intercept

    checks = [
        (b + tol).sign() >= 0,
        b_at_most_a(b - tol),
        (t - line(LOWER_LINE) + tol).sign() >= 0,
        (line(UPPER_LINE) - t + tol).sign() >= 0,
        (line(STEEP_LINE) - t + tol).sign() >= 0,
    ]
    return all(checks)


def slopes_in_omega_eps(b: Real, t: Real, eps: Real) -> bool:
    return omega_contains(SlopePair(b, t), eps)


# =============================================================================
# BOUNDARY SAMPLING
# =============================================================================

BOUNDARY_GRID = 128
BOUNDARY_WIDENINGS = 12


def _bisect(fn, lo, hi, iterations: int):
    """Bisection for a sign change of fn on [lo, hi]"""
    f_lo = fn(lo)
    for _ in range(iterations):
        mid = (lo + hi) / 2
        f_mid = fn(mid)
        if f_mid == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return (lo + hi) / 2


def _bracket(fn):
    """Symmetric interval [-w, w] over which fn changes sign"""
    width = mpmath.mpf(1)
    while (fn(-width) > 0) == (fn(width) > 0):
        width *= 2
        if width > 2 ** 20:
            raise ValueError("boundary point not bracketed")
    return -width, width


def _t_on_f_boundary(b, level, iterations):
    # f decreases in t
    def fn(t):
        return b - t + mpmath.sqrt(1 + t * t) - level
    return _bisect(fn, *_bracket(fn), iterations)


def _t_on_g_boundary(b, level, iterations):
    # g increases in t
    def fn(t):
        return -b + t + mpmath.sqrt(5 + 4 * b * b + t * t) - level
    return _bisect(fn, *_bracket(fn), iterations)


def _gap(b, level):
    """t_f(b) - t_g(b) from the closed forms of the two boundary graphs"""
    c = level - b
    d = level + b
    return (1 - c * c) / (2 * c) - (d * d - 5 - 4 * b * b) / (2 * d)


def _outside_gap(b, level):
    """_gap, or 1 where one of the boundary graphs does not exist"""
    if level - b <= 0 or level + b <= 0:
        return mpmath.mpf(1)
    return _gap(b, level)


def _b_range(level, iterations):
    """Interval of b where the f-boundary lies below the g-boundary"""
    spans = [mpmath.mpf(b) for b, _ in omega_vertices().values()]
    lo, hi = min(spans), max(spans)
    pad = (hi - lo) / 4 + (level - mpmath.sqrt(3))
    for _ in range(BOUNDARY_WIDENINGS):
        grid = mpmath.linspace(lo - pad, hi + pad, BOUNDARY_GRID + 1)
        inside = [k for k, b in enumerate(grid) if _outside_gap(b, level) < 0]
        if not inside:
            raise ValueError("empty slope region")
        if inside[0] > 0 and inside[-1] < BOUNDARY_GRID:
            break
        pad *= 2
    else:
        raise ValueError(f"slope region does not close within b in [{lo - pad}, {hi + pad}]")
    first, last = inside[0], inside[-1]
    left = _bisect(lambda b: _outside_gap(b, level), grid[first - 1], grid[first], iterations)
    right = _bisect(lambda b: _outside_gap(b, level), grid[last], grid[last + 1], iterations)
    return left, right


def sample_omega_boundary(n: int, eps: Real = 0) -> List[Tuple[float, float]]:
    """
    Closed polyline approximating the boundary {phi = sqrt3 + eps}

    Points come from bisection along vertical lines b = const at the mpmath
    working precision (at least 128 bits): the lower arc lies on f = level,
    the upper arc on g = level.

    Args:
        n: Number of points, at least 8
        eps: Nonnegative enlargement

    Returns:
        List of (b, t) float pairs, lower arc left to right then upper arc
        right to left; the first point is repeated at the end.
    """
    if n < 8:
        raise ValueError("n must be at least 8")
    with mpmath.workprec(max(mpmath.mp.prec, 128)):
        level = mpmath.sqrt(3) + _mp(eps)
        iterations = mpmath.mp.prec + 8
        left, right = _b_range(level, iterations)
        per_arc = n // 2 + 1
        bs = [left + (right - left) * k / (per_arc - 1) for k in range(per_arc)]
        lower = [(b, _t_on_f_boundary(b, level, iterations)) for b in bs]
        upper = [(b, _t_on_g_boundary(b, level, iterations)) for b in reversed(bs[1:-1])]
        points = lower + upper
        points.append(points[0])
        logger.debug("sampled %d boundary points for eps=%s on b in [%s, %s]",
                     len(points), eps, mpmath.nstr(left, 12), mpmath.nstr(right, 12))
        return [(float(b), float(t)) for b, t in points]
