"""
Explicit Special Band
=====================

Flat layout of a width-1 strip from five parameters (a, b, c, d, e), its
half-turn completion, the (d, e) solve and the folded band with every crease
equal to pi.

Layout conventions (lower half, lines 1-5 as bends (left, right)):

    line 1: (0, a)        line 2: (0, a + b)      line 3: (c, a + b)
    line 4: (c, a + b + d)                        line 5: (L, a + b + d)

with L = a + b + d + e. The upper half is the image of the lower half under
the half-turn about the strip center, so lambda = (a + b + d + e) + (b + d).
Folding flat reflects facet k in the lines 2..k, so the image of line 5 in
the frame of facet 1 is M1 = R2 R3 R4 (L5). (d, e) are fixed by requiring
that the reflection R1 in line 1 swaps the endpoints of M1, i.e. M1 is
perpendicular to line 1 and its midpoint lies on line 1.

The chart bottom (line 1) has slope a, so the glued boundary has a corner of
angle 2*atan(a) where the top bend meets the bottom bend.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from utils.band import (
    FlatBand,
    ImmersedBand,
    build_immersed,
    find_t_patterns,
    normalize,
    pitch_backtrack,
    pitch_profile,
    theorem41_properties,
    zero_slope_bends,
)
from utils.errors import InvalidLayout, NoConvergence
from utils.settings import Tolerances
from utils.slope_domain import omega_contains, omegahat_contains

logger = logging.getLogger(__name__)

DEFAULT_ABC = (Fraction(5, 27), Fraction(18, 53), Fraction(33, 128))
SEED = (Fraction(1, 5), Fraction(2, 5))
WORKING_BITS = 128
RESIDUAL_TOL = mpmath.mpf("1e-28")
MAX_ITERATIONS = 200
INTERVAL_WIDTH = mpmath.mpf("1e-30")

Number = Union[int, Fraction, str, float, "mpmath.mpf"]
Point = Tuple[object, object]


def _mp(value: Number):
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


# =============================================================================
# LAYOUT
# =============================================================================

@dataclass(frozen=True)
class FoldParams:
    a: object
    b: object
    c: object
    d: object
    e: object

    @property
    def lam(self):
        a, b, c, d, e = self.as_mp()
        return (a + b + d + e) + (b + d)

    def as_mp(self) -> Tuple:
        return tuple(_mp(v) for v in (self.a, self.b, self.c, self.d, self.e))


@dataclass(frozen=True)
class FoldLayout:
    """Lines 1-5 as flat segments plus the full bend list of the strip"""
    params: FoldParams
    lines: Dict[int, Tuple[Point, Point]]
    bends: Tuple[Tuple[object, object], ...]
    lam: object

    def half_turn_residual(self):
        """Distance between the bend list and its image under the half-turn"""
        H = self.bends[0][0] + self.bends[-1][1]
        image = [(H - r, H - l) for l, r in reversed(self.bends)]
        return max(max(abs(l - il), abs(r - ir)) for (l, r), (il, ir) in zip(self.bends, image))

    @property
    def boundary_corner(self) -> float:
        """Corner angle of the glued boundary where the top bend meets the bottom"""
        return 2 * math.atan(float(self.params.as_mp()[0]))


def layout(params: FoldParams) -> FoldLayout:
    """
    Fold lines of the strip

    Raises:
        InvalidLayout: if a parameter is not positive or line 5 would cross
            line 3 inside the strip
    """
    a, b, c, d, e = params.as_mp()
    for name, value in zip("abcde", (a, b, c, d, e)):
        if value <= 0:
            raise InvalidLayout(f"parameter {name} = {mpmath.nstr(value, 8)} must be positive")
    L = a + b + d + e
    if L <= c:
        raise InvalidLayout(f"a + b + d + e = {mpmath.nstr(L, 8)} must exceed c = {mpmath.nstr(c, 8)}")
    H = L + a + b + d
    lower = [(0, a), (0, a + b), (c, a + b), (c, a + b + d), (L, a + b + d)]
    upper = [(L, H - c), (H - a - b, H - c), (H - a - b, H), (H - a, H)]
    bends = tuple((mpmath.mpf(l), mpmath.mpf(r)) for l, r in lower + upper)
    lines = {k + 1: ((mpmath.mpf(0), l), (mpmath.mpf(1), r)) for k, (l, r) in enumerate(bends[:5])}
    return FoldLayout(params, lines, bends, H - a)


def band_from_params(params: FoldParams) -> FlatBand:
    fold = layout(params)
    return FlatBand(fold.lam, fold.bends)


# =============================================================================
# REFLECTIONS
# =============================================================================

@dataclass(frozen=True)
class Reflection:
    """Reflection of the plane in the line through p and q"""
    p: Point
    q: Point

    def __call__(self, z: Point) -> Point:
        px, py = self.p
        ux, uy = self.q[0] - px, self.q[1] - py
        n2 = ux * ux + uy * uy
        wx, wy = z[0] - px, z[1] - py
        k = 2 * (wx * ux + wy * uy) / n2
        return px + k * ux - wx, py + k * uy - wy

    def segment(self, seg: Tuple[Point, Point]) -> Tuple[Point, Point]:
        return self(seg[0]), self(seg[1])


def reflection(p: Point, q: Point) -> Reflection:
    return Reflection(p, q)


def compose(*maps: Reflection):
    """compose(R2, R3, R4)(z) = R2(R3(R4(z)))"""
    def apply(z: Point) -> Point:
        for m in reversed(maps):
            z = m(z)
        return z
    return apply


def m1_image(fold: FoldLayout) -> Tuple[Point, Point]:
    """Image of line 5 in the frame of facet 1"""
    r2, r3, r4 = (reflection(*fold.lines[k]) for k in (2, 3, 4))
    chain = compose(r2, r3, r4)
    return chain(fold.lines[5][0]), chain(fold.lines[5][1])


def swap_residual(fold: FoldLayout) -> Tuple[object, object]:
    """(R1(M11) - M12, R1(M12) - M11) as vectors"""
    m11, m12 = m1_image(fold)
    r1 = reflection(*fold.lines[1])
    a, b = r1(m11), r1(m12)
    return (a[0] - m12[0], a[1] - m12[1]), (b[0] - m11[0], b[1] - m11[1])


def midpoint_offset(fold: FoldLayout) -> Tuple[float, float]:
    """Midpoint of M1 relative to the right end of line 1"""
    m11, m12 = m1_image(fold)
    right = fold.lines[1][1]
    return float((m11[0] + m12[0]) / 2 - right[0]), float((m11[1] + m12[1]) / 2 - right[1])


# =============================================================================
# SOLVE
# =============================================================================

@dataclass(frozen=True)
class DESolution:
    d: object
    e: object
    residual: object
    iterations: int
    jacobian: List[List[float]]
    condition: float
    bits: int

    def interval(self, value, width=INTERVAL_WIDTH) -> Tuple[str, str]:
        return (mpmath.nstr(value - width / 2, 40), mpmath.nstr(value + width / 2, 40))


def solve_de(a: Number, b: Number, c: Number, seed: Sequence[Number] = SEED,
             bits: int = WORKING_BITS, max_iterations: int = MAX_ITERATIONS) -> DESolution:
    """
    Solve for (d, e) so that R1 swaps the endpoints of M1

    Damped Newton on R1(M11) - M12 with an mpmath.diff Jacobian; a step is
    halved until the residual norm decreases.

    Raises:
        NoConvergence: if the residual is not below 1e-28 after
            max_iterations steps
    """
    bits = max(bits, WORKING_BITS, mpmath.mp.prec)
    with mpmath.workprec(bits):
        a, b, c = _mp(a), _mp(b), _mp(c)

        def residual(d, e):
            if d <= 0 or e <= 0:
                return None
            fold = layout(FoldParams(a, b, c, d, e))
            return swap_residual(fold)[0]

        def component(k):
            return lambda d, e: residual(d, e)[k]

        def jacobian(d, e):
            return mpmath.matrix([[mpmath.diff(component(k), (d, e), order) for order in ((1, 0), (0, 1))]
                                  for k in (0, 1)])

        x = mpmath.matrix([_mp(seed[0]), _mp(seed[1])])
        r = mpmath.matrix(residual(x[0], x[1]))
        norm = mpmath.norm(r)
        polish = mpmath.mpf(2) ** (-(bits - 16))
        iterations = 0
        polished = 0
        while True:
            if iterations >= max_iterations:
                raise NoConvergence(norm, iterations)
            iterations += 1
            step = mpmath.lu_solve(jacobian(x[0], x[1]), -r)
            t = mpmath.mpf(1)
            while True:
                trial = x + t * step
                value = residual(trial[0], trial[1])
                if value is not None:
                    trial_norm = mpmath.norm(mpmath.matrix(value))
                    if trial_norm < norm or trial_norm == 0 or t < mpmath.mpf("1e-6"):
                        break
                t /= 2
                if t < mpmath.mpf("1e-12"):
                    raise NoConvergence(norm, iterations)
            x, r, norm = trial, mpmath.matrix(value), trial_norm
            logger.debug("Newton step %d: residual %s", iterations, mpmath.nstr(norm, 5))
            if norm < RESIDUAL_TOL:
                polished += 1
                if mpmath.norm(t * step) < polish or polished > 2:
                    break

        J = jacobian(x[0], x[1])
        Jf = np.array([[float(J[i, j]) for j in range(2)] for i in range(2)])
        condition = float(np.linalg.cond(Jf))
        logger.info("solved (d, e) in %d Newton steps, residual %s", iterations, mpmath.nstr(norm, 5))
        return DESolution(+x[0], +x[1], norm, iterations, Jf.tolist(), condition, bits)


# =============================================================================
# THE FOLDED BAND
# =============================================================================

@dataclass
class SimReport:
    params: Dict[str, str]
    lam: float
    lam_minus_sqrt3: float
    residual: float
    iterations: int
    d_interval: Tuple[str, str]
    e_interval: Tuple[str, str]
    jacobian_condition: float
    closure_residual: float
    boundary_corner: float
    midpoint_offset: Tuple[float, float]
    normalized_xy: Tuple[float, float]
    m1_right_of_l1: bool
    slopes: Tuple[float, float]
    in_omega: bool
    in_omegahat: bool
    pattern: Dict = field(default_factory=dict)
    normalization: Dict = field(default_factory=dict)
    properties: Dict = field(default_factory=dict)
    pitch_backtrack: Optional[float] = None
    zero_slope_bends: List[Dict] = field(default_factory=list)
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def to_dict(self) -> Dict:
        data = dict(self.__dict__)
        data["passed"] = self.passed
        return data


def build_sim(abc: Sequence[Number] = DEFAULT_ABC, bits: int = WORKING_BITS) -> Tuple[ImmersedBand, SimReport]:
    """
    Solve, fold with every crease pi and validate the band

    Returns:
        (band, report)
    """
    a, b, c = abc
    solution = solve_de(a, b, c, bits=bits)
    with mpmath.workprec(solution.bits):
        params = FoldParams(a, b, c, solution.d, solution.e)
        fold = layout(params)
        flat = FlatBand(fold.lam, fold.bends)
        lam_minus = float(fold.lam - mpmath.sqrt(3))
        offset = midpoint_offset(fold)
    band = build_immersed(flat, [mpmath.pi] * (flat.n_facets - 1))

    patterns = find_t_patterns(band)
    if not patterns:
        raise InvalidLayout("the folded band has no T-pattern")
    norm = normalize(band, patterns[0])
    properties = theorem41_properties(norm)
    backtrack = max(pitch_backtrack(pitch_profile(norm, j)) for j in (1, 2))
    zeros = zero_slope_bends(norm)

    checks = {
        "residual below 1e-28": solution.residual < RESIDUAL_TOL,
        "lambda < sqrt 3": lam_minus < 0,
        "closure": band.closure_residual <= Tolerances.CLOSE,
        "M1 right of line 1": norm.x > 0,
        "slopes in Omega_hat": omegahat_contains(norm.slopes()),
        "pitch backtrack < pi/30": backtrack < math.pi / 30,
        "zero-slope bend in each trapezoid": {z["trapezoid"] for z in zeros} == {1, 2},
    }
    for name in ("S1 bound", "S2 bound", "x < 1/18", "|y| < 1/30", "hull angles > pi/4"):
        checks[name] = bool(properties[name])

    report = SimReport(
        params={k: mpmath.nstr(_mp(v), 40) for k, v in zip("abcde", (a, b, c, solution.d, solution.e))},
        lam=float(fold.lam),
        lam_minus_sqrt3=lam_minus,
        residual=float(solution.residual),
        iterations=solution.iterations,
        d_interval=solution.interval(solution.d),
        e_interval=solution.interval(solution.e),
        jacobian_condition=solution.condition,
        closure_residual=band.closure_residual,
        boundary_corner=fold.boundary_corner,
        midpoint_offset=offset,
        normalized_xy=(norm.x, norm.y),
        m1_right_of_l1=norm.x > 0,
        slopes=(norm.b, norm.t),
        in_omega=omega_contains(norm.slopes()),
        in_omegahat=omegahat_contains(norm.slopes()),
        pattern=patterns[0].as_dict(),
        normalization=norm.as_dict(),
        properties=properties,
        pitch_backtrack=backtrack,
        zero_slope_bends=zeros,
        checks=checks,
    )
    logger.info("explicit band: lambda - sqrt3 = %.7f, passed = %s", lam_minus, report.passed)
    return band, report
