"""
Exact Algebra over Q(sqrt 3)
============================

Exact arithmetic for the certificates:

- Scalar: elements p + q*sqrt(3) of the quadratic field Q(sqrt 3)
- Poly: univariate polynomials with Scalar coefficients
- BiPoly: polynomials in the slope variables (b, t)
- RadicalExpr: expression trees built from constants, variables, sums,
  products, reciprocals and square roots
- sturm_count / isolate_roots: exact real root counting and isolation
- eliminate_radicals: iterated A + B*sqrt(C) -> A^2 - B^2*C elimination

All values are immutable. Every function is pure; the optional ``evidence``
list arguments collect log records describing what was done.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import mpmath

from utils.errors import NotReducible, ZeroPolynomial

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, "Scalar"]

# rational upper bound for sqrt(3), used for magnitude bounds
SQRT3_UPPER = Fraction(7, 4)
MAX_RADICALS = 12


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None"""
    if x < 0:
        return None
    num, den = x.numerator, x.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


# =============================================================================
# SCALARS
# =============================================================================

@total_ordering
@dataclass(frozen=True)
class Scalar:
    """Exact element p + q*sqrt(3) of Q(sqrt 3)"""
    p: Fraction = Fraction(0)
    q: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "q", Fraction(self.q))

    @classmethod
    def of(cls, value: Number) -> "Scalar":
        """Coerce an int, Fraction or Scalar"""
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value), Fraction(0))
        raise TypeError(f"cannot convert {type(value).__name__} to Scalar exactly")

    # -- field operations ---------------------------------------------------

    def __add__(self, other):
        try:
            o = Scalar.of(other)
        except TypeError:
            return NotImplemented
        return Scalar(self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.p, -self.q)

    def __sub__(self, other):
        try:
            o = Scalar.of(other)
        except TypeError:
            return NotImplemented
        return Scalar(self.p - o.p, self.q - o.q)

    def __rsub__(self, other):
        return Scalar.of(other) - self

    def __mul__(self, other):
        try:
            o = Scalar.of(other)
        except TypeError:
            return NotImplemented
        return Scalar(self.p * o.p + 3 * self.q * o.q, self.p * o.q + self.q * o.p)

    __rmul__ = __mul__

    def conjugate(self) -> "Scalar":
        return Scalar(self.p, -self.q)

    def norm(self) -> Fraction:
        """Field norm p^2 - 3q^2"""
        return self.p * self.p - 3 * self.q * self.q

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero Scalar")
        n = self.norm()
        return Scalar(self.p / n, -self.q / n)

    def __truediv__(self, other):
        try:
            o = Scalar.of(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return Scalar.of(other) * self.inverse()

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = Scalar(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- order --------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    def sign(self) -> int:
        """Exact sign, decided by comparing p^2 with 3q^2"""
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        return sp if self.p * self.p > 3 * self.q * self.q else sq

    def __eq__(self, other):
        try:
            o = Scalar.of(other)
        except TypeError:
            return NotImplemented
        return self.p == o.p and self.q == o.q

    def __hash__(self):
        return hash((self.p, self.q))

    def __lt__(self, other):
        return (self - Scalar.of(other)).sign() < 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def magnitude_bound(self) -> Fraction:
        """Rational upper bound for |self|"""
        return abs(self.p) + abs(self.q) * SQRT3_UPPER

    # -- conversions --------------------------------------------------------

    def is_rational(self) -> bool:
        return self.q == 0

    def sqrt(self) -> Optional["Scalar"]:
        """Exact nonnegative square root inside Q(sqrt 3), or None"""
        s = self.sign()
        if s < 0:
            return None
        if s == 0:
            return Scalar(0)
        if self.q == 0:
            r = _rational_sqrt(self.p)
            if r is not None:
                return Scalar(r)
            v = _rational_sqrt(self.p / 3)
            return Scalar(0, v) if v is not None else None
        # (u + v sqrt3)^2 = p + q sqrt3  <=>  u^2 + 3v^2 = p, 2uv = q
        disc = _rational_sqrt(self.norm())
        if disc is None:
            return None
        for u2 in ((self.p + disc) / 2, (self.p - disc) / 2):
            u = _rational_sqrt(u2)
            if u:
                root = Scalar(u, self.q / (2 * u))
                return root if root.sign() >= 0 else -root
        return None

    def to_mpf(self, ctx=mpmath.mp):
        """Value in an mpmath context (mp or iv)"""
        def conv(x: Fraction):
            return ctx.mpf(x.numerator) / ctx.mpf(x.denominator)
        value = conv(self.p)
        if self.q:
            value = value + conv(self.q) * ctx.sqrt(3)
        return value

    def __float__(self):
        return float(self.to_mpf())

    def __repr__(self):
        return f"Scalar({self.p}, {self.q})"

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        if self.p == 0:
            return f"{self.q}*sqrt3"
        sign = "+" if self.q > 0 else "-"
        return f"{self.p} {sign} {abs(self.q)}*sqrt3"


SQRT3 = Scalar(0, 1)
ZERO = Scalar(0)
ONE = Scalar(1)


def scalar_sign(x: Number) -> int:
    """Exact sign of p + q*sqrt(3)"""
    return Scalar.of(x).sign()


# =============================================================================
# UNIVARIATE POLYNOMIALS
# =============================================================================

def _trim(coeffs: Iterable[Number]) -> Tuple[Scalar, ...]:
    out = [Scalar.of(c) for c in coeffs]
    while out and out[-1].is_zero():
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class Poly:
    """Univariate polynomial over Q(sqrt 3), ascending coefficients"""
    coeffs: Tuple[Scalar, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c: Number) -> "Poly":
        return cls((c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        o = other if isinstance(other, Poly) else Poly.constant(other)
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (ZERO,) * (n - len(self.coeffs))
        b = o.coeffs + (ZERO,) * (n - len(o.coeffs))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        o = other if isinstance(other, Poly) else Poly.constant(other)
        return self + (-o)

    def __rsub__(self, other):
        return Poly.constant(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = Scalar.of(other)
            return Poly(tuple(c * a for a in self.coeffs))
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        result = Poly.constant(1)
        for _ in range(n):
            result = result * self
        return result

    def derivative(self) -> "Poly":
        return Poly(tuple(c * i for i, c in enumerate(self.coeffs) if i > 0))

    def __call__(self, x: Number) -> Scalar:
        x = Scalar.of(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def compose(self, inner: "Poly") -> "Poly":
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def divmod(self, other: "Poly") -> Tuple["Poly", "Poly"]:
        """Long division over the field Q(sqrt 3)"""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [ZERO] * max(0, len(rem) - len(other.coeffs) + 1)
        inv_lead = other.leading.inverse()
        while len(rem) >= len(other.coeffs) and rem:
            shift = len(rem) - len(other.coeffs)
            factor = rem[-1] * inv_lead
            quot[shift] = factor
            for i, c in enumerate(other.coeffs):
                rem[shift + i] = rem[shift + i] - factor * c
            rem.pop()
            while rem and rem[-1].is_zero():
                rem.pop()
        return Poly(tuple(quot)), Poly(tuple(rem))

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def divides(self, other: "Poly") -> bool:
        """True if self divides other exactly"""
        return (other % self).is_zero()

    def is_associate(self, other: "Poly") -> bool:
        """Equal up to a nonzero Scalar factor (exact divisibility both ways)"""
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return self.divides(other) and other.divides(self)

    def monic(self) -> "Poly":
        return self * self.leading.inverse()

    def normalized(self) -> "Poly":
        """Divide by |leading coefficient|; preserves signs everywhere"""
        return self * abs(self.leading).inverse()

    def cauchy_bound(self) -> Fraction:
        """Rational bound R with every real root in (-R, R)"""
        lead = self.leading
        return 1 + max((c / lead).magnitude_bound() for c in self.coeffs[:-1]) if self.degree > 0 else Fraction(1)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"


# =============================================================================
# BIVARIATE POLYNOMIALS IN (b, t)
# =============================================================================

@dataclass(frozen=True)
class BiPoly:
    """Polynomial in (b, t); terms map (i, j) to the coefficient of b^i t^j"""
    terms: Tuple[Tuple[Tuple[int, int], Scalar], ...] = ()

    def __post_init__(self):
        items = self.terms.items() if isinstance(self.terms, dict) else self.terms
        clean = {}
        for k, v in items:
            v = Scalar.of(v)
            if not v.is_zero():
                clean[tuple(k)] = v
        object.__setattr__(self, "terms", tuple(sorted(clean.items())))

    @classmethod
    def b(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def t(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    @classmethod
    def constant(cls, c: Number) -> "BiPoly":
        return cls({(0, 0): c})

    def as_dict(self) -> Dict[Tuple[int, int], Scalar]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        o = other if isinstance(other, BiPoly) else BiPoly.constant(other)
        out = self.as_dict()
        for k, v in o.terms:
            out[k] = out.get(k, ZERO) + v
        return BiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({k: -v for k, v in self.terms})

    def __sub__(self, other):
        o = other if isinstance(other, BiPoly) else BiPoly.constant(other)
        return self + (-o)

    def __mul__(self, other):
        if not isinstance(other, BiPoly):
            c = Scalar.of(other)
            return BiPoly({k: c * v for k, v in self.terms})
        out: Dict[Tuple[int, int], Scalar] = {}
        for (i1, j1), a in self.terms:
            for (i2, j2), c in other.terms:
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, ZERO) + a * c
        return BiPoly(out)

    __rmul__ = __mul__

    def partial_b(self) -> "BiPoly":
        return BiPoly({(i - 1, j): v * i for (i, j), v in self.terms if i > 0})

    def partial_t(self) -> "BiPoly":
        return BiPoly({(i, j - 1): v * j for (i, j), v in self.terms if j > 0})

    def __call__(self, b: Number, t: Number) -> Scalar:
        b, t = Scalar.of(b), Scalar.of(t)
        return sum((v * b ** i * t ** j for (i, j), v in self.terms), ZERO)

    def eval_float(self, b: float, t: float) -> float:
        return sum(float(v) * b ** i * t ** j for (i, j), v in self.terms)

    def restrict_to_line(self, slope: Number, intercept: Number) -> Poly:
        """Substitute t = slope*b + intercept, giving a polynomial in b"""
        line = Poly((intercept, slope))
        acc = Poly()
        for (i, j), v in self.terms:
            acc = acc + (Poly.x() ** i) * (line ** j) * v
        return acc

    def to_poly(self) -> Poly:
        """Convert a polynomial free of t"""
        if any(j for (_, j), _ in self.terms):
            raise ValueError("BiPoly depends on t")
        degree = max((i for (i, _), _ in self.terms), default=-1)
        coeffs = [ZERO] * (degree + 1)
        for (i, _), v in self.terms:
            coeffs[i] = v
        return Poly(tuple(coeffs))

    def is_associate(self, other: "BiPoly") -> bool:
        """Equal up to a nonzero Scalar factor"""
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        key, v = self.terms[0]
        w = other.as_dict().get(key)
        if w is None:
            return False
        return (self * w - other * v).is_zero()


# =============================================================================
# STURM SEQUENCES
# =============================================================================

def sturm_sequence(p: Poly) -> List[Poly]:
    """Sturm chain p, p', -rem(...), each scaled by a positive constant"""
    if p.is_zero():
        raise ZeroPolynomial("Sturm sequence of the zero polynomial")
    chain = [p.normalized()]
    if p.degree > 0:
        chain.append(p.derivative().normalized())
    while len(chain) > 1 and chain[-1].degree > 0:
        rem = chain[-2] % chain[-1]
        if rem.is_zero():
            break
        chain.append((-rem).normalized())
    return chain


def _sign_changes(chain: Sequence[Poly], x: Optional[Scalar], side: int = 0) -> int:
    """Sign changes of the chain at x, or at -inf/+inf when x is None"""
    signs = []
    for q in chain:
        if x is None:
            s = q.leading.sign()
            if side < 0 and q.degree % 2 == 1:
                s = -s
        else:
            s = q(x).sign()
        if s:
            signs.append(s)
    return sum(1 for a, c in zip(signs, signs[1:]) if a != c)


def _count_open_closed(chain: Sequence[Poly], lo: Optional[Scalar], hi: Optional[Scalar]) -> int:
    return _sign_changes(chain, lo, side=-1) - _sign_changes(chain, hi, side=1)


def _deflate(p: Poly, root: Scalar) -> Poly:
    """Remove every factor (x - root)"""
    factor = Poly((-root, 1))
    while p(root).is_zero():
        p = p.divmod(factor)[0]
    return p


def _shrink_endpoint(p: Poly, fixed: Scalar, moving: Scalar, sign: int,
                     evidence: Optional[list], name: str) -> Scalar:
    """
    Move a vanishing endpoint inward by (width)/2^k

    k is the smallest exponent such that the new endpoint is not a root and the
    removed sliver holds no root of p besides the original endpoint.
    """
    rest = _deflate(p, fixed)
    chain = sturm_sequence(rest)
    width = (moving - fixed) if sign > 0 else (fixed - moving)
    k = 1
    while True:
        candidate = fixed + width * Fraction(sign, 2 ** k)
        lo, hi = (fixed, candidate) if sign > 0 else (candidate, fixed)
        if not p(candidate).is_zero() and _count_open_closed(chain, lo, hi) == 0:
            break
        k += 1
    if evidence is not None:
        evidence.append({"event": "endpoint-shrink", "endpoint": name, "k": k,
                         "from": str(fixed), "to": str(candidate)})
    logger.debug("shrunk %s endpoint %s by 2^-%d", name, fixed, k)
    return candidate


def sturm_count(p: Poly, lo: Optional[Number], hi: Optional[Number],
                evidence: Optional[list] = None) -> int:
    """
    Count distinct real roots of p in (lo, hi]

    Args:
        p: Nonzero polynomial
        lo: Lower endpoint (excluded); None for -infinity
        hi: Upper endpoint (included); None for +infinity
        evidence: Optional list receiving endpoint-shrink records

    Returns:
        Exact number of distinct real roots in the interval
    """
    if p.is_zero():
        raise ZeroPolynomial("sturm_count of the zero polynomial")
    lo = None if lo is None else Scalar.of(lo)
    hi = None if hi is None else Scalar.of(hi)
    if lo is not None and hi is not None and not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi}]")
    if p.degree == 0:
        return 0

    extra = 0
    if hi is not None and p(hi).is_zero():
        extra = 1
        if lo is None:
            lo_ref = hi - p.cauchy_bound() * 2 - 1
        else:
            lo_ref = lo
        hi = _shrink_endpoint(p, hi, lo_ref, -1, evidence, "hi")
    if lo is not None and p(lo).is_zero():
        hi_ref = hi if hi is not None else lo + p.cauchy_bound() * 2 + 1
        lo = _shrink_endpoint(p, lo, hi_ref, +1, evidence, "lo")
    if lo is not None and hi is not None and not lo < hi:
        return extra

    return _count_open_closed(sturm_sequence(p), lo, hi) + extra


def isolate_roots(p: Poly, lo: Optional[Number], hi: Optional[Number], width: Number,
                  evidence: Optional[list] = None) -> List[Tuple[Scalar, Scalar]]:
    """
    Isolate the real roots of p in (lo, hi]

    Args:
        p: Nonzero polynomial
        lo: Lower endpoint (excluded); None for -infinity
        hi: Upper endpoint (included); None for +infinity
        width: Maximal width of each returned interval
        evidence: Optional list receiving shrink records

    Returns:
        Sorted disjoint intervals (a, b], each holding exactly one root
    """
    if p.is_zero():
        raise ZeroPolynomial("isolate_roots of the zero polynomial")
    width = Fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    bound = p.cauchy_bound()
    lo = Scalar(-bound) if lo is None else Scalar.of(lo)
    hi = Scalar(bound) if hi is None else Scalar.of(hi)

    result: List[Tuple[Scalar, Scalar]] = []
    stack = [(lo, hi, sturm_count(p, lo, hi, evidence))]
    while stack:
        a, c, n = stack.pop()
        if n == 0:
            continue
        if n == 1 and (c - a) <= width:
            result.append((a, c))
            continue
        mid = (a + c) / 2
        j = 2
        while p(mid).is_zero():
            # nudge off an exact root so both halves have clean endpoints
            mid = a + (c - a) * (Fraction(1, 2) + Fraction(1, 2 ** j))
            j += 1
        left = sturm_count(p, a, mid)
        stack.append((mid, c, n - left))
        stack.append((a, mid, left))
    result.sort(key=lambda iv: (iv[0].to_mpf(), iv[1].to_mpf()))
    return result


# =============================================================================
# RADICAL EXPRESSIONS
# =============================================================================

def _to_ctx(value, ctx):
    """Convert a variable binding into the mpmath context"""
    if isinstance(value, (int, Fraction, Scalar)):
        return Scalar.of(value).to_mpf(ctx)
    if isinstance(value, float):
        return ctx.mpf(value)
    return value


class RadicalExpr:
    """Base class of expression nodes; supports +, -, *, / and integer powers"""

    def __add__(self, other):
        return Add((self, lift(other)))

    def __radd__(self, other):
        return Add((lift(other), self))

    def __sub__(self, other):
        return Add((self, -lift(other)))

    def __rsub__(self, other):
        return Add((lift(other), -self))

    def __neg__(self):
        return Mul((Const(Scalar(-1)), self))

    def __mul__(self, other):
        return Mul((self, lift(other)))

    def __rmul__(self, other):
        return Mul((lift(other), self))

    def __truediv__(self, other):
        return Mul((self, Inv(lift(other))))

    def __rtruediv__(self, other):
        return Mul((lift(other), Inv(self)))

    def __pow__(self, n: int):
        if n < 0:
            return Inv(self ** (-n))
        if n == 0:
            return Const(ONE)
        return Mul(tuple([self] * n))

    def children(self) -> Tuple["RadicalExpr", ...]:
        return ()

    def evaluate(self, env: Dict[str, object], ctx=mpmath.mp):
        """Numeric value; env maps variable names to mpf/iv values or Scalars"""
        raise NotImplementedError

    def evaluate_exact(self, env: Dict[str, Number]) -> Scalar:
        """Exact value; square roots must be perfect squares in Q(sqrt 3)"""
        raise NotImplementedError

    def substitute(self, env: Dict[str, "RadicalExpr"]) -> "RadicalExpr":
        raise NotImplementedError

    def variables(self) -> set:
        out = set()
        for child in self.children():
            out |= child.variables()
        return out


@dataclass(frozen=True)
class Const(RadicalExpr):
    value: Scalar

    def evaluate(self, env, ctx=mpmath.mp):
        return self.value.to_mpf(ctx)

    def evaluate_exact(self, env):
        return self.value

    def substitute(self, env):
        return self


@dataclass(frozen=True)
class Var(RadicalExpr):
    name: str

    def evaluate(self, env, ctx=mpmath.mp):
        return _to_ctx(env[self.name], ctx)

    def evaluate_exact(self, env):
        return Scalar.of(env[self.name])

    def substitute(self, env):
        return env.get(self.name, self)

    def variables(self):
        return {self.name}


@dataclass(frozen=True)
class Add(RadicalExpr):
    terms: Tuple[RadicalExpr, ...]

    def children(self):
        return self.terms

    def evaluate(self, env, ctx=mpmath.mp):
        total = ctx.mpf(0)
        for term in self.terms:
            total = total + term.evaluate(env, ctx)
        return total

    def evaluate_exact(self, env):
        return sum((term.evaluate_exact(env) for term in self.terms), ZERO)

    def substitute(self, env):
        return Add(tuple(term.substitute(env) for term in self.terms))


@dataclass(frozen=True)
class Mul(RadicalExpr):
    factors: Tuple[RadicalExpr, ...]

    def children(self):
        return self.factors

    def evaluate(self, env, ctx=mpmath.mp):
        total = ctx.mpf(1)
        for factor in self.factors:
            total = total * factor.evaluate(env, ctx)
        return total

    def evaluate_exact(self, env):
        total = ONE
        for factor in self.factors:
            total = total * factor.evaluate_exact(env)
        return total

    def substitute(self, env):
        return Mul(tuple(factor.substitute(env) for factor in self.factors))


@dataclass(frozen=True)
class Inv(RadicalExpr):
    child: RadicalExpr

    def children(self):
        return (self.child,)

    def evaluate(self, env, ctx=mpmath.mp):
        return 1 / self.child.evaluate(env, ctx)

    def evaluate_exact(self, env):
        return self.child.evaluate_exact(env).inverse()

    def substitute(self, env):
        return Inv(self.child.substitute(env))


@dataclass(frozen=True)
class Sqrt(RadicalExpr):
    child: RadicalExpr

    def children(self):
        return (self.child,)

    def evaluate(self, env, ctx=mpmath.mp):
        return ctx.sqrt(self.child.evaluate(env, ctx))

    def evaluate_exact(self, env):
        inner = self.child.evaluate_exact(env)
        root = inner.sqrt()
        if root is None:
            raise NotReducible(f"sqrt({inner}) is not a square in Q(sqrt 3)")
        return root

    def substitute(self, env):
        return Sqrt(self.child.substitute(env))


def lift(value) -> RadicalExpr:
    """Wrap numbers as constants"""
    if isinstance(value, RadicalExpr):
        return value
    return Const(Scalar.of(value))


def const(value: Number) -> RadicalExpr:
    return Const(Scalar.of(value))


def var(name: str) -> RadicalExpr:
    return Var(name)


def sqrt(value) -> RadicalExpr:
    return Sqrt(lift(value))


def radicand_violations(e: RadicalExpr, samples: Iterable[Dict[str, object]]) -> List[dict]:
    """Sample points at which some sqrt argument evaluates negative"""
    radicands = []

    def walk(node):
        for child in node.children():
            walk(child)
        if isinstance(node, Sqrt) and node.child not in radicands:
            radicands.append(node.child)

    walk(e)
    bad = []
    for env in samples:
        for radicand in radicands:
            value = radicand.evaluate(env)
            if value < 0:
                bad.append({"point": {k: str(v) for k, v in env.items()}, "value": float(value)})
    return bad


# =============================================================================
# RADICAL ELIMINATION
# =============================================================================

class _Tower:
    """
    Q(sqrt 3)[b, t] extended by square roots r_0, ..., r_{k-1}

    A level-0 element is a BiPoly. A level-L element is a pair (A, B) of
    level-(L-1) elements standing for A + B*r_{L-1}, where r_{L-1}^2 is the
    level-(L-1) element radicands[L-1].
    """

    def __init__(self):
        self.radicands: list = []

    def zero(self, level: int):
        return BiPoly() if level == 0 else (self.zero(level - 1), self.zero(level - 1))

    def embed(self, x, src: int, dst: int):
        while src < dst:
            x = (x, self.zero(src))
            src += 1
        return x

    def generator(self, index: int, level: int):
        x = (self.zero(index), self.embed(BiPoly.constant(1), 0, index))
        return self.embed(x, index + 1, level)

    def add(self, x, y, level: int):
        if level == 0:
            return x + y
        return (self.add(x[0], y[0], level - 1), self.add(x[1], y[1], level - 1))

    def neg(self, x, level: int):
        if level == 0:
            return -x
        return (self.neg(x[0], level - 1), self.neg(x[1], level - 1))

    def is_zero(self, x, level: int) -> bool:
        if level == 0:
            return x.is_zero()
        return self.is_zero(x[0], level - 1) and self.is_zero(x[1], level - 1)

    def mul(self, x, y, level: int):
        if level == 0:
            return x * y
        a, b = x
        c, d = y
        lower = level - 1
        ac = self.mul(a, c, lower)
        bd = self.mul(b, d, lower)
        bdc = self.mul(bd, self.radicands[lower], lower)
        cross = self.add(self.mul(a, d, lower), self.mul(b, c, lower), lower)
        return (self.add(ac, bdc, lower), cross)

    def norm_down(self, x, level: int):
        """(A + B r)(A - B r) = A^2 - B^2 C, one level down"""
        a, b = x
        lower = level - 1
        if self.is_zero(b, lower):
            return a, False
        a2 = self.mul(a, a, lower)
        b2c = self.mul(self.mul(b, b, lower), self.radicands[lower], lower)
        return self.add(a2, self.neg(b2c, lower), lower), True


def _collect_sqrt_nodes(e: RadicalExpr) -> List[Sqrt]:
    """Square-root nodes in post-order, deduplicated structurally"""
    found: List[Sqrt] = []

    def walk(node):
        for child in node.children():
            walk(child)
        if isinstance(node, Sqrt) and node not in found:
            found.append(node)

    walk(e)
    return found


def _variable_slots(e: RadicalExpr, b_name: str, t_name: Optional[str]) -> Dict[str, BiPoly]:
    slots = {b_name: BiPoly.b()}
    if t_name is not None:
        slots[t_name] = BiPoly.t()
    unknown = e.variables() - set(slots)
    if unknown:
        raise ValueError(f"unexpected variables {sorted(unknown)}")
    return slots


def _eliminate(e: RadicalExpr, slots: Dict[str, BiPoly], evidence: Optional[list]) -> BiPoly:
    sqrt_nodes = _collect_sqrt_nodes(e)
    if len(sqrt_nodes) > MAX_RADICALS:
        raise NotReducible(f"{len(sqrt_nodes)} square roots exceed the limit of {MAX_RADICALS}")
    tower = _Tower()
    index = {node: i for i, node in enumerate(sqrt_nodes)}
    denominators: list = []

    def to_frac(node: RadicalExpr, level: int):
        if isinstance(node, Const):
            return tower.embed(BiPoly.constant(node.value), 0, level), tower.embed(BiPoly.constant(1), 0, level)
        if isinstance(node, Var):
            return tower.embed(slots[node.name], 0, level), tower.embed(BiPoly.constant(1), 0, level)
        if isinstance(node, Add):
            num, den = to_frac(node.terms[0], level)
            for term in node.terms[1:]:
                n2, d2 = to_frac(term, level)
                num = tower.add(tower.mul(num, d2, level), tower.mul(n2, den, level), level)
                den = tower.mul(den, d2, level)
            return num, den
        if isinstance(node, Mul):
            num, den = to_frac(node.factors[0], level)
            for factor in node.factors[1:]:
                n2, d2 = to_frac(factor, level)
                num, den = tower.mul(num, n2, level), tower.mul(den, d2, level)
            return num, den
        if isinstance(node, Inv):
            num, den = to_frac(node.child, level)
            if tower.is_zero(num, level):
                raise NotReducible("reciprocal of an identically zero expression")
            return den, num
        if isinstance(node, Sqrt):
            i = index[node]
            if i >= level:
                raise NotReducible("square root used below its tower level")
            gen = tower.generator(i, level)
            return gen, tower.embed(denominators[i], i, level)
        raise NotReducible(f"unsupported node {type(node).__name__}")

    # sqrt(n/d) = sqrt(n*d)/d, with n*d living below the new root
    for i, node in enumerate(sqrt_nodes):
        num, den = to_frac(node.child, i)
        tower.radicands.append(tower.mul(num, den, i))
        denominators.append(den)

    level = len(sqrt_nodes)
    num, _ = to_frac(e, level)
    rounds = 0
    while level > 0:
        num, squared = tower.norm_down(num, level)
        rounds += int(squared)
        level -= 1
    if num.is_zero():
        raise NotReducible("elimination collapsed to the zero polynomial")
    if evidence is not None:
        evidence.append({"event": "eliminate", "radicals": len(sqrt_nodes), "rounds": rounds})
    logger.debug("eliminated %d radicals in %d rounds", len(sqrt_nodes), rounds)
    return num


def eliminate_radicals(e: RadicalExpr, variable: str = "b", evidence: Optional[list] = None) -> Poly:
    """
    Reduce a univariate radical expression to a polynomial

    Every real zero of e (away from poles) is a root of the returned polynomial.
    The polynomial is not claimed minimal.

    Args:
        e: Expression in the single variable ``variable``
        variable: Variable name
        evidence: Optional list receiving the round count

    Returns:
        Nonzero Poly
    """
    return _eliminate(e, _variable_slots(e, variable, None), evidence).to_poly()


def eliminate_radicals_bivariate(e: RadicalExpr, b: str = "b", t: str = "t",
                                 evidence: Optional[list] = None) -> BiPoly:
    """Bivariate form of eliminate_radicals, returning a BiPoly in (b, t)"""
    return _eliminate(e, _variable_slots(e, b, t), evidence)


def poly_from_ints(coeffs: Sequence[int]) -> Poly:
    return Poly(tuple(Scalar(c) for c in coeffs))
