"""Q and the norm-Euclidean imaginary quadratic fields Q(sqrt d).

Elements are ``a + b*sqrt(d)`` with rational a, b.  The ring of integers is
Z[w] with w = sqrt(d) (d = -1, -2) or w = (1 + sqrt(d))/2 (d = -3, -7, -11);
all five are Euclidean for the norm, which is what gives coprime numerator /
denominator pairs for the naive height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..exact_linalg import as_rational

NORM_EUCLIDEAN = (-1, -2, -3, -7, -11)


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class BaseField:
    """``d == 0`` encodes Q itself."""

    d: int = 0

    def __post_init__(self):
        if self.d != 0 and self.d not in NORM_EUCLIDEAN:
            raise FieldError(f"d={self.d} is not one of the supported parameters {NORM_EUCLIDEAN}")

    @classmethod
    def rationals(cls) -> BaseField:
        return cls(0)

    @classmethod
    def imaginary_quadratic(cls, d: int) -> BaseField:
        if d == 0:
            raise FieldError("d must be nonzero")
        return cls(d)

    @property
    def is_rational(self) -> bool:
        return self.d == 0

    @property
    def degree(self) -> int:
        return 1 if self.d == 0 else 2

    @property
    def name(self) -> str:
        return "Q" if self.d == 0 else f"Q(sqrt({self.d}))"

    def __call__(self, a, b=0) -> FieldElement:
        return FieldElement(as_rational(a), as_rational(b), self.d)

    def zero(self) -> FieldElement:
        return self(0)

    def one(self) -> FieldElement:
        return self(1)

    def gen(self) -> FieldElement:
        if self.d == 0:
            raise FieldError("Q has no sqrt(d) generator")
        return self(0, 1)


@dataclass(frozen=True)
class FieldElement:
    a: Fraction
    b: Fraction
    d: int = 0

    def __post_init__(self):
        object.__setattr__(self, "a", as_rational(self.a))
        object.__setattr__(self, "b", as_rational(self.b))
        if self.d == 0 and self.b:
            raise FieldError("nonzero sqrt(d) part over Q")

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.d != self.d:
                if other.b == 0 and (other.d == 0 or self.d == 0):
                    return FieldElement(other.a, 0, self.d)
                raise FieldError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return FieldElement(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    @property
    def field(self) -> BaseField:
        return BaseField(self.d)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not self.b and not o.b:
            return FieldElement(self.a * o.a, Fraction(0), self.d)
        return FieldElement(self.a * o.a + self.d * self.b * o.b,
                            self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = FieldElement(Fraction(1), Fraction(0), self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> FieldElement:
        return FieldElement(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a if self.d else self.a

    def inverse(self) -> FieldElement:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conjugate()
        return FieldElement(c.a / n, c.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return not self.b and self.a == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.d))

    def __repr__(self) -> str:
        if self.d == 0:
            return f"{self.a}"
        return f"({self.a} + {self.b}*sqrt({self.d}))"

    def to_complex(self) -> complex:
        if self.d == 0:
            return complex(float(self.a))
        return complex(float(self.a), float(self.b) * math.sqrt(-self.d))

    def to_json(self) -> list[str]:
        return [str(self.a), str(self.b)]


# -- ring of integers -----------------------------------------------------------

def _half_integral(d: int) -> bool:
    return d % 4 == 1


def is_integral(x: FieldElement) -> bool:
    if x.d == 0 or not _half_integral(x.d):
        return x.a.denominator == 1 and x.b.denominator == 1
    u, v = 2 * x.a, 2 * x.b
    return u.denominator == 1 and v.denominator == 1 and (u - v) % 2 == 0


def denominator(x: FieldElement) -> int:
    """Least positive integer m with m*x integral."""
    m = math.lcm(x.a.denominator, x.b.denominator)
    if x.d and _half_integral(x.d) and m % 2 == 0:
        if is_integral(x * Fraction(m // 2)):
            m //= 2
    return m


def round_integral(z: FieldElement) -> FieldElement:
    """An integral q with |z - q| < 1 (nearest-point rounding adapted to the
    ring of integers)."""
    if z.d == 0:
        return FieldElement(Fraction(_nearest(z.a)), Fraction(0), 0)
    if not _half_integral(z.d):
        return FieldElement(Fraction(_nearest(z.a)), Fraction(_nearest(z.b)), z.d)
    # q = u + v*(1 + sqrt d)/2 ; choose v from the sqrt(d) part first
    v = _nearest(2 * z.b)
    u = _nearest(z.a - Fraction(v, 2))
    return FieldElement(Fraction(u) + Fraction(v, 2), Fraction(v, 2), z.d)


def _nearest(q: Fraction) -> int:
    return math.floor(q + Fraction(1, 2))


def ring_divmod(x: FieldElement, y: FieldElement) -> tuple[FieldElement, FieldElement]:
    """Euclidean division in the ring of integers: x = q*y + r with N(r) < N(y)."""
    if not y:
        raise ZeroDivisionError("division by zero")
    q = round_integral(x / y)
    r = x - q * y
    return q, r


def ring_gcd(x: FieldElement, y: FieldElement) -> FieldElement:
    """A gcd of two integral elements (defined up to units)."""
    while y:
        _, r = ring_divmod(x, y)
        x, y = y, r
    return x


def ring_gcd_bounded(x: FieldElement, y: FieldElement, bound: FieldElement) -> FieldElement:
    """gcd(x, y) when it is known to divide ``bound``.  Reducing the large
    arguments modulo ``bound`` first keeps every Euclidean step small."""
    g = ring_gcd(bound, ring_divmod(x, bound)[1])
    return ring_gcd(g, ring_divmod(y, g)[1])


def coprime_fraction(x: FieldElement) -> tuple[FieldElement, FieldElement]:
    """(A, B) integral and coprime with x = A/B."""
    m = denominator(x)
    A, B = x * m, FieldElement(Fraction(m), Fraction(0), x.d)
    g = ring_gcd(A, B)
    return exact_div(A, g), exact_div(B, g)


def exact_div(x: FieldElement, y: FieldElement) -> FieldElement:
    q = x / y
    if not is_integral(q):
        raise FieldError(f"{y} does not divide {x}")
    return q


def log_abs_embeddings(x: FieldElement) -> list[float]:
    """log|sigma(x)| for each of the [K:Q] embeddings sigma; x nonzero.

    Exact norms feed ``math.log`` on integers, so arbitrarily large elements
    are fine.
    """
    if x.d == 0:
        return [_log_rational(abs(x.a))]
    half = 0.5 * _log_rational(x.norm())
    return [half, half]


def _log_rational(q: Fraction) -> float:
    if q <= 0:
        raise ValueError("log of non-positive number")
    return math.log(q.numerator) - math.log(q.denominator)
