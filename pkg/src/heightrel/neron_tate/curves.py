"""Long Weierstrass curves over Q or Q(sqrt d) and their exact group law."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fields import BaseField, FieldElement, denominator


class CurveError(ValueError):
    pass


class NotOnCurve(CurveError):
    pass


@dataclass(frozen=True)
class CurvePoint:
    """Affine point, or the point at infinity when ``x is None``."""

    x: FieldElement | None = None
    y: FieldElement | None = None

    @classmethod
    def infinity(cls) -> CurvePoint:
        return cls(None, None)

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self) -> str:
        return "O" if self.is_infinity else f"({self.x!r}, {self.y!r})"


O = CurvePoint.infinity()


@dataclass(frozen=True)
class EllipticCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    a1: FieldElement
    a2: FieldElement
    a3: FieldElement
    a4: FieldElement
    a6: FieldElement
    base: BaseField = BaseField()

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            v = getattr(self, name)
            if not isinstance(v, FieldElement):
                v = self.base(v)
            elif v.d != self.base.d:
                if v.b:
                    raise CurveError(f"{name} does not lie in {self.base.name}")
                v = self.base(v.a)
            object.__setattr__(self, name, v)
        if not self.discriminant():
            raise CurveError("singular curve: discriminant is zero")

    @classmethod
    def from_coefficients(cls, coeffs, base: BaseField | None = None) -> EllipticCurve:
        base = base or BaseField()
        return cls(*(base(c) if not isinstance(c, FieldElement) else c for c in coeffs), base=base)

    @property
    def a_invariants(self) -> tuple[FieldElement, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def b_invariants(self) -> tuple[FieldElement, FieldElement, FieldElement, FieldElement]:
        a1, a2, a3, a4, a6 = self.a_invariants
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def discriminant(self) -> FieldElement:
        b2, b4, b6, b8 = self.b_invariants()
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def point(self, x, y) -> CurvePoint:
        P = CurvePoint(self._elt(x), self._elt(y))
        self.check(P)
        return P

    def _elt(self, v) -> FieldElement:
        if isinstance(v, FieldElement):
            return v
        if isinstance(v, (tuple, list)):
            return self.base(*v)
        return self.base(v)

    def contains(self, P: CurvePoint) -> bool:
        if P.is_infinity:
            return True
        x, y = P.x, P.y
        a1, a2, a3, a4, a6 = self.a_invariants
        return y * y + a1 * x * y + a3 * y == x ** 3 + a2 * x * x + a4 * x + a6

    def check(self, P: CurvePoint) -> None:
        if not self.contains(P):
            raise NotOnCurve(f"{P} is not on {self}")

    # -- group law --------------------------------------------------------
    def negate(self, P: CurvePoint) -> CurvePoint:
        self.check(P)
        if P.is_infinity:
            return P
        return CurvePoint(P.x, -P.y - self.a1 * P.x - self.a3)

    def add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        self.check(P)
        self.check(Q)
        return self._add(P, Q)

    def _add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        a1, a2, a3, a4, a6 = self.a_invariants
        x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
        if x1 == x2:
            if y1 + y2 + a1 * x2 + a3 == 0:
                return O
            lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
            nu = (-x1 ** 3 + a4 * x1 + 2 * a6 - a3 * y1) / (2 * y1 + a1 * x1 + a3)
        else:
            lam = (y2 - y1) / (x2 - x1)
            nu = (y1 * x2 - y2 * x1) / (x2 - x1)
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = -(lam + a1) * x3 - nu - a3
        return CurvePoint(x3, y3)

    def multiply(self, m: int, P: CurvePoint) -> CurvePoint:
        self.check(P)
        if m < 0:
            return self.multiply(-m, self.negate(P))
        out, base = O, P
        while m:
            if m & 1:
                out = self._add(out, base)
            base = self._add(base, base)
            m >>= 1
        return out

    def sub(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        return self.add(P, self.negate(Q))

    def torsion_order(self, P: CurvePoint, bound: int = 24) -> int | None:
        """Least m <= bound with mP = O, else None."""
        self.check(P)
        Q = P
        for m in range(1, bound + 1):
            if Q.is_infinity:
                return m
            Q = self._add(Q, P)
        return None

    # -- models -----------------------------------------------------------
    def integral_scaling(self) -> int:
        """Least u > 0 (among multiples of the coefficient denominators) making
        u^i a_i integral; x -> u^2 x, y -> u^3 y carries the curve there."""
        u = 1
        for v in self.a_invariants:
            u = math.lcm(u, denominator(v))
        return u

    def scaled(self, u: int) -> EllipticCurve:
        a1, a2, a3, a4, a6 = self.a_invariants
        return EllipticCurve(a1 * u, a2 * u ** 2, a3 * u ** 3, a4 * u ** 4, a6 * u ** 6, base=self.base)

    def base_change(self, base: BaseField) -> EllipticCurve:
        if any(v.b for v in self.a_invariants):
            raise CurveError("only curves with rational coefficients can be base-changed")
        return EllipticCurve(*(base(v.a) for v in self.a_invariants), base=base)

    def __repr__(self) -> str:
        coeffs = ", ".join(repr(v) for v in self.a_invariants)
        return f"EllipticCurve([{coeffs}] over {self.base.name})"


def point_base_change(P: CurvePoint, base: BaseField) -> CurvePoint:
    if P.is_infinity:
        return P
    return CurvePoint(base(P.x.a), base(P.y.a))

