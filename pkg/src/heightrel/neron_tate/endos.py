"""Endomorphisms given as user-supplied rational maps.

A map is ``(x, y) -> (x_num/x_den, y_num/y_den)`` with polynomials in x and y
over the base field, or the built-in multiplication-by-m.  ``adjoint`` names
the Rosati adjoint: ``"self"``, ``"self^k"`` or ``"endo:<index>"`` into a
companion list of maps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .curves import CurvePoint, EllipticCurve, O
from .fields import FieldElement


class EndoError(ValueError):
    pass


class ExceptionalPoint(EndoError):
    """Every denominator vanishes at the point."""


@dataclass(frozen=True)
class Poly2:
    """sum of c * x^i * y^j over ``terms = ((i, j, c), ...)``."""

    terms: tuple[tuple[int, int, FieldElement], ...]

    def __call__(self, x: FieldElement, y: FieldElement) -> FieldElement:
        total = x * 0
        for i, j, c in self.terms:
            total = total + c * x ** i * y ** j
        return total

    @classmethod
    def constant(cls, c: FieldElement) -> Poly2:
        return cls(((0, 0, c),))


@dataclass(frozen=True)
class EndoMap:
    name: str
    x_num: Poly2 | None = None
    x_den: Poly2 | None = None
    y_num: Poly2 | None = None
    y_den: Poly2 | None = None
    degree: int | None = None
    adjoint: str | None = "self"
    scalar: int | None = None

    def __post_init__(self):
        if self.scalar is None and None in (self.x_num, self.x_den, self.y_num, self.y_den):
            raise EndoError("rational endomorphism needs all four polynomials")
        if self.degree is not None and self.degree < 1:
            raise EndoError("declared degree must be positive")
        if self.adjoint is not None and not re.fullmatch(r"self(\^\d+)?|endo:\d+", self.adjoint):
            raise EndoError(f"unrecognized adjoint reference {self.adjoint!r}")

    @classmethod
    def multiplication(cls, m: int) -> EndoMap:
        if m == 0:
            raise EndoError("the zero map is not an isogeny")
        return cls(f"[{m}]", degree=m * m, adjoint="self", scalar=m)

    @classmethod
    def identity(cls) -> EndoMap:
        return cls.multiplication(1)


def _eval(E: EllipticCurve, f: EndoMap, P: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return O
    if f.scalar is not None:
        return E.multiply(f.scalar, P)
    xd = f.x_den(P.x, P.y)
    yd = f.y_den(P.x, P.y)
    if not xd or not yd:
        raise ExceptionalPoint(f"{f.name}: denominator vanishes at {P}")
    return CurvePoint(f.x_num(P.x, P.y) / xd, f.y_num(P.x, P.y) / yd)


def apply_endo(E: EllipticCurve, f: EndoMap, P: CurvePoint) -> CurvePoint:
    E.check(P)
    image = _eval(E, f, P)
    if not E.contains(image):
        raise EndoError(f"{f.name} sends {P} off the curve (to {image})")
    return image


def apply_adjoint(E: EllipticCurve, f: EndoMap, Q: CurvePoint,
                  endos: Sequence[EndoMap] = ()) -> CurvePoint:
    ref = f.adjoint
    if ref is None:
        raise EndoError(f"{f.name} has no declared adjoint")
    if ref.startswith("endo:"):
        k = int(ref[5:])
        if k >= len(endos):
            raise EndoError(f"adjoint reference {ref} out of range")
        return apply_endo(E, endos[k], Q)
    power = int(ref[5:]) if ref.startswith("self^") else 1
    for _ in range(power):
        Q = apply_endo(E, f, Q)
    return Q


def validate_endo(E: EllipticCurve, f: EndoMap, points: Sequence[CurvePoint]) -> None:
    """Spot-check that f maps curve points to curve points and respects the
    group law on sums of the sample points."""
    sample = list(points)
    for i, P in enumerate(points):
        sample.append(E.multiply(2, P))
        for Q in points[i + 1:]:
            sample.append(E.add(P, Q))
    for P in sample:
        try:
            apply_endo(E, f, P)
        except ExceptionalPoint:
            continue
    for i, P in enumerate(points):
        for Q in points[i:]:
            try:
                lhs = apply_endo(E, f, E.add(P, Q))
                rhs = E.add(apply_endo(E, f, P), apply_endo(E, f, Q))
            except ExceptionalPoint:
                continue
            if lhs != rhs:
                raise EndoError(f"{f.name} is not additive on ({P}, {Q})")
