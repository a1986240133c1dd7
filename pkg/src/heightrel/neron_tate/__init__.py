"""Numerical canonical heights on elliptic curves over Q and Q(sqrt d)."""

from .fields import BaseField, FieldElement, FieldError, NORM_EUCLIDEAN
from .curves import CurvePoint, EllipticCurve, CurveError, NotOnCurve, O
from .endos import EndoMap, EndoError, ExceptionalPoint, Poly2, apply_endo, apply_adjoint, validate_endo
from .heights import (
    DoublingCapExceeded,
    GramMeasurement,
    HeightValue,
    ResidualReport,
    adjoint_check,
    canonical_height,
    degree_scaling_check,
    gram_matrix,
    height_or_estimate,
    naive_x_height,
    pairing,
)
