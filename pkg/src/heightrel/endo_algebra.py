"""Finite-dimensional Q-algebras with involution.

An :class:`InvolutiveAlgebra` is given by structure constants in a fixed basis
``e_0, ..., e_{d-1}`` together with the matrix of an anti-involution.  The
constructors cover the shapes that occur as endomorphism algebras in the
Albert classification over Q: quadratic fields (types I and IV) and quaternion
algebras with either the canonical involution or an orthogonal one (types III
and II).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .exact_linalg import QMatrix, as_rational, determinant, kernel, solve, NoSolution


class AlgebraError(ValueError):
    pass


class Unclassified(AlgebraError):
    """Algebra shape outside the supported Albert fingerprints."""


@dataclass(frozen=True)
class AlgebraElement:
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(as_rational(c) for c in self.coords))

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        _check_len(self, other)
        return AlgebraElement(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        _check_len(self, other)
        return AlgebraElement(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement(tuple(-a for a in self.coords))

    def scale(self, c) -> AlgebraElement:
        c = as_rational(c)
        return AlgebraElement(tuple(c * a for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def _check_len(x: AlgebraElement, y: AlgebraElement) -> None:
    if len(x.coords) != len(y.coords):
        raise AlgebraError("elements of different dimension")


@dataclass(frozen=True)
class InvolutiveAlgebra:
    """Structure constants ``c[i][j][k]`` give ``e_i e_j = sum_k c[i][j][k] e_k``.

    ``involution`` acts on coordinate columns.  ``shape`` records which
    constructor built the algebra (``"quadratic"``, ``"quaternion"``,
    ``"rational"`` or ``"raw"``) and ``params`` its defining data.
    """

    dim: int
    structure_constants: tuple
    unit: tuple[Fraction, ...]
    involution: QMatrix
    label: str = ""
    shape: str = "raw"
    params: tuple = field(default=())

    def __post_init__(self):
        d = self.dim
        sc = tuple(
            tuple(tuple(as_rational(c) for c in self.structure_constants[i][j]) for j in range(d))
            for i in range(d)
        )
        if len(self.structure_constants) != d or any(
            len(self.structure_constants[i]) != d or any(len(sc[i][j]) != d for j in range(d))
            for i in range(d)
        ):
            raise AlgebraError("structure constants must be a d x d x d array")
        unit = tuple(as_rational(u) for u in self.unit)
        if len(unit) != d:
            raise AlgebraError("unit has wrong length")
        if (self.involution.rows, self.involution.cols) != (d, d):
            raise AlgebraError("involution must be a d x d matrix")
        object.__setattr__(self, "structure_constants", sc)
        object.__setattr__(self, "unit", unit)

    # -- elements ---------------------------------------------------------
    def element(self, *coords) -> AlgebraElement:
        if len(coords) == 1 and isinstance(coords[0], (list, tuple)):
            coords = tuple(coords[0])
        if len(coords) != self.dim:
            raise AlgebraError(f"expected {self.dim} coordinates, got {len(coords)}")
        return AlgebraElement(coords)

    def basis(self) -> list[AlgebraElement]:
        return [AlgebraElement(tuple(1 if i == j else 0 for j in range(self.dim)))
                for i in range(self.dim)]

    def one(self) -> AlgebraElement:
        return AlgebraElement(self.unit)

    def zero(self) -> AlgebraElement:
        return AlgebraElement((0,) * self.dim)

    def scalar(self, c) -> AlgebraElement:
        return self.one().scale(c)

    def _own(self, *xs: AlgebraElement) -> None:
        for x in xs:
            if len(x.coords) != self.dim:
                raise AlgebraError(f"element of dimension {len(x.coords)} in algebra of dimension {self.dim}")

    # -- operations -------------------------------------------------------
    def mul(self, x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
        self._own(x, y)
        d = self.dim
        sc = self.structure_constants
        out = [Fraction(0)] * d
        for i, xi in enumerate(x.coords):
            if not xi:
                continue
            for j, yj in enumerate(y.coords):
                if not yj:
                    continue
                f = xi * yj
                for k, c in enumerate(sc[i][j]):
                    if c:
                        out[k] += f * c
        return AlgebraElement(tuple(out))

    def involute(self, x: AlgebraElement) -> AlgebraElement:
        self._own(x)
        return AlgebraElement((self.involution @ QMatrix.column(x.coords)).entries)

    def left_regular_rep(self, x: AlgebraElement) -> QMatrix:
        """Matrix of ``y -> x*y``; column j is ``x * e_j``."""
        self._own(x)
        cols = [self.mul(x, e).coords for e in self.basis()]
        return QMatrix.from_rows(cols).transpose()

    def power(self, x: AlgebraElement, k: int) -> AlgebraElement:
        out = self.one()
        for _ in range(k):
            out = self.mul(out, x)
        return out

    def is_commutative(self) -> bool:
        sc = self.structure_constants
        return all(sc[i][j] == sc[j][i] for i in range(self.dim) for j in range(i))

    def center_dim(self) -> int:
        rows = []
        for e in self.basis():
            # x -> x e - e x, stacked over basis e
            cols = []
            for b in self.basis():
                cols.append((self.mul(b, e) - self.mul(e, b)).coords)
            rows.extend(QMatrix.from_rows(cols).transpose().to_rows())
        return len(kernel(QMatrix.from_rows(rows)))


# -- constructors -------------------------------------------------------------

def _is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    f = 2
    while f * f <= n:
        if n % (f * f) == 0:
            return False
        f += 1
    return True


def make_quadratic_field(disc_param: int, involution_kind: str = "conjugation") -> InvolutiveAlgebra:
    """Q(sqrt D) with basis {1, w}, w^2 = D."""
    D = int(disc_param)
    if D in (0, 1) or not _is_squarefree(D):
        raise AlgebraError(f"D={D} must be a squarefree integer other than 0 and 1")
    if involution_kind == "trivial":
        if D < 0:
            raise AlgebraError("trivial involution requires a real quadratic field (D > 0)")
        inv = QMatrix.identity(2)
    elif involution_kind == "conjugation":
        inv = QMatrix.diagonal([1, -1])
    else:
        raise AlgebraError(f"unknown involution kind {involution_kind!r}")
    sc = (((1, 0), (0, 1)),
          ((0, 1), (D, 0)))
    kind = "real" if D > 0 else "imaginary"
    return InvolutiveAlgebra(2, sc, (1, 0), inv, label=f"Q(sqrt({D})) [{involution_kind}, {kind}]",
                             shape="quadratic", params=(D, involution_kind))


def make_rational_field() -> InvolutiveAlgebra:
    return InvolutiveAlgebra(1, (((1,),),), (1,), QMatrix.identity(1), label="Q",
                             shape="rational", params=())


def _quaternion_constants(a: Fraction, b: Fraction):
    # basis 1, i, j, k=ij ; i^2=a, j^2=b, ij=-ji=k, k^2=-ab, ik=a j, ki=-a j, jk=-b i, kj=b i
    table = {
        (0, 0): (1, 0, 0, 0), (0, 1): (0, 1, 0, 0), (0, 2): (0, 0, 1, 0), (0, 3): (0, 0, 0, 1),
        (1, 0): (0, 1, 0, 0), (1, 1): (a, 0, 0, 0), (1, 2): (0, 0, 0, 1), (1, 3): (0, 0, a, 0),
        (2, 0): (0, 0, 1, 0), (2, 1): (0, 0, 0, -1), (2, 2): (b, 0, 0, 0), (2, 3): (0, -b, 0, 0),
        (3, 0): (0, 0, 0, 1), (3, 1): (0, 0, -a, 0), (3, 2): (0, b, 0, 0), (3, 3): (-a * b, 0, 0, 0),
    }
    return tuple(tuple(table[i, j] for j in range(4)) for i in range(4))


def make_quaternion(a, b, involution_kind: str = "canonical", u: AlgebraElement | Sequence | None = None
                    ) -> InvolutiveAlgebra:
    """Quaternion algebra (a, b)_Q with the canonical involution or the
    orthogonal involution ``x -> u conj(x) u^-1`` for a pure invertible ``u``."""
    a, b = as_rational(a), as_rational(b)
    if a == 0 or b == 0:
        raise AlgebraError("quaternion parameters must be nonzero")
    sc = _quaternion_constants(a, b)
    bar = QMatrix.diagonal([1, -1, -1, -1])
    base = InvolutiveAlgebra(4, sc, (1, 0, 0, 0), bar, label=f"({a},{b})_Q [canonical]",
                             shape="quaternion", params=(a, b, "canonical"))
    if involution_kind == "canonical":
        return base
    if involution_kind != "orthogonal":
        raise AlgebraError(f"unknown involution kind {involution_kind!r}")
    if u is None:
        raise AlgebraError("orthogonal involution needs an element u")
    u = u if isinstance(u, AlgebraElement) else AlgebraElement(tuple(u))
    base._own(u)
    if u.coords[0] != 0:
        raise AlgebraError("u must be a pure quaternion")
    nrd = reduced_norm(base, u)
    if nrd == 0:
        raise AlgebraError("u must be invertible")
    u_inv = base.involute(u).scale(1 / nrd)
    cols = []
    for e in base.basis():
        cols.append(base.mul(base.mul(u, base.involute(e)), u_inv).coords)
    inv = QMatrix.from_rows(cols).transpose()
    return InvolutiveAlgebra(4, sc, (1, 0, 0, 0), inv,
                             label=f"({a},{b})_Q [orthogonal u={u}]",
                             shape="quaternion", params=(a, b, "orthogonal", u.coords))


# -- validation ---------------------------------------------------------------

def validate(A: InvolutiveAlgebra) -> list[str]:
    """All violated axioms (empty list means the algebra is valid)."""
    problems: list[str] = []
    E = A.basis()
    one = A.one()
    for i, x in enumerate(E):
        for j, y in enumerate(E):
            xy = A.mul(x, y)
            for k, z in enumerate(E):
                if A.mul(xy, z) != A.mul(x, A.mul(y, z)):
                    problems.append(f"associativity fails on basis triple (e{i}, e{j}, e{k})")
    for i, x in enumerate(E):
        if A.mul(one, x) != x or A.mul(x, one) != x:
            problems.append(f"unit is not a two-sided identity on e{i}")
    if A.involution @ A.involution != QMatrix.identity(A.dim):
        problems.append("involution squared is not the identity")
    if A.involute(one) != one:
        problems.append("involution does not fix 1")
    for i, x in enumerate(E):
        for j, y in enumerate(E):
            if A.involute(A.mul(x, y)) != A.mul(A.involute(y), A.involute(x)):
                problems.append(f"involution is not an anti-homomorphism on (e{i}, e{j})")
    return problems


# -- symmetric elements and Albert type ---------------------------------------

@dataclass(frozen=True)
class SymmetricSpace:
    basis: tuple[AlgebraElement, ...]
    eta: Fraction

    @property
    def dim(self) -> int:
        return len(self.basis)


def fixed_space(A: InvolutiveAlgebra) -> SymmetricSpace:
    """Basis of {x : x' = x}; the unit is placed first when it can be.

    Ordering: 1 first, then the remaining kernel vectors of (iota - id) reduced
    against it.  The first element plays the role of the polarization.
    """
    vecs = [AlgebraElement(v.entries) for v in kernel(A.involution - QMatrix.identity(A.dim))]
    one = A.one()
    basis: list[AlgebraElement] = [one]
    for v in vecs:
        trial = QMatrix.from_rows([b.coords for b in basis + [v]])
        if len(kernel(trial.transpose())) == 0:
            basis.append(v)
    return SymmetricSpace(tuple(basis), Fraction(len(basis), A.dim))


class AlbertKind(str, Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


ALBERT_ALPHA = {
    AlbertKind.I: Fraction(1),
    AlbertKind.II: Fraction(1, 2),
    AlbertKind.III: Fraction(-1, 2),
    AlbertKind.IV: Fraction(0),
}


@dataclass(frozen=True)
class AlbertType:
    kind: AlbertKind

    @property
    def alpha(self) -> Fraction:
        return ALBERT_ALPHA[self.kind]


def classify_albert(A: InvolutiveAlgebra) -> AlbertType:
    """Decide the Albert type from (commutativity, eta).

    Definiteness of quaternion algebras is not checked; the involution's
    fixed-space dimension alone separates II from III here.
    """
    eta = fixed_space(A).eta
    if A.is_commutative():
        if eta == 1:
            return AlbertType(AlbertKind.I)
        if eta == Fraction(1, 2):
            return AlbertType(AlbertKind.IV)
        raise Unclassified(f"commutative algebra with eta={eta}")
    if A.dim == 4 and A.center_dim() == 1:
        if eta == Fraction(3, 4):
            return AlbertType(AlbertKind.II)
        if eta == Fraction(1, 4):
            return AlbertType(AlbertKind.III)
        raise Unclassified(f"quaternion algebra with eta={eta}")
    raise Unclassified(f"unsupported algebra shape (dim={A.dim}, non-commutative)")


# -- norm forms ---------------------------------------------------------------

def reduced_trace(A: InvolutiveAlgebra, x: AlgebraElement) -> Fraction:
    """Reduced trace of a quaternion algebra: half the regular trace."""
    L = A.left_regular_rep(x)
    return sum(L[i, i] for i in range(A.dim)) / 2


def reduced_norm(A: InvolutiveAlgebra, x: AlgebraElement) -> Fraction:
    """Nrd(x) from ``x * (trd(x) - x) = Nrd(x) * 1``."""
    if A.shape == "quaternion":
        a, b = A.params[0], A.params[1]
        w, p, q, r = x.coords
        return w * w - a * p * p - b * q * q + a * b * r * r
    conj = A.scalar(reduced_trace(A, x)) - x
    prod = A.mul(x, conj)
    one = A.one()
    k = next(i for i, u in enumerate(one.coords) if u)
    return prod.coords[k] / one.coords[k]


def norm_form(A: InvolutiveAlgebra, x: AlgebraElement) -> tuple[Fraction, int]:
    """(value, polynomial degree) of the reduced norm of x over Q.

    Commutative algebras use the field norm det(left_regular_rep); quaternion
    algebras the reduced norm.
    """
    A._own(x)
    if A.is_commutative():
        return determinant(A.left_regular_rep(x)), A.dim
    if A.dim == 4 and A.center_dim() == 1:
        return reduced_norm(A, x), 2
    raise AlgebraError("norm form only available for commutative or quaternion algebras")


def deg_exponent(A: InvolutiveAlgebra, g: int) -> int:
    """Exponent e with deg = (reduced norm)^e on an abelian variety of dim g."""
    if g < 1:
        raise AlgebraError("abelian-variety dimension must be positive")
    m = A.dim if A.is_commutative() else 2
    if (2 * g) % m:
        raise AlgebraError(f"norm degree {m} does not divide 2g={2 * g}")
    return 2 * g // m


def deg(A: InvolutiveAlgebra, g: int, x: AlgebraElement) -> Fraction:
    """Degree of x as a homogeneous polynomial function of degree 2g."""
    e = deg_exponent(A, g)
    value, _ = norm_form(A, x)
    return value ** e


# -- the map phi -> (s -> phi' s phi) -----------------------------------------

def coordinates_in(S: SymmetricSpace, y: AlgebraElement) -> tuple[Fraction, ...]:
    B = QMatrix.from_rows([b.coords for b in S.basis]).transpose()
    try:
        sol = solve(B, QMatrix.column(y.coords))
    except NoSolution as exc:
        raise AlgebraError(f"{y} is not in the symmetric space") from exc
    return sol.entries


def n_map(A: InvolutiveAlgebra, S: SymmetricSpace, x: AlgebraElement) -> QMatrix:
    """Matrix of ``s -> x' s x`` on S; column j holds the image of basis j."""
    xp = A.involute(x)
    cols = [coordinates_in(S, A.mul(A.mul(xp, s), x)) for s in S.basis]
    return QMatrix.from_rows(cols).transpose()

