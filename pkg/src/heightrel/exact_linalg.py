"""Exact rational linear algebra and integer lattice reduction.

Rationals are :class:`fractions.Fraction`; matrices are immutable, dense and
row-major.  Nothing in here ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Rational = Fraction
IntegerVector = tuple[int, ...]

DEFAULT_DELTA = Fraction(99, 100)


class NoSolution(ValueError):
    """The right-hand side is not in the column span of the matrix."""


class DependentBasis(ValueError):
    """Lattice basis vectors are linearly dependent."""


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and decimal/fraction strings to Fraction.

    Floats are refused: exact data must not pass through binary floating point.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


@dataclass(frozen=True)
class QMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimension")
        entries = tuple(as_rational(e) for e in self.entries)
        if len(entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(entries)}"
            )
        object.__setattr__(self, "entries", entries)

    # -- construction -----------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> QMatrix:
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(e for r in rows for e in r))

    @classmethod
    def column(cls, values: Iterable) -> QMatrix:
        values = tuple(values)
        return cls(len(values), 1, values)

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> QMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diagonal(cls, values: Sequence) -> QMatrix:
        n = len(values)
        return cls(n, n, tuple(values[i] if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def block_diagonal(cls, blocks: Sequence[QMatrix]) -> QMatrix:
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = [[Fraction(0)] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b[i, j]
            r0 += b.rows
            c0 += b.cols
        return cls.from_rows(out) if n else cls(0, m, ())

    # -- access -----------------------------------------------------------
    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i)
        )

    # -- algebra ----------------------------------------------------------
    def transpose(self) -> QMatrix:
        return QMatrix(self.cols, self.rows,
                       tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    @property
    def T(self) -> QMatrix:
        return self.transpose()

    def __add__(self, other: QMatrix) -> QMatrix:
        self._same_shape(other)
        return QMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: QMatrix) -> QMatrix:
        self._same_shape(other)
        return QMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> QMatrix:
        return QMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c) -> QMatrix:
        c = as_rational(c)
        return QMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def __matmul__(self, other: QMatrix) -> QMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ocols = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for c in ocols:
                out.append(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)))
        return QMatrix(self.rows, other.cols, tuple(out))

    def _same_shape(self, other: QMatrix) -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __str__(self) -> str:
        return "[" + ", ".join(
            "[" + ", ".join(str(e) for e in self.row(i)) + "]" for i in range(self.rows)
        ) + "]"


def primitive(values: Sequence) -> IntegerVector:
    """Scale a nonzero rational vector to integers with content 1 and a
    positive first nonzero entry."""
    values = [as_rational(v) for v in values]
    den = 1
    for v in values:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in values]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    lead = next(v for v in ints if v)
    if lead < 0:
        g = -g
    return tuple(v // g for v in ints)


def rref(m: QMatrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    a = m.to_rows()
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        if r == m.rows:
            break
        p = next((i for i in range(r, m.rows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        pivot_row = a[r]
        for i in range(m.rows):
            f = a[i][c]
            if i != r and f:
                a[i] = [x - f * y for x, y in zip(a[i], pivot_row)]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m: QMatrix) -> int:
    return len(rref(m)[1])


def kernel(m: QMatrix) -> list[QMatrix]:
    """Basis of the right null space as normalized integer column vectors."""
    rows, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(QMatrix.column(primitive(v)))
    return basis


def kernel_vectors(m: QMatrix) -> list[IntegerVector]:
    """Same as :func:`kernel` but as plain integer tuples."""
    return [tuple(int(x) for x in v.entries) for v in kernel(m)]


def determinant(m: QMatrix) -> Fraction:
    if not m.is_square:
        raise ValueError(f"determinant of non-square {m.rows}x{m.cols} matrix")
    a = m.to_rows()
    n = m.rows
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] * inv
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def solve(m: QMatrix, rhs: QMatrix) -> QMatrix:
    """Some x with ``m @ x == rhs`` (free variables set to zero).

    Raises :class:`NoSolution` when the system is inconsistent.
    """
    if rhs.rows != m.rows:
        raise ValueError("rhs row count does not match matrix")
    aug = QMatrix.from_rows([list(m.row(i)) + list(rhs.row(i)) for i in range(m.rows)]) \
        if m.rows else QMatrix(0, m.cols + rhs.cols, ())
    rows, pivots = rref(aug)
    if any(p >= m.cols for p in pivots):
        raise NoSolution("right-hand side outside the column span")
    x = [[Fraction(0)] * rhs.cols for _ in range(m.cols)]
    for row, p in zip(rows, pivots):
        x[p] = row[m.cols:]
    return QMatrix.from_rows(x) if m.cols else QMatrix(0, rhs.cols, ())


# -- lattice reduction ------------------------------------------------------

def _round_div(a: int, b: int) -> int:
    """Nearest integer to a/b for b > 0 (ties towards +inf)."""
    return (2 * a + b) // (2 * b)


def lll_reduce(basis: Sequence[Sequence[int]], delta=DEFAULT_DELTA) -> list[IntegerVector]:
    """delta-LLL reduction of an integer basis (rows).

    Integral variant of the algorithm: the Gram-Schmidt data is carried as the
    integers d_i (leading Gram determinants) and lambda_ij = d_j * mu_ij, so the
    arithmetic is exact without any rational normalization.
    """
    delta = as_rational(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must lie strictly between 1/4 and 1")
    b = [list(map(int, v)) for v in basis]
    n = len(b)
    if n == 0:
        return []
    dim = len(b[0])
    if any(len(v) != dim for v in b):
        raise ValueError("basis vectors of unequal length")
    p, q = delta.numerator, delta.denominator

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    # 1-based bookkeeping below keeps the recurrences readable.
    d = [0] * (n + 1)
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    d[0] = 1
    d[1] = dot(b[0], b[0])
    if d[1] == 0:
        raise DependentBasis("zero vector in basis")

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l]:
            r = _round_div(lam[k][l], d[l])
            bl = b[l - 1]
            b[k - 1] = [x - r * y for x, y in zip(b[k - 1], bl)]
            lam[k][l] -= r * d[l]
            for i in range(1, l):
                lam[k][i] -= r * lam[l][i]

    def swap(k, kmax):
        b[k - 1], b[k - 2] = b[k - 2], b[k - 1]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lk = lam[k][k - 1]
        bb = (d[k - 2] * d[k] + lk * lk) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lk * t) // d[k - 1]
            lam[i][k - 1] = (bb * t + lk * lam[i][k]) // d[k]
        d[k - 1] = bb

    k, kmax = 2, 1
    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = dot(b[k - 1], b[j - 1])
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise DependentBasis("basis vectors are linearly dependent")
                    d[k] = u
        while True:
            red(k, k - 1)
            lk = lam[k][k - 1]
            if q * (d[k] * d[k - 2] + lk * lk) < p * d[k - 1] * d[k - 1]:
                swap(k, kmax)
                k = max(2, k - 1)
            else:
                break
        for l in range(k - 2, 0, -1):
            red(k, l)
        k += 1
    return [tuple(v) for v in b]


def gram_schmidt(basis: Sequence[Sequence[int]]) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """Exact rational Gram-Schmidt: returns (orthogonal vectors b*, mu)."""
    bs: list[list[Fraction]] = []
    n = len(basis)
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i, v in enumerate(basis):
        w = [Fraction(x) for x in v]
        for j in range(i):
            nj = sum(x * x for x in bs[j])
            mu[i][j] = sum(Fraction(x) * y for x, y in zip(v, bs[j])) / nj
            w = [x - mu[i][j] * y for x, y in zip(w, bs[j])]
        bs.append(w)
    return bs, mu


def is_lll_reduced(basis: Sequence[Sequence[int]], delta=DEFAULT_DELTA) -> bool:
    """Check size reduction and the Lovasz condition with plain rational
    Gram-Schmidt (independent of the integral recurrences above)."""
    delta = as_rational(delta)
    bs, mu = gram_schmidt(basis)
    norms = [sum(x * x for x in v) for v in bs]
    n = len(basis)
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for k in range(1, n):
        if norms[k] < (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            return False
    return True
