"""Exact Gaussian-rational scalars and dense exact matrices.

Every value in the package lives in Q(i): a scalar is ``re + im*i`` with
``re`` and ``im`` arbitrary-precision rationals (``gmpy2.mpq``).  Matrices
are immutable row-major tuples of scalars.  Nothing here ever rounds.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

__all__ = [
    "Scalar",
    "Matrix",
    "ShapeError",
    "SingularMatrixError",
    "as_scalar",
    "mul",
    "rref",
    "kernel_basis",
    "inverse",
    "transpose",
    "conj_transpose",
    "rank",
    "column_space",
    "block_diag",
    "hstack",
    "vstack",
]


class ShapeError(ValueError):
    """Operand dimensions are incompatible."""


class SingularMatrixError(ValueError):
    """Raised by :func:`inverse` on a rank-deficient matrix."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


_ZERO = mpq(0)
_ONE = mpq(1)


_RATIONAL = re.compile(r"[+-]?\d+(?:/\d+)?")


def _parse_rational(text: str) -> mpq:
    if not _RATIONAL.fullmatch(text):
        raise ValueError(text)
    return mpq(text.lstrip("+"))


def _q(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return _parse_rational(x.strip())
    return mpq(x)


class Scalar:
    """Element of Q(i).  Immutable and hashable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if type(re) is type(_ZERO) else _q(re))
        object.__setattr__(self, "im", im if type(im) is type(_ZERO) else _q(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def _raw(cls, re, im):
        s = object.__new__(cls)
        object.__setattr__(s, "re", re)
        object.__setattr__(s, "im", im)
        return s

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if type(other) is not Scalar:
            other = as_scalar(other)
        return Scalar._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is not Scalar:
            other = as_scalar(other)
        return Scalar._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_scalar(other) - self

    def __neg__(self):
        return Scalar._raw(-self.re, -self.im)

    def __mul__(self, other):
        if type(other) is not Scalar:
            other = as_scalar(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return Scalar._raw(a * c, _ZERO)
        return Scalar._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if type(other) is not Scalar:
            other = as_scalar(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_scalar(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = Scalar._raw(_ONE, _ZERO)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "Scalar":
        a, b = self.re, self.im
        if not b:
            if not a:
                raise ZeroDivisionError("inverse of zero scalar")
            return Scalar._raw(1 / a, _ZERO)
        den = a * a + b * b
        return Scalar._raw(a / den, -b / den)

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    # comparisons ----------------------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if type(other) is not Scalar:
            try:
                other = as_scalar(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    @property
    def is_real(self) -> bool:
        return not self.im

    # text form ------------------------------------------------------------
    def __str__(self):
        if not self.im:
            return str(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __repr__(self):
        return f"Scalar('{self}')"

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Parse ``p/q`` or ``p/q+r/si`` (also ``r/si``, ``i``, ``-i``)."""
        t = text.strip().replace(" ", "")
        try:
            if not t.endswith("i"):
                return cls(_parse_rational(t))
            body = t[:-1]
            cut = max(body.rfind("+"), body.rfind("-"))
            if cut > 0:
                re_part, im_part = body[:cut], body[cut:]
            else:
                re_part, im_part = "0", body
            if im_part in ("", "+"):
                im_part = "1"
            elif im_part == "-":
                im_part = "-1"
            return cls(_parse_rational(re_part), _parse_rational(im_part))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a Gaussian rational: {text!r}") from None


def as_scalar(x) -> Scalar:
    if type(x) is Scalar:
        return x
    if isinstance(x, str):
        return Scalar.parse(x)
    if isinstance(x, complex):
        raise TypeError("floating-point complex values are not exact")
    if isinstance(x, float):
        raise TypeError("floating-point values are not exact")
    return Scalar(x)


ZERO = Scalar(0)
ONE = Scalar(1)


class Matrix:
    """Dense exact matrix over Q(i).

    ``Matrix([[1, 2], [3, 4]])`` coerces ints, Fractions, strings and
    Scalars.  Instances are immutable; ``m[i, j]`` reads an entry.
    """

    __slots__ = ("rows", "cols", "_r")

    def __init__(self, data: Iterable[Iterable] = (), cols: int | None = None):
        r = tuple(tuple(as_scalar(x) for x in row) for row in data)
        if r:
            widths = {len(row) for row in r}
            if len(widths) != 1:
                raise ShapeError("ragged rows")
            c = widths.pop()
            if cols is not None and cols != c:
                raise ShapeError(f"expected {cols} columns, got {c}")
        else:
            c = cols or 0
        self._r = r
        self.rows = len(r)
        self.cols = c

    @classmethod
    def _wrap(cls, r, rows, cols) -> "Matrix":
        m = object.__new__(cls)
        m._r = r
        m.rows = rows
        m.cols = cols
        return m

    # constructors ---------------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "Matrix":
        cols = rows if cols is None else cols
        return cls._wrap(tuple((ZERO,) * cols for _ in range(rows)), rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._wrap(
            tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)),
            n,
            n,
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "Matrix":
        columns = [list(c) for c in columns]
        if not columns:
            return cls.zeros(rows or 0, 0)
        return cls(list(zip(*columns)))

    @classmethod
    def column(cls, entries: Sequence) -> "Matrix":
        return cls([[x] for x in entries])

    # access ---------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self._r[i][j]

    def row(self, i: int) -> tuple:
        return self._r[i]

    def col(self, j: int) -> tuple:
        return tuple(row[j] for row in self._r)

    def tolist(self) -> list[list[Scalar]]:
        return [list(row) for row in self._r]

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.cols)]

    def submatrix(self, rows: Sequence[int] | slice, cols: Sequence[int] | slice) -> "Matrix":
        if isinstance(rows, slice):
            rows = range(*rows.indices(self.rows))
        if isinstance(cols, slice):
            cols = range(*cols.indices(self.cols))
        rows, cols = list(rows), list(cols)
        return Matrix._wrap(
            tuple(tuple(self._r[i][j] for j in cols) for i in rows), len(rows), len(cols)
        )

    def replace(self, i: int, j: int, value) -> "Matrix":
        r = [list(row) for row in self._r]
        r[i][j] = as_scalar(value)
        return Matrix._wrap(tuple(tuple(row) for row in r), self.rows, self.cols)

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(x for row in self._r for x in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._r == other._r

    def __hash__(self):
        return hash((self.rows, self.cols, self._r))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return Matrix._wrap(
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self._r, other._r)),
            self.rows,
            self.cols,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ShapeError(f"cannot subtract {other.shape} from {self.shape}")
        return Matrix._wrap(
            tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(self._r, other._r)),
            self.rows,
            self.cols,
        )

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "Matrix":
        c = as_scalar(c)
        return Matrix._wrap(
            tuple(tuple(c * x for x in row) for row in self._r), self.rows, self.cols
        )

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mul(self, other)

    def __pow__(self, k: int) -> "Matrix":
        if not self.is_square():
            raise ShapeError("power of a non-square matrix")
        if k < 0:
            return inverse(self) ** (-k)
        out = Matrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    @property
    def T(self) -> "Matrix":
        return transpose(self)

    @property
    def H(self) -> "Matrix":
        return conj_transpose(self)

    # text -----------------------------------------------------------------
    def to_text(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self._r]

    def to_json(self) -> str:
        """Canonical matrix text: JSON array of rows of scalar strings."""
        return json.dumps(self.to_text()) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Matrix":
        data = json.loads(text)
        if not isinstance(data, list) or any(not isinstance(r, list) for r in data):
            raise ValueError("matrix JSON must be an array of arrays")
        return cls([[_parse_cell(x) for x in row] for row in data])

    def __repr__(self):
        return f"Matrix({self.to_text()})"

    def pretty(self) -> str:
        cells = self.to_text()
        if not cells:
            return f"[{self.rows}x{self.cols} empty]"
        w = max((len(c) for row in cells for c in row), default=1)
        return "\n".join("[" + " ".join(c.rjust(w) for c in row) + "]" for row in cells)


def _parse_cell(x):
    if isinstance(x, str):
        return Scalar.parse(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return Scalar(x)
    raise ValueError(f"matrix entries must be scalar strings, got {x!r}")


# ---------------------------------------------------------------------------
# core operations


def mul(a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    bcols = list(zip(*b._r)) if b.rows else [()] * b.cols
    out = []
    for row in a._r:
        nz = [(k, x) for k, x in enumerate(row) if x]
        new = []
        for col in bcols:
            acc = ZERO
            for k, x in nz:
                y = col[k]
                if y:
                    acc = acc + x * y
            new.append(acc)
        out.append(tuple(new))
    return Matrix._wrap(tuple(out), a.rows, b.cols)


def transpose(m: Matrix) -> Matrix:
    if not m.rows:
        return Matrix.zeros(m.cols, 0)
    return Matrix._wrap(tuple(zip(*m._r)), m.cols, m.rows)


def conj_transpose(m: Matrix) -> Matrix:
    t = transpose(m)
    return Matrix._wrap(
        tuple(tuple(x.conjugate() for x in row) for row in t._r), t.rows, t.cols
    )


def _rref_rows(rows: list[list[Scalar]], ncols: int):
    """In-place reduced row echelon form.  Returns pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r]
        inv = piv[c].inverse()
        if inv != ONE:
            piv = [x * inv for x in piv]
            rows[r] = piv
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [x - f * y if y else x for x, y in zip(rows[i], piv)]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and the (strictly increasing) pivot columns.

    Pivot search takes the first row at or below the current one with a
    nonzero entry in the leftmost remaining column.
    """
    rows = [list(row) for row in m._r]
    pivots = _rref_rows(rows, m.cols)
    return Matrix._wrap(tuple(tuple(r) for r in rows), m.rows, m.cols), tuple(pivots)


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Matrix) -> Matrix:
    """Columns spanning the right null space, one per free column (ascending)."""
    red, pivots = rref(m)
    pivset = set(pivots)
    free = [j for j in range(m.cols) if j not in pivset]
    basis = []
    for f in free:
        v = [ZERO] * m.cols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -red[i, f]
        basis.append(v)
    if not basis:
        return Matrix.zeros(m.cols, 0)
    return Matrix.from_columns(basis)


def column_space(m: Matrix) -> Matrix:
    """Canonical basis of the column space: columns of rref(mᵀ)ᵀ, nonzero only."""
    red, pivots = rref(transpose(m))
    if not pivots:
        return Matrix.zeros(m.rows, 0)
    return transpose(red.submatrix(range(len(pivots)), range(red.cols)))


def inverse(m: Matrix) -> Matrix:
    if not m.is_square():
        raise ShapeError(f"inverse of non-square {m.shape} matrix")
    n = m.rows
    rows = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(m._r)]
    pivots = _rref_rows(rows, n)
    if len(pivots) < n:
        missing = next(j for j in range(n) if j not in pivots)
        raise SingularMatrixError(
            f"matrix is singular: column {missing} depends on earlier columns", column=missing
        )
    return Matrix._wrap(tuple(tuple(r[n:]) for r in rows), n, n)


def block_diag(*blocks: Matrix) -> Matrix:
    n = sum(b.rows for b in blocks)
    c = sum(b.cols for b in blocks)
    out = [[ZERO] * c for _ in range(n)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            out[r0 + i][c0 : c0 + b.cols] = b._r[i]
        r0 += b.rows
        c0 += b.cols
    return Matrix._wrap(tuple(tuple(r) for r in out), n, c)


def hstack(*ms: Matrix) -> Matrix:
    ms = [m for m in ms]
    if not ms:
        raise ShapeError("hstack of nothing")
    rows = ms[0].rows
    if any(m.rows != rows for m in ms):
        raise ShapeError("hstack row mismatch")
    return Matrix._wrap(
        tuple(tuple(x for m in ms for x in m._r[i]) for i in range(rows)),
        rows,
        sum(m.cols for m in ms),
    )


def vstack(*ms: Matrix) -> Matrix:
    cols = ms[0].cols
    if any(m.cols != cols for m in ms):
        raise ShapeError("vstack column mismatch")
    return Matrix._wrap(tuple(r for m in ms for r in m._r), sum(m.rows for m in ms), cols)
