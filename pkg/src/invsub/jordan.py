"""Jordan structures, backward shifts and the commutant of a Jordan matrix.

Blocks are addressed the way the literature does: block ``j`` and
position ``k`` are both 1-based, so ``elementary_vector(s, 2, 1)`` is the
eigenvector of the second block.  Everything else in the package uses
0-based offsets internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .exact import (
    ONE,
    ZERO,
    Matrix,
    Scalar,
    ShapeError,
    as_scalar,
    block_diag,
    inverse,
    kernel_basis,
    rank,
)

__all__ = [
    "JordanStructure",
    "BlockIndex",
    "UnsupportedSpectrumError",
    "jordan_matrix",
    "backward_shift_power",
    "padded_shift",
    "elementary_vector",
    "is_upper_triangular_toeplitz",
    "in_commutant_structural",
    "commutant_violations",
    "commutes",
    "jordanize",
    "characteristic_polynomial",
]


class UnsupportedSpectrumError(ValueError):
    """The spectrum cannot be represented exactly over Q(i)."""


@dataclass(frozen=True)
class JordanStructure:
    """Ordered ``(eigenvalue, size)`` pairs describing a Jordan matrix.

    Blocks sharing an eigenvalue must be adjacent.  With ``ordered=True``
    (the default) sizes inside each eigenvalue group must also be
    non-increasing; expanded structures built during a construction may
    relax that.
    """

    blocks: tuple[tuple[Scalar, int], ...]
    ordered: bool = True

    def __init__(self, blocks: Iterable[Sequence], ordered: bool = True):
        norm = tuple((as_scalar(lam), int(size)) for lam, size in blocks)
        object.__setattr__(self, "blocks", norm)
        object.__setattr__(self, "ordered", ordered)
        seen = []
        for lam, size in norm:
            if size < 1:
                raise ValueError(f"block size must be positive, got {size}")
            if seen and seen[-1] == lam:
                continue
            if lam in seen:
                raise ValueError(f"blocks with eigenvalue {lam} are not adjacent")
            seen.append(lam)
        if ordered:
            for (l1, s1), (l2, s2) in zip(norm, norm[1:]):
                if l1 == l2 and s2 > s1:
                    raise ValueError(
                        f"block sizes for eigenvalue {l1} must be non-increasing: {s1} then {s2}"
                    )

    # convenience constructors -------------------------------------------
    @classmethod
    def nilpotent(cls, *sizes: int) -> "JordanStructure":
        return cls([(0, s) for s in sizes])

    # derived data ---------------------------------------------------------
    @property
    def n(self) -> int:
        return sum(s for _, s in self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(s for _, s in self.blocks)

    @property
    def eigenvalues(self) -> tuple[Scalar, ...]:
        return tuple(lam for lam, _ in self.blocks)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for _, s in self.blocks:
            out.append(acc)
            acc += s
        return tuple(out)

    def __len__(self):
        return len(self.blocks)

    def groups(self) -> list[tuple[Scalar, list[int]]]:
        """``[(eigenvalue, [block indices...]), ...]`` in block order."""
        out: list[tuple[Scalar, list[int]]] = []
        for i, (lam, _) in enumerate(self.blocks):
            if out and out[-1][0] == lam:
                out[-1][1].append(i)
            else:
                out.append((lam, [i]))
        return out

    def sub(self, indices: Sequence[int]) -> "JordanStructure":
        return JordanStructure([self.blocks[i] for i in indices], ordered=False)

    def coordinates(self, block: int) -> range:
        """0-based coordinate range of a (0-based) block."""
        o = self.offsets[block]
        return range(o, o + self.blocks[block][1])

    def locate(self, coord: int) -> tuple[int, int]:
        """0-based ``(block, position)`` of a coordinate."""
        for b, o in enumerate(self.offsets):
            if coord < o + self.blocks[b][1]:
                return b, coord - o
        raise IndexError(coord)

    def nilpotent_part(self) -> Matrix:
        """J minus its diagonal."""
        return block_diag(*(backward_shift_power(s, 1) for s in self.sizes))

    # text form ------------------------------------------------------------
    def to_data(self) -> list[list]:
        return [[str(lam), size] for lam, size in self.blocks]

    def to_json(self) -> str:
        return json.dumps(self.to_data())

    @classmethod
    def from_data(cls, data, ordered: bool = True) -> "JordanStructure":
        return cls([(Scalar.parse(str(lam)), int(size)) for lam, size in data], ordered=ordered)

    @classmethod
    def from_json(cls, text: str) -> "JordanStructure":
        return cls.from_data(json.loads(text))

    def __str__(self):
        return "[" + ", ".join(f"({lam},{s})" for lam, s in self.blocks) + "]"


@dataclass(frozen=True)
class BlockIndex:
    """1-based ``(block, position)`` address of an elementary basis vector."""

    block: int
    position: int


def jordan_matrix(s: JordanStructure) -> Matrix:
    blocks = []
    for lam, size in s.blocks:
        b = backward_shift_power(size, 1)
        blocks.append(b + Matrix.identity(size).scale(lam))
    return block_diag(*blocks)


def backward_shift_power(size: int, k: int) -> Matrix:
    """``(S*)^k`` on C^size: ones on the k-th superdiagonal only."""
    if not 0 <= k <= size:
        raise ValueError(f"shift power {k} outside 0..{size}")
    return Matrix._wrap(
        tuple(
            tuple(ONE if j - i == k else ZERO for j in range(size)) for i in range(size)
        ),
        size,
        size,
    )


def padded_shift(rows: int, cols: int, k: int) -> Matrix:
    """``(S*)^k`` of order ``min(rows, cols)``, zero-padded below or on the left.

    The result is upper-triangular Toeplitz in the rectangular sense.
    """
    m = min(rows, cols)
    if not 0 <= k <= m:
        raise ValueError(f"shift power {k} outside 0..{m}")
    lead = cols - m
    return Matrix._wrap(
        tuple(
            tuple(ONE if i < m and j - lead - i == k else ZERO for j in range(cols))
            for i in range(rows)
        ),
        rows,
        cols,
    )


def elementary_vector(s: JordanStructure, block: int, position: int | None = None) -> Matrix:
    """Column ``e_{jk}``: 1 in block ``j``'s ``k``-th slot (both 1-based)."""
    if isinstance(block, BlockIndex):
        block, position = block.block, block.position
    if not 1 <= block <= len(s):
        raise IndexError(f"block {block} out of range 1..{len(s)}")
    size = s.blocks[block - 1][1]
    if not 1 <= position <= size:
        raise IndexError(f"position {position} out of range 1..{size} in block {block}")
    idx = s.offsets[block - 1] + position - 1
    return Matrix.column([ONE if i == idx else ZERO for i in range(s.n)])


def _toeplitz_defect(m: Matrix):
    """First ``(p, q, why)`` breaking the rectangular Toeplitz pattern, else None."""
    j, k = m.rows, m.cols
    lead = max(k - j, 0)
    for p in range(j):
        for q in range(k):
            x = m[p, q]
            if q - p < lead:
                if x:
                    return p, q, f"is {x}, must be 0"
            elif p + 1 < j and q + 1 < k and x != m[p + 1, q + 1]:
                return p, q, f"is {x} but the next diagonal entry is {m[p + 1, q + 1]}"
    return None


def is_upper_triangular_toeplitz(m: Matrix) -> bool:
    """Rectangular upper-triangular Toeplitz test.

    Tall blocks have zero rows at the bottom, wide blocks zero columns on
    the left; equivalently entry ``(p, q)`` must vanish when
    ``q - p < cols - rows`` (or ``q < p`` when tall).
    """
    return _toeplitz_defect(m) is None


def _block(m: Matrix, s: JordanStructure, a: int, b: int) -> Matrix:
    return m.submatrix(s.coordinates(a), s.coordinates(b))


def commutant_violations(m: Matrix, s: JordanStructure) -> list[tuple[int, int, str]]:
    """Blocks of ``m`` breaking the commutant pattern, as ``(a, b, reason)``."""
    if m.shape != (s.n, s.n):
        raise ShapeError(f"matrix is {m.shape}, structure needs {s.n}x{s.n}")
    bad = []
    for a, (la, _) in enumerate(s.blocks):
        for b, (lb, _) in enumerate(s.blocks):
            blk = _block(m, s, a, b)
            oa, ob = s.offsets[a], s.offsets[b]
            if la != lb:
                if not blk.is_zero():
                    p, q = next((p, q) for p in range(blk.rows) for q in range(blk.cols) if blk[p, q])
                    bad.append((a, b, f"entry ({oa + p + 1},{ob + q + 1}) is {blk[p, q]}, "
                                      "must be 0 between different eigenvalues"))
            else:
                defect = _toeplitz_defect(blk)
                if defect:
                    p, q, why = defect
                    bad.append((a, b, f"entry ({oa + p + 1},{ob + q + 1}) {why}"))
    return bad


def in_commutant_structural(m: Matrix, s: JordanStructure) -> bool:
    return not commutant_violations(m, s)


def commutes(x: Matrix, y: Matrix) -> bool:
    return x @ y == y @ x


# ---------------------------------------------------------------------------
# Jordan decomposition of exact input


def characteristic_polynomial(a: Matrix) -> list[Scalar]:
    """Coefficients of det(xI - a), highest degree first (Faddeev-LeVerrier)."""
    if not a.is_square():
        raise ShapeError("characteristic polynomial of a non-square matrix")
    n = a.rows
    coeffs = [ONE]
    mk = Matrix.zeros(n)
    ident = Matrix.identity(n)
    for k in range(1, n + 1):
        mk = a @ mk + ident.scale(coeffs[-1])
        am = a @ mk
        tr = ZERO
        for i in range(n):
            tr = tr + am[i, i]
        coeffs.append(-tr / k)
    return coeffs


def _factor_roots(coeffs: Sequence[Scalar]) -> list[tuple[Scalar, int]]:
    import sympy as sp

    x = sp.Symbol("x")
    sp_coeffs = [sp.Rational(int(c.re.numerator), int(c.re.denominator))
                 + sp.I * sp.Rational(int(c.im.numerator), int(c.im.denominator))
                 for c in coeffs]
    poly = sp.Poly(sp_coeffs, x, domain="QQ_I")
    _, factors = sp.factor_list(poly)
    roots = []
    for f, mult in factors:
        if f.degree() != 1:
            raise UnsupportedSpectrumError(
                f"characteristic polynomial has an irreducible factor {f.as_expr()} "
                "over the Gaussian rationals; supply eigenvalues or a Jordan-form matrix"
            )
        c1, c0 = f.all_coeffs()
        r = sp.nsimplify(-c0 / c1)
        re_, im_ = sp.re(r), sp.im(r)
        roots.append((Scalar(f"{re_.p}/{re_.q}", f"{im_.p}/{im_.q}"), int(mult)))
    return roots


def _structure_if_jordan(a: Matrix) -> JordanStructure | None:
    n = a.rows
    blocks: list[list] = []
    for i in range(n):
        lam = a[i, i]
        if i and a[i - 1, i] == ONE and blocks[-1][0] == lam:
            blocks[-1][1] += 1
        else:
            blocks.append([lam, 1])
    try:
        s = JordanStructure(blocks)
    except ValueError:
        return None
    return s if jordan_matrix(s) == a else None


def _sort_key(lam: Scalar):
    return (lam.re, lam.im)


def _chains_for_eigenvalue(a: Matrix, lam: Scalar) -> list[list[tuple]]:
    """Jordan chains (eigenvector first) of ``a`` for one eigenvalue."""
    n = a.rows
    nil = a - Matrix.identity(n).scale(lam)
    kernels = [Matrix.zeros(n, 0)]
    power = Matrix.identity(n)
    while True:
        power = power @ nil
        k = kernel_basis(power)
        if k.cols == kernels[-1].cols:
            break
        kernels.append(k)
    height = len(kernels) - 1
    chains: list[list[tuple]] = []
    level_vectors: list[tuple] = []  # chain vectors already sitting at this height
    for h in range(height, 0, -1):
        base = [kernels[h - 1].col(j) for j in range(kernels[h - 1].cols)] + level_vectors
        current_rank = rank(Matrix.from_columns(base, rows=n)) if base else 0
        new_tops = []
        for j in range(kernels[h].cols):
            cand = kernels[h].col(j)
            trial = base + [cand]
            r = rank(Matrix.from_columns(trial, rows=n))
            if r > current_rank:
                base, current_rank = trial, r
                new_tops.append(cand)
        for top in new_tops:
            chain = [top]
            for _ in range(h - 1):
                chain.append((nil @ Matrix.column(chain[-1])).col(0))
            chains.append(chain[::-1])
        level_vectors = [
            (nil @ Matrix.column(v)).col(0) for v in level_vectors + new_tops
        ]
    chains.sort(key=len, reverse=True)
    return chains


def jordanize(
    a: Matrix, eigenvalues: Sequence | None = None
) -> tuple[Matrix, JordanStructure]:
    """Return ``(Q, s)`` with ``Q⁻¹ a Q == jordan_matrix(s)`` exactly.

    Eigenvalues are found by factoring the characteristic polynomial over
    Q(i) unless supplied.  Columns of ``Q`` inside each block form a
    Jordan chain, eigenvector first.
    """
    if not a.is_square():
        raise ShapeError(f"jordanize needs a square matrix, got {a.shape}")
    n = a.rows
    s = _structure_if_jordan(a)
    if s is not None:
        return Matrix.identity(n), s
    if eigenvalues is None:
        lams = [lam for lam, _ in _factor_roots(characteristic_polynomial(a))]
    else:
        lams = list(dict.fromkeys(as_scalar(x) for x in eigenvalues))
    lams.sort(key=_sort_key)
    columns: list[tuple] = []
    blocks = []
    for lam in lams:
        for chain in _chains_for_eigenvalue(a, lam):
            columns.extend(chain)
            blocks.append((lam, len(chain)))
    if len(columns) != n:
        raise UnsupportedSpectrumError(
            f"eigenvalues {[str(x) for x in lams]} account for only {len(columns)} of "
            f"{n} dimensions; supply the full eigenvalue list or a Jordan-form matrix"
        )
    q = Matrix.from_columns(columns)
    s = JordanStructure(blocks)
    if inverse(q) @ a @ q != jordan_matrix(s):
        raise AssertionError("jordanize produced Q with Q^-1 A Q != J")
    return q, s
