"""Subspaces of C^n in canonical form, Jordan chains, and type signatures."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .exact import (
    ONE,
    ZERO,
    Matrix,
    Scalar,
    ShapeError,
    as_scalar,
    conj_transpose,
    hstack,
    kernel_basis,
    rank,
    rref,
    transpose,
)
from .jordan import JordanStructure, jordan_matrix

__all__ = [
    "Subspace",
    "Chain",
    "ChainSpec",
    "TypeSignature",
    "InvarianceError",
    "is_invariant",
    "chain_decompose",
    "is_marked",
    "all_subspaces_marked",
    "signature",
    "nil_apply",
    "vector_height",
]


class InvarianceError(ValueError):
    """A subspace is not invariant; ``witness`` is a basis vector that escapes."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


Vector = tuple  # tuple of Scalar


def _vec(v) -> Vector:
    if isinstance(v, Matrix):
        if v.cols != 1:
            raise ShapeError(f"expected a column vector, got {v.shape}")
        return v.col(0)
    return tuple(as_scalar(x) for x in v)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of C^n held as a canonical basis (column-rref, full rank)."""

    n: int
    basis: Matrix

    def __init__(self, n: int, spanning: Matrix | Iterable | None = None):
        if spanning is None:
            spanning = Matrix.zeros(n, 0)
        elif not isinstance(spanning, Matrix):
            cols = [_vec(v) for v in spanning]
            spanning = Matrix.from_columns(cols) if cols else Matrix.zeros(n, 0)
        if spanning.rows != n:
            raise ShapeError(f"spanning vectors have length {spanning.rows}, expected {n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "basis", _canonical(spanning))

    @classmethod
    def span(cls, *vectors) -> "Subspace":
        vs = [_vec(v) for v in vectors]
        return cls(len(vs[0]), vs)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, Matrix.identity(n))

    @classmethod
    def kernel(cls, m: Matrix) -> "Subspace":
        return cls(m.cols, kernel_basis(m))

    @classmethod
    def image(cls, m: Matrix) -> "Subspace":
        return cls(m.rows, m)

    @property
    def dim(self) -> int:
        return self.basis.cols

    def vectors(self) -> list[Vector]:
        return self.basis.columns()

    def contains(self, other) -> bool:
        if isinstance(other, Subspace):
            if other.n != self.n:
                raise ShapeError("ambient dimensions differ")
            return self.sum(other).dim == self.dim
        v = _vec(other)
        if self.dim == 0:
            return not any(v)
        return rank(hstack(self.basis, Matrix.column(v))) == self.dim

    __contains__ = contains

    def sum(self, other: "Subspace") -> "Subspace":
        return Subspace(self.n, hstack(self.basis, other.basis))

    __add__ = sum

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.n)
        k = kernel_basis(hstack(self.basis, other.basis))
        if k.cols == 0:
            return Subspace.zero(self.n)
        return Subspace(self.n, self.basis @ k.submatrix(range(self.dim), range(k.cols)))

    __and__ = intersect

    def apply(self, m: Matrix) -> "Subspace":
        """Image ``m(self)``."""
        return Subspace(m.rows, m @ self.basis)

    def orthogonal_complement(self) -> "Subspace":
        """Complement under the standard Hermitian inner product."""
        if self.dim == 0:
            return Subspace.full(self.n)
        return Subspace(self.n, kernel_basis(conj_transpose(self.basis)))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.basis == other.basis

    def __hash__(self):
        return hash((self.n, self.basis))

    def __repr__(self):
        return f"Subspace(n={self.n}, dim={self.dim}, basis={self.basis.to_text()})"

    def to_json(self) -> str:
        return self.basis.to_json()

    @classmethod
    def from_json(cls, text: str) -> "Subspace":
        m = Matrix.from_json(text)
        return cls(m.rows, m)


def _canonical(m: Matrix) -> Matrix:
    if m.cols == 0:
        return m
    red, pivots = rref(transpose(m))
    if not pivots:
        return Matrix.zeros(m.rows, 0)
    return transpose(red.submatrix(range(len(pivots)), range(red.cols)))


# ---------------------------------------------------------------------------
# nilpotent action, chains


def nil_apply(s: JordanStructure, v: Sequence, times: int = 1) -> Vector:
    """``(J - λ_b I)`` applied blockwise: every block shifts one slot toward its eigenvector."""
    out = list(v)
    for _ in range(times):
        new = [ZERO] * len(out)
        for o, size in zip(s.offsets, s.sizes):
            for p in range(1, size):
                new[o + p - 1] = out[o + p]
        out = new
    return tuple(out)


def shift_up(s: JordanStructure, v: Sequence, times: int = 1) -> Vector | None:
    """Inverse direction of :func:`nil_apply`; ``None`` if a component falls off a block."""
    out = list(v)
    for _ in range(times):
        new = [ZERO] * len(out)
        for o, size in zip(s.offsets, s.sizes):
            if out[o + size - 1]:
                return None
            for p in range(size - 1):
                new[o + p + 1] = out[o + p]
        out = new
    return tuple(out)


def vector_height(s: JordanStructure, v: Sequence) -> int:
    """Smallest ``h`` with ``N^h v = 0`` (nilpotent part taken blockwise)."""
    h = 0
    for o, size in zip(s.offsets, s.sizes):
        for p in range(size - 1, -1, -1):
            if v[o + p]:
                h = max(h, p + 1)
                break
    return h


def _eigen_support(s: JordanStructure, v: Sequence) -> set:
    return {s.blocks[b][0] for b in range(len(s)) for c in s.coordinates(b) if v[c]}


@dataclass(frozen=True)
class Chain:
    """Jordan chain ``v, Nv, ..., N^{k-1}v`` inside one eigenvalue group."""

    generator: Vector
    length: int
    eigenvalue: Scalar = field(default_factory=lambda: as_scalar(0))

    def __post_init__(self):
        object.__setattr__(self, "generator", _vec(self.generator))
        object.__setattr__(self, "eigenvalue", as_scalar(self.eigenvalue))

    def vectors(self, s: JordanStructure) -> list[Vector]:
        """Chain vectors, eigenvector first: ``N^{k-1}v, ..., Nv, v``."""
        out = [self.generator]
        for _ in range(self.length - 1):
            out.append(nil_apply(s, out[-1]))
        return out[::-1]

    def bottom(self, s: JordanStructure) -> Vector:
        return nil_apply(s, self.generator, self.length - 1)

    def validate(self, s: JordanStructure) -> None:
        if len(self.generator) != s.n:
            raise ShapeError(f"chain generator has length {len(self.generator)}, expected {s.n}")
        support = _eigen_support(s, self.generator)
        if support - {self.eigenvalue}:
            raise ValueError(
                f"chain generator leaves the eigenvalue {self.eigenvalue} group"
            )
        if self.length < 1 or vector_height(s, self.generator) != self.length:
            raise ValueError(
                f"generator has height {vector_height(s, self.generator)}, chain length {self.length}"
            )


@dataclass(frozen=True)
class ChainSpec:
    """An invariant subspace written as a direct sum of Jordan chains."""

    structure: JordanStructure
    chains: tuple[Chain, ...]

    def __init__(self, structure: JordanStructure, chains: Iterable):
        built = []
        for c in chains:
            if isinstance(c, Chain):
                built.append(c)
            else:
                gen, length = c[0], c[1]
                gen = _vec(gen)
                if len(gen) != structure.n:
                    raise ShapeError(f"chain generator has length {len(gen)}, expected {structure.n}")
                lam = c[2] if len(c) > 2 else _infer_eigenvalue(structure, gen)
                built.append(Chain(gen, int(length), lam))
        object.__setattr__(self, "structure", structure)
        object.__setattr__(self, "chains", tuple(built))

    def vectors(self) -> list[Vector]:
        return [v for c in self.chains for v in c.vectors(self.structure)]

    def span(self) -> Subspace:
        return Subspace(self.structure.n, self.vectors())

    @property
    def dim(self) -> int:
        return sum(c.length for c in self.chains)

    def validate(self) -> None:
        for c in self.chains:
            c.validate(self.structure)
        vs = self.vectors()
        if vs and rank(Matrix.from_columns(vs)) != len(vs):
            raise ValueError("chain vectors are linearly dependent")

    def by_eigenvalue(self, lam) -> list[Chain]:
        lam = as_scalar(lam)
        return [c for c in self.chains if c.eigenvalue == lam]

    def to_data(self) -> list:
        return [[[str(x) for x in c.generator], c.length] for c in self.chains]

    def to_json(self) -> str:
        return json.dumps(self.to_data()) + "\n"

    @classmethod
    def from_data(cls, structure: JordanStructure, data) -> "ChainSpec":
        return cls(structure, [([Scalar.parse(str(x)) for x in gen], int(k)) for gen, k in data])


def _infer_eigenvalue(s: JordanStructure, v: Vector) -> Scalar:
    support = _eigen_support(s, v)
    if len(support) != 1:
        raise ValueError("chain generator must be nonzero and sit in a single eigenvalue group")
    return support.pop()


# ---------------------------------------------------------------------------
# operations


def is_invariant(s: JordanStructure, sub: Subspace) -> bool:
    return _escaping_vector(s, sub) is None


def _escaping_vector(s: JordanStructure, sub: Subspace):
    j = jordan_matrix(s)
    for v in sub.vectors():
        if not sub.contains((j @ Matrix.column(v)).col(0)):
            return v
    return None


def _group_coordinates(s: JordanStructure, blocks: Sequence[int]) -> list[int]:
    return [c for b in blocks for c in s.coordinates(b)]


def chain_decompose(
    s: JordanStructure, sub: Subspace | Matrix, spanning: Sequence | Matrix | None = None
) -> ChainSpec:
    """Split an invariant subspace into Jordan chains.

    Generators are taken greedily from the greatest height down.  When
    ``spanning`` (or a Matrix instead of a Subspace) is given, its columns
    are preferred as generators in their given order; remaining choices
    come from canonical bases, lowest pivot first.
    """
    if isinstance(sub, Matrix):
        spanning = sub
        sub = Subspace(s.n, sub)
    if spanning is not None and isinstance(spanning, Matrix):
        spanning = spanning.columns()
    spanning = [_vec(v) for v in spanning] if spanning else []
    bad = _escaping_vector(s, sub)
    if bad is not None:
        raise InvarianceError(
            "subspace is not invariant: J maps basis vector "
            f"[{', '.join(map(str, bad))}] outside it",
            witness=bad,
        )
    chains: list[Chain] = []
    for lam, blocks in s.groups():
        coords = _group_coordinates(s, blocks)
        group = Subspace(s.n, [[ONE if i == c else ZERO for i in range(s.n)] for c in coords])
        part = sub.intersect(group)
        if part.dim == 0:
            continue
        chains.extend(_chains_in(s, part, lam, spanning))
    return ChainSpec(s, chains)


def _power_kernel(s: JordanStructure, part: Subspace, h: int) -> Subspace:
    if h == 0:
        return Subspace.zero(s.n)
    imgs = [nil_apply(s, v, h) for v in part.vectors()]
    k = kernel_basis(Matrix.from_columns(imgs))
    if k.cols == 0:
        return Subspace.zero(s.n)
    return Subspace(s.n, part.basis @ k)


def _chains_in(s, part: Subspace, lam, spanning) -> list[Chain]:
    height = max(vector_height(s, v) for v in part.vectors())
    kernels = [_power_kernel(s, part, h) for h in range(height + 1)]
    chains: list[Chain] = []
    level: list[Vector] = []
    for h in range(height, 0, -1):
        base = kernels[h - 1].vectors() + level
        cur = rank(Matrix.from_columns(base)) if base else 0
        tops = []
        candidates = [v for v in spanning if kernels[h].contains(v) and any(v)]
        candidates += kernels[h].vectors()
        for cand in candidates:
            trial = base + [cand]
            r = rank(Matrix.from_columns(trial))
            if r > cur:
                base, cur = trial, r
                tops.append(cand)
        for t in tops:
            chains.append(Chain(t, h, lam))
        level = [nil_apply(s, v) for v in level + tops]
    return chains


def is_marked(s: JordanStructure, spec: ChainSpec) -> bool:
    """True when the transformation built from the chains lies in the commutant unexpanded."""
    from .halmos import marked_transform

    return marked_transform(s, spec) is not None


def all_subspaces_marked(s: JordanStructure) -> bool:
    for _, blocks in s.groups():
        sizes = [s.sizes[b] for b in blocks]
        if max(sizes) - min(sizes) > 1:
            return False
    return True


@dataclass(frozen=True)
class TypeSignature:
    """Deduplication key for subspace types.

    ``table[g][r][q]`` is ``dim(N^r M ∩ ker N^q)`` for eigenvalue group
    ``g``; ``ambient[g][r][q]`` is ``dim(M ∩ N^r C^n ∩ ker N^q)``;
    ``expansion`` lists ``(eigenvalue, block size, rows added)`` for every
    block the construction has to enlarge.
    """

    dim: int
    table: tuple
    ambient: tuple
    partition: tuple
    expansion: tuple


def signature(s: JordanStructure, sub: Subspace) -> TypeSignature:
    from .halmos import expansion_profile

    spec = chain_decompose(s, sub)
    tables, ambients, parts = [], [], []
    for lam, blocks in s.groups():
        coords = _group_coordinates(s, blocks)
        gsize = len(coords)
        group = Subspace(s.n, [[ONE if i == c else ZERO for i in range(s.n)] for c in coords])
        part = sub.intersect(group)
        kers = [_nil_kernel(s, group, q) for q in range(gsize + 1)]
        imgs = [_nil_image(s, group, r) for r in range(gsize + 1)]
        table, amb = [], []
        power_part = part
        for r in range(gsize + 1):
            table.append(tuple(power_part.intersect(k).dim for k in kers))
            amb.append(tuple(part.intersect(imgs[r]).intersect(k).dim for k in kers))
            power_part = Subspace(s.n, [nil_apply(s, v) for v in power_part.vectors()]) \
                if power_part.dim else power_part
        tables.append(tuple(table))
        ambients.append(tuple(amb))
        parts.append(tuple(sorted((c.length for c in spec.by_eigenvalue(lam)), reverse=True)))
    # which of several equal blocks gets enlarged is not a type invariant
    grown = sorted(
        (str(lam), size, p)
        for (lam, size), p in zip(s.blocks, expansion_profile(s, spec))
        if p
    )
    return TypeSignature(sub.dim, tuple(tables), tuple(ambients), tuple(parts), tuple(grown))


def _nil_kernel(s, group: Subspace, q: int) -> Subspace:
    return Subspace(s.n, [v for v in group.vectors() if not any(nil_apply(s, v, q))])


def _nil_image(s, group: Subspace, r: int) -> Subspace:
    return Subspace(s.n, [nil_apply(s, v, r) for v in group.vectors()])
