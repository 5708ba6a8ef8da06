"""Commuting kernels by row reduction.

Every row of a commuting ``M`` with ``ker M = ℳ`` annihilates ℳ, so the
rows can be read off the linear system ``X x = 0`` where the rows of ``X``
span ℳ.  The top row of the first (largest) block row is filled equation
by equation; the Toeplitz pattern then fixes the rest of that block row,
and the remaining block rows are topped up until the rank is right.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

from .exact import ONE, ZERO, Matrix, Scalar, block_diag, kernel_basis, rank, rref
from .jordan import BlockIndex, JordanStructure
from .subspace import Chain, ChainSpec, Subspace

__all__ = [
    "ConstructionFallbackWarning",
    "EquationSystem",
    "fill_equation",
    "form_X",
    "construct_via_row_reduction",
]


class ConstructionFallbackWarning(UserWarning):
    """Row reduction could not reach the required rank; the T/Z/P construction was used."""


@dataclass(frozen=True)
class EquationSystem:
    """Equations ``Σ c_ij x_ij = constant``, one per nonzero row of ``rref(X)``."""

    structure: JordanStructure
    equations: tuple[tuple[dict, Scalar], ...]

    @classmethod
    def from_rref(cls, s: JordanStructure, reduced: Matrix) -> "EquationSystem":
        eqs = []
        for r in range(reduced.rows):
            coeffs = {}
            for c, value in enumerate(reduced.row(r)):
                if value:
                    b, p = s.locate(c)
                    coeffs[BlockIndex(b + 1, p + 1)] = value
            if coeffs:
                eqs.append((coeffs, ZERO))
        return cls(s, tuple(eqs))

    def variables(self) -> set:
        return {v for coeffs, _ in self.equations for v in coeffs}

    def __len__(self):
        return len(self.equations)

    def __str__(self):
        lines = []
        for coeffs, const in self.equations:
            terms = " + ".join(f"({c})x{i.block}{i.position}" for i, c in coeffs.items())
            lines.append(f"{terms} = {const}")
        return "\n".join(lines)


def fill_equation(coeffs: Sequence[Scalar], constant=ZERO) -> list[Scalar]:
    """Values for the unknowns of ``Σ c_i x_i = constant``, in order.

    With a zero right-hand side an even count splits into ``+1/c`` and
    ``-1/c`` halves; an odd count ``p > 1`` uses ``1/(2c)`` twice, then
    ``(p-3)/2`` times ``1/c`` and ``(p-1)/2`` times ``-1/c``; a single
    unknown is zero.  A nonzero right-hand side is absorbed by the first
    unknown and the rest are filled as above.
    """
    coeffs = list(coeffs)
    if not coeffs:
        if constant:
            raise ValueError(f"inconsistent equation: 0 = {constant}")
        return []
    if constant:
        return [constant / coeffs[0]] + fill_equation(coeffs[1:])
    p = len(coeffs)
    if p == 1:
        return [ZERO]
    if p % 2 == 0:
        signs = [ONE] * (p // 2) + [-ONE] * (p // 2)
        return [sg / c for sg, c in zip(signs, coeffs)]
    weights = [Scalar(1) / 2, Scalar(1) / 2] + [ONE] * ((p - 3) // 2) + [-ONE] * ((p - 1) // 2)
    return [w / c for w, c in zip(weights, coeffs)]


def form_X(s: JordanStructure, spec: ChainSpec) -> Matrix:
    """Rows are the chain vectors, eigenvector first within each chain."""
    rows = spec.vectors()
    if not rows:
        return Matrix.zeros(0, s.n)
    return Matrix(rows)


def _top_row(s: JordanStructure, system: EquationSystem) -> list[Scalar]:
    known: dict = {}
    for coeffs, const in system.equations:
        rest = const
        unknown = []
        for var, c in sorted(coeffs.items(), key=lambda kv: (kv[0].block, kv[0].position)):
            if var in known:
                rest = rest - c * known[var]
            else:
                unknown.append((var, c))
        values = fill_equation([c for _, c in unknown], rest)
        for (var, _), x in zip(unknown, values):
            known[var] = x
    row = [ZERO] * s.n
    for var, x in known.items():
        row[s.offsets[var.block - 1] + var.position - 1] = x
    return row


def _shift_right(s: JordanStructure, y: Sequence[Scalar]) -> list[Scalar]:
    """Row vector ``y ↦ y N``: every block moves one place right, the last entry drops."""
    out = [ZERO] * s.n
    for b, size in enumerate(s.sizes):
        o = s.offsets[b]
        for p in range(size - 1):
            out[o + p + 1] = y[o + p]
    return out


def _block_rows(s: JordanStructure, a: int, y: Sequence[Scalar]) -> list[list[Scalar]]:
    rows = [list(y)]
    for _ in range(s.sizes[a] - 1):
        rows.append(_shift_right(s, rows[-1]))
    return rows


def _nth_shift(s: JordanStructure, y, k: int):
    for _ in range(k):
        y = _shift_right(s, y)
    return y


def _assemble(s: JordanStructure, tops: list) -> Matrix:
    rows = []
    for a, y in enumerate(tops):
        rows.extend(_block_rows(s, a, y))
    return Matrix(rows)


def _nilpotent_construct(s: JordanStructure, chains: list, seed: int) -> Matrix:
    spec = ChainSpec(s, chains)
    n = s.n
    if not spec.chains:
        return Matrix.identity(n)
    x = form_X(s, spec)
    reduced, _ = rref(x)
    system = EquationSystem.from_rref(s, reduced)
    want = n - spec.dim

    first = _top_row(s, system)
    tops = [first] + [[ZERO] * n for _ in range(len(s) - 1)]
    current = rank(_assemble(s, tops))

    # Step D: free variables stay 0; add elementary rows at untouched free
    # positions, then general annihilator vectors, while the rank grows.
    free = [c for c in range(n) if not any(reduced[r, c] for r in range(reduced.rows))]
    annihilator = kernel_basis(reduced).columns() if reduced.rows else Matrix.identity(n).columns()
    elementary = []
    for c in free:
        e = [ZERO] * n
        e[c] = ONE
        elementary.append(e)
    for pool, untouched in ((elementary, True), (annihilator, False)):
        if current == want:
            break
        for a in range(len(s)):
            for cand in pool:
                if current == want:
                    break
                if any(_nth_shift(s, cand, s.sizes[a])):
                    continue
                trial = [row[:] for row in tops]
                if untouched and any(trial[a][c] and cand[c] for c in range(n)):
                    continue
                trial[a] = [u + v for u, v in zip(trial[a], cand)]
                r = rank(_assemble(s, trial))
                if r > current:
                    tops, current = trial, r
    m = _assemble(s, tops)
    target = spec.span()
    nil = s.nilpotent_part()
    if current != want or Subspace.kernel(m) != target or m @ nil != nil @ m:
        from .halmos import construct

        warnings.warn(
            "row reduction did not reach rank "
            f"{want} (got {current}); using the T/Z/P construction",
            ConstructionFallbackWarning,
            stacklevel=3,
        )
        return construct(s, spec, seed=seed).M
    return m


def construct_via_row_reduction(s: JordanStructure, spec: ChainSpec, seed: int = 0) -> Matrix:
    """A commuting ``M`` with ``ker M`` equal to the chain span, by row reduction.

    Several eigenvalues are handled one group at a time and assembled
    block diagonally.
    """
    spec.validate()
    parts = []
    for lam, blocks in s.groups():
        sub = s.sub(blocks)
        coords = [c for b in blocks for c in s.coordinates(b)]
        chains = [
            Chain([ch.generator[c] for c in coords], ch.length, ch.eigenvalue)
            for ch in spec.chains
            if ch.eigenvalue == lam
        ]
        parts.append(_nilpotent_construct(sub, chains, seed))
    return block_diag(*parts)
