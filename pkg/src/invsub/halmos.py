"""Commuting-kernel construction ``M = P Z T⁻¹ Pᵗ`` for invariant subspaces.

Given a Jordan structure and an invariant subspace written as Jordan
chains, the transformation ``T`` moves every chain onto the leading
positions of one Jordan block; ``Z`` is made of backward-shift powers
that kill exactly those positions.  Chains that do not fit (non-marked
subspaces) are handled by enlarging some blocks, building ``T`` and
``Z`` there, and cutting back with the row selection ``P``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Sequence

from .exact import (
    ONE,
    ZERO,
    Matrix,
    Scalar,
    ShapeError,
    SingularMatrixError,
    as_scalar,
    block_diag,
    conj_transpose,
    inverse,
    kernel_basis,
    rank,
    rref,
)
from .jordan import (
    JordanStructure,
    backward_shift_power,
    commutant_violations,
    jordan_matrix,
    jordanize,
    padded_shift,
)
from .subspace import (
    Chain,
    ChainSpec,
    InvarianceError,
    Subspace,
    chain_decompose,
    nil_apply,
    shift_up,
    vector_height,
)

__all__ = [
    "Construction",
    "Placement",
    "ConstructionError",
    "PlacementError",
    "construct_single_block",
    "build_Z_simple",
    "build_T",
    "marked_transform",
    "expand_structure",
    "expansion_profile",
    "build_Z_nonmarked",
    "selection_matrix",
    "construct",
    "construct_full",
    "check",
    "range_representation",
    "translate_kernel_invariance",
    "is_invariant_under",
]


class ConstructionError(RuntimeError):
    """A finished construction failed its own verification."""


class PlacementError(ValueError):
    """A chain cannot be lifted inside its target block without expanding J."""

    def __init__(self, message, needed=None):
        super().__init__(message)
        self.needed = needed or {}


@dataclass(frozen=True)
class Placement:
    """Where one chain went.  Blocks are 0-based; ``expanded`` is None when no block grew for it."""

    target: int
    length: int
    expanded: int | None = None
    added: int = 0

    def to_data(self) -> dict:
        return {"target": self.target, "length": self.length,
                "expanded": self.expanded, "added": self.added}


@dataclass(frozen=True)
class Construction:
    original: JordanStructure
    expanded: JordanStructure
    T: Matrix
    Z: Matrix
    P: Matrix
    M: Matrix
    placements: tuple[Placement, ...]
    spec: ChainSpec
    z_rule: str = "shift"
    N: Matrix | None = None
    Q: Matrix | None = None

    @property
    def m(self) -> int:
        return self.T.rows

    @property
    def is_marked(self) -> bool:
        return self.expanded.sizes == self.original.sizes

    def to_data(self) -> dict:
        data = {
            "format": 1,
            "structure": self.original.to_data(),
            "expanded": self.expanded.to_data(),
            "T": self.T.to_text(),
            "Z": self.Z.to_text(),
            "P": self.P.to_text(),
            "M": self.M.to_text(),
            "placements": [p.to_data() for p in self.placements],
            "z_rule": self.z_rule,
            "chains": self.spec.to_data(),
        }
        if self.N is not None:
            data["N"] = self.N.to_text()
        if self.Q is not None:
            data["Q"] = self.Q.to_text()
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_data(), indent=1) + "\n"

    @classmethod
    def from_data(cls, data: dict) -> "Construction":
        if data.get("format") != 1:
            raise ValueError(f"unsupported construction format {data.get('format')!r}")
        s = JordanStructure.from_data(data["structure"])
        opt = {k: Matrix(data[k]) for k in ("N", "Q") if k in data}
        return cls(
            original=s,
            expanded=JordanStructure.from_data(data["expanded"], ordered=False),
            T=Matrix(data["T"]),
            Z=Matrix(data["Z"]),
            P=Matrix(data["P"]),
            M=Matrix(data["M"]),
            placements=tuple(Placement(**p) for p in data.get("placements", [])),
            spec=ChainSpec.from_data(s, data.get("chains", [])),
            z_rule=data.get("z_rule", "shift"),
            **opt,
        )

    @classmethod
    def from_json(cls, text: str) -> "Construction":
        return cls.from_data(json.loads(text))


def check(c: Construction, a: Matrix | None = None) -> list[str]:
    """Every violated construction invariant, as readable messages (empty when all hold)."""
    problems = []
    s = c.original
    n = s.n
    if c.M.shape != (n, n):
        return [f"M is {c.M.shape[0]}x{c.M.shape[1]}, structure needs {n}x{n}"]
    for a_blk, b_blk, why in commutant_violations(c.M, s):
        problems.append(f"M is not in the commutant: block ({a_blk + 1},{b_blk + 1}) {why}")
    j = jordan_matrix(s)
    if not problems and c.M @ j != j @ c.M:
        problems.append("M J != J M")
    try:
        assembled = c.P @ c.Z @ inverse(c.T) @ c.P.T
        if assembled != c.M:
            diff = next(
                (r + 1, q + 1) for r in range(n) for q in range(n) if assembled[r, q] != c.M[r, q]
            )
            problems.append(f"M differs from P Z T^-1 P^t at entry {diff}")
    except (SingularMatrixError, ShapeError) as e:
        problems.append(f"cannot assemble P Z T^-1 P^t: {e}")
    target = c.spec.span()
    kernel = Subspace.kernel(c.M)
    if kernel != target:
        if kernel.dim != target.dim:
            what = f"has dimension {kernel.dim}, the chain span {target.dim}"
        else:
            stray = next(v for v in kernel.vectors() if not target.contains(v))
            what = f"contains [{', '.join(map(str, stray))}], outside the chain span"
        problems.append(f"ker M {what}")
    if c.N is not None and c.Q is not None:
        if c.Q @ c.M @ inverse(c.Q) != c.N:
            problems.append("N != Q M Q^-1")
        if a is not None and c.N @ a != a @ c.N:
            problems.append("N does not commute with A")
    return problems


# ---------------------------------------------------------------------------
# simple forms


def construct_single_block(n: int, k: int) -> Matrix:
    """Kernel is the span of the first ``k`` basis vectors of one n-block."""
    return backward_shift_power(n, k)


def build_Z_simple(s: JordanStructure, powers: Sequence[int]) -> Matrix:
    if len(powers) != len(s):
        raise ValueError(f"need {len(s)} powers, got {len(powers)}")
    return block_diag(*(backward_shift_power(size, k) for size, k in zip(s.sizes, powers)))


# ---------------------------------------------------------------------------
# chain layout


def _reembed(v: Sequence, old: Sequence[int], new: Sequence[int]) -> tuple:
    out = []
    o = 0
    for a, b in zip(old, new):
        out.extend(v[o : o + a])
        out.extend([ZERO] * (b - a))
        o += a
    return tuple(out)


def _target_key(t: JordanStructure, b: int):
    # smallest block wins; among equals the rightmost
    return (t.sizes[b], -b)


def _target_of(t: JordanStructure, bottom: Sequence) -> int:
    support = [b for b, o in enumerate(t.offsets) if bottom[o]]
    return min(support, key=lambda b: _target_key(t, b))


def _assign_targets(t: JordanStructure, chains: list):
    """Give every chain its own target block, reducing generators on collisions."""
    order = sorted(range(len(chains)), key=lambda i: -chains[i][1])
    taken: dict[int, int] = {}
    targets = [None] * len(chains)
    for idx in order:
        v, k, lam = chains[idx]
        while True:
            b = nil_apply(t, v, k - 1)
            j = _target_of(t, b)
            if j not in taken:
                break
            u = taken[j]
            vu, ku, _ = chains[u]
            bu = nil_apply(t, vu, ku - 1)
            o = t.offsets[j]
            c = b[o] / bu[o]
            w = nil_apply(t, vu, ku - k)
            v = tuple(x - c * y for x, y in zip(v, w))
        chains[idx] = (v, k, lam)
        taken[j] = idx
        targets[idx] = j
    return targets


def _lift_failures(t: JordanStructure, v: Sequence, depth: int) -> dict[int, int]:
    """Blocks too short to shift ``v`` up by ``depth``: ``{block: size needed}``."""
    need = {}
    for b, (o, size) in enumerate(zip(t.offsets, t.sizes)):
        top = 0
        for p in range(size - 1, -1, -1):
            if v[o + p]:
                top = p + 1
                break
        if top and top + depth > size:
            need[b] = top + depth
    return need


def _deepen(t: JordanStructure, v, k: int, depth: int, span_vectors) -> tuple | None:
    """Add a lower-height element of the subspace to ``v`` so it lifts by ``depth``."""
    low = [w for w in span_vectors if vector_height(t, w) <= k - 1]
    if not low:
        return None
    basis = Subspace(t.n, low).vectors()
    bad = [
        o + p
        for o, size in zip(t.offsets, t.sizes)
        for p in range(max(size - depth, 0), size)
    ]
    if not bad:
        return None
    # solve  sum x_i basis_i[c] = -v[c]  for every bad coordinate c
    aug = Matrix([[w[c] for w in basis] + [-v[c]] for c in bad])
    red, piv = rref(aug)
    ncols = len(basis)
    if ncols in piv:
        return None
    x = [ZERO] * ncols
    for r, p in enumerate(piv):
        x[p] = red[r, ncols]
    out = list(v)
    for xi, w in zip(x, basis):
        if xi:
            out = [a + xi * b for a, b in zip(out, w)]
    return tuple(out)


@dataclass
class _Layout:
    expanded: JordanStructure
    chains: list  # (generator in expanded coords, length, eigenvalue)
    targets: list
    causes: dict = field(default_factory=dict)


def _layout(s: JordanStructure, spec: ChainSpec, expand: bool) -> _Layout:
    sizes = list(s.sizes)
    chains = [(c.generator, c.length, c.eigenvalue) for c in spec.chains]
    causes: dict[int, int] = {}
    while True:
        t = JordanStructure(list(zip(s.eigenvalues, sizes)), ordered=False)
        targets = _assign_targets(t, chains)
        span_vectors = [v for (g, k, _) in chains for v in _chain_vectors(t, g, k)]
        failures: dict[int, int] = {}
        for idx, (v, k, lam) in enumerate(chains):
            j = targets[idx]
            depth = sizes[j] - k
            bad = _lift_failures(t, v, depth)
            if not bad:
                continue
            better = _deepen(t, v, k, depth, span_vectors)
            if better is not None:
                chains[idx] = (better, k, lam)
                continue
            for i, needed in bad.items():
                failures[i] = max(failures.get(i, 0), needed)
                causes[i] = j
        if not failures:
            return _Layout(t, chains, targets, causes)
        if not expand:
            raise PlacementError(
                "chains do not fit their target blocks; blocks "
                + ", ".join(f"{i + 1} (needs size {n})" for i, n in sorted(failures.items()))
                + " must be expanded",
                needed=failures,
            )
        old = list(sizes)
        for i in failures:
            sizes[i] += 1
        chains = [(_reembed(g, old, sizes), k, lam) for g, k, lam in chains]


def _chain_vectors(t, g, k) -> list:
    out = [g]
    for _ in range(k - 1):
        out.append(nil_apply(t, out[-1]))
    return out[::-1]


def _transform(lay: _Layout) -> Matrix:
    t = lay.expanded
    cols: list = [None] * t.n
    for b in range(len(t)):
        for c in t.coordinates(b):
            cols[c] = tuple(ONE if i == c else ZERO for i in range(t.n))
    for (v, k, _), j in zip(lay.chains, lay.targets):
        o, size = t.offsets[j], t.sizes[j]
        vecs = _chain_vectors(t, v, k)
        for q in range(k, size):
            nxt = shift_up(t, vecs[-1])
            assert nxt is not None, "lift failed after layout"
            vecs.append(nxt)
        for q, vec in enumerate(vecs):
            cols[o + q] = vec
    return Matrix.from_columns(cols)


def _placements(s: JordanStructure, lay: _Layout) -> tuple[Placement, ...]:
    out = []
    for (_, k, _), j in zip(lay.chains, lay.targets):
        grown = [i for i, jj in lay.causes.items() if jj == j]
        i = grown[0] if grown else None
        added = lay.expanded.sizes[i] - s.sizes[i] if i is not None else 0
        out.append(Placement(j, k, i, added))
    return tuple(out)


def build_T(s: JordanStructure, spec: ChainSpec) -> tuple[Matrix, tuple[Placement, ...]]:
    """Change of basis for a marked chain spec; raises PlacementError otherwise."""
    lay = _layout(s, spec, expand=False)
    return _transform(lay), _placements(s, lay)


def marked_transform(s: JordanStructure, spec: ChainSpec) -> Matrix | None:
    try:
        lay = _layout(s, spec, expand=False)
    except PlacementError:
        return None
    t = _transform(lay)
    if rank(t) != t.rows or commutant_violations(t, s):
        return None
    return t


def selection_matrix(original: Sequence[int], expanded: Sequence[int]) -> Matrix:
    """``n x m`` 0/1 matrix keeping the leading original slots of every block."""
    n, m = sum(original), sum(expanded)
    rows = []
    o = 0
    for a, b in zip(original, expanded):
        for p in range(a):
            rows.append([ONE if c == o + p else ZERO for c in range(m)])
        o += b
    return Matrix(rows) if rows else Matrix.zeros(0, m)


def expand_structure(s: JordanStructure, spec: ChainSpec) -> tuple[JordanStructure, Matrix]:
    lay = _layout(s, spec, expand=True)
    return lay.expanded, selection_matrix(s.sizes, lay.expanded.sizes)


def expansion_profile(s: JordanStructure, spec: ChainSpec) -> tuple[int, ...]:
    if not spec.chains:
        return tuple(0 for _ in s.sizes)
    lay = _layout(s, spec, expand=True)
    return tuple(b - a for a, b in zip(s.sizes, lay.expanded.sizes))


# ---------------------------------------------------------------------------
# Z


def _place_block(grid, t: JordanStructure, a: int, b: int, blk: Matrix):
    oa, ob = t.offsets[a], t.offsets[b]
    for i in range(blk.rows):
        for j in range(blk.cols):
            grid[oa + i][ob + j] = blk[i, j]


def build_Z_nonmarked(t: JordanStructure, j: int, k: int, i: int, p: int) -> Matrix:
    """Near-diagonal Z for one chain of length ``k`` in block ``j`` with block ``i`` grown by ``p``.

    Blocks are 0-based and ``t`` is the expanded structure.
    """
    return _assemble_Z(t, {j: k}, {i: (p, j)})


def _assemble_Z(t: JordanStructure, powers: dict, couplings: dict) -> Matrix:
    grid = [[ZERO] * t.n for _ in range(t.n)]
    diag = {b: 0 for b in range(len(t))}
    diag.update(powers)
    for i, (p, _) in couplings.items():
        diag[i] = max(diag[i], p)
    for b, k in diag.items():
        _place_block(grid, t, b, b, backward_shift_power(t.sizes[b], k))
    for i, (p, j) in couplings.items():
        if p == 0:
            continue
        _place_block(grid, t, j, i, padded_shift(t.sizes[j], t.sizes[i], 0))
        _place_block(grid, t, i, j, padded_shift(t.sizes[i], t.sizes[j], p))
    return Matrix(grid)


def _commutant_basis(t: JordanStructure) -> list[Matrix]:
    """Basis of the commutant of the (expanded) Jordan matrix: one matrix per free diagonal."""
    out = []
    for a, (la, sa) in enumerate(t.blocks):
        for b, (lb, sb) in enumerate(t.blocks):
            if la != lb:
                continue
            lead = max(sb - sa, 0)
            for d in range(min(sa, sb)):
                grid = [[ZERO] * t.n for _ in range(t.n)]
                oa, ob = t.offsets[a], t.offsets[b]
                for r in range(sa):
                    c = r + lead + d
                    if c < sb:
                        grid[oa + r][ob + c] = ONE
                out.append(Matrix(grid))
    return out


def _generic_Z(t: JordanStructure, killed: list, constraint, seed: int) -> list[Matrix]:
    """Seeded elements of {Z in commutant : Z kills ``killed``, constraint(Z) = 0}.

    ``constraint`` maps a matrix to a flat list of scalars and must be linear.
    """
    basis = _commutant_basis(t)
    cols = []
    for bm in basis:
        col = []
        for v in killed:
            col.extend((bm @ Matrix.column(v)).col(0))
        col.extend(constraint(bm))
        cols.append(col)
    if cols and cols[0]:
        sol = kernel_basis(Matrix.from_columns(cols))
    else:
        sol = Matrix.identity(len(basis))
    if sol.cols == 0:
        return []
    rng = random.Random(seed)
    out = []
    for _ in range(6):
        coeffs = [rng.randint(-9, 9) for _ in range(sol.cols)]
        weights = [sum((sol[i, c] * coeffs[c] for c in range(sol.cols)), ZERO)
                   for i in range(len(basis))]
        z = Matrix.zeros(t.n)
        for w, bm in zip(weights, basis):
            if w:
                z = z + bm.scale(w)
        out.append(z)
    return out


# ---------------------------------------------------------------------------
# the construction


def _verify(s: JordanStructure, target: Subspace, m: Matrix) -> str | None:
    if Subspace.kernel(m) != target:
        return "kernel mismatch"
    bad = commutant_violations(m, s)
    if bad:
        a, b, why = bad[0]
        return f"commutant violation in block ({a + 1},{b + 1}): {why}"
    j = jordan_matrix(s)
    if m @ j != j @ m:
        return "structural commutant test passed but M J != J M"
    return None


def construct(s: JordanStructure, spec: ChainSpec | Subspace, seed: int = 0) -> Construction:
    """Build T, Z, P and ``M = P Z T⁻¹ Pᵗ`` with ``ker M`` equal to the chain span."""
    if isinstance(spec, Subspace):
        spec = chain_decompose(s, spec)
    spec.validate()
    target = spec.span()
    lay = _layout(s, spec, expand=True)
    t = lay.expanded
    T = _transform(lay)
    P = selection_matrix(s.sizes, t.sizes)
    placements = _placements(s, lay)
    powers = {j: k for (_, k, _), j in zip(lay.chains, lay.targets)}
    couplings = {
        i: (t.sizes[i] - s.sizes[i], j)
        for i, j in lay.causes.items()
        if t.sizes[i] > s.sizes[i]
    }
    Z = _assemble_Z(t, powers, couplings)
    Tinv = inverse(T)
    M = P @ Z @ Tinv @ P.T
    rule = "shift"
    problem = _verify(s, target, M)
    if problem is not None:
        killed = [v for (g, k, _) in lay.chains for v in _chain_vectors(t, g, k)]
        killed = [(Tinv @ Matrix.column(v)).col(0) for v in killed]
        added = [
            o + p
            for o, a, b in zip(t.offsets, s.sizes, t.sizes)
            for p in range(a, b)
        ]
        j = jordan_matrix(s)

        def zero_rows(z):
            return [z[r, c] for r in added for c in range(t.n)]

        def commuting(z):
            m = P @ z @ Tinv @ P.T
            d = j @ m - m @ j
            return [x for row in d._r for x in row]

        for rule_name, constraint in (("generic", zero_rows), ("generic", commuting)):
            for cand in _generic_Z(t, killed, constraint, seed):
                m2 = P @ cand @ Tinv @ P.T
                if _verify(s, target, m2) is None:
                    Z, M, rule, problem = cand, m2, rule_name, None
                    break
            if problem is None:
                break
    if problem is not None:
        raise ConstructionError(f"construction failed verification: {problem}")
    return Construction(s, t, T, Z, P, M, placements, spec, rule)


def is_invariant_under(a: Matrix, sub: Subspace) -> bool:
    return sub.contains(sub.apply(a))


def construct_full(
    a: Matrix, sub: Subspace, eigenvalues: Sequence | None = None, seed: int = 0
) -> tuple[Matrix, Construction, Matrix]:
    """Return ``(N, construction, Q)`` with ``N = Q M Q⁻¹``, ``N a = a N`` and ``ker N = sub``."""
    if not is_invariant_under(a, sub):
        bad = next(v for v in sub.vectors() if not sub.contains((a @ Matrix.column(v)).col(0)))
        raise InvarianceError(
            f"subspace is not invariant under A: vector [{', '.join(map(str, bad))}] escapes",
            witness=bad,
        )
    q, s = jordanize(a, eigenvalues)
    qinv = inverse(q)
    inner = sub.apply(qinv)
    c = construct(s, inner, seed=seed)
    n_mat = q @ c.M @ qinv
    if n_mat @ a != a @ n_mat or Subspace.kernel(n_mat) != sub:
        raise ConstructionError("N = Q M Q^-1 failed verification")
    return n_mat, _with(c, N=n_mat, Q=q), q


def _with(c: Construction, **kw) -> Construction:
    data = dict(c.__dict__)
    data.update(kw)
    return Construction(**data)


def _reversal(sizes: Sequence[int]) -> Matrix:
    perms = []
    for size in sizes:
        perms.append(Matrix([[ONE if i + j == size - 1 else ZERO for j in range(size)]
                             for i in range(size)]))
    return block_diag(*perms)


def range_representation(
    a: Matrix, sub: Subspace, eigenvalues: Sequence | None = None, seed: int = 0
) -> Matrix:
    """``R`` commuting with ``a`` whose column space is ``sub``.

    Built as the adjoint of a commuting kernel for ``a*`` on the
    orthogonal complement of ``sub``.
    """
    if not is_invariant_under(a, sub):
        raise InvarianceError("subspace is not invariant under A")
    q, s = jordanize(a, eigenvalues)
    # a* = Q' J' Q'^-1 with J' the conjugate structure and Q' = (Q^-1)* Π
    sbar = JordanStructure([(lam.conjugate(), size) for lam, size in s.blocks])
    qp = conj_transpose(inverse(q)) @ _reversal(s.sizes)
    comp = sub.orthogonal_complement()
    c = construct(sbar, comp.apply(inverse(qp)), seed=seed)
    r = conj_transpose(qp @ c.M @ inverse(qp))
    if r @ a != a @ r or Subspace.image(r) != sub:
        raise ConstructionError("range representation failed verification")
    return r


def translate_kernel_invariance(n_mat: Matrix, a: Matrix, alpha, k: int) -> bool:
    """Is ``ker (n_mat - alpha I)^k`` invariant under ``a``?"""
    alpha = as_scalar(alpha)
    shifted = n_mat - Matrix.identity(n_mat.rows).scale(alpha)
    ker = Subspace.kernel(shifted ** k)
    result = is_invariant_under(a, ker)
    if not result and n_mat @ a == a @ n_mat:
        raise AssertionError("commuting pair produced a non-invariant translate kernel")
    return result
