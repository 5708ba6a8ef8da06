"""Invariant-subspace lattices as lattices of backward-shift matrices.

A node is a pair (expansion, powers): blocks of the Jordan structure
may be enlarged (never past one less than the largest block) and each
block carries a shift power ``r_i``.  The node's ``Z`` is the block
diagonal ``⊕ (S*)^{r_i}`` on the enlarged structure, and its subspaces
are the images of ``ker Z`` under commutant changes of basis that stay
inside the original coordinates.  Nodes with the same subspace type are
merged; types are compared through :func:`~invsub.subspace.signature`
of randomly drawn representatives.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Sequence

from .exact import ONE, ZERO, Matrix, Scalar, block_diag, kernel_basis, rref
from .jordan import JordanStructure, backward_shift_power
from .subspace import Subspace, TypeSignature, nil_apply, signature

__all__ = [
    "LatticeError",
    "LatticeNode",
    "Lattice",
    "enumerate_lattice",
    "is_hyperinvariant_node",
    "product_lattice",
    "export_dot",
    "export_json",
    "import_json",
]

FORMAT = 1


class LatticeError(RuntimeError):
    """Random representatives disagreed, or a subspace type was found with no node."""


@dataclass(frozen=True)
class LatticeNode:
    expansion: tuple[int, ...]
    powers: tuple[int, ...]
    Z: Matrix
    dim: int
    marked: bool
    hyperinvariant: bool
    signature: TypeSignature
    representative: Subspace
    aliases: tuple = ()
    label: str = ""


@dataclass(frozen=True)
class Lattice:
    structure: JordanStructure
    nodes: tuple[LatticeNode, ...]
    covers: tuple[tuple[int, int], ...]

    def __len__(self):
        return len(self.nodes)

    @property
    def bottom(self) -> int:
        return next(i for i, nd in enumerate(self.nodes) if nd.dim == 0)

    @property
    def top(self) -> int:
        n = self.structure.n
        return next(i for i, nd in enumerate(self.nodes) if nd.dim == n)

    def hyperinvariant(self) -> list[int]:
        return [i for i, nd in enumerate(self.nodes) if nd.hyperinvariant]

    def find(self, sub: Subspace) -> int:
        """Index of the node whose type matches ``sub``."""
        sig = signature(self.structure, sub)
        for i, nd in enumerate(self.nodes):
            if nd.signature == sig:
                return i
        raise LatticeError(f"no node has the type of {sub!r}")

    def by_label(self, label: str) -> LatticeNode:
        return next(nd for nd in self.nodes if nd.label == label)


def is_hyperinvariant_node(node: LatticeNode, s: JordanStructure) -> bool:
    """Unexpanded, with ``r_1 ≥ r_2 ≥ ...`` and ``n_1 - r_1 ≥ n_2 - r_2 ≥ ...`` per eigenvalue."""
    if tuple(node.expansion) != s.sizes:
        return False
    for _, blocks in s.groups():
        r = [node.powers[b] for b in blocks]
        gap = [s.sizes[b] - node.powers[b] for b in blocks]
        if any(x < y for x, y in zip(r, r[1:])) or any(x < y for x, y in zip(gap, gap[1:])):
            return False
    return True


# ---------------------------------------------------------------------------
# representatives


def _coefficient(rng: random.Random) -> Scalar:
    return Scalar(f"{rng.choice((-1, 1)) * rng.randint(1, 97)}/{rng.randint(1, 13)}")


def _generators(sizes, t, r, rng) -> list[list[Scalar]] | None:
    """Random chain generators in original coordinates, one per block with ``r_i > 0``."""
    n = sum(sizes)
    offsets = list(itertools.accumulate((0,) + tuple(sizes[:-1])))
    gens = []
    for i, ri in enumerate(r):
        if ri == 0:
            continue
        if ri > sizes[i]:
            # the leading entry would sit in an added row; T would be singular
            return None
        v = [ZERO] * n
        for b in range(len(t)):
            top = min(ri - max(0, t[i] - t[b]), sizes[b])
            for p in range(top):
                v[offsets[b] + p] = _coefficient(rng)
        gens.append((v, ri))
    return gens


def _chain_span(s: JordanStructure, gens) -> Subspace:
    vecs = []
    for v, length in gens:
        w = list(v)
        for _ in range(length):
            vecs.append(w)
            w = nil_apply(s, w)
    return Subspace(s.n, vecs)


def _expansions(sizes: Sequence[int]):
    m = max(sizes)
    ranges = [range(n, max(n, m - 1) + 1) for n in sizes]
    return sorted(itertools.product(*ranges), key=lambda t: (sum(t), t))


def _label(dim: int, k: int, n: int) -> str:
    if dim == 0:
        return "{0}"
    if dim == n:
        return f"C^{n}"
    return f"M{dim}{k}" if dim < 10 and k < 10 else f"M{dim}_{k}"


def _relabel(nodes: list[LatticeNode], n: int) -> list[LatticeNode]:
    out, counts = [], {}
    for nd in nodes:
        counts[nd.dim] = counts.get(nd.dim, 0) + 1
        out.append(_replace(nd, label=_label(nd.dim, counts[nd.dim], n)))
    return out


def _replace(nd: LatticeNode, **kw) -> LatticeNode:
    data = {f: getattr(nd, f) for f in nd.__dataclass_fields__}
    data.update(kw)
    return LatticeNode(**data)


def _node_key(nd: LatticeNode):
    return (nd.dim, tuple(-x for x in nd.powers), nd.expansion)


# ---------------------------------------------------------------------------
# covers


def _hyperplanes(s: JordanStructure, sub: Subspace, rng: random.Random):
    """Invariant hyperplanes of ``sub``: kernels of functionals on ``sub / N sub``.

    Functionals are drawn with every coordinate support on a basis of the
    quotient, plus random ones vanishing on each piece of the height and
    depth filtrations, so that every hyperplane type is hit.
    """
    low = Subspace(s.n, [nil_apply(s, v) for v in sub.vectors()])
    quotient = []
    acc = low
    for v in sub.vectors():
        if not acc.contains(v):
            quotient.append(v)
            acc = acc + Subspace.span(v)
    c = len(quotient)
    if c == 0:
        return
    n = s.n
    pieces = []
    for h in range(max(s.sizes) + 1):
        img = _coordinate_subspace(s, lambda p, size: p < size - h)
        for q in range(max(s.sizes) + 1):
            ker = _coordinate_subspace(s, lambda p, size: p < q)
            pieces.append(sub.intersect(img).intersect(ker))
    functionals = []
    for size in range(1, c + 1):
        for support in itertools.combinations(range(c), size):
            phi = [ZERO] * c
            for j in support:
                phi[j] = _coefficient(rng)
            functionals.append(phi)
    coords = Matrix.from_columns(quotient)
    for piece in pieces:
        # coordinates of the piece inside sub / low, then a random functional killing them
        rows = []
        for v in (piece + low).vectors():
            x = _solve_mod(coords, low, v)
            if x is not None:
                rows.append(x)
        if rows:
            ann = kernel_basis(Matrix(rows))
        else:
            ann = Matrix.identity(c)
        if ann.cols == 0:
            continue
        weights = [_coefficient(rng) for _ in range(ann.cols)]
        phi = [sum((ann[i, k] * weights[k] for k in range(ann.cols)), ZERO) for i in range(c)]
        if any(phi):
            functionals.append(phi)
    seen = set()
    for phi in functionals:
        pivot = next(j for j in range(c) if phi[j])
        vecs = list(low.vectors())
        for j in range(c):
            if j == pivot:
                continue
            vecs.append([a * phi[pivot] - b * phi[j] for a, b in zip(quotient[j], quotient[pivot])])
        h = Subspace(n, vecs)
        if h not in seen:
            seen.add(h)
            yield h


def _coordinate_subspace(s: JordanStructure, keep) -> Subspace:
    vecs = []
    for b, size in enumerate(s.sizes):
        for p in range(size):
            if keep(p, size):
                e = [ZERO] * s.n
                e[s.offsets[b] + p] = ONE
                vecs.append(e)
    return Subspace(s.n, vecs)


def _solve_mod(coords: Matrix, low: Subspace, v) -> list | None:
    """Coordinates ``x`` with ``coords x ≡ v`` modulo ``low``."""
    cols = list(coords.columns()) + list(low.vectors())
    aug = Matrix.from_columns(cols + [v], rows=len(v))
    reduced, pivots = rref(aug)
    last = len(cols)
    if last in pivots:
        return None
    x = [ZERO] * coords.cols
    for r, p in enumerate(pivots):
        if p < coords.cols:
            x[p] = reduced[r, last]
    return x


# ---------------------------------------------------------------------------
# enumeration


def enumerate_lattice(s: JordanStructure, seed: int = 0, draws: int = 3) -> Lattice:
    """All subspace types of ``s`` with their ``Z`` matrices and cover edges.

    Several eigenvalues give the product of the per-eigenvalue lattices.
    """
    groups = s.groups()
    if len(groups) > 1:
        parts = [enumerate_lattice(s.sub(blocks), seed=seed, draws=draws) for _, blocks in groups]
        return product_lattice(parts)
    lam = s.eigenvalues[0]
    sizes = s.sizes
    n = s.n
    rng = random.Random(seed)
    found: dict[TypeSignature, dict] = {}
    order = []
    for t in _expansions(sizes):
        for r in itertools.product(*(range(x + 1) for x in t)):
            reps = []
            for _ in range(draws):
                gens = _generators(sizes, t, r, rng)
                if gens is None:
                    break
                sub = _chain_span(s, gens)
                if sub.dim != sum(r):
                    break
                reps.append(sub)
            if len(reps) < draws:
                continue
            sigs = {signature(s, sub) for sub in reps}
            if len(sigs) > 1:
                raise LatticeError(
                    f"random representatives of expansion {t}, powers {r} have different types"
                )
            sig = sigs.pop()
            if sig in found:
                found[sig]["aliases"].append((t, r))
                continue
            found[sig] = {"t": t, "r": r, "rep": reps[0], "aliases": [(t, r)]}
            order.append(sig)

    nodes = []
    for sig in order:
        d = found[sig]
        t, r = d["t"], d["r"]
        z = block_diag(*(backward_shift_power(x, k) for x, k in zip(t, r)))
        nd = LatticeNode(
            expansion=tuple(t),
            powers=tuple(r),
            Z=z,
            dim=sum(r),
            marked=tuple(t) == sizes,
            hyperinvariant=False,
            signature=sig,
            representative=d["rep"],
            aliases=tuple(d["aliases"]),
        )
        nodes.append(_replace(nd, hyperinvariant=is_hyperinvariant_node(nd, s)))
    nodes.sort(key=_node_key)
    nodes = _relabel(nodes, n)
    index = {nd.signature: i for i, nd in enumerate(nodes)}

    edges = set()
    for b, nd in enumerate(nodes):
        for h in _hyperplanes(s, nd.representative, rng):
            sig = signature(s, h)
            if sig not in index:
                raise LatticeError(
                    f"subspace type below {nd.label} has no (expansion, powers) node: "
                    f"basis {[[str(x) for x in v] for v in h.vectors()]}"
                )
            edges.add((index[sig], b))
    return Lattice(JordanStructure([(lam, x) for x in sizes]), tuple(nodes), tuple(sorted(edges)))


# ---------------------------------------------------------------------------
# products


def _embed(sub: Subspace, offset: int, n: int) -> list:
    out = []
    for v in sub.vectors():
        w = [ZERO] * n
        w[offset : offset + len(v)] = v
        out.append(w)
    return out


def product_lattice(per_eigenvalue: Sequence[Lattice]) -> Lattice:
    """Direct product: dims add, hyperinvariance is componentwise."""
    per_eigenvalue = list(per_eigenvalue)
    if len(per_eigenvalue) == 1:
        return per_eigenvalue[0]
    s = JordanStructure([b for lat in per_eigenvalue for b in lat.structure.blocks])
    n = s.n
    offsets = list(itertools.accumulate([0] + [lat.structure.n for lat in per_eigenvalue[:-1]]))
    combos = list(itertools.product(*(range(len(lat)) for lat in per_eigenvalue)))
    nodes = []
    for combo in combos:
        parts = [lat.nodes[i] for lat, i in zip(per_eigenvalue, combo)]
        vecs = []
        for nd, o in zip(parts, offsets):
            vecs.extend(_embed(nd.representative, o, n))
        rep = Subspace(n, vecs)
        nodes.append(
            (
                combo,
                LatticeNode(
                    expansion=tuple(x for nd in parts for x in nd.expansion),
                    powers=tuple(x for nd in parts for x in nd.powers),
                    Z=block_diag(*(nd.Z for nd in parts)),
                    dim=sum(nd.dim for nd in parts),
                    marked=all(nd.marked for nd in parts),
                    hyperinvariant=all(nd.hyperinvariant for nd in parts),
                    signature=signature(s, rep),
                    representative=rep,
                    aliases=(
                        (
                            tuple(x for nd in parts for x in nd.expansion),
                            tuple(x for nd in parts for x in nd.powers),
                        ),
                    ),
                ),
            )
        )
    nodes.sort(key=lambda pair: _node_key(pair[1]))
    position = {combo: i for i, (combo, _) in enumerate(nodes)}
    covers = [set(lat.covers) for lat in per_eigenvalue]
    edges = set()
    for combo in combos:
        for k, lat in enumerate(per_eigenvalue):
            for a, b in covers[k]:
                if combo[k] == a:
                    up = combo[:k] + (b,) + combo[k + 1 :]
                    edges.add((position[combo], position[up]))
    labelled = _relabel([nd for _, nd in nodes], n)
    return Lattice(s, tuple(labelled), tuple(sorted(edges)))


# ---------------------------------------------------------------------------
# export


def _tuple_text(xs) -> str:
    return "(" + ",".join(str(x) for x in xs) + ")"


def export_dot(lat: Lattice) -> str:
    """Graphviz digraph drawn bottom-up; hyperinvariant nodes bold, edges between them doubled."""
    lines = [
        "digraph lattice {",
        "  rankdir=BT;",
        '  node [shape=box, fontname="Helvetica"];',
    ]
    for i, nd in enumerate(lat.nodes):
        text = f"{nd.label}\\nr={_tuple_text(nd.powers)}"
        if not nd.marked:
            text += f" on {_tuple_text(nd.expansion)}"
        attrs = [f'label="{text}"']
        if nd.hyperinvariant:
            attrs.append("style=bold")
            attrs.append("peripheries=2")
        lines.append(f"  n{i} [{', '.join(attrs)}];")
    for a, b in lat.covers:
        if lat.nodes[a].hyperinvariant and lat.nodes[b].hyperinvariant:
            lines.append(f'  n{a} -> n{b} [color="black:black", style=bold];')
        else:
            lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _sig_data(sig: TypeSignature):
    return [sig.dim, sig.table, sig.ambient, sig.partition, sig.expansion]


def _tuples(x):
    if isinstance(x, list):
        return tuple(_tuples(y) for y in x)
    return x


def export_json(lat: Lattice) -> str:
    nodes = []
    for nd in lat.nodes:
        nodes.append(
            {
                "label": nd.label,
                "expansion": list(nd.expansion),
                "powers": list(nd.powers),
                "dim": nd.dim,
                "marked": nd.marked,
                "hyperinvariant": nd.hyperinvariant,
                "Z": nd.Z.to_text(),
                "representative": [[str(x) for x in v] for v in nd.representative.vectors()],
                "aliases": [[list(t), list(r)] for t, r in nd.aliases],
                "signature": _sig_data(nd.signature),
            }
        )
    doc = {
        "format": FORMAT,
        "structure": lat.structure.to_data(),
        "nodes": nodes,
        "covers": [list(e) for e in lat.covers],
    }
    return json.dumps(doc, indent=1) + "\n"


def import_json(text: str) -> Lattice:
    doc = json.loads(text)
    if doc.get("format") != FORMAT:
        raise ValueError(f"unsupported lattice format {doc.get('format')!r}")
    s = JordanStructure.from_data(doc["structure"])
    nodes = []
    for d in doc["nodes"]:
        sig = TypeSignature(*(_tuples(x) for x in d["signature"]))
        nodes.append(
            LatticeNode(
                expansion=tuple(d["expansion"]),
                powers=tuple(d["powers"]),
                Z=Matrix(d["Z"]),
                dim=d["dim"],
                marked=d["marked"],
                hyperinvariant=d["hyperinvariant"],
                signature=sig,
                representative=Subspace(s.n, [[Scalar.parse(x) for x in v] for v in d["representative"]]),
                aliases=tuple((tuple(t), tuple(r)) for t, r in d["aliases"]),
                label=d["label"],
            )
        )
    return Lattice(s, tuple(nodes), tuple(tuple(e) for e in doc["covers"]))
