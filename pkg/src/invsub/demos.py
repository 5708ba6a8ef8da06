"""Replays of the worked examples A-G from their fixture files."""

from __future__ import annotations

import json

from . import fixtures
from .exact import Matrix, inverse, rref
from .halmos import construct, construct_single_block, translate_kernel_invariance
from .jordan import commutant_violations, jordan_matrix
from .lattice import enumerate_lattice, export_dot, export_json
from .rowreduce import construct_via_row_reduction, form_X
from .subspace import Subspace

__all__ = ["DEMOS", "demo_matrices", "render_text", "render_json", "render_lattice", "normalize"]


def _params(f: fixtures.Fixture) -> str:
    return ", ".join(f"{k}={v}" for k, v in f.parameters.items())


def _example_a(f):
    s = f.structure
    m = f.expected(None, "pattern")
    out = [("J", jordan_matrix(s)), (f"commutant pattern at {_params(f)}", m)]
    if commutant_violations(m, s):
        raise AssertionError("pattern element is not in the commutant")
    return out


def _example_b(f):
    out = []
    for k, case in enumerate(f.cases):
        m = construct_single_block(f.structure.n, k)
        out.append((f"{case} = ker (S*)^{k}", m))
        out.append((f"{case} basis", _basis(Subspace.kernel(m))))
    return out


def _basis(sub: Subspace) -> Matrix:
    if sub.dim == 0:
        return Matrix.zeros(sub.n, 0)
    return Matrix.from_columns(sub.vectors())


def _construction(f, case):
    c = construct(f.structure, f.spec(case))
    out = [(f"{case}: T", c.T), (f"{case}: Z", c.Z)]
    if not c.is_marked:
        out.append((f"{case}: P", c.P))
        out.append((f"{case}: Z T^-1", c.Z @ inverse(c.T)))
    out.append((f"{case}: M", c.M))
    return out


def _example_c(f):
    return [pair for case in f.cases for pair in _construction(f, case)]


def _example_d(f):
    lat = enumerate_lattice(f.structure)
    out = []
    for case in f.cases:
        node = lat.nodes[lat.find(f.spec(case).span())]
        out.append((f"{node.label}: Z", node.Z))
    return out


def _example_e(f):
    return _construction(f, "M")


def _example_f(f):
    s = f.structure
    spec = f.spec("M")
    x = form_X(s, spec)
    return [
        ("Step 1: X", x),
        ("Step 2: rref(X)", rref(x)[0]),
        ("Step 3: M", construct_via_row_reduction(s, spec)),
    ]


def _example_g(f):
    n_mat = f.matrix(f.data["N"])
    a = f.matrix(f.data["A"])
    out = [("N", n_mat), ("A", a)]
    power = Matrix.identity(n_mat.rows)
    for k in (1, 2, 3):
        power = power @ n_mat
        if not translate_kernel_invariance(n_mat, a, 0, k):
            raise AssertionError(f"ker N^{k} is not A-invariant")
        out.append((f"ker N^{k}", _basis(Subspace.kernel(power))))
    out.append(("N A - A N", n_mat @ a - a @ n_mat))
    return out


DEMOS = {
    "A": _example_a,
    "B": _example_b,
    "C": _example_c,
    "D": _example_d,
    "E": _example_e,
    "F": _example_f,
    "G": _example_g,
}


def normalize(name: str) -> str:
    key = name.strip()
    if key.lower().startswith("example"):
        key = key[len("example"):]
    key = key.upper()
    if key not in DEMOS:
        raise KeyError(f"unknown example {name!r}; choose one of {', '.join(DEMOS)}")
    return key


def demo_matrices(name: str) -> tuple[fixtures.Fixture, list[tuple[str, Matrix]]]:
    key = normalize(name)
    f = fixtures.load(key)
    return f, DEMOS[key](f)


def render_text(name: str) -> str:
    f, pairs = demo_matrices(name)
    lines = [f"# Example {f.name}: {f.title}"]
    if f.parameters:
        lines.append(f"# parameters: {_params(f)}")
    for label, m in pairs:
        lines.append(label)
        lines.append(m.to_json().rstrip("\n"))
    return "\n".join(lines) + "\n"


def render_json(name: str) -> str:
    f, pairs = demo_matrices(name)
    doc = {
        "format": 1,
        "example": f.name,
        "parameters": f.parameters,
        "matrices": [{"label": label, "matrix": m.to_text()} for label, m in pairs],
    }
    return json.dumps(doc, indent=1) + "\n"


def render_lattice(name: str, emit: str, seed: int = 0) -> str:
    f = fixtures.load(normalize(name))
    lat = enumerate_lattice(f.structure, seed=seed)
    return export_dot(lat) if emit == "dot" else export_json(lat)
