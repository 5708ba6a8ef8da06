"""Command-line interface: ``python -m invsub <command> ...``.

Exit status is 0 on success, 1 for mathematical problems with the input
(subspace not invariant, spectrum not exactly representable, a failed
verification) and 2 for unreadable or malformed files.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from . import demos
from .exact import Matrix, Scalar, ShapeError, SingularMatrixError, inverse
from .halmos import (
    Construction,
    ConstructionError,
    check,
    construct_full,
    is_invariant_under,
    range_representation,
)
from .jordan import (
    JordanStructure,
    UnsupportedSpectrumError,
    _structure_if_jordan,
    jordan_matrix,
    jordanize,
)
from .lattice import LatticeError, enumerate_lattice, export_dot, export_json
from .rowreduce import ConstructionFallbackWarning, construct_via_row_reduction
from .subspace import ChainSpec, InvarianceError, Subspace, chain_decompose

COMMANDS = ("construct", "range", "lattice", "verify", "jordanize", "demo")


class InputError(Exception):
    """Unreadable or malformed input (exit status 2)."""


class DomainError(Exception):
    """Well-formed input the mathematics rejects (exit status 1)."""


@dataclass
class JobConfig:
    command: str
    method: str = "construct"
    input: str | None = None
    subspace: str | None = None
    chains: str | None = None
    eigenvalues: list | None = None
    output: str | None = None
    emit: str | None = None
    seed: int = 0
    example: str | None = None
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# reading


def _read(path: str, what: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {what} file {path}: {e.strerror}") from e


def _json(path: str, what: str):
    text = _read(path, what)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{what} file {path} is not valid JSON: {e}") from e


def _matrix(path: str, what: str) -> Matrix:
    data = _json(path, what)
    try:
        return Matrix(data)
    except (ValueError, TypeError) as e:
        raise InputError(f"{what} file {path} is not a matrix of scalars: {e}") from e


def _need(value, flag: str, command: str):
    if value is None:
        raise InputError(f"{command} needs {flag}")
    return value


def _square(m: Matrix, what: str) -> Matrix:
    if m.rows != m.cols:
        raise InputError(f"{what} matrix must be square, got {m.rows}x{m.cols}")
    return m


def _subspace(cfg: JobConfig, n: int, structure: JordanStructure | None) -> Subspace:
    if cfg.subspace:
        m = _matrix(cfg.subspace, "subspace")
        if m.rows != n and not (m.rows == 0 and m.cols == 0):
            raise InputError(f"subspace file {cfg.subspace} has {m.rows} rows, expected {n}")
        return Subspace(n, m.columns() if m.rows else [])
    if cfg.chains:
        if structure is None:
            raise DomainError("--chains needs --input to be a Jordan matrix; use --subspace otherwise")
        spec = _chain_spec(cfg.chains, structure)
        return spec.span()
    raise InputError(f"{cfg.command} needs --subspace or --chains")


def _chain_spec(path: str, s: JordanStructure) -> ChainSpec:
    data = _json(path, "chains")
    try:
        spec = ChainSpec.from_data(s, data)
        spec.validate()
    except ShapeError as e:
        raise InputError(f"chains file {path}: {e}") from e
    except (ValueError, TypeError, IndexError) as e:
        raise DomainError(f"chains file {path}: {e}") from e
    return spec


def _jordan_structure_of(a: Matrix) -> JordanStructure | None:
    """The structure when ``a`` is already a Jordan matrix."""
    return _structure_if_jordan(a)


def _write(cfg: JobConfig, text: str) -> None:
    if cfg.output and cfg.output != "-":
        try:
            Path(cfg.output).write_text(text)
        except OSError as e:
            raise InputError(f"cannot write output file {cfg.output}: {e.strerror}") from e
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def _cmd_construct(cfg: JobConfig) -> int:
    a = _square(_matrix(_need(cfg.input, "--input", "construct"), "input"), "input")
    s = _jordan_structure_of(a)
    sub = _subspace(cfg, a.rows, s)
    emit = cfg.emit or "matrix"
    if emit not in ("matrix", "construction"):
        raise InputError(f"construct cannot emit {emit!r}; use matrix or construction")
    if cfg.method == "rowreduce":
        if emit == "construction":
            raise InputError("--method rowreduce only emits a matrix")
        if not is_invariant_under(a, sub):
            raise InvarianceError("subspace is not invariant under the input matrix")
        q, s2 = jordanize(a, cfg.eigenvalues)
        qinv = inverse(q)
        inner = sub.apply(qinv)
        spec = chain_decompose(s2, inner)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ConstructionFallbackWarning)
            m = construct_via_row_reduction(s2, spec, seed=cfg.seed)
        for w in caught:
            print(f"notice: {w.message}", file=sys.stderr)
        _write(cfg, (q @ m @ qinv).to_json())
        return 0
    n_mat, c, _ = construct_full(a, sub, cfg.eigenvalues, seed=cfg.seed)
    _write(cfg, n_mat.to_json() if emit == "matrix" else c.to_json())
    return 0


def _cmd_range(cfg: JobConfig) -> int:
    a = _square(_matrix(_need(cfg.input, "--input", "range"), "input"), "input")
    sub = _subspace(cfg, a.rows, _jordan_structure_of(a))
    r = range_representation(a, sub, cfg.eigenvalues, seed=cfg.seed)
    _write(cfg, r.to_json())
    return 0


def _cmd_lattice(cfg: JobConfig) -> int:
    a = _square(_matrix(_need(cfg.input, "--input", "lattice"), "input"), "input")
    _, s = jordanize(a, cfg.eigenvalues)
    lat = enumerate_lattice(s, seed=cfg.seed)
    emit = cfg.emit or "dot"
    if emit not in ("dot", "json"):
        raise InputError(f"lattice cannot emit {emit!r}; use dot or json")
    _write(cfg, export_dot(lat) if emit == "dot" else export_json(lat))
    return 0


def _cmd_verify(cfg: JobConfig) -> int:
    path = _need(cfg.input, "--input", "verify")
    data = _json(path, "construction")
    try:
        c = Construction.from_data(data)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"construction file {path} is malformed: {e}") from e
    a = None
    if cfg.extra.get("matrix"):
        a = _matrix(cfg.extra["matrix"], "A")
    problems = check(c, a)
    if problems:
        for p in problems:
            print(f"{path}: {p}", file=sys.stderr)
        return 1
    _write(cfg, f"{path}: ok\n")
    return 0


def _cmd_jordanize(cfg: JobConfig) -> int:
    a = _square(_matrix(_need(cfg.input, "--input", "jordanize"), "input"), "input")
    q, s = jordanize(a, cfg.eigenvalues)
    emit = cfg.emit or "json"
    if emit == "matrix":
        _write(cfg, jordan_matrix(s).to_json())
    elif emit == "json":
        doc = {"structure": s.to_data(), "Q": q.to_text(), "J": jordan_matrix(s).to_text()}
        _write(cfg, json.dumps(doc, indent=1) + "\n")
    else:
        raise InputError(f"jordanize cannot emit {emit!r}; use json or matrix")
    return 0


def _cmd_demo(cfg: JobConfig) -> int:
    name = _need(cfg.example, "an example name", "demo")
    try:
        demos.normalize(name)
    except KeyError as e:
        raise InputError(str(e.args[0])) from e
    emit = cfg.emit or "matrix"
    if emit in ("dot", "json") and demos.normalize(name) == "D":
        _write(cfg, demos.render_lattice(name, emit, seed=cfg.seed))
    elif emit == "json":
        _write(cfg, demos.render_json(name))
    elif emit == "matrix":
        _write(cfg, demos.render_text(name))
    else:
        raise InputError(f"demo {name} cannot emit {emit!r}")
    return 0


HANDLERS = {
    "construct": _cmd_construct,
    "range": _cmd_range,
    "lattice": _cmd_lattice,
    "verify": _cmd_verify,
    "jordanize": _cmd_jordanize,
    "demo": _cmd_demo,
}


def run(cfg: JobConfig) -> int:
    """Execute one job; returns the exit status and prints diagnostics to stderr."""
    try:
        return HANDLERS[cfg.command](cfg)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (
        DomainError,
        InvarianceError,
        UnsupportedSpectrumError,
        ConstructionError,
        LatticeError,
        SingularMatrixError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ShapeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


# ---------------------------------------------------------------------------
# argument parsing


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="invsub",
        description="Exact commuting kernels and invariant-subspace lattices.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, subspace=True):
        sp.add_argument("--input", help="matrix file (JSON array of rows of scalar strings)")
        if subspace:
            sp.add_argument("--subspace", help="matrix file whose columns span the subspace")
            sp.add_argument("--chains", help="chain file: [[generator, length], ...]")
        sp.add_argument("--eigenvalues", help="comma-separated eigenvalues, e.g. 2,3,1+1i")
        sp.add_argument("--output", help="output path (default: stdout)")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("construct", help="commuting N with ker N equal to the subspace")
    common(sp)
    sp.add_argument("--method", choices=("construct", "rowreduce"), default="construct")
    sp.add_argument("--emit", choices=("matrix", "construction"))

    sp = sub.add_parser("range", help="commuting R with range R equal to the subspace")
    common(sp)

    sp = sub.add_parser("lattice", help="invariant-subspace lattice of a matrix")
    common(sp, subspace=False)
    sp.add_argument("--emit", choices=("dot", "json"))

    sp = sub.add_parser("verify", help="check a construction file")
    sp.add_argument("--input", help="construction JSON written by construct --emit construction")
    sp.add_argument("--matrix", help="optional original matrix A to test N A = A N")
    sp.add_argument("--output")

    sp = sub.add_parser("jordanize", help="Jordan structure and change of basis")
    common(sp, subspace=False)
    sp.add_argument("--emit", choices=("json", "matrix"))

    sp = sub.add_parser("demo", help="replay a worked example (A-G)")
    sp.add_argument("example", help="example name, e.g. exampleD or D")
    sp.add_argument("--emit", choices=("matrix", "dot", "json"))
    sp.add_argument("--output")
    sp.add_argument("--seed", type=int, default=0)
    return p


def parse_args(argv=None) -> JobConfig:
    ns = _parser().parse_args(argv)
    eig = getattr(ns, "eigenvalues", None)
    if eig:
        try:
            eig = [Scalar.parse(x) for x in eig.split(",")]
        except ValueError as e:
            raise InputError(f"--eigenvalues: cannot parse {e}") from e
    return JobConfig(
        command=ns.command,
        method=getattr(ns, "method", "construct"),
        input=getattr(ns, "input", None),
        subspace=getattr(ns, "subspace", None),
        chains=getattr(ns, "chains", None),
        eigenvalues=eig or None,
        output=getattr(ns, "output", None),
        emit=getattr(ns, "emit", None),
        seed=getattr(ns, "seed", 0),
        example=getattr(ns, "example", None),
        extra={"matrix": getattr(ns, "matrix", None)},
    )


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
