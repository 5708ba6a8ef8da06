import json
import random

import pytest

from invsub import fixtures
from invsub.exact import Matrix, inverse
from invsub.halmos import (
    Construction,
    build_Z_nonmarked,
    build_Z_simple,
    check,
    construct,
    construct_full,
    construct_single_block,
    expand_structure,
    range_representation,
    selection_matrix,
    translate_kernel_invariance,
)
from invsub.jordan import JordanStructure, commutant_violations, jordan_matrix
from invsub.random_specs import random_chain_spec
from invsub.subspace import ChainSpec, InvarianceError, Subspace, is_marked

import oracles
from corpus import corpus


def test_single_block_kernels():
    for n in range(1, 5):
        for k in range(n + 1):
            m = construct_single_block(n, k)
            assert Subspace.kernel(m) == Subspace(n, [[1 if i == c else 0 for i in range(n)] for c in range(k)])


def test_build_Z_simple():
    s = JordanStructure.nilpotent(3, 1)
    assert build_Z_simple(s, (1, 0)) == Matrix(
        [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0], [0, 0, 0, 1]]
    )
    with pytest.raises(ValueError):
        build_Z_simple(s, (1,))


def test_selection_matrix():
    p = selection_matrix((3, 2, 1), (3, 2, 2))
    assert p.shape == (6, 7)
    assert p @ p.T == Matrix.identity(6)
    assert [row.index(max(row, key=bool)) for row in map(list, p.tolist())] == [0, 1, 2, 3, 4, 5]


def test_example_c_m2_pieces():
    f = fixtures.load("C")
    spec = f.spec("M2")
    t, p = expand_structure(f.structure, spec)
    assert t.sizes == (3, 2, 2)
    assert p == f.expected("M2", "P")
    # one chain of length 2 in block 2, block 3 grown by one row
    z = build_Z_nonmarked(t, 1, 2, 2, 1)
    assert not commutant_violations(z, t)


@pytest.mark.parametrize("case", ["M1", "M2", "M3"])
def test_example_c_other_parameters(case):
    # the displayed formulas hold at other parameter values too
    f = fixtures.load("C", A="-3", B="1/2", C="7", D="-1")
    c = construct(f.structure, f.spec(case))
    assert c.M == f.expected(case, "M")
    assert Subspace.kernel(c.M) == f.spec(case).span()


def test_marked_has_identity_selection():
    s = JordanStructure.nilpotent(3, 2, 1)
    spec = ChainSpec(s, [([0, 1, 0, 0, 0, 0], 2)])
    assert is_marked(s, spec)
    c = construct(s, spec)
    assert c.is_marked and c.P == Matrix.identity(6)


def test_corpus_invariants_against_sympy():
    # independent kernel and commutation check on a slice of the corpus
    for s, spec in corpus()[::40]:
        c = construct(s, spec)
        m = oracles.sym(c.M)
        j = oracles.sym(jordan_matrix(s))
        assert m * j == j * m
        assert oracles.same_span(oracles.kernel(m), oracles.columns(spec.vectors(), s.n))
        assert c.M == c.P @ c.Z @ inverse(c.T) @ c.P.T


def test_generic_rule_still_satisfies_everything():
    generic = [(s, spec) for s, spec in corpus() if construct(s, spec).z_rule == "generic"]
    assert generic, "corpus no longer exercises the generic rule"
    for s, spec in generic:
        c = construct(s, spec)
        assert not c.is_marked
        assert not check(c)


def test_seed_is_reproducible():
    s, spec = next((s, spec) for s, spec in corpus() if construct(s, spec).z_rule == "generic")
    assert construct(s, spec, seed=3).M == construct(s, spec, seed=3).M


# construct_full / range ------------------------------------------------------


def conjugated(s, seed):
    rng = random.Random(seed)
    q = Matrix.identity(s.n)
    for i in range(s.n - 1):
        e = Matrix.identity(s.n).replace(i, i + 1, rng.randint(1, 3))
        q = q @ e
    return q @ jordan_matrix(s) @ inverse(q), q


def test_construct_full_on_non_jordan_matrix():
    s = JordanStructure([(1, 2), (1, 1), (3, 1)])
    a, q = conjugated(s, 0)
    spec = ChainSpec(s, [([0, 1, 1, 0], 2, 1)])
    sub = spec.span().apply(q)
    n_mat, c, q2 = construct_full(a, sub)
    assert n_mat @ a == a @ n_mat
    assert Subspace.kernel(n_mat) == sub
    assert c.N == n_mat and not check(c, a)


def test_construct_full_rejects_non_invariant():
    a = Matrix([[1, 1], [0, 1]])
    with pytest.raises(InvarianceError) as info:
        construct_full(a, Subspace(2, [[0, 1]]))
    assert "escapes" in str(info.value)


def test_range_representation_small():
    a = Matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    sub = Subspace(3, [[1, 0, 0]])
    r = range_representation(a, sub)
    assert Subspace.image(r) == sub and r @ a == a @ r


def test_translate_kernel_invariance():
    f = fixtures.load("G")
    n_mat, a = f.matrix(f.data["N"]), f.matrix(f.data["A"])
    assert all(translate_kernel_invariance(n_mat, a, 0, k) for k in (1, 2, 3))
    j = Matrix([[2, 1], [0, 2]])
    assert translate_kernel_invariance(j, j, 2, 1)


# serialization and check() ---------------------------------------------------


def test_construction_json_round_trip():
    f = fixtures.load("E")
    c = construct(f.structure, f.spec("M"))
    again = Construction.from_json(c.to_json())
    assert again.M == c.M and again.T == c.T and again.expanded.sizes == c.expanded.sizes
    assert not check(again)


def test_check_names_the_problem():
    f = fixtures.load("C")
    data = json.loads(construct(f.structure, f.spec("M1")).to_json())
    data["M"][2][4] = "9"
    problems = check(Construction.from_data(data))
    assert any("not in the commutant" in p and "block (1,2)" in p for p in problems)
    assert any("P Z T^-1 P^t at entry (3, 5)" in p for p in problems)


def test_from_data_rejects_unknown_format():
    with pytest.raises(ValueError):
        Construction.from_data({"format": 9})
