import random

import pytest
import sympy

from invsub.exact import Matrix, ShapeError
from invsub.jordan import JordanStructure, jordan_matrix
from invsub.random_specs import random_chain_spec
from invsub.subspace import (
    ChainSpec,
    InvarianceError,
    Subspace,
    all_subspaces_marked,
    chain_decompose,
    is_invariant,
    signature,
    vector_height,
)

import oracles


def test_subspace_basics():
    a = Subspace(3, [[1, 0, 0], [1, 1, 0]])
    b = Subspace(3, [[0, 1, 0]])
    assert a.dim == 2
    assert a.contains(b) and b.contains([0, 2, 0])
    assert (a & Subspace(3, [[0, 0, 1], [0, 1, 0]])) == b
    assert (b + Subspace(3, [[1, 0, 0]])) == a
    assert Subspace.zero(3).dim == 0 and Subspace.full(3).dim == 3
    assert Subspace.kernel(Matrix([[1, 0, 0]])) == Subspace(3, [[0, 1, 0], [0, 0, 1]])
    assert a.orthogonal_complement() == Subspace(3, [[0, 0, 1]])
    assert Subspace.from_json(a.to_json()) == a
    with pytest.raises(ShapeError):
        a.contains(Subspace(2, [[1, 0]]))


def test_vector_height():
    s = JordanStructure.nilpotent(3, 1)
    assert vector_height(s, [0, 0, 0, 0]) == 0
    assert vector_height(s, [1, 0, 0, 0]) == 1
    assert vector_height(s, [0, 0, 1, 1]) == 3


def test_chain_spec_validation():
    s = JordanStructure.nilpotent(3, 1)
    with pytest.raises(ValueError, match="height"):
        ChainSpec(s, [([0, 1, 0, 0], 1)]).validate()
    with pytest.raises(ValueError, match="dependent"):
        ChainSpec(s, [([0, 1, 0, 0], 2), ([1, 0, 0, 0], 1)]).validate()
    with pytest.raises(ShapeError):
        ChainSpec(s, [([1, 0, 0], 1)])
    two = JordanStructure([(0, 1), (1, 1)])
    with pytest.raises(ValueError, match="group"):
        ChainSpec(two, [([1, 1], 1, 0)]).validate()


def test_chain_decompose_rejects_non_invariant():
    s = JordanStructure.nilpotent(3)
    with pytest.raises(InvarianceError) as info:
        chain_decompose(s, Subspace(3, [[0, 1, 0]]))
    assert info.value.witness is not None


@pytest.mark.parametrize("sizes", [(3, 1), (2, 2, 1), (4, 2)])
def test_chain_decompose_round_trip(sizes):
    s = JordanStructure.nilpotent(*sizes)
    rng = random.Random(sum(sizes))
    for _ in range(40):
        spec = random_chain_spec(s, rng)
        sub = spec.span()
        assert is_invariant(s, sub)
        again = chain_decompose(s, sub)
        again.validate()
        assert again.span() == sub
        assert sorted(c.length for c in again.chains) == sorted(c.length for c in spec.chains)


def test_all_marked_rule():
    assert all_subspaces_marked(JordanStructure.nilpotent(2, 1, 1))
    assert not all_subspaces_marked(JordanStructure.nilpotent(3, 1))


# types ----------------------------------------------------------------------


def random_commutant_unit(s, rng):
    """Random invertible element of the commutant of J (sympy)."""
    basis = oracles.commutant(oracles.sym(jordan_matrix(s)))
    while True:
        x = sum((rng.randint(-3, 3) * b for b in basis), sympy.zeros(s.n))
        if x.det() != 0:
            return x


def move(sub, x):
    m = oracles.back(x)
    return sub.apply(m)


@pytest.mark.parametrize("sizes", [(2, 2), (3, 1), (2, 1, 1)])
def test_signature_is_invariant_under_commutant(sizes):
    s = JordanStructure.nilpotent(*sizes)
    rng = random.Random(7)
    for _ in range(25):
        sub = random_chain_spec(s, rng).span()
        x = random_commutant_unit(s, rng)
        assert signature(s, move(sub, x)) == signature(s, sub)


@pytest.mark.parametrize("sizes", [(2, 2), (3, 1)])
def test_signature_separates_orbits(sizes):
    # brute force: equal signatures must be related by an invertible
    # commutant element, found by solving X u ⊆ v directly
    s = JordanStructure.nilpotent(*sizes)
    rng = random.Random(11)
    subs = [random_chain_spec(s, rng).span() for _ in range(60)]
    by_sig = {}
    for sub in subs:
        by_sig.setdefault(signature(s, sub), []).append(sub)
    for group in by_sig.values():
        first = group[0]
        for other in group[1:4]:
            assert oracles.related(s, first, other, rng), (first, other)
    sigs = list(by_sig)
    for i, a in enumerate(sigs):
        for b in sigs[i + 1:]:
            assert not oracles.related(s, by_sig[a][0], by_sig[b][0], rng)
