import random

import pytest
import sympy

from invsub import fixtures
from invsub.exact import Matrix, Scalar, inverse
from invsub.jordan import (
    JordanStructure,
    UnsupportedSpectrumError,
    backward_shift_power,
    characteristic_polynomial,
    commutant_violations,
    is_upper_triangular_toeplitz,
    jordan_matrix,
    jordanize,
    padded_shift,
)
from invsub.random_specs import random_structure

import oracles


def unimodular(n, rng):
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    m = Matrix(rows)
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        e = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
        e[i][j] = rng.randint(-2, 2)
        m = m @ Matrix(e)
    return m


def test_structure_ordering_and_offsets():
    with pytest.raises(ValueError):
        JordanStructure([(2, 1), (2, 3)])
    s = JordanStructure([(2, 3), (2, 1), (3, 1)])
    assert s.sizes == (3, 1, 1)
    assert s.eigenvalues == (Scalar(2), Scalar(2), Scalar(3))
    assert s.offsets == (0, 3, 4)
    assert s.n == 5
    assert s.locate(3) == (1, 0)
    assert [lam for lam, _ in s.groups()] == [Scalar(2), Scalar(3)]
    assert JordanStructure.from_data(s.to_data()) == s


def test_jordan_matrix():
    s = JordanStructure([(2, 2), (5, 1)])
    assert jordan_matrix(s) == Matrix([[2, 1, 0], [0, 2, 0], [0, 0, 5]])


def test_shift_powers():
    assert backward_shift_power(3, 0) == Matrix.identity(3)
    assert backward_shift_power(3, 2) == Matrix([[0, 0, 1], [0, 0, 0], [0, 0, 0]])
    assert backward_shift_power(3, 3) == Matrix.zeros(3)
    # rectangular shifts sit in the top-right corner of a wide block
    assert padded_shift(2, 3, 0) == Matrix([[0, 1, 0], [0, 0, 1]])
    assert padded_shift(3, 2, 0) == Matrix([[1, 0], [0, 1], [0, 0]])


def test_toeplitz():
    assert is_upper_triangular_toeplitz(Matrix([[1, 2, 3], [0, 1, 2], [0, 0, 1]]))
    assert not is_upper_triangular_toeplitz(Matrix([[1, 2, 3], [0, 1, 5], [0, 0, 1]]))
    assert not is_upper_triangular_toeplitz(Matrix([[1, 0], [1, 1]]))


def test_example_a_commutant_pattern():
    f = fixtures.load("A")
    s = f.structure
    m = f.expected(None, "pattern")
    j = jordan_matrix(s)
    assert not commutant_violations(m, s)
    assert m @ j == j @ m
    assert jordan_matrix(s) == f.expected(None, "J")


def test_commutant_violations_name_the_cell():
    s = JordanStructure.nilpotent(2, 1)
    bad = Matrix([[1, 0, 0], [0, 2, 0], [0, 0, 1]])
    (a, b, msg), *_ = commutant_violations(bad, s)
    assert (a, b) == (0, 0)
    assert "entry (1,1)" in msg
    mixed = Matrix([[1, 0, 1], [0, 1, 0], [0, 0, 1]])
    assert not commutant_violations(mixed, s)
    two = JordanStructure([(0, 1), (1, 1)])
    assert "different eigenvalues" in commutant_violations(Matrix([[0, 1], [0, 0]]), two)[0][2]


@pytest.mark.parametrize("seed", range(12))
def test_jordanize_random(seed):
    rng = random.Random(seed)
    s = random_structure(rng, max_blocks=3, max_size=3, max_eigs=2)
    q0 = unimodular(s.n, rng)
    a = q0 @ jordan_matrix(s) @ inverse(q0)
    q, found = jordanize(a)
    assert found == s
    assert inverse(q) @ a @ q == jordan_matrix(s)
    assert sorted(sympy_blocks(oracles.sym(a))) == sorted(
        (oracles.sym(lam), size) for lam, size in s.blocks
    )


def sympy_blocks(a):
    j = a.jordan_form()[1]
    blocks, start = [], 0
    for i in range(1, j.rows + 1):
        if i == j.rows or j[i - 1, i] == 0:
            blocks.append((j[start, start], i - start))
            start = i
    return blocks


def test_jordanize_gaussian_eigenvalues():
    a = Matrix([[0, -1], [1, 0]])
    q, s = jordanize(a)
    assert set(s.eigenvalues) == {Scalar(0, 1), Scalar(0, -1)}
    assert inverse(q) @ a @ q == jordan_matrix(s)


def test_jordanize_rejects_irrational_spectrum():
    with pytest.raises(UnsupportedSpectrumError):
        jordanize(Matrix([[0, 2], [1, 0]]))


def test_jordanize_with_supplied_eigenvalues():
    a = Matrix([[2, 1], [0, 3]])
    q, s = jordanize(a, [3, 2])
    assert inverse(q) @ a @ q == jordan_matrix(s)
    with pytest.raises(UnsupportedSpectrumError):
        jordanize(a, [2])


def test_characteristic_polynomial():
    a = Matrix([[1, 2], [3, 4]])
    x = sympy.Symbol("x")
    expect = sympy.Poly(oracles.sym(a).charpoly(x).as_expr(), x).all_coeffs()
    got = characteristic_polynomial(a)
    assert [oracles.sym(c) for c in got] in (expect, expect[::-1])
