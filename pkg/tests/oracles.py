"""Independent checks computed with sympy rather than with invsub.exact."""

import sympy
from sympy import I, Rational

from invsub.exact import Matrix, Scalar
from invsub.jordan import jordan_matrix


def sym(x):
    if isinstance(x, Matrix):
        return sympy.Matrix(x.rows, x.cols, [sym(v) for row in x.tolist() for v in row])
    return Rational(int(x.re.numerator), int(x.re.denominator)) + I * Rational(
        int(x.im.numerator), int(x.im.denominator)
    )


def back(m) -> Matrix:
    out = []
    for i in range(m.rows):
        row = []
        for j in range(m.cols):
            re, im = sympy.nsimplify(m[i, j]).as_real_imag()
            row.append(Scalar(str(re), str(im)))
        out.append(row)
    return Matrix(out)


def columns(vectors, n):
    if not vectors:
        return sympy.zeros(n, 0)
    return sympy.Matrix.hstack(*[sympy.Matrix([sym(x) for x in v]) for v in vectors])


def same_span(a, b) -> bool:
    """Column spaces of the sympy matrices ``a`` and ``b`` agree."""
    ra, rb = a.rank(), b.rank()
    if ra != rb:
        return False
    if ra == 0:
        return True
    return sympy.Matrix.hstack(a, b).rank() == ra


def kernel(m):
    ns = m.nullspace()
    return sympy.Matrix.hstack(*ns) if ns else sympy.zeros(m.cols, 0)


def commutant(j):
    """Basis of {X : XJ = JX}, solved entrywise."""
    n = j.rows
    xs = sympy.symbols(f"x0:{n * n}")
    x = sympy.Matrix(n, n, xs)
    eqs = list(x * j - j * x)
    a, _ = sympy.linear_eq_to_matrix(eqs, xs)
    return [sympy.Matrix(n, n, list(v)) for v in a.nullspace()]


def hyperinvariant(basis, j) -> bool:
    """``basis`` (columns) is invariant under every X commuting with J."""
    if basis.cols == 0:
        return True
    return all(same_span(basis, sympy.Matrix.hstack(basis, x * basis)) for x in commutant(j))


def related(s, u, v, rng, tries=6):
    """Is there an invertible commutant element carrying u onto v?  (sympy)"""
    if u.dim != v.dim:
        return False
    basis = commutant(sym(jordan_matrix(s)))
    ub = sym(u.basis)
    vb = sym(v.basis)
    left = vb.T.nullspace()  # functionals vanishing on v
    if not left or u.dim == 0:
        return True
    ann = sympy.Matrix.hstack(*left).T
    cols = [list(ann * b * ub) for b in basis]
    system = sympy.Matrix([[col[i] for col in cols] for i in range(len(cols[0]))])
    sols = system.nullspace()
    for _ in range(tries):
        c = sum((rng.randint(-4, 4) * v for v in sols), sympy.zeros(len(basis), 1))
        x = sum((c[i] * b for i, b in enumerate(basis)), sympy.zeros(s.n))
        if x.det() != 0:
            return True
    return False
