"""
Matrices that are not in Jordan form
====================================

construct_full finds the Jordan form exactly, builds M there and
conjugates back.  range_representation does the dual job: a commuting R
whose column space is the subspace.
"""

from invsub import Matrix, Subspace, construct_full, range_representation

A = Matrix([
    ["3", "1", "-1", "0"],
    ["0", "2", "0", "0"],
    ["1", "1", "1", "0"],
    ["0", "0", "0", "5"],
])
sub = Subspace(4, [["1", "0", "1", "0"], ["0", "0", "0", "1"]])

N, construction, Q = construct_full(A, sub)
print("Jordan structure:", construction.original)
print("N =")
print(N.pretty())
print("N A == A N:", N @ A == A @ N, " ker N == subspace:", Subspace.kernel(N) == sub)

R = range_representation(A, sub)
print("R =")
print(R.pretty())
print("range R == subspace:", Subspace.image(R) == sub)
