"""
Row reduction instead of a change of basis
==========================================

Every row of a commuting M with kernel ℳ annihilates ℳ.  Reducing the
matrix X whose rows span ℳ gives the equations those rows must satisfy.
"""

from invsub import ChainSpec, JordanStructure, construct, construct_via_row_reduction, rref
from invsub.rowreduce import EquationSystem, form_X

s = JordanStructure.nilpotent(3, 1)
spec = ChainSpec(s, [(["2", "1", "0", "3"], 2)])

X = form_X(s, spec)
print("X =")
print(X.pretty())
R, pivots = rref(X)
print("rref(X) =")
print(R.pretty())
print(EquationSystem.from_rref(s, R))

M = construct_via_row_reduction(s, spec)
print("M =")
print(M.pretty())

# both methods give matrices with the same kernel, not the same matrix
print(M == construct(s, spec).M)
