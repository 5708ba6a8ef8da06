"""
A commuting matrix with a prescribed kernel
===========================================

Take the nilpotent Jordan matrix with blocks 3, 2, 1 and the invariant
subspace spanned by one Jordan chain of length two.  We want M with
M J = J M and ker M equal to that subspace.
"""

from invsub import ChainSpec, JordanStructure, Subspace, check, construct, jordan_matrix

s = JordanStructure.nilpotent(3, 2, 1)
J = jordan_matrix(s)

# chain generator x; the chain is x, Jx.  Entries are exact rationals.
spec = ChainSpec(s, [(["1", "1", "0", "3", "2", "0"], 2)])
print("subspace basis:", spec.span())

c = construct(s, spec)
print("T =")
print(c.T.pretty())
print("Z =")
print(c.Z.pretty())
print("M = Z T^-1 =")
print(c.M.pretty())

assert c.M @ J == J @ c.M
assert Subspace.kernel(c.M) == spec.span()
print("problems found by check():", check(c))

# A chain that does not fit its block forces an expansion: block 3 grows
# by one row and P cuts the extra row away again.
other = ChainSpec(s, [(["2", "1", "0", "0", "0", "1"], 2)])
c2 = construct(s, other)
print("expanded blocks:", c2.expanded.sizes, "P is", c2.P.shape)
print(c2.M.pretty())
