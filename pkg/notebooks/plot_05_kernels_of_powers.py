"""
Invariant kernels without commuting
===================================

Kernels of powers of N can all be A-invariant even though N A != A N.
"""

from invsub import Matrix, Subspace
from invsub.halmos import translate_kernel_invariance

N = Matrix([[0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 0, 0], [0, 0, 0, 0, 1], [0, 0, 0, 0, 0]])
A = Matrix([[1, 3, 5, 0, 0], [0, 1, 7, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 2, 0], [0, 0, 0, 0, 2]])

for k in (1, 2, 3):
    ker = Subspace.kernel(N ** k)
    print(f"ker N^{k}: dim {ker.dim}, A-invariant: {translate_kernel_invariance(N, A, 0, k)}")

print("N A - A N =")
print((N @ A - A @ N).pretty())
