"""Exact commuting-kernel constructions for invariant subspaces of matrices."""

from .exact import Matrix, Scalar, inverse, kernel_basis, rref
from .jordan import JordanStructure, jordan_matrix, jordanize
from .subspace import Chain, ChainSpec, Subspace, chain_decompose, is_marked, signature
from .halmos import Construction, check, construct, construct_full, range_representation
from .rowreduce import ConstructionFallbackWarning, construct_via_row_reduction
from .lattice import Lattice, enumerate_lattice, export_dot, export_json, import_json

__version__ = "0.1.0"
