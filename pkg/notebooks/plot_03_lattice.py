"""
The lattice of invariant subspaces of J(3) ⊕ J(1)
=================================================

Nodes are subspace types, each carried by a block-diagonal matrix of
shift powers.  Bold nodes are the hyperinvariant ones.
"""

from invsub import JordanStructure, enumerate_lattice, export_dot

lat = enumerate_lattice(JordanStructure.nilpotent(3, 1))
for node in lat.nodes:
    star = "*" if node.hyperinvariant else " "
    print(f"{star} {node.label:5} dim {node.dim}  powers {node.powers}  blocks {node.expansion}")

print(len(lat.covers), "cover relations")

# paste into `dot -Tsvg` to draw the Hasse diagram
print(export_dot(lat))
