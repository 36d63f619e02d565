"""Edge-lattices: which index vectors a partition's robust edges generate."""

from hypermatch import VertexPartition, lattice_basis, space_barrier
from hypermatch import lattice

print("Three generator sets in Z^3 and what their lattices contain.\n")
cases = {
    "{(1,1,1),(3,0,0),(0,3,0),(0,0,3)}": [(1, 1, 1), (3, 0, 0), (0, 3, 0), (0, 0, 3)],
    "{(2,0,1),(1,1,1),(0,3,0)}": [(2, 0, 1), (1, 1, 1), (0, 3, 0)],
    "{(3,0,0),(2,1,0),(0,2,1)}": [(3, 0, 0), (2, 1, 0), (0, 2, 1)],
}
for name, gens in cases.items():
    L = lattice_basis(gens, 3)
    tr = lattice.find_transferral(L)
    print(f"{name}\n  HNF basis {L.basis}\n  transferral: {tr}")
    v = (3, 0, -3)
    if v in L:
        dec = lattice.minimal_coefficients(v, gens)
        print(f"  {v} = combination with coefficients {dec}")
    print()

print("Robust vectors of a real hypergraph: the space barrier with parts {0,1} and the rest.")
H = space_barrier(9, 3, 2)
P = VertexPartition(9, frozenset(), (frozenset({0, 1}), frozenset(range(2, 9))))
I = lattice.robust_vectors(H, P, tau=1)
L = lattice_basis(I, 2)
print(f"  robust vectors {I}; transferral {lattice.find_transferral(L)}")
print(f"  least t with t(e_1 - e_2) in the lattice: {lattice.minimal_symmetric_t(L)}")
