"""The two extremal constructions and why neither has a near perfect matching."""

from hypermatch import divisibility_barrier, matching_number, min_degree, space_barrier
from hypermatch.constructions import admissible_specs

n, k, s = 14, 4, 2
H = space_barrier(n, k, s)
res = matching_number(H)
print(f"Space barrier: every edge of a {k}-graph on {n} vertices meets a fixed {s}-set.")
print(f"  edges={len(H.edges)}  matching number={res.size} ({res.status})  target n//k={n // k}")
print(f"  min 1-degree = {min_degree(H, 1).value}; enough to look dense, still stuck at {s} edges.\n")

n, k = 13, 4
print(f"Divisibility barriers on n={n}, k={k} (ell = n mod k = {n % k}):")
for spec in admissible_specs(n, k):
    if spec.n1 in (0, n):
        continue
    G, P = divisibility_barrier(n, k, spec.ell, spec.j, spec.n1)
    res = matching_number(G, target=n // k)
    deg = min_degree(G, 2).value
    print(f"  j={spec.j} |V1|={spec.n1:>2}  edges={len(G.edges):>4}  delta_2={deg:>3}  "
          f"matching of size {n // k}? {res.status}")
print("\nEach admissible choice forces every matching below n//k, which the exact solver confirms.")
