"""Walk through the asymptotic threshold g(k,d,ell) for a few small cases.

For each (k, d, ell) we print where the optimum sits, which residue class
certifies it, how it compares with the space term, and which barrier is the
binding one.
"""

from hypermatch import thresholds

print("g(k,d,ell): the best relative d-degree a divisibility barrier can reach.\n")
print(f"{'k':>2} {'d':>2} {'ell':>3} {'g':>9} {'x*':>7} {'j*':>3} {'space':>9}  governing")
for k, d, ell in [(3, 1, 0), (3, 1, 1), (4, 2, 1), (5, 3, 2), (6, 2, 3), (7, 4, 5)]:
    res = thresholds.g_optimize(k, d, ell)
    sp = thresholds.space_term(k, d)
    gov = thresholds.governing_barrier(k, d, ell)
    print(f"{k:>2} {d:>2} {ell:>3} {res.g:9.5f} {res.x_star:7.4f} {res.j_star:>3} {sp:9.5f}  {gov}")

print("\nEach value is checked against the general bounds. For (6,2,3):")
rep = thresholds.g_bounds_check(6, 2, 3, thresholds.g_optimize(6, 2, 3).g)
for chk in rep.checks:
    print(f"  {chk.name:18s} g={chk.value:.5f} upper={chk.upper} passed={chk.passed}")

print("\nA finite sanity check: the exact minimum 2-degree of one barrier on 13 vertices")
fd = thresholds.finite_min_degree(13, 4, 2, 1, 1, 5)
print(f"  n=13 k=4 d=2 ell=1 j=1 |V1|=5 -> delta_2 = {fd.value}, per intersection size {fd.per_t}")

print("\nPlot data: the first few rows of the min-profile curve for (k,d,ell) = (4,2,1)")
for row in thresholds.profile_curve(4, 2, 1, points=5)[:5]:
    print("  ", {key: round(val, 4) if isinstance(val, float) else val for key, val in row.items()})
