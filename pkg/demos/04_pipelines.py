"""Run both absorbing pipelines end to end and show what their traces record."""

import time

from hypermatch import LatticeParams, complete, count_s_absorbing, generate, lattice_absorbing_pipeline, npm_via_absorption

H = complete(20, 6)
S = set(range(8))
print(f"K_20^(6): the number of S-absorbing edges for S = {sorted(S)} is {count_s_absorbing(H, S)}.\n")

print("absorb4 on K_20^(6) for five seeds:")
for seed in range(5):
    t0 = time.perf_counter()
    res = npm_via_absorption(H, beta=0.1, seed=seed)
    print(f"  seed={seed} success={res.success} size={res.size} ({time.perf_counter() - t0:.2f}s)")

print("\nThe lattice pipeline on a dense random 3-graph:")
G = generate(22, 3, "random", p=0.8, seed=1)
res = lattice_absorbing_pipeline(G, LatticeParams(seed=0))
print(f"  success={res.success} size={res.size} target={G.n // G.k}")
for key in ("partition", "lattice", "family", "reserve", "residual", "absorption"):
    if key in res.trace:
        val = res.trace[key]
        text = str(val if not isinstance(val, dict) else {a: b for a, b in list(val.items())[:4]})
        print(f"  {key:10s} {text[:100]}")

print("\nA failing case reports the stage instead of raising:")
sparse = generate(13, 3, "random", p=0.05, seed=3)
res = lattice_absorbing_pipeline(sparse, LatticeParams(seed=0))
print(f"  success={res.success} stage={res.stage!r} reason={res.reason!r}")
