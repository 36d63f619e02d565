import itertools

import pytest

from hypermatch.absorbing import (
    AbsorbingFamily,
    LatticeParams,
    SAbsorptionWitness,
    StageFailure,
    absorb_step,
    build_absorbing_matching,
    count_s_absorbing,
    exact_pipeline,
    find_s_absorbing_witness,
    lattice_absorbing_pipeline,
    npm_via_absorption,
    residual_matching,
)
from hypermatch.constructions import admissible_specs
from hypermatch.hgraph import Hypergraph, Matching, build, complete, generate, mask_of, matching_number, popcount


@pytest.fixture(scope="module")
def K20():
    return complete(20, 6)


@pytest.fixture(scope="module")
def K32():
    return complete(32, 6)


def recheck(w: SAbsorptionWitness, k: int):
    """Independent check of the intersection equalities on plain sets."""
    e, e1, e2, S = (set(vs) for vs in (bits(w.e), bits(w.e1), bits(w.e2), bits(w.S)))
    assert len(S) == k + 2 and not e & S
    assert len(e1 & S) == k - 2 and len(e1 & e) == 2
    assert len(e2 & S) == 4 and len(e2 & e) == k - 4
    assert not e1 & e2 and S <= e1 | e2 and len((e1 | e2) & e) == k - 2


def bits(m):
    return [v for v in range(m.bit_length()) if m >> v & 1]


def test_count_complete(K20):
    S = range(8)
    disjoint = [m for m in K20.masks if not m & mask_of(S)]
    M = Matching.__new__(Matching)  # count only reads .masks; a non-matching edge pool is fine here
    object.__setattr__(M, "masks", tuple(disjoint))
    assert count_s_absorbing(K20, S, M) == 924
    for e in disjoint[:50]:
        recheck(find_s_absorbing_witness(K20, S, e), 6)


def test_count_trivial_cases():
    assert count_s_absorbing(Hypergraph(20, 6, []), range(8)) == 0
    edges = [c for c in itertools.combinations(range(12), 6) if c[0] < 8]
    H = build(12, 6, edges)
    assert count_s_absorbing(H, range(8)) == 0
    with pytest.raises(ValueError):
        count_s_absorbing(complete(10, 5), range(7))
    with pytest.raises(ValueError):
        count_s_absorbing(complete(12, 6), range(7))


def test_witness_check_rejects():
    w = SAbsorptionWitness(mask_of(range(6)), mask_of(range(6, 12)), mask_of(range(12, 18)), mask_of(range(18, 26)))
    with pytest.raises(ValueError, match="e1"):
        w.check(6)


def test_absorbing_matching_complete(K32):
    fam = build_absorbing_matching(K32, 0.1, seed=5)
    assert 1 <= len(fam.members) <= 3
    fam.check(K32)
    again = build_absorbing_matching(K32, 0.1, seed=5)
    assert again.members == fam.members


def test_absorbing_matching_empty_fails():
    with pytest.raises(StageFailure) as info:
        build_absorbing_matching(Hypergraph(32, 6, []), 0.1, seed=0)
    assert "violating_S" in info.value.detail


def test_absorb_step(K20):
    S = mask_of(range(8))
    e = mask_of(range(8, 14))
    M = Matching(20, 6, (e,))
    w = find_s_absorbing_witness(K20, S, e)
    out = absorb_step(M, S, w, K20)
    assert popcount(out.covered) - popcount(M.covered) == 6 and out.size == 2
    out.check(K20)
    with pytest.raises(ValueError):
        absorb_step(Matching(20, 6, ()), S, w)
    blocked = Matching(20, 6, (e, mask_of([0, 14, 15, 16, 17, 18])))
    with pytest.raises(ValueError):
        absorb_step(blocked, S, w)


def test_family_check_catches_bad_member():
    H = complete(9, 3)
    bad = AbsorbingFamily(members=((0, 1, 2),), matchings=((mask_of((0, 1, 3)),),))
    with pytest.raises(ValueError):
        bad.check(H)


def test_npm_complete(K32):
    res = npm_via_absorption(K32, seed=1)
    assert res.success and res.size == 5
    res.matching.check(K32)
    assert res.trace["certified"]


def test_npm_forced_absorption_loop():
    H = generate(32, 6, "random", 0.9, seed=0)
    res = npm_via_absorption(H, seed=1, residual="none")
    assert res.success and res.size == 5
    steps = res.trace["absorption"]["steps"]
    assert res.trace["absorption"]["iterations"] == len(steps) == (32 - 6 * res.trace["absorbing_matching"]["size"] - 2) // 6
    for s in steps:
        w = SAbsorptionWitness(*(mask_of(s[key]) for key in ("e", "e1", "e2", "S")))
        recheck(w, 6)


def test_npm_is_deterministic():
    H = generate(32, 6, "random", 0.9, seed=3)
    a, b = npm_via_absorption(H, seed=7), npm_via_absorption(H, seed=7)
    assert a.to_json() == b.to_json()


def test_npm_preconditions():
    with pytest.raises(ValueError):
        npm_via_absorption(complete(12, 6))
    with pytest.raises(ValueError):
        npm_via_absorption(complete(11, 5))


def test_npm_never_false_success_on_barrier():
    # k=6, n=14 (ell=2): the exact solver confirms no near perfect matching.
    stages = set()
    for spec in admissible_specs(14, 6):
        H, _ = spec.build()
        assert matching_number(H, target=2).status == "target_infeasible"
        for beta in (0.1, 0.3):
            res = npm_via_absorption(H, beta=beta, seed=0, retries=3, sample_checks=50)
            assert not res.success
            stages.add(res.stage)
            if res.matching is not None:
                res.matching.check(H)
                assert res.matching.size < 2
    assert stages


def test_residual_matching_modes():
    H = complete(13, 3)
    edges, how = residual_matching(H, range(13), "auto")
    assert how == "exact" and len(edges) == 4
    edges, how = residual_matching(generate(30, 3, "random", 0.5, seed=1), range(30), "auto")
    assert how == "greedy" and Matching(30, 3, tuple(edges)).size >= 8
    assert residual_matching(H, range(13), "none") == ([], "none")
    with pytest.raises(ValueError):
        residual_matching(H, range(13), "magic")


def test_lattice_pipeline_examples():
    res = lattice_absorbing_pipeline(complete(10, 3))
    assert res.success and res.size == 3
    res = lattice_absorbing_pipeline(generate(13, 3, "random", 0.9, seed=2), LatticeParams(seed=2))
    assert res.success and res.size == 4
    res.matching.check(generate(13, 3, "random", 0.9, seed=2))


def test_lattice_pipeline_two_components():
    edges = list(itertools.combinations(range(7), 3)) + [tuple(v + 7 for v in c) for c in itertools.combinations(range(6), 3)]
    H = build(13, 3, edges)
    res = lattice_absorbing_pipeline(H)
    assert res.success and res.size == 4
    assert len(res.trace["merge"]["partition"]["parts"]) == 2


def test_lattice_pipeline_forced_loop():
    H = complete(22, 3)
    res = lattice_absorbing_pipeline(H, LatticeParams(alpha=0.3, residual="none"))
    assert res.success and res.size == 7
    rounds = [r for r in res.trace["absorption"] if "U" in r]
    assert len(rounds) == 2 and all(len(r["U"]) == 4 for r in rounds)


def test_lattice_pipeline_fails_honestly_on_barrier():
    spec = next(s for s in admissible_specs(14, 3) if s.j == 1 and s.n1 == 3)
    H, _ = spec.build()
    res = lattice_absorbing_pipeline(H)
    assert not res.success and res.stage


def test_exact_pipeline():
    assert exact_pipeline(complete(10, 3)).size == 3
    spec = next(iter(admissible_specs(10, 3)))
    assert not exact_pipeline(spec.build()[0]).success
