import itertools
import math

import pytest

from hypermatch.hgraph import build, complete, generate
from hypermatch.lattice import VertexPartition
from hypermatch.reachability import (
    containment_threshold,
    MergeTrace,
    ReachParams,
    closedness_sample,
    link,
    merge_by_transferrals,
    reach_count,
    reach_matrix,
    reach_neighborhood,
    reach_partition,
    trash_set,
)


def disjoint_cliques(*sizes, k=3):
    edges, base = [], 0
    for s in sizes:
        edges += [tuple(base + v for v in c) for c in itertools.combinations(range(s), k)]
        base += s
    return build(base, k, edges)


def brute_reach(H, u, v, i):
    """Count (ik-1)-sets S with perfect matchings on S+u and S+v, by partition search."""
    E = {frozenset(e) for e in H.edges}

    def pm(vs):
        vs = sorted(vs)
        if not vs:
            return True
        first, rest = vs[0], vs[1:]
        return any(
            frozenset((first,) + c) in E and pm(set(rest) - set(c)) for c in itertools.combinations(rest, H.k - 1)
        )

    others = [w for w in range(H.n) if w not in (u, v)]
    return sum(1 for S in itertools.combinations(others, i * H.k - 1) if pm(set(S) | {u}) and pm(set(S) | {v}))


@pytest.mark.parametrize("n", [6, 8, 10, 12])
def test_complete_reach_counts(n):
    H = complete(n, 3)
    for i in (1, 2):
        if i * 3 - 1 > n - 2:
            continue
        rc = reach_count(H, 0, n - 1, i)
        assert rc.exact and rc.count == math.comb(n - 2, i * 3 - 1)


def test_reach_count_matches_brute_on_random():
    H = generate(8, 3, "random", 0.6, seed=4)
    for u, v in [(0, 1), (2, 7), (3, 5)]:
        for i in (1, 2):
            assert reach_count(H, u, v, i).count == brute_reach(H, u, v, i)


def test_reach_count_errors_and_sampling():
    H = complete(12, 3)
    with pytest.raises(ValueError):
        reach_count(H, 1, 1)
    with pytest.raises(ValueError):
        reach_count(H, 1, 2, i=0)
    est = reach_count(H, 0, 1, 2, samples=50, seed=3, exact_limit=10)
    assert not est.exact and est.count == math.comb(10, 5) and est.stderr == 0.0
    assert reach_count(H, 0, 1, 5).count == 0


def test_link_and_matrix():
    H = complete(5, 3)
    assert len(link(H, 0)) == math.comb(4, 2)
    R = reach_matrix(H)
    assert R[0, 1] == 3 and R[2, 2] == 0 and (R == R.T).all()


def test_neighborhood():
    H = disjoint_cliques(7, 6)
    assert reach_neighborhood(H, 0, 1) == frozenset(range(1, 7))


def test_containment_threshold():
    # complete graph: every order-2 count is C(n-2, 2k-1)
    H = complete(9, 3)
    assert containment_threshold(H, 0, 1) == math.comb(7, 5)
    tau2 = containment_threshold(H, 0, 1)
    assert reach_neighborhood(H, 0, 1) <= reach_neighborhood(H, 0, tau2, 2)
    assert not reach_neighborhood(H, 0, 1) <= reach_neighborhood(H, 0, tau2 + 1, 2)
    empty = build(6, 3, [])
    assert containment_threshold(empty, 0, 1) is None


def test_two_cliques_partition():
    H = disjoint_cliques(7, 7)
    P = reach_partition(H, ReachParams(tau1=3))
    assert P.r == 2 and not P.trash
    assert sorted(map(sorted, P.parts)) == [list(range(7)), list(range(7, 14))]


def test_trash_from_weak_edges():
    # Edge {6,7,8} hangs off a K_6: its pairs have codegree 1.
    H = disjoint_cliques(6)
    H = build(9, 3, list(H.edges) + [(6, 7, 8)])
    params = ReachParams(tau1=2, eps_weak=1, eps_incidence=1)
    assert trash_set(H, params) == frozenset({6, 7, 8})
    P = reach_partition(H, params)
    assert P.trash == frozenset({6, 7, 8}) and P.parts == (frozenset(range(6)),)


def test_size_floor_sends_small_parts_to_trash():
    H = disjoint_cliques(7, 4)
    P = reach_partition(H, ReachParams(tau1=1, size_floor=5))
    assert P.parts == (frozenset(range(7)),)
    assert P.trash == frozenset(range(7, 11))


def test_params_validation():
    with pytest.raises(ValueError):
        ReachParams(tau1=0)
    assert ReachParams(eps_weak=2.5).floor == 3
    assert ReachParams().to_json()["size_floor"] == 1


def test_merge_by_transferrals():
    H = complete(8, 3)
    P = VertexPartition(8, frozenset(), (frozenset(range(4)), frozenset(range(4, 8))))
    trace = MergeTrace()
    merged = merge_by_transferrals(H, P, 1, trace)
    assert merged.r == 1 and trace.merges == [(1, 2)]
    H2 = disjoint_cliques(7, 7)
    P2 = reach_partition(H2, ReachParams(tau1=3))
    assert merge_by_transferrals(H2, P2, 1).r == 2


def test_closedness_sample():
    H = complete(8, 3)
    rows = closedness_sample(H, range(8), tau=10, pairs=5)
    assert len(rows) == 5 and all(ok for *_, ok in rows)
    assert closedness_sample(H, [3], 1) == []
