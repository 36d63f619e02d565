import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import Oracle, brute_member, random_generator_sets
from hypermatch.hgraph import complete
from hypermatch.lattice import (
    NotRepresentableError,
    VertexPartition,
    coefficient_bound,
    contains,
    decompose_vector,
    edge_vector_counts,
    edge_vectors_of,
    find_absorbable_index,
    find_transferral,
    hermite_normal_form,
    index_vector,
    lattice_basis,
    minimal_coefficients,
    minimal_symmetric_t,
    robust_vectors,
    s_vectors,
    transferral,
    unit,
)


def test_s_vectors():
    assert s_vectors(3, 2) == [(3, 0), (2, 1), (1, 2), (0, 3)]
    assert len(s_vectors(4, 3)) == 15
    assert all(sum(v) == 4 and min(v) >= 0 for v in s_vectors(4, 3))


def test_hnf_shape_and_idempotence():
    B = hermite_normal_form([(1, 2), (3, 0)], 2)
    assert B == ((1, 2), (0, 6))
    assert hermite_normal_form(B, 2) == B
    assert hermite_normal_form([(3, 0), (1, 2), (4, 2)], 2) == B
    assert hermite_normal_form([], 3) == ()
    with pytest.raises(ValueError):
        hermite_normal_form([(1, 2, 3)], 2)


@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5)), max_size=4))
def test_hnf_order_invariant(rows):
    B = hermite_normal_form(rows, 3)
    assert hermite_normal_form(list(reversed(rows)), 3) == B
    for row in B:
        piv = next(i for i, a in enumerate(row) if a)
        assert row[piv] > 0
    for row in rows:
        assert contains(lattice_basis(B, 3), row)


def test_membership_against_enumeration():
    sets = random_generator_sets(220)
    checked = 0
    for r, gens in sets:
        L = lattice_basis(gens, r)
        oracle = Oracle(gens)
        box = itertools.product(range(-3, 4), repeat=r)
        for v in box:
            got = contains(L, v)
            assert got == (v in oracle), (gens, v)
            if got:
                a = minimal_coefficients(v, gens)
                assert tuple(sum(ai * g[c] for ai, g in zip(a, gens)) for c in range(r)) == tuple(v)
            checked += 1
    assert checked > 5000


def test_transferrals_against_enumeration():
    for r, gens in random_generator_sets(220, seed=5):
        L = lattice_basis(gens, r)
        oracle = Oracle(gens)
        brute = next(
            ((i, j) for i, j in itertools.combinations(range(1, r + 1), 2) if transferral(r, i, j) in oracle),
            None,
        )
        assert find_transferral(L) == brute


def test_minimal_t_against_enumeration():
    for r, gens in random_generator_sets(300, seed=9):
        if r != 2:
            continue
        L = lattice_basis(gens, 2)
        oracle = Oracle(gens)
        brute = next((t for t in range(1, 13) if (t, -t) in oracle), None)
        assert minimal_symmetric_t(L) == brute, gens


def test_regressions():
    L = lattice_basis([(1, 2), (3, 0)], 2)
    assert find_transferral(L) is None
    assert (2, -2) in L and (1, -1) not in L
    assert minimal_symmetric_t(L) == 2
    L3 = lattice_basis([(1, 1, 1), (0, 0, 3)], 3)
    for v in [(1, 1, -2), (-2, 1, 1), (1, -2, 1)]:
        assert contains(L3, v) == brute_member([(1, 1, 1), (0, 0, 3)], v)
    assert (1, 1, -2) in L3 and (-2, 1, 1) not in L3
    with pytest.raises(ValueError):
        minimal_symmetric_t(L3)
    L4 = lattice_basis([(1, 1, 1), (3, 0, 0), (0, 3, 0), (0, 0, 3)], 3)
    assert find_transferral(L4) is None
    assert all(v in L4 for v in [(1, 1, -2), (-2, 1, 1), (1, -2, 1)])
    assert minimal_symmetric_t(lattice_basis([], 2)) is None


def test_coefficient_bound_and_decompose():
    assert coefficient_bound([(1, 2), (3, 0)], [(2, -2)], 2) == 1
    dec = decompose_vector((2, -2), [(1, 2), (3, 0)], 1)
    assert dec.coefficients == (-1, 1) and dec.positive == (0, 1) and dec.negative == (1, 0)
    assert decompose_vector((0, 0), [(1, 2), (3, 0)], 0).coefficients == (0, 0)
    with pytest.raises(NotRepresentableError):
        decompose_vector((1, -1), [(1, 2), (3, 0)], 5)
    with pytest.raises(NotRepresentableError):
        coefficient_bound([(1, 2), (3, 0)], [(1, -1)], 2)
    with pytest.raises(ValueError):
        coefficient_bound([(1, 2), (2, 0)], [], 2, k=3)


def test_coefficient_bound_is_minimal():
    for r, gens in random_generator_sets(60, seed=3):
        L = lattice_basis(gens, r)
        J = [v for v in s_vectors(2 * sum(gens[0]), r) if contains(L, v)]
        C = coefficient_bound(gens, J, r)
        for v in J:
            a = decompose_vector(v, gens, C).coefficients
            assert max((abs(x) for x in a), default=0) <= C
        if C > 0:
            assert any(not brute_member(gens, v, C - 1) for v in J)


def test_partition_and_index_vectors():
    P = VertexPartition(6, frozenset({5}), (frozenset({0, 1}), frozenset({2, 3, 4})))
    assert P.r == 2 and P.part_of() == [1, 1, 2, 2, 2, 0]
    assert index_vector(P, [0, 2, 3, 5]) == (1, 2)
    assert VertexPartition.from_json(6, P.to_json()) == P
    with pytest.raises(ValueError):
        VertexPartition(4, frozenset(), (frozenset({0, 1}), frozenset({1, 2, 3})))
    with pytest.raises(ValueError):
        VertexPartition(4, frozenset(), (frozenset({0, 1}), frozenset()))
    with pytest.raises(ValueError):
        VertexPartition(4, frozenset(), (frozenset({0, 1}),))


def test_robust_vectors():
    H = complete(6, 3)
    P = VertexPartition(6, frozenset({5}), (frozenset({0, 1}), frozenset({2, 3, 4})))
    counts = edge_vector_counts(H, P)
    assert counts == {(2, 1): 3, (1, 2): 6, (0, 3): 1}
    assert robust_vectors(H, P, 3) == [(1, 2), (2, 1)]
    assert len(edge_vectors_of(H, P, (1, 2))) == 6


def test_find_absorbable_index():
    L = lattice_basis([(1, 2), (3, 0)], 2)
    P = VertexPartition(4, frozenset(), (frozenset({0, 1}), frozenset({2, 3})))
    assert find_absorbable_index([0, 1, 2, 3], P, L) == 1
    P1 = VertexPartition(4, frozenset(), (frozenset(range(4)),))
    assert find_absorbable_index(range(4), P1, lattice_basis([(3,)], 1)) == 1
    assert find_absorbable_index([0, 2], P, lattice_basis([], 2)) is None
    assert unit(3, 2) == (0, 1, 0)


def test_sum_divisibility_invariant():
    for r, gens in random_generator_sets(50, seed=21):
        L = lattice_basis(gens, r)
        g = 0
        for v in gens:
            g = np.gcd(g, sum(v))
        for b in L.basis:
            assert sum(b) % g == 0
