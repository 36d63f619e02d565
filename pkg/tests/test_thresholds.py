import math

import numpy as np
import pytest

from conftest import binom_class_sum, brute_min_degree
from hypermatch.constructions import admissible_specs
from hypermatch.thresholds import (
    active_residues,
    conjectured_threshold,
    finite_min_degree,
    g_bounds_check,
    g_optimize,
    g_zero_predicate,
    governing_barrier,
    half_point_exact,
    profile_curve,
    residue_profile,
    residue_sums,
    space_term,
)


def grid_oracle(k, d, ell, points=4001):
    m = ell + 2
    best = 0.0
    for j in range(m):
        for x in np.linspace(0, 1, points):
            val = min(binom_class_sum(k - d, m, (j - t) % m, x) for t in range(d + 1))
            best = max(best, val)
    return best


def test_residue_sums_partition_unity():
    xs = np.linspace(0, 1, 11)
    for K, m in [(3, 3), (5, 2), (7, 4)]:
        vals = residue_sums(K, m, xs)
        assert np.allclose(vals.sum(axis=0), 1.0)
        for i in range(m):
            assert np.allclose(vals[i], [binom_class_sum(K, m, i, x) for x in xs])


def test_residue_profile_validation():
    assert residue_profile(5, 2, 3, 0.5)[4] == residue_profile(5, 2, 3, 0.5)[1]
    with pytest.raises(ValueError):
        residue_profile(5, 2, 3, 1.5)
    with pytest.raises(ValueError):
        residue_profile(5, 5, 3, 0.5)


def test_active_residues():
    assert active_residues(2, 3, 0) == (0, 1, 2)
    assert active_residues(1, 4, 0) == (0, 3)


def test_g_known_values():
    r = g_optimize(3, 1, 1)
    assert r.g == pytest.approx(4 / 9, abs=1e-9)
    assert r.x_star == pytest.approx(1 / 3, abs=1e-6)
    for k in range(2, 9):
        for d in range(1, k):
            assert g_optimize(k, d, 0).g == pytest.approx(0.5, abs=1e-9)


@pytest.mark.parametrize("k, d, ell", [(4, 1, 1), (5, 2, 1), (6, 3, 1), (6, 2, 2), (7, 3, 2), (5, 1, 3)])
def test_g_agrees_with_grid(k, d, ell):
    r = g_optimize(k, d, ell)
    ref = grid_oracle(k, d, ell)
    # The grid is a lower bound; its spacing bounds the gap through the polynomials' slopes.
    assert ref - 1e-9 <= r.g <= ref + k / 4000
    j, x = r.j_star, r.x_star
    m = ell + 2
    direct = min(binom_class_sum(k - d, m, (j - t) % m, x) for t in range(d + 1))
    assert direct == pytest.approx(r.g, abs=1e-9)


def test_certificate_names_binding_t():
    r = g_optimize(6, 3, 1)
    assert r.certificate and all(0 <= t <= 3 for t in r.certificate)


def test_zero_predicate_matches_optimizer():
    for k in range(3, 8):
        for d in range(1, k):
            for ell in range(k):
                assert g_zero_predicate(k, d, ell) == (g_optimize(k, d, ell).g == 0.0)


def test_bounds_report():
    rep = g_bounds_check(6, 3, 1, g_optimize(6, 3, 1).g)
    assert rep.passed and {c.name for c in rep.checks} >= {"ell1_window", "upper_1/(ell+2)"}
    bad = g_bounds_check(6, 3, 1, 0.4)
    assert not bad.passed
    assert "ell1_window" in bad.to_json()


def test_half_point_exact_direct():
    for K in range(1, 25):
        C = half_point_exact(K + 2, 2)
        assert sum(C) == 2**K
        assert min(C) == 2**K // 3
        assert list(C) == [sum(math.comb(K, i) for i in range(r, K + 1, 3)) for r in range(3)]


def test_space_term_and_conjecture():
    assert space_term(3, 1) == pytest.approx(5 / 9)
    assert conjectured_threshold(3, 1, 1) == pytest.approx(5 / 9)
    assert governing_barrier(3, 1, 1) == "space"
    assert governing_barrier(6, 3, 1) == "space"


def test_finite_min_degree_examples():
    fd = finite_min_degree(12, 3, 2, 0, 1, 5)
    assert fd.value == 3 and fd.per_t == (5, 6, 3)
    assert finite_min_degree(7, 3, 1, 1, 0, 2).value == 0


def test_finite_min_degree_matches_enumeration():
    for n in (7, 8, 10, 11):
        for spec in admissible_specs(n, 3):
            H, _ = spec.build()
            for d in (1, 2):
                fd = finite_min_degree(n, 3, d, spec.ell, spec.j, spec.n1)
                assert fd.value == brute_min_degree(n, 3, H.edges, d)
                for t, val in enumerate(fd.per_t):
                    if val is None:
                        continue
                    S = set(range(t)) | set(range(spec.n1, spec.n1 + d - t))
                    assert val == sum(1 for e in H.edges if S <= set(e))


def test_profile_curve_rows():
    rows = profile_curve(5, 2, 1, points=11)
    assert len(rows) == 3 * 11
    assert set(rows[0]) == {"x", "j", "min_profile", "h_0", "h_1", "h_2"}
    for row in rows:
        hs = [row[f"h_{i}"] for i in range(3)]
        assert min(hs) - 1e-12 <= row["min_profile"] <= max(hs) + 1e-12
        assert abs(sum(row[f"h_{i}"] for i in range(3)) - 1) < 1e-12
