"""Degree-threshold function of the divisibility barrier and related bounds.

For a split ratio ``x = |V_1|/n`` the normalized degree of a d-set with ``t``
vertices in ``V_1`` tends to the residue-class binomial sum

    h_i(x) = sum_{j' ≡ i (mod m), 0 <= j' <= k-d} C(k-d, j') x^j' (1-x)^(k-d-j')

with ``i = j - t`` and ``m = ell + 2``.  ``g(k, d, ell)`` is the maximum over
the residue ``j`` and ``x`` of ``min_t h_{(j-t) mod m}(x)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

GRID_POINTS = 100_000
BISECT_TOL = 1e-10
TIE_TOL = 1e-12


def _check_kd(k: int, d: int) -> None:
    if k < 2 or not 1 <= d <= k - 1:
        raise ValueError(f"need k >= 2 and 1 <= d <= k-1, got k={k}, d={d}")


def _check_ell(k: int, ell: int) -> None:
    if not 0 <= ell <= k - 1:
        raise ValueError(f"ell={ell} outside [0, {k - 1}]")


def residue_sums(K: int, m: int, x) -> np.ndarray:
    """Array of shape ``(m,) + shape(x)``: class sums of the Binomial(K, x) pmf."""
    x = np.asarray(x, dtype=float)
    jp = np.arange(K + 1).reshape((-1,) + (1,) * x.ndim)
    coeff = np.array([math.comb(K, i) for i in range(K + 1)], dtype=float).reshape(jp.shape)
    pmf = coeff * x**jp * (1.0 - x) ** (K - jp)
    out = np.zeros((m,) + x.shape)
    for i in range(K + 1):
        out[i % m] += pmf[i]
    return out


def _residue_derivs(K: int, m: int, x) -> np.ndarray:
    # d/dx of the degree-K class sums: K * (g_{i-1} - g_i) with g of degree K-1.
    lower = residue_sums(K - 1, m, x)
    return K * (np.roll(lower, 1, axis=0) - lower)


@dataclass(frozen=True)
class ResidueProfile:
    k: int
    d: int
    m: int
    x: float
    values: tuple[float, ...]

    def __getitem__(self, i: int) -> float:
        return self.values[i % self.m]


def residue_profile(k: int, d: int, m: int, x: float) -> ResidueProfile:
    _check_kd(k, d)
    if m < 2:
        raise ValueError(f"modulus m={m} must be at least 2")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    vals = residue_sums(k - d, m, x)
    return ResidueProfile(k, d, m, float(x), tuple(float(v) for v in vals))


def active_residues(d: int, m: int, j: int) -> tuple[int, ...]:
    """Residues ``(j - t) mod m`` for ``t = 0..d``."""
    return tuple(sorted({(j - t) % m for t in range(d + 1)}))


def min_profile(k: int, d: int, ell: int, j: int, x) -> np.ndarray:
    """Objective ``min_t h_{(j-t) mod m}(x)`` (vectorized over ``x``)."""
    m = ell + 2
    vals = residue_sums(k - d, m, x)
    return vals[list(active_residues(d, m, j))].min(axis=0)


@dataclass(frozen=True)
class ThresholdResult:
    k: int
    d: int
    ell: int
    g: float
    x_star: float
    j_star: int
    profile: ResidueProfile
    certificate: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "d": self.d,
            "ell": self.ell,
            "g": self.g,
            "x_star": self.x_star,
            "j_star": self.j_star,
            "profile": list(self.profile.values),
            "certificate": list(self.certificate),
        }


def _bisect(fn, a: float, b: float, fa: float) -> float:
    while b - a > BISECT_TOL:
        mid = 0.5 * (a + b)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _sign_change_roots(values: np.ndarray, xs: np.ndarray, fn) -> list[float]:
    roots = [float(xs[i]) for i in np.flatnonzero(values == 0.0)]
    cells = np.flatnonzero(values[:-1] * values[1:] < 0)
    for i in cells:
        roots.append(_bisect(fn, float(xs[i]), float(xs[i + 1]), float(values[i])))
    return roots


@lru_cache(maxsize=None)
def g_optimize(k: int, d: int, ell: int) -> ThresholdResult:
    """Global maximum of the barrier degree density over ``j`` and ``x``.

    A max of a min of polynomials is attained at an endpoint, at a crossing
    of two active polynomials, or at a stationary point of one of them.  All
    such candidates are located on a uniform grid and refined by bisection.
    Ties go to the smallest ``j`` and then to the largest ``x``.
    """
    _check_kd(k, d)
    _check_ell(k, ell)
    m, K = ell + 2, k - d
    xs = np.linspace(0.0, 1.0, GRID_POINTS + 1)
    grid = residue_sums(K, m, xs)
    derivs = _residue_derivs(K, m, xs)

    def h(i):
        return lambda x: float(residue_sums(K, m, x)[i])

    candidates: list[tuple[float, int, float]] = []
    for j in range(m):
        R = active_residues(d, m, j)
        if any(i > K for i in R):
            # Some active class has no representative in [0, K]: identically zero.
            candidates.append((0.0, j, 1.0))
            continue
        xcand = {0.0, 1.0}
        for a, b in itertools.combinations(R, 2):
            diff = grid[a] - grid[b]
            if np.all(np.abs(diff) < 1e-15):
                continue
            ha, hb = h(a), h(b)
            xcand.update(_sign_change_roots(diff, xs, lambda x: ha(x) - hb(x)))
        for a in R:
            xcand.update(
                _sign_change_roots(derivs[a], xs, lambda x, a=a: float(_residue_derivs(K, m, x)[a]))
            )
        xarr = np.array(sorted(xcand))
        fvals = residue_sums(K, m, xarr)[list(R)].min(axis=0)
        for x, f in zip(xarr, fvals):
            candidates.append((float(f), j, float(x)))

    gmax = max(c[0] for c in candidates)
    near = [c for c in candidates if c[0] >= gmax - TIE_TOL]
    j_star = min(c[1] for c in near)
    best = max((c for c in near if c[1] == j_star), key=lambda c: c[2])
    g, _, x_star = best
    profile = residue_profile(k, d, m, x_star)
    cert = tuple(t for t in range(d + 1) if profile[(j_star - t) % m] <= g + 1e-9)
    return ThresholdResult(k, d, ell, max(g, 0.0), x_star, j_star, profile, cert)


def half_point_exact(k: int, d: int) -> tuple[int, int, int]:
    """Integers ``C_i = 2^(k-d) h_i(1/2)`` for the residues mod 3."""
    _check_kd(k, d)
    K = k - d
    C = [0, 0, 0]
    for i in range(K + 1):
        C[i % 3] += math.comb(K, i)
    return tuple(C)


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lower: float | None
    upper: float | None
    value: float
    passed: bool
    slack: float


@dataclass(frozen=True)
class BoundsReport:
    k: int
    d: int
    ell: int
    g: float
    checks: tuple[BoundCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            c.name: {"lower": c.lower, "upper": c.upper, "passed": c.passed, "slack": c.slack}
            for c in self.checks
        }


def g_bounds_check(k: int, d: int, ell: int, g: float, tol: float = 1e-6) -> BoundsReport:
    """Evaluate every applicable upper/lower bound on ``g`` at tolerance ``tol``."""
    _check_kd(k, d)
    _check_ell(k, ell)
    checks = []
    if d <= ell + 1:
        up = 1.0 / (d + 1)
        checks.append(BoundCheck("upper_1/(d+1)", None, up, g, g <= up + tol, up - g))
    if d >= ell + 1:
        up = 1.0 / (ell + 2)
        checks.append(BoundCheck("upper_1/(ell+2)", None, up, g, g <= up + tol, up - g))
    if ell == 1 and d > 1:
        lo = (2 ** (k - d) // 3) / 2 ** (k - d)
        ok = lo - tol <= g < 1.0 / 3.0
        checks.append(BoundCheck("ell1_window", lo, 1.0 / 3.0, g, ok, min(g - lo, 1.0 / 3.0 - g)))
    if g_zero_predicate(k, d, ell):
        checks.append(BoundCheck("zero", 0.0, 0.0, g, abs(g) <= 1e-9, -abs(g)))
    return BoundsReport(k, d, ell, g, tuple(checks))


def g_zero_predicate(k: int, d: int, ell: int) -> bool:
    return d >= max(k - ell, k // 2 + 1)


def space_term(k: int, d: int) -> float:
    """Space-barrier density ``1 - (1 - 1/k)^(k-d)``."""
    return 1.0 - (1.0 - 1.0 / k) ** (k - d)


def conjectured_threshold(k: int, d: int, ell: int) -> float:
    return max(g_optimize(k, d, ell).g, space_term(k, d))


def governing_barrier(k: int, d: int, ell: int, tol: float = 1e-9) -> str:
    g, sp = g_optimize(k, d, ell).g, space_term(k, d)
    if abs(g - sp) <= tol:
        return "both"
    return "divisibility" if g > sp else "space"


@dataclass(frozen=True)
class FiniteDegree:
    value: int
    per_t: tuple[int | None, ...]


def finite_min_degree(n: int, k: int, d: int, ell: int, j: int, n1: int) -> FiniteDegree:
    """Exact minimum d-degree of the divisibility barrier with ``|V_1| = n1``.

    ``per_t[t]`` is the degree of a d-set with ``t`` vertices in ``V_1``, or
    None when no such d-set exists (``t > n1`` or ``d - t > n - n1``).
    """
    from .constructions import _check_divisibility

    _check_divisibility(n, k, ell, j, n1)
    _check_kd(k, d)
    m, K, n2 = ell + 2, k - d, n - n1
    per_t: list[int | None] = []
    for t in range(d + 1):
        if t > n1 or d - t > n2:
            per_t.append(None)
            continue
        per_t.append(
            sum(
                math.comb(n1 - t, jp) * math.comb(n2 - (d - t), K - jp)
                for jp in range(K + 1)
                if (jp - (j - t)) % m == 0
            )
        )
    return FiniteDegree(min(v for v in per_t if v is not None), tuple(per_t))


def profile_curve(k: int, d: int, ell: int, points: int = 201) -> list[dict]:
    """Rows ``{x, j, min_profile, h_0..h_{m-1}}`` for plotting."""
    m = ell + 2
    xs = np.linspace(0.0, 1.0, points)
    vals = residue_sums(k - d, m, xs)
    rows = []
    for j in range(m):
        fmin = vals[list(active_residues(d, m, j))].min(axis=0)
        for idx, x in enumerate(xs):
            row = {"x": float(x), "j": j, "min_profile": float(fmin[idx])}
            row.update({f"h_{i}": float(vals[i, idx]) for i in range(m)})
            rows.append(row)
    return rows
