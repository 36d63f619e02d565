"""Index vectors, robust edge-vectors and exact integer lattice arithmetic.

Vectors are plain tuples of Python ints, so arithmetic never overflows.  Part
indices follow the 1-based naming ``V_1..V_r``; ``V_0`` is the trash part and
is never recorded in an index vector.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .hgraph import Hypergraph, vertices_of

Vector = tuple[int, ...]


@dataclass(frozen=True)
class VertexPartition:
    """Partition of ``range(n)`` into a trash part and non-empty parts."""

    n: int
    trash: frozenset[int]
    parts: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "trash", frozenset(self.trash))
        object.__setattr__(self, "parts", tuple(frozenset(p) for p in self.parts))
        seen: set[int] = set(self.trash)
        total = len(self.trash)
        for p in self.parts:
            if not p:
                raise ValueError("parts V_1..V_r must be non-empty")
            seen |= p
            total += len(p)
        if total != len(seen) or seen != set(range(self.n)):
            raise ValueError("parts must be disjoint and cover range(n)")

    @property
    def r(self) -> int:
        return len(self.parts)

    def part_of(self) -> list[int]:
        """Per vertex its part index (0 for trash, 1..r otherwise)."""
        lab = [0] * self.n
        for i, p in enumerate(self.parts, start=1):
            for v in p:
                lab[v] = i
        return lab

    def to_json(self) -> dict:
        return {"V0": sorted(self.trash), "parts": [sorted(p) for p in self.parts]}

    @classmethod
    def from_json(cls, n: int, data: dict) -> "VertexPartition":
        return cls(n, frozenset(data.get("V0", ())), tuple(frozenset(p) for p in data["parts"]))


def index_vector(P: VertexPartition, S: Iterable[int]) -> Vector:
    lab = P.part_of()
    out = [0] * P.r
    for v in S:
        if lab[v]:
            out[lab[v] - 1] += 1
    return tuple(out)


def robust_vectors(H: Hypergraph, P: VertexPartition, tau: int) -> list[Vector]:
    """Index vectors realized by at least ``tau`` edges avoiding the trash part."""
    return sorted(v for v, c in edge_vector_counts(H, P).items() if c >= tau)


def edge_vector_counts(H: Hypergraph, P: VertexPartition) -> Counter:
    lab = P.part_of()
    counts: Counter = Counter()
    for e in H.edges:
        vec = [0] * P.r
        for v in e:
            if not lab[v]:
                break
            vec[lab[v] - 1] += 1
        else:
            counts[tuple(vec)] += 1
    return counts


def hermite_normal_form(rows: Iterable[Sequence[int]], r: int) -> tuple[Vector, ...]:
    """Row-style Hermite normal form of the integer row span.

    Pivots are positive and strictly increase in column; entries above a pivot
    lie in ``[0, pivot)``.  Zero rows are dropped.
    """
    work = [list(row) for row in rows if any(row)]
    for row in work:
        if len(row) != r:
            raise ValueError(f"vector {tuple(row)} has dimension {len(row)}, expected {r}")
    basis: list[list[int]] = []
    for col in range(r):
        active = [row for row in work if row[col]]
        rest = [row for row in work if not row[col]]
        if not active:
            continue
        while len(active) > 1:
            active.sort(key=lambda row: abs(row[col]))
            piv = active[0]
            nxt = [piv]
            for row in active[1:]:
                q = row[col] // piv[col]
                red = [a - q * b for a, b in zip(row, piv)]
                if red[col]:
                    nxt.append(red)
                elif any(red):
                    rest.append(red)
            active = nxt
        piv = active[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        for row in basis:
            q = row[col] // piv[col]
            if q:
                row[:] = [a - q * b for a, b in zip(row, piv)]
        basis.append(piv)
        work = rest
    return tuple(tuple(row) for row in basis)


@dataclass(frozen=True)
class IntegerLattice:
    r: int
    basis: tuple[Vector, ...]
    generators: tuple[Vector, ...]

    def __contains__(self, v) -> bool:
        return contains(self, v)

    @property
    def rank(self) -> int:
        return len(self.basis)


def lattice_basis(I: Iterable[Sequence[int]], r: int) -> IntegerLattice:
    gens = tuple(tuple(v) for v in I)
    return IntegerLattice(r, hermite_normal_form(gens, r), gens)


def _pivot(row: Vector) -> int:
    return next(i for i, a in enumerate(row) if a)


def contains(L: IntegerLattice, v: Sequence[int]) -> bool:
    """Exact membership by back-substitution on the Hermite basis."""
    if len(v) != L.r:
        raise ValueError(f"dimension mismatch: {len(v)} vs {L.r}")
    w = list(v)
    for row in L.basis:
        c = _pivot(row)
        if any(w[:c]):
            return False
        q, rem = divmod(w[c], row[c])
        if rem:
            return False
        w = [a - q * b for a, b in zip(w, row)]
    return not any(w)


def unit(r: int, i: int) -> Vector:
    """Unit vector u_i (1-based)."""
    return tuple(1 if j == i - 1 else 0 for j in range(r))


def transferral(r: int, i: int, j: int) -> Vector:
    return tuple(a - b for a, b in zip(unit(r, i), unit(r, j)))


def find_transferral(L: IntegerLattice, r: int | None = None) -> tuple[int, int] | None:
    """First pair ``(i, j)``, ``i < j`` (1-based), with ``u_i - u_j`` in ``L``."""
    r = L.r if r is None else r
    for i, j in itertools.combinations(range(1, r + 1), 2):
        if contains(L, transferral(r, i, j)):
            return (i, j)
    return None


def minimal_symmetric_t(L: IntegerLattice) -> int | None:
    """Smallest ``t >= 1`` with ``(t, -t)`` in a 2-dimensional lattice."""
    if L.r != 2:
        raise ValueError(f"defined for r = 2 only, got r = {L.r}")
    if not L.basis:
        return None
    if len(L.basis) == 1:
        (a, b), = L.basis
        return abs(a) if a + b == 0 else None
    b1, b2 = L.basis
    s1, s2 = sum(b1), sum(b2)
    g = math.gcd(s1, s2)
    # (s2*b1 - s1*b2)/g generates the sum-zero sublattice.
    first = (s2 * b1[0] - s1 * b2[0]) // g
    return abs(first)


class NotRepresentableError(ValueError):
    def __init__(self, vector, message: str | None = None):
        super().__init__(message or f"vector {tuple(vector)} is not an integer combination of the generators")
        self.vector = tuple(vector)


def _coefficients_within(target: Sequence[int], gens: Sequence[Vector], R: int) -> tuple[int, ...] | None:
    """Integer coefficients in ``[-R, R]`` combining ``gens`` into ``target``.

    Layered search over partial sums; states that can no longer reach the
    target with the remaining generators are pruned.
    """
    r = len(target)
    target = tuple(target)
    if not gens:
        return () if not any(target) else None
    # Remaining reach per coordinate after generator i.
    reach = [[0] * r for _ in range(len(gens) + 1)]
    for i in range(len(gens) - 1, -1, -1):
        reach[i] = [reach[i + 1][c] + R * abs(gens[i][c]) for c in range(r)]
    order = sorted(range(-R, R + 1), key=lambda a: (abs(a), a))
    layers: list[dict[Vector, tuple[Vector, int]]] = [{tuple([0] * r): (None, 0)}]
    for i, g in enumerate(gens):
        nxt: dict[Vector, tuple[Vector, int]] = {}
        lim = reach[i + 1]
        for state in layers[-1]:
            for a in order:
                s = tuple(x + a * y for x, y in zip(state, g))
                if s in nxt:
                    continue
                if all(abs(target[c] - s[c]) <= lim[c] for c in range(r)):
                    nxt[s] = (state, a)
        if not nxt:
            return None
        layers.append(nxt)
    if target not in layers[-1]:
        return None
    coeffs = []
    state = target
    for layer in reversed(layers[1:]):
        prev, a = layer[state]
        coeffs.append(a)
        state = prev
    return tuple(reversed(coeffs))


MAX_RADIUS = 64


def minimal_coefficients(v: Sequence[int], I: Sequence[Sequence[int]], max_radius: int = MAX_RADIUS):
    """Representation of ``v`` over ``I`` minimizing ``max |a|`` (None if unrepresentable)."""
    gens = [tuple(g) for g in I]
    if not contains(lattice_basis(gens, len(v)), v):
        return None
    for R in range(max_radius + 1):
        a = _coefficients_within(v, gens, R)
        if a is not None:
            return a
    raise NotRepresentableError(v, f"no representation of {tuple(v)} with coefficients within {max_radius}")


def coefficient_bound(I: Iterable[Sequence[int]], J: Iterable[Sequence[int]], r: int, k: int | None = None) -> int:
    """Max over ``J`` of the least achievable ``max |a_v|`` in ``j = sum a_v v``.

    Iterative deepening up to radius 64; raises NotRepresentableError for a
    vector outside the lattice of ``I`` or beyond the cap.
    """
    gens = [tuple(g) for g in I]
    if k is not None and any(sum(g) != k for g in gens):
        raise ValueError(f"generators must be {k}-vectors")
    L = lattice_basis(gens, r)
    worst = 0
    for j in J:
        j = tuple(j)
        if not contains(L, j):
            raise NotRepresentableError(j)
        a = minimal_coefficients(j, gens)
        worst = max(worst, max((abs(x) for x in a), default=0))
    return worst


class Decomposition(NamedTuple):
    generators: tuple[Vector, ...]
    coefficients: tuple[int, ...]
    positive: tuple[int, ...]
    negative: tuple[int, ...]


def decompose_vector(v: Sequence[int], I: Sequence[Sequence[int]], bound: int) -> Decomposition:
    """Write ``v = sum(b_g g) - sum(c_g g)`` with ``0 <= b_g, c_g <= bound``."""
    gens = tuple(tuple(g) for g in I)
    a = None
    for R in range(bound + 1):
        a = _coefficients_within(tuple(v), gens, R)
        if a is not None:
            break
    if a is None:
        raise NotRepresentableError(v, f"no representation of {tuple(v)} with |coefficients| <= {bound}")
    return Decomposition(gens, a, tuple(max(x, 0) for x in a), tuple(max(-x, 0) for x in a))


def find_absorbable_index(U: Iterable[int], P: VertexPartition, L: IntegerLattice) -> int | None:
    """Smallest ``i`` (1-based) with ``i_P(U) - u_i`` in ``L``."""
    iv = index_vector(P, U)
    for i in range(1, P.r + 1):
        if contains(L, tuple(a - b for a, b in zip(iv, unit(P.r, i)))):
            return i
    return None


def s_vectors(s: int, r: int) -> list[Vector]:
    """All non-negative integer r-vectors with coordinate sum s."""
    out = []
    for cut in itertools.combinations(range(s + r - 1), r - 1):
        prev = -1
        vec = []
        for c in cut + (s + r - 1,):
            vec.append(c - prev - 1)
            prev = c
        out.append(tuple(vec))
    return sorted(out, reverse=True)


def edge_vectors_of(H: Hypergraph, P: VertexPartition, vector: Vector) -> list[int]:
    """Masks of edges avoiding the trash whose index vector is ``vector``."""
    lab = P.part_of()
    out = []
    for m in H.masks:
        vec = [0] * P.r
        ok = True
        for v in vertices_of(m):
            if not lab[v]:
                ok = False
                break
            vec[lab[v] - 1] += 1
        if ok and tuple(vec) == vector:
            out.append(m)
    return out
