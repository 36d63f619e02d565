"""Space and divisibility barrier hypergraphs.

Both families are built on vertices ``0..n-1`` with the distinguished set
(the spine, or the first part ``V_1``) as a prefix of the vertex order.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass

from .hgraph import Hypergraph, mask_of
from .lattice import VertexPartition


class InadmissibleSpecError(ValueError):
    pass


@dataclass(frozen=True)
class BarrierSpec:
    family: str
    n: int
    k: int
    s: int | None = None
    ell: int | None = None
    j: int | None = None
    n1: int | None = None

    def validate(self) -> "BarrierSpec":
        if self.family == "space":
            _check_space(self.n, self.k, self.s)
        elif self.family == "divisibility":
            _check_divisibility(self.n, self.k, self.ell, self.j, self.n1)
        else:
            raise InadmissibleSpecError(f"unknown family {self.family!r}")
        return self

    def build(self):
        self.validate()
        if self.family == "space":
            return space_barrier(self.n, self.k, self.s)
        return divisibility_barrier(self.n, self.k, self.ell, self.j, self.n1)

    def to_json(self) -> dict:
        return {key: val for key, val in asdict(self).items() if val is not None}


def _check_space(n: int, k: int, s: int) -> None:
    if k < 2 or n < k:
        raise InadmissibleSpecError(f"invalid (n, k) = ({n}, {k})")
    if s is None or s < 0 or s * k >= n:
        raise InadmissibleSpecError(f"spine size s={s} must satisfy 0 <= s < n/k = {n}/{k}")


def _check_divisibility(n: int, k: int, ell: int, j: int, n1: int) -> None:
    if k < 2 or n < k:
        raise InadmissibleSpecError(f"invalid (n, k) = ({n}, {k})")
    if not 0 <= ell <= k - 1:
        raise InadmissibleSpecError(f"ell={ell} outside [0, {k - 1}]")
    if n % k != ell:
        raise InadmissibleSpecError(f"n ≡ ell (mod k) violated: {n} mod {k} = {n % k} != {ell}")
    if not 0 <= j <= ell + 1:
        raise InadmissibleSpecError(f"j={j} outside [0, {ell + 1}]")
    if not 0 <= n1 <= n:
        raise InadmissibleSpecError(f"n1={n1} outside [0, {n}]")
    m = ell + 2
    want = ((n // k) * j + ell + 1) % m
    if n1 % m != want:
        raise InadmissibleSpecError(
            f"n1 ≡ floor(n/k)*j + ell + 1 (mod ell+2) violated: {n1} ≡ {n1 % m}, need {want} (mod {m})"
        )


def space_barrier(n: int, k: int, s: int) -> Hypergraph:
    """All k-sets meeting the spine ``{0, ..., s-1}``."""
    _check_space(n, k, s)
    masks = [mask_of(c) for c in itertools.combinations(range(n), k) if c[0] < s]
    return Hypergraph(n, k, masks)


def in_divisibility_barrier(edge, n1: int, ell: int, j: int) -> bool:
    return sum(1 for v in edge if v < n1) % (ell + 2) == j


def divisibility_barrier(n: int, k: int, ell: int, j: int, n1: int) -> tuple[Hypergraph, VertexPartition]:
    """k-sets whose intersection with ``V_1 = {0..n1-1}`` is ≡ j (mod ell+2).

    The partition has an empty trash part and parts ``V_1, V_2``; a side that
    is empty (``n1`` in ``{0, n}``) is left out.
    """
    _check_divisibility(n, k, ell, j, n1)
    m = ell + 2
    masks = [
        mask_of(c)
        for c in itertools.combinations(range(n), k)
        if sum(1 for v in c if v < n1) % m == j
    ]
    parts = tuple(p for p in (frozenset(range(n1)), frozenset(range(n1, n))) if p)
    return Hypergraph(n, k, masks), VertexPartition(n, frozenset(), parts)


def admissible_first_part_sizes(n: int, k: int, ell: int, j: int) -> list[int]:
    if n % k != ell:
        raise InadmissibleSpecError(f"n ≡ ell (mod k) violated: {n} mod {k} != {ell}")
    if not 0 <= j <= ell + 1:
        raise InadmissibleSpecError(f"j={j} outside [0, {ell + 1}]")
    m = ell + 2
    want = ((n // k) * j + ell + 1) % m
    return [n1 for n1 in range(n + 1) if n1 % m == want]


def admissible_specs(n: int, k: int):
    """Every admissible divisibility spec ``(ell, j, n1)`` for this ``(n, k)``."""
    ell = n % k
    for j in range(ell + 2):
        for n1 in admissible_first_part_sizes(n, k, ell, j):
            yield BarrierSpec("divisibility", n, k, ell=ell, j=j, n1=n1)
