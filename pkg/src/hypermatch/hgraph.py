"""k-uniform hypergraphs, degrees and an exact maximum-matching solver.

Edges are stored as Python int bitmasks (bit ``v`` set iff vertex ``v`` is in
the edge).  Python ints are arbitrary precision, so the same representation
serves small and large vertex universes.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

DEFAULT_NODE_BUDGET = 10**8


class HypergraphError(ValueError):
    """Base class for invalid hypergraph input."""


class NonUniformEdgeError(HypergraphError):
    pass


class VertexRangeError(HypergraphError):
    pass


class DuplicateEdgeError(HypergraphError):
    pass


class HgFormatError(HypergraphError):
    """Malformed ``.hg`` text; ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def vertices_of(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def popcount(mask: int) -> int:
    return mask.bit_count()


class Hypergraph:
    """Immutable k-uniform hypergraph on vertices ``0..n-1``.

    Use :func:`build` to construct one from vertex lists.  Edges are kept in
    canonical order: vertices sorted inside an edge, edges sorted
    lexicographically.
    """

    __slots__ = ("n", "k", "masks", "_edge_set", "_edges", "_incidence")

    def __init__(self, n: int, k: int, masks: Sequence[int]):
        # Trusted constructor: masks must already be canonical and valid.
        self.n = n
        self.k = k
        self.masks: tuple[int, ...] = tuple(masks)
        self._edge_set: frozenset[int] | None = None
        self._edges: tuple[tuple[int, ...], ...] | None = None
        self._incidence: tuple[tuple[int, ...], ...] | None = None

    @property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        if self._edges is None:
            self._edges = tuple(vertices_of(m) for m in self.masks)
        return self._edges

    @property
    def edge_set(self) -> frozenset[int]:
        if self._edge_set is None:
            self._edge_set = frozenset(self.masks)
        return self._edge_set

    @property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """Per vertex, the masks of the edges containing it (canonical order)."""
        if self._incidence is None:
            inc: list[list[int]] = [[] for _ in range(self.n)]
            for m in self.masks:
                for v in vertices_of(m):
                    inc[v].append(m)
            self._incidence = tuple(tuple(x) for x in inc)
        return self._incidence

    def __len__(self) -> int:
        return len(self.masks)

    def __contains__(self, edge) -> bool:
        m = edge if isinstance(edge, int) else mask_of(edge)
        return m in self.edge_set

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.n, self.k, self.masks) == (other.n, other.k, other.masks)

    def __hash__(self) -> int:
        return hash((self.n, self.k, self.masks))

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, k={self.k}, edges={len(self.masks)})"

    def induced(self, vertices: Iterable[int]) -> "Hypergraph":
        """Sub-hypergraph induced on ``vertices`` (labels are kept)."""
        sel = mask_of(vertices)
        return Hypergraph(self.n, self.k, [m for m in self.masks if m & sel == m])

    def add_edges(self, edges: Iterable[Iterable[int]]) -> "Hypergraph":
        """New hypergraph with extra edges (already present ones are ignored)."""
        new = set(self.masks)
        for e in edges:
            _check_edge(self.n, self.k, e)
            new.add(mask_of(e))
        return Hypergraph(self.n, self.k, _canonical(new))


def _canonical(masks: Iterable[int]) -> list[int]:
    return sorted(masks, key=vertices_of)


def _check_edge(n: int, k: int, edge: Iterable[int]) -> tuple[int, ...]:
    e = tuple(edge)
    if len(set(e)) != k or len(e) != k:
        raise NonUniformEdgeError(f"edge {e} does not have exactly {k} distinct vertices")
    for v in e:
        if not isinstance(v, (int, np.integer)) or v < 0 or v >= n:
            raise VertexRangeError(f"vertex {v} of edge {e} outside [0, {n})")
    return e


def build(n: int, k: int, edges: Iterable[Iterable[int]]) -> Hypergraph:
    """Validate and canonicalize an edge list into a :class:`Hypergraph`.

    Raises NonUniformEdgeError, VertexRangeError or DuplicateEdgeError.
    """
    if k < 2:
        raise HypergraphError(f"uniformity k={k} must be at least 2")
    if n < k:
        raise HypergraphError(f"need n >= k, got n={n}, k={k}")
    seen: set[int] = set()
    for edge in edges:
        e = _check_edge(n, k, edge)
        m = mask_of(int(v) for v in e)
        if m in seen:
            raise DuplicateEdgeError(f"duplicate edge {tuple(sorted(e))}")
        seen.add(m)
    return Hypergraph(n, k, _canonical(seen))


@lru_cache(maxsize=8)
def _all_kset_masks(n: int, k: int) -> np.ndarray:
    # Lexicographic order of itertools.combinations is the canonical edge order.
    if n > 64:
        raise ValueError("vectorized enumeration needs n <= 64")
    combos = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)),
        dtype=np.uint64,
        count=math.comb(n, k) * k,
    ).reshape(-1, k)
    return np.bitwise_or.reduce(np.left_shift(np.uint64(1), combos), axis=1)


def complete(n: int, k: int) -> Hypergraph:
    return generate(n, k, "complete")


def generate(n: int, k: int, model: str = "complete", p: float = 1.0, seed: int = 0) -> Hypergraph:
    """Complete or binomial random k-graph.

    ``model="random"`` keeps each k-set independently with probability ``p``;
    the draw is one uniform per k-set in lexicographic order from
    ``numpy.random.default_rng(seed)``, so a fixed seed gives a fixed graph.
    """
    if k < 2 or n < k:
        raise HypergraphError(f"invalid (n, k) = ({n}, {k})")
    if model == "complete":
        keep = None
    elif model == "random":
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability p={p} outside [0, 1]")
        rng = np.random.default_rng(seed)
        keep = rng.random(math.comb(n, k)) < p
    else:
        raise ValueError(f"unknown model {model!r}")
    if n <= 64:
        masks = _all_kset_masks(n, k)
        if keep is not None:
            masks = masks[keep]
        return Hypergraph(n, k, masks.tolist())
    allm = (mask_of(c) for c in itertools.combinations(range(n), k))
    if keep is None:
        return Hypergraph(n, k, list(allm))
    return Hypergraph(n, k, [m for m, b in zip(allm, keep) if b])


def degree(H: Hypergraph, S: Iterable[int]) -> int:
    """Number of edges containing the vertex set ``S`` (1 <= |S| <= k-1)."""
    S = tuple(S)
    if not 1 <= len(set(S)) <= H.k - 1 or len(set(S)) != len(S):
        raise ValueError(f"|S| must be in [1, {H.k - 1}], got {S}")
    for v in S:
        if not 0 <= v < H.n:
            raise VertexRangeError(f"vertex {v} outside [0, {H.n})")
    sm = mask_of(S)
    first = min(S, key=lambda v: len(H.incidence[v]))
    return sum(1 for m in H.incidence[first] if m & sm == sm)


@dataclass(frozen=True)
class DegreeProfile:
    d: int
    value: int
    witness: tuple[int, ...]


def degree_counts(H: Hypergraph, d: int) -> Counter:
    """Counter mapping each d-set mask to its degree (zero-degree sets absent)."""
    counts: Counter = Counter()
    for e in H.edges:
        for sub in itertools.combinations(e, d):
            counts[mask_of(sub)] += 1
    return counts


def min_degree(H: Hypergraph, d: int) -> DegreeProfile:
    """Exact minimum d-degree; the witness is the lexicographically first minimizer."""
    if not 1 <= d <= H.k - 1:
        raise ValueError(f"d={d} outside [1, {H.k - 1}]")
    counts = degree_counts(H, d)
    best_val, best_set = None, None
    for S in itertools.combinations(range(H.n), d):
        val = counts.get(mask_of(S), 0)
        if best_val is None or val < best_val:
            best_val, best_set = val, S
            if val == 0:
                break
    return DegreeProfile(d, best_val, best_set)


@dataclass(frozen=True)
class Matching:
    """Vertex-disjoint edges of a k-graph on ``n`` vertices (immutable)."""

    n: int
    k: int
    masks: tuple[int, ...]
    covered: int = field(init=False)

    def __post_init__(self):
        masks = tuple(sorted(self.masks, key=vertices_of))
        covered = 0
        for m in masks:
            if popcount(m) != self.k:
                raise ValueError(f"edge {vertices_of(m)} is not a {self.k}-set")
            if m & covered:
                raise ValueError(f"edge {vertices_of(m)} overlaps the matching")
            if m >> self.n:
                raise VertexRangeError(f"edge {vertices_of(m)} outside [0, {self.n})")
            covered |= m
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "covered", covered)

    @classmethod
    def from_edges(cls, n: int, k: int, edges: Iterable[Iterable[int]]) -> "Matching":
        return cls(n, k, tuple(mask_of(e) for e in edges))

    @property
    def size(self) -> int:
        return len(self.masks)

    @property
    def edges(self) -> list[tuple[int, ...]]:
        return [vertices_of(m) for m in self.masks]

    @property
    def uncovered(self) -> int:
        return ((1 << self.n) - 1) & ~self.covered

    def __len__(self) -> int:
        return len(self.masks)

    def replace(self, remove: Iterable[int] = (), add: Iterable[int] = ()) -> "Matching":
        drop = set(remove)
        missing = drop.difference(self.masks)
        if missing:
            raise ValueError(f"edges {[vertices_of(m) for m in missing]} not in matching")
        return Matching(self.n, self.k, tuple(m for m in self.masks if m not in drop) + tuple(add))

    def union(self, other: "Matching") -> "Matching":
        return Matching(self.n, self.k, self.masks + other.masks)

    def check(self, H: Hypergraph) -> None:
        """Raise ValueError unless every edge belongs to ``H``; invariants re-derived."""
        fresh = Matching(H.n, H.k, self.masks)
        for m in fresh.masks:
            if m not in H.edge_set:
                raise ValueError(f"{vertices_of(m)} is not an edge of the hypergraph")
        if popcount(fresh.covered) != self.k * fresh.size or fresh.size > H.n // H.k:
            raise ValueError("matching violates size invariants")


@dataclass(frozen=True)
class MatchingResult:
    """Outcome of :func:`matching_number`.

    status is one of ``"optimal"`` (``size`` is the matching number),
    ``"target_reached"`` (a matching of the requested size exists),
    ``"target_infeasible"`` (every matching is smaller than the target;
    ``size`` is the best found) or ``"undecided"`` (node budget exhausted).
    """

    size: int
    matching: Matching
    status: str
    nodes: int

    @property
    def decided(self) -> bool:
        return self.status != "undecided"


class _BudgetExceeded(Exception):
    pass


def _transversal_bound(avail: list[int], limit: int) -> int:
    """Greedy hitting set size for ``avail`` (a matching upper bound).

    Stops early once the count exceeds ``limit``.
    """
    count = 0
    while avail:
        count += 1
        if count > limit:
            return count
        tally: Counter = Counter()
        for m in avail:
            while m:
                low = m & -m
                tally[low] += 1
                m ^= low
        top = max(tally.items(), key=lambda kv: (kv[1], -kv[0]))[0]
        avail = [m for m in avail if not m & top]
    return count


def matching_number(
    H: Hypergraph,
    target: int | None = None,
    budget: int = DEFAULT_NODE_BUDGET,
) -> MatchingResult:
    """Exact maximum matching by depth-first branch and bound.

    The search branches on the lowest vertex that is neither covered nor
    skipped: either one of its available edges (in canonical order) or skip it.
    A branch is cut when ``size + min(free // k, greedy transversal)`` cannot
    beat the incumbent.  Among maximum matchings the lexicographically smallest
    one is returned.  With ``target`` the search stops as soon as a matching of
    that size is found; if none exists the largest matching met on the way is
    reported (a lower bound only).
    """
    n, k = H.n, H.k
    cap = n // k
    if target is not None and target > cap:
        res = _search(H, cap, -1, budget)
        status = "undecided" if res.status == "undecided" else "target_infeasible"
        return MatchingResult(res.size, res.matching, status, res.nodes)
    if target is None:
        return _search(H, cap, -1, budget)
    res = _search(H, target, target - 1, budget)
    return res


def _search(H: Hypergraph, goal: int, floor: int, budget: int) -> MatchingResult:
    n, k = H.n, H.k
    decision = floor >= 0
    best_size = floor
    best: list[int] = []
    seen: list[int] = []
    nodes = 0
    chosen: list[int] = []
    full = (1 << n) - 1

    def dfs(avail: list[int], used: int, size: int) -> bool:
        nonlocal nodes, best_size, best, seen
        nodes += 1
        if nodes > budget:
            raise _BudgetExceeded
        if size > len(seen):
            seen = list(chosen)
        free_mask = full & ~used
        if size + popcount(free_mask) // k <= best_size:
            return False
        if size > best_size:
            best_size, best = size, list(chosen)
            if size >= goal:
                return True
        if not avail:
            return False
        if size + _transversal_bound(avail, best_size - size) <= best_size:
            return False
        pivot = free_mask & -free_mask
        for m in avail:
            if m & pivot:
                chosen.append(m)
                if dfs([a for a in avail if not a & m], used | m, size + 1):
                    return True
                chosen.pop()
        # Skip the pivot vertex.
        return dfs([a for a in avail if not a & pivot], used | pivot, size)

    try:
        dfs(list(H.masks), 0, 0)
    except _BudgetExceeded:
        got = best if len(best) >= len(seen) else seen
        return MatchingResult(len(got), Matching(n, k, tuple(got)), "undecided", budget)
    if not decision:
        return MatchingResult(len(best), Matching(n, k, tuple(best)), "optimal", nodes)
    if len(best) >= goal:
        return MatchingResult(len(best), Matching(n, k, tuple(best)), "target_reached", nodes)
    return MatchingResult(len(seen), Matching(n, k, tuple(seen)), "target_infeasible", nodes)


def has_perfect_matching(H: Hypergraph, vertices: Iterable[int]) -> bool:
    """Whether ``H[vertices]`` has a perfect matching."""
    sel = mask_of(vertices)
    size = popcount(sel)
    if size % H.k:
        return False
    return _pm_exists([m for m in H.masks if m & sel == m], sel)


def perfect_matching(H: Hypergraph, vertices: Iterable[int]) -> list[int] | None:
    """Masks of a perfect matching of ``H[vertices]`` or None."""
    sel = mask_of(vertices)
    if popcount(sel) % H.k:
        return None
    out: list[int] = []
    if _pm_exists([m for m in H.masks if m & sel == m], sel, out):
        return out
    return None


def _pm_exists(avail: list[int], remaining: int, out: list[int] | None = None) -> bool:
    if not remaining:
        return True
    pivot = remaining & -remaining
    for m in avail:
        if m & pivot:
            rest = remaining & ~m
            if _pm_exists([a for a in avail if not a & m], rest, out):
                if out is not None:
                    out.append(m)
                return True
    return False


def read_hg(text: str) -> Hypergraph:
    """Parse ``.hg`` text: header ``k n`` then one edge per line; ``#`` comments."""
    header = None
    edges: list[tuple[int, ...]] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            nums = [int(tok) for tok in line.split()]
        except ValueError:
            raise HgFormatError(lineno, f"non-integer token in {line!r}") from None
        if header is None:
            if len(nums) != 2:
                raise HgFormatError(lineno, "header must be 'k n'")
            header = nums
            continue
        edges.append(tuple(nums))
        lines.append(lineno)
    if header is None:
        raise HgFormatError(1, "missing 'k n' header")
    k, n = header
    if k < 2 or n < k:
        raise HgFormatError(1, f"invalid header k={k}, n={n}")
    seen: set[int] = set()
    for e, lineno in zip(edges, lines):
        try:
            _check_edge(n, k, e)
        except HypergraphError as exc:
            raise HgFormatError(lineno, str(exc)) from None
        m = mask_of(e)
        if m in seen:
            raise HgFormatError(lineno, f"duplicate edge {tuple(sorted(e))}")
        seen.add(m)
    return Hypergraph(n, k, _canonical(seen))


def write_hg(H: Hypergraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"{H.k} {H.n}")
    lines.extend(" ".join(map(str, e)) for e in H.edges)
    return "\n".join(lines) + "\n"
