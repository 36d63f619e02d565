"""Reachability between vertices, trash detection and the closed-part partition.

Two vertices ``u, v`` are i-reachable through an ``(ik-1)``-set ``S`` when
both ``H[S ∪ u]`` and ``H[S ∪ v]`` have perfect matchings.  For ``i = 1``
this means ``S`` lies in both links.  All thresholds are absolute counts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .hgraph import Hypergraph, has_perfect_matching, mask_of, vertices_of
from .lattice import VertexPartition, find_transferral, lattice_basis, robust_vectors

EXACT_LIMIT = 10**7


@dataclass(frozen=True)
class ReachParams:
    """Finite cutoffs.

    tau1: minimum common-link count for two vertices to be 1-reachable.
    eps_weak: a (k-1)-set of degree <= eps_weak makes its edges weak.
    eps_incidence: vertices in >= eps_incidence weak edges are trash.
    size_floor: parts and reach-degrees below this go to the trash part
        (defaults to ``ceil(eps_weak)``).
    """

    tau1: int = 1
    eps_weak: float = 1
    eps_incidence: float = 1
    i_max: int = 1
    samples: int = 200
    size_floor: int | None = None
    seed: int = 0

    def __post_init__(self):
        if min(self.tau1, self.eps_weak, self.eps_incidence, self.i_max, self.samples) < 1:
            raise ValueError("all reachability thresholds must be >= 1")

    @property
    def floor(self) -> int:
        return self.size_floor if self.size_floor is not None else max(1, math.ceil(self.eps_weak))

    def to_json(self) -> dict:
        return {
            "tau1": self.tau1,
            "eps_weak": self.eps_weak,
            "eps_incidence": self.eps_incidence,
            "i_max": self.i_max,
            "samples": self.samples,
            "size_floor": self.floor,
            "seed": self.seed,
        }


class ReachCount(NamedTuple):
    count: float
    exact: bool
    stderr: float = 0.0


def link(H: Hypergraph, v: int) -> set[int]:
    """Masks of the (k-1)-sets ``S`` with ``S ∪ v`` an edge."""
    bit = 1 << v
    return {m ^ bit for m in H.incidence[v]}


def reach_count(
    H: Hypergraph,
    u: int,
    v: int,
    i: int = 1,
    samples: int = 200,
    seed: int = 0,
    exact_limit: int = EXACT_LIMIT,
) -> ReachCount:
    """Number of ``(ik-1)``-sets through which ``u`` and ``v`` are reachable.

    Exact for ``i = 1`` and whenever ``C(n-2, ik-1) <= exact_limit``;
    otherwise a Monte Carlo estimate over ``samples`` uniform sets.
    """
    if u == v:
        raise ValueError("u and v must differ")
    if i < 1:
        raise ValueError("order i must be >= 1")
    if i == 1:
        return ReachCount(len(link(H, u) & link(H, v)), True)
    size = i * H.k - 1
    others = [w for w in range(H.n) if w not in (u, v)]
    if size > len(others):
        return ReachCount(0, True)
    total = math.comb(len(others), size)
    ub, vb = 1 << u, 1 << v

    def good(S: int) -> bool:
        return _has_pm(H, S | ub) and _has_pm(H, S | vb)

    if total <= exact_limit:
        cnt = sum(1 for c in itertools.combinations(others, size) if good(mask_of(c)))
        return ReachCount(cnt, True)
    if samples < 1:
        raise ValueError("sampling budget must be >= 1")
    rng = np.random.default_rng([seed, u, v, i])
    hits = 0
    arr = np.array(others)
    for _ in range(samples):
        hits += good(mask_of(rng.choice(arr, size, replace=False).tolist()))
    p = hits / samples
    return ReachCount(total * p, False, total * math.sqrt(p * (1 - p) / samples))


def _has_pm(H: Hypergraph, sel: int) -> bool:
    return has_perfect_matching(H, vertices_of(sel))


def reach_neighborhood(H: Hypergraph, v: int, tau: float, i: int = 1, **kw) -> frozenset[int]:
    """Vertices ``w`` whose order-i reach count with ``v`` is at least ``tau``."""
    return frozenset(w for w in range(H.n) if w != v and reach_count(H, v, w, i, **kw).count >= tau)


def containment_threshold(H: Hypergraph, v: int, tau: float, i: int = 1, **kw) -> float | None:
    """Largest ``tau2`` with ``N_{tau,i}(v)`` inside ``N_{tau2,i+1}(v)``.

    This is the minimum order-(i+1) count over the order-i neighbourhood, a
    per-instance witness for the escalation between orders.  ``None`` means
    the neighbourhood is empty and any ``tau2`` works.
    """
    nb = reach_neighborhood(H, v, tau, i, **kw)
    if not nb:
        return None
    return min(reach_count(H, v, w, i + 1, **kw).count for w in sorted(nb))


def trash_set(H: Hypergraph, params: ReachParams) -> frozenset[int]:
    """Vertices lying in at least ``eps_incidence`` weak edges."""
    k = H.k
    if not H.masks:
        return frozenset()
    codeg: dict[int, int] = {}
    for e in H.edges:
        for sub in itertools.combinations(e, k - 1):
            m = mask_of(sub)
            codeg[m] = codeg.get(m, 0) + 1
    weak_inc = [0] * H.n
    for e in H.edges:
        if any(codeg[mask_of(sub)] <= params.eps_weak for sub in itertools.combinations(e, k - 1)):
            for v in e:
                weak_inc[v] += 1
    return frozenset(v for v in range(H.n) if weak_inc[v] >= params.eps_incidence)


def reach_matrix(H: Hypergraph) -> np.ndarray:
    """Symmetric matrix of exact 1-reach counts (diagonal zero)."""
    links = [link(H, v) for v in range(H.n)]
    R = np.zeros((H.n, H.n), dtype=np.int64)
    for u, v in itertools.combinations(range(H.n), 2):
        R[u, v] = R[v, u] = len(links[u] & links[v])
    return R


def reach_partition(H: Hypergraph, params: ReachParams) -> VertexPartition:
    """Trash part plus connected components of the thresholded reach graph.

    Vertices with fewer than ``floor`` reachable partners and components
    smaller than ``floor`` are folded into the trash part.  Parts are ordered
    by decreasing size, then by smallest vertex.
    """
    trash = set(trash_set(H, params))
    R = reach_matrix(H)
    adj = R >= params.tau1
    np.fill_diagonal(adj, False)
    alive = [v for v in range(H.n) if v not in trash]
    alive_set = set(alive)
    for v in alive:
        if sum(1 for w in alive if adj[v, w]) < params.floor:
            trash.add(v)
    alive = [v for v in alive if v not in trash]
    alive_set = set(alive)
    parts = []
    seen: set[int] = set()
    for s in alive:
        if s in seen:
            continue
        comp, stack = {s}, [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            for w in np.flatnonzero(adj[x]).tolist():
                if w in alive_set and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        if len(comp) < params.floor:
            trash |= comp
        else:
            parts.append(frozenset(comp))
    parts.sort(key=lambda p: (-len(p), min(p)))
    return VertexPartition(H.n, frozenset(trash), tuple(parts))


@dataclass
class MergeTrace:
    merges: list[tuple[int, int]] = field(default_factory=list)


def merge_by_transferrals(
    H: Hypergraph, P: VertexPartition, tau: int, trace: MergeTrace | None = None
) -> VertexPartition:
    """Merge parts while the robust edge-lattice contains a transferral.

    The first transferral ``u_i - u_j`` found (lexicographic ``i < j``) merges
    ``V_j`` into ``V_i``; the loop stops once the lattice is transferral-free.
    """
    while P.r > 1:
        L = lattice_basis(robust_vectors(H, P, tau), P.r)
        pair = find_transferral(L)
        if pair is None:
            break
        i, j = pair
        parts = list(P.parts)
        parts[i - 1] = parts[i - 1] | parts[j - 1]
        del parts[j - 1]
        P = VertexPartition(P.n, P.trash, tuple(parts))
        if trace is not None:
            trace.merges.append(pair)
    return P


def closedness_sample(
    H: Hypergraph, part, tau: float, i: int = 1, pairs: int = 10, seed: int = 0, **kw
) -> list[tuple[int, int, float, bool]]:
    """Spot-check ``(u, v, count, count >= tau)`` for sampled pairs inside a part."""
    verts = sorted(part)
    if len(verts) < 2:
        return []
    rng = np.random.default_rng([seed, 7, i])
    allpairs = list(itertools.combinations(verts, 2))
    idx = rng.choice(len(allpairs), min(pairs, len(allpairs)), replace=False)
    out = []
    for t in sorted(idx.tolist()):
        u, v = allpairs[t]
        c = reach_count(H, u, v, i, seed=seed, **kw).count
        out.append((u, v, c, c >= tau))
    return out

