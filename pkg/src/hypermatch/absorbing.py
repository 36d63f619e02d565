"""Absorbing-method pipelines producing near perfect matchings.

Two pipelines are provided:

* :func:`npm_via_absorption` -- an absorbing matching whose edges can each
  swallow a ``(k+2)``-set of uncovered vertices at the price of releasing two
  of their own vertices (needs ``k >= 6``);
* :func:`lattice_absorbing_pipeline` -- partition by reachability, merge parts
  along transferrals, reserve edges per robust edge-vector, and repair
  leftover vertices through lattice decompositions and an absorbing family.

Every result is re-certified against the input hypergraph before success is
reported.  All randomness derives from one seed through
``numpy.random.default_rng([seed, stage, attempt])``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .hgraph import (
    DEFAULT_NODE_BUDGET,
    Hypergraph,
    Matching,
    mask_of,
    matching_number,
    perfect_matching,
    popcount,
    vertices_of,
)
from .lattice import (
    IntegerLattice,
    NotRepresentableError,
    VertexPartition,
    coefficient_bound,
    contains,
    decompose_vector,
    find_absorbable_index,
    index_vector,
    lattice_basis,
    robust_vectors,
    s_vectors,
)
from .reachability import MergeTrace, ReachParams, merge_by_transferrals, reach_partition

# Stage ids for seed substreams.
_ABSORBING = 1
_RESIDUAL = 2
_FAMILY = 3
_RESERVE = 4
_COVER_TRASH = 5

EXACT_RESIDUAL_MAX_N = 24


class StageFailure(Exception):
    """A pipeline stage could not complete; ``detail`` is JSON-friendly."""

    def __init__(self, stage: str, reason: str, detail: dict | None = None):
        super().__init__(f"{stage}: {reason}")
        self.stage = stage
        self.reason = reason
        self.detail = detail or {}


def _rng(seed: int, stage: int, attempt: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, stage, attempt])


def _set(mask: int) -> list[int]:
    return list(vertices_of(mask))


# --------------------------------------------------------------------------
# S-absorbing edges


@dataclass(frozen=True)
class SAbsorptionWitness:
    """Replace edge ``e`` by ``e1, e2`` to cover the (k+2)-set ``S``."""

    e: int
    e1: int
    e2: int
    S: int

    @property
    def uncovered_leftover(self) -> int:
        return self.e & ~(self.e1 | self.e2)

    def check(self, k: int) -> None:
        """Raise ValueError unless all intersection equalities hold."""
        e, e1, e2, S = self.e, self.e1, self.e2, self.S
        conds = {
            "|S| = k+2": popcount(S) == k + 2,
            "|e| = |e1| = |e2| = k": popcount(e) == popcount(e1) == popcount(e2) == k,
            "e ∩ S = ∅": not e & S,
            "|e1 ∩ S| = k-2": popcount(e1 & S) == k - 2,
            "|e1 ∩ e| = 2": popcount(e1 & e) == 2,
            "|e2 ∩ S| = 4": popcount(e2 & S) == 4,
            "|e2 ∩ e| = k-4": popcount(e2 & e) == k - 4,
            "e1 ∩ e2 = ∅": not e1 & e2,
            "e1 ∪ e2 ⊆ S ∪ e": (e1 | e2) & ~(S | e) == 0,
        }
        bad = [name for name, ok in conds.items() if not ok]
        if bad:
            raise ValueError(f"invalid S-absorption witness: {', '.join(bad)}")

    def to_json(self) -> dict:
        return {"e": _set(self.e), "e1": _set(self.e1), "e2": _set(self.e2), "S": _set(self.S)}


def _require_k6(k: int) -> None:
    if k < 6:
        raise ValueError(f"S-absorbing edges need k >= 6, got k={k}")


def find_s_absorbing_witness(H: Hypergraph, S, e) -> SAbsorptionWitness | None:
    """First witness (canonical search order) that ``e`` is S-absorbing."""
    k = H.k
    _require_k6(k)
    Sm = S if isinstance(S, int) else mask_of(S)
    em = e if isinstance(e, int) else mask_of(e)
    if em & Sm or popcount(Sm) != k + 2:
        return None
    return _witness(H.edge_set, k, Sm, [1 << v for v in vertices_of(Sm)], em, [1 << v for v in vertices_of(em)])


def _witness(E, k: int, Sm: int, Sb: list[int], em: int, eb: list[int]) -> SAbsorptionWitness | None:
    # Sb, eb: single-bit masks of S and e in increasing vertex order.
    for A in itertools.combinations(Sb, 4):
        Am = sum(A)
        rest = Sm ^ Am
        for b1, b2 in itertools.combinations(eb, 2):
            e1 = rest | b1 | b2
            if e1 not in E:
                continue
            remaining = [b for b in eb if b != b1 and b != b2]
            for D in itertools.combinations(remaining, k - 4):
                e2 = Am | sum(D)
                if e2 in E:
                    return SAbsorptionWitness(em, e1, e2, Sm)
    return None


def count_s_absorbing(H: Hypergraph, S, M: Matching | None = None, stop_at: int | None = None) -> int:
    """Number of S-absorbing edges of ``H`` (or of ``M`` when given).

    Every counted edge is backed by an explicit witness.  ``stop_at`` ends
    the count early once reached.
    """
    _require_k6(H.k)
    Sm = S if isinstance(S, int) else mask_of(S)
    if popcount(Sm) != H.k + 2:
        raise ValueError(f"|S| must be k+2 = {H.k + 2}")
    pool = M.masks if M is not None else H.masks
    count = 0
    for e in pool:
        if e & Sm:
            continue
        if find_s_absorbing_witness(H, Sm, e) is not None:
            count += 1
            if stop_at is not None and count >= stop_at:
                break
    return count


@dataclass(frozen=True)
class AbsorbingFamily:
    """Disjoint vertex sets, each spanned by the perfect matching in ``matchings``."""

    members: tuple[tuple[int, ...], ...]
    matchings: tuple[tuple[int, ...], ...]
    params: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    @property
    def vertices(self) -> int:
        return mask_of(v for m in self.members for v in m)

    def check(self, H: Hypergraph) -> None:
        used = 0
        for mem, pm in zip(self.members, self.matchings):
            mm = mask_of(mem)
            if mm & used:
                raise ValueError("family members overlap")
            used |= mm
            cover = 0
            for e in pm:
                if e not in H.edge_set or e & cover:
                    raise ValueError(f"member {mem} lacks a valid perfect matching")
                cover |= e
            if cover != mm:
                raise ValueError(f"member {mem} is not perfectly matched")


def build_absorbing_matching(
    H: Hypergraph,
    beta: float = 0.1,
    seed: int = 0,
    retries: int = 20,
    exhaustive_limit: int = 10**6,
    sample_checks: int = 2000,
) -> AbsorbingFamily:
    """Random sparse matching in which every outside (k+2)-set has absorbers.

    Edges are sampled independently with ``p = beta*n/|E|`` and one edge of
    every intersecting pair is dropped.  The result must satisfy
    ``|M'| <= beta*n`` and give every (k+2)-set disjoint from ``V(M')`` at
    least ``ceil(beta^2 n)`` S-absorbing edges; the property is checked on all
    such sets when there are at most ``exhaustive_limit`` of them, otherwise
    on ``sample_checks`` random ones.  Raises StageFailure after ``retries``.
    """
    k, n = H.k, H.n
    _require_k6(k)
    need = max(1, math.ceil(beta * beta * n))
    cap = math.floor(beta * n)
    last: dict = {"reason": "no edges"}
    if not H.masks:
        raise StageFailure("absorbing_matching", "hypergraph has no edges", {"violating_S": list(range(k + 2))})
    p = min(1.0, beta * n / len(H.masks))
    masks = np.array(H.masks, dtype=object)
    for attempt in range(retries):
        rng = _rng(seed, _ABSORBING, attempt)
        picked = masks[rng.random(len(masks)) < p].tolist()
        kept: list[int] = []
        used = 0
        for m in picked:
            if not m & used:
                kept.append(m)
                used |= m
        if not kept or len(kept) > cap:
            last = {"reason": f"matching size {len(kept)} outside [1, {cap}]"}
            continue
        rest = [v for v in range(n) if not used >> v & 1]
        M = Matching(n, k, tuple(kept))
        hist: Counter = Counter()
        total = math.comb(len(rest), k + 2)
        if total <= exhaustive_limit:
            targets = itertools.combinations(rest, k + 2)
            mode = "exhaustive"
        else:
            srng = _rng(seed, _ABSORBING, 1000 + attempt)
            arr = np.array(rest)
            targets = (tuple(sorted(srng.choice(arr, k + 2, replace=False).tolist())) for _ in range(sample_checks))
            mode = "sampled"
        violating = None
        E = H.edge_set
        bits = [(m, [1 << v for v in vertices_of(m)]) for m in M.masks]
        for S in targets:
            Sb = [1 << v for v in S]
            Sm = sum(Sb)
            c = sum(1 for m, eb in bits if _witness(E, k, Sm, Sb, m, eb) is not None)
            hist[c] += 1
            if c < need:
                violating = S
                break
        if violating is not None:
            last = {"reason": "absorbing property violated", "violating_S": list(violating)}
            continue
        return AbsorbingFamily(
            members=tuple(vertices_of(m) for m in M.masks),
            matchings=tuple((m,) for m in M.masks),
            params={"beta": beta, "seed": seed, "attempt": attempt, "need": need},
            stats={"check": mode, "checked": sum(hist.values()), "absorbing_hist": dict(sorted(hist.items()))},
        )
    raise StageFailure("absorbing_matching", f"retry budget exhausted ({retries})", last)


def absorb_step(M: Matching, S, witness: SAbsorptionWitness, hypergraph: Hypergraph | None = None) -> Matching:
    """Swap ``witness.e`` for ``e1, e2``; coverage grows by exactly k."""
    Sm = S if isinstance(S, int) else mask_of(S)
    witness.check(M.k)
    if witness.S != Sm:
        raise ValueError("witness was built for a different S")
    if witness.e not in M.masks:
        raise ValueError(f"edge {_set(witness.e)} is not in the matching")
    if Sm & M.covered:
        raise ValueError("S is not contained in the uncovered vertices")
    if hypergraph is not None and not (witness.e1 in hypergraph.edge_set and witness.e2 in hypergraph.edge_set):
        raise ValueError("witness edges are not edges of the hypergraph")
    out = M.replace(remove=[witness.e], add=[witness.e1, witness.e2])
    assert popcount(out.covered) - popcount(M.covered) == M.k
    return out


# --------------------------------------------------------------------------
# Residual almost perfect matching


def _relabel(H: Hypergraph, vertices: list[int]) -> tuple[Hypergraph, list[int]]:
    sel = mask_of(vertices)
    index = {v: i for i, v in enumerate(vertices)}
    small = []
    for m in H.masks:
        if m & sel == m:
            small.append(mask_of(index[v] for v in vertices_of(m)))
    small.sort(key=vertices_of)
    return Hypergraph(len(vertices), H.k, small), vertices


def _greedy_with_swaps(H: Hypergraph, sel: int, rng: np.random.Generator, patience: int) -> list[int]:
    avail = [m for m in H.masks if m & sel == m]
    order = rng.permutation(len(avail)).tolist()
    chosen: list[int] = []
    used = 0
    for idx in order:
        m = avail[idx]
        if not m & used:
            chosen.append(m)
            used |= m
    # 2-for-1 swaps: replace one edge by two edges inside its vertices plus free ones.
    tries = 0
    improved = True
    while improved and tries < patience:
        improved = False
        free = sel & ~used
        for m in avail:
            if m & free == m:
                chosen.append(m)
                used |= m
                free &= ~m
                improved = True
        for f in list(chosen):
            tries += 1
            if tries > patience:
                break
            pool = free | f
            inside = [m for m in avail if m & pool == m]
            pair = next(
                ((a, b) for a, b in itertools.combinations(inside, 2) if not a & b),
                None,
            )
            if pair is not None:
                chosen.remove(f)
                chosen.extend(pair)
                used = (used & ~f) | pair[0] | pair[1]
                improved = True
                break
    return chosen


def residual_matching(
    H: Hypergraph,
    vertices,
    method: str = "auto",
    seed: int = 0,
    budget: int = DEFAULT_NODE_BUDGET,
    patience: int = 200,
) -> tuple[list[int], str]:
    """Large matching inside ``H[vertices]``; returns (edge masks, method used).

    ``auto`` runs the exact solver up to 24 vertices and greedy with 2-for-1
    swaps beyond (also the fallback when the solver's budget runs out).
    ``none`` returns no edges, leaving everything to the absorption loop.
    """
    verts = sorted(vertices)
    if method == "none":
        return [], "none"
    if method not in ("auto", "exact", "greedy"):
        raise ValueError(f"unknown residual method {method!r}")
    if method == "exact" or (method == "auto" and len(verts) <= EXACT_RESIDUAL_MAX_N):
        small, back = _relabel(H, verts)
        if small.n >= small.k:
            res = matching_number(small, target=small.n // small.k, budget=budget)
            if res.decided:
                return [mask_of(back[v] for v in vertices_of(m)) for m in res.matching.masks], "exact"
        else:
            return [], "exact"
    return _greedy_with_swaps(H, mask_of(verts), _rng(seed, _RESIDUAL), patience), "greedy"


# --------------------------------------------------------------------------
# Pipelines


@dataclass
class PipelineResult:
    success: bool
    matching: Matching | None
    stage: str | None = None
    reason: str | None = None
    trace: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.matching.size if self.matching is not None else 0

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "size": self.size,
            "matching": self.matching.edges if self.matching is not None else None,
            "failed_stage": self.stage,
            "reason": self.reason,
            "trace": self.trace,
        }


def _certify(H: Hypergraph, M: Matching, trace: dict) -> PipelineResult:
    try:
        M.check(H)
    except ValueError as exc:
        return PipelineResult(False, None, "certify", str(exc), trace)
    if M.size != H.n // H.k:
        return PipelineResult(False, M, "certify", f"matching size {M.size} < {H.n // H.k}", trace)
    trace["certified"] = True
    return PipelineResult(True, M, None, None, trace)


def npm_via_absorption(
    H: Hypergraph,
    beta: float = 0.1,
    seed: int = 0,
    retries: int = 20,
    residual: str = "auto",
    budget: int = DEFAULT_NODE_BUDGET,
    exhaustive_limit: int = 10**6,
    sample_checks: int = 2000,
) -> PipelineResult:
    """Near perfect matching via an absorbing matching of S-absorbing edges.

    Stages: absorbing matching ``M'``; residual matching on ``V - V(M')``;
    absorption of (k+2)-sets of uncovered vertices until ``n mod k`` remain.
    """
    k, n = H.k, H.n
    _require_k6(k)
    if n % k == 0:
        raise ValueError("k must not divide n")
    ell = n % k
    trace: dict = {"pipeline": "absorb4", "n": n, "k": k, "seed": seed, "beta": beta}
    try:
        fam = build_absorbing_matching(H, beta, seed, retries, exhaustive_limit, sample_checks)
    except StageFailure as exc:
        trace["absorbing_matching"] = exc.detail
        return PipelineResult(False, None, exc.stage, exc.reason, trace)
    absorbers = [m for (m,) in fam.matchings]
    trace["absorbing_matching"] = {"size": len(absorbers), **fam.stats}
    used = mask_of(v for mem in fam.members for v in mem)
    rest = [v for v in range(n) if not used >> v & 1]
    M1, how = residual_matching(H, rest, residual, seed, budget)
    M = Matching(n, k, tuple(absorbers) + tuple(M1))
    uncovered = popcount(M.uncovered)
    trace["residual"] = {"method": how, "size": len(M1), "uncovered": uncovered}

    iterations = 0
    steps = []
    while popcount(M.uncovered) > ell:
        free = M.uncovered
        if popcount(free) < k + 2:
            # ell = 1 leaves k+1 vertices: no (k+2)-set to absorb; try a direct edge.
            direct = next((m for m in H.masks if m & free == m), None)
            if direct is None:
                trace["absorption"] = {"iterations": iterations, "steps": steps}
                return PipelineResult(False, M, "absorption", "k+1 vertices left and no edge among them", trace)
            M = M.replace(add=[direct])
            continue
        S = mask_of(vertices_of(free)[: k + 2])
        witness = None
        for e in absorbers:
            witness = find_s_absorbing_witness(H, S, e)
            if witness is not None:
                break
        if witness is None:
            trace["absorption"] = {"iterations": iterations, "steps": steps, "stuck_S": _set(S)}
            return PipelineResult(False, M, "absorption", "no S-absorbing edge left", trace)
        before = popcount(M.uncovered)
        M = absorb_step(M, S, witness, H)
        assert before - popcount(M.uncovered) == k
        absorbers.remove(witness.e)
        absorbers.extend([witness.e1, witness.e2])
        iterations += 1
        steps.append(witness.to_json())
        if iterations > max(1, (uncovered - ell) // k):
            raise AssertionError("absorption loop exceeded its iteration bound")
    trace["absorption"] = {"iterations": iterations, "steps": steps}
    return _certify(H, M, trace)


@dataclass(frozen=True)
class LatticeParams:
    """Knobs of the lattice pipeline (all counts absolute once resolved).

    tau1 defaults to ``ceil(reach_beta * C(n-2, k-1))``; the robust threshold
    ``tau`` to ``ceil(mu * C(n, k))``.  Reserve matchings hold
    ``ceil(C * alpha^2 * n)`` edges per robust vector, ``C`` being the
    instance's coefficient bound over the 2k-vectors of the lattice.
    """

    reach_beta: float = 0.05
    tau1: int | None = None
    eps_weak: float = 1
    eps_incidence: float = 1
    size_floor: int | None = None
    mu: float = 0.01
    tau: int | None = None
    alpha: float = 0.15
    family_beta: float = 0.25
    family_floor: int = 1
    family_max_multiple: int = 2
    family_retries: int = 10
    residual: str = "auto"
    budget: int = DEFAULT_NODE_BUDGET
    seed: int = 0

    def resolve(self, n: int, k: int) -> dict:
        tau1 = self.tau1 if self.tau1 is not None else max(1, math.ceil(self.reach_beta * math.comb(n - 2, k - 1)))
        tau = self.tau if self.tau is not None else max(1, math.ceil(self.mu * math.comb(n, k)))
        return {"tau1": tau1, "tau": tau}

    def reach_params(self, n: int, k: int) -> ReachParams:
        return ReachParams(
            tau1=self.resolve(n, k)["tau1"],
            eps_weak=self.eps_weak,
            eps_incidence=self.eps_incidence,
            size_floor=self.size_floor,
            seed=self.seed,
        )


def _targets(H: Hypergraph, P: VertexPartition, I: list, forbidden: int) -> list[int]:
    allowed = [v for p in P.parts for v in sorted(p) if not forbidden >> v & 1]
    robust = set(I)
    return [
        mask_of(c)
        for c in itertools.combinations(sorted(allowed), H.k)
        if index_vector(P, c) in robust
    ]


def build_lattice_family(
    H: Hypergraph,
    P: VertexPartition,
    I: list,
    params: LatticeParams,
) -> AbsorbingFamily:
    """Disjoint perfectly matchable sets able to absorb robust k-sets.

    Tries set sizes ``k, 2k, ...`` (up to ``family_max_multiple * k``) and
    keeps the first size for which a random family of at most
    ``family_beta * n`` vertices gives every robust k-set outside it at least
    ``family_floor`` absorbing members.
    """
    k, n = H.k, H.n
    eligible = 0
    for p in P.parts:
        eligible |= mask_of(p)
    edges = [m for m in H.masks if m & eligible == m]
    last = {}
    for mult in range(1, params.family_max_multiple + 1):
        size = mult * k
        count = max(1, math.floor(params.family_beta * n / size))
        for attempt in range(params.family_retries):
            rng = _rng(params.seed, _FAMILY, mult * 1000 + attempt)
            members, pms = [], []
            used = 0
            for idx in rng.permutation(len(edges)).tolist():
                if len(members) == count:
                    break
                e = edges[idx]
                if e & used:
                    continue
                # Grow a member from disjoint edges until it has ``mult`` of them.
                pm, cover = [e], e
                for j in rng.permutation(len(edges)).tolist():
                    if len(pm) == mult:
                        break
                    f = edges[j]
                    if not f & (used | cover):
                        pm.append(f)
                        cover |= f
                if len(pm) < mult:
                    continue
                members.append(cover)
                pms.append(tuple(pm))
                used |= cover
            if not members:
                continue
            targets = _targets(H, P, I, used)
            hist: Counter = Counter()
            bad = None
            for S in targets:
                c = 0
                for mem in members:
                    if perfect_matching(H, vertices_of(mem | S)) is not None:
                        c += 1
                        if c >= params.family_floor:
                            break
                hist[c] += 1
                if c < params.family_floor:
                    bad = S
                    break
            if bad is not None:
                last = {"set_size": size, "violating_S": _set(bad)}
                continue
            return AbsorbingFamily(
                members=tuple(vertices_of(m) for m in members),
                matchings=tuple(pms),
                params={"set_size": size, "attempt": attempt, "floor": params.family_floor},
                stats={"targets": len(targets), "absorbing_hist": dict(sorted(hist.items()))},
            )
    raise StageFailure("absorbing_family", "no workable absorbing family", last)


@dataclass
class _LatticeState:
    H: Hypergraph
    P: VertexPartition
    I: list
    L: IntegerLattice
    C: int
    reserve: dict                 # vector -> list of edge masks still reserved
    reserve_size: dict            # vector -> initial reserve size
    family: list                  # [(member mask, pm masks, used flag)]
    edges: list                   # other matched edges
    uncovered: int
    pending: list = field(default_factory=list)
    log: list = field(default_factory=list)


def absorb_leftover(state: _LatticeState, ell: int) -> None:
    """Reduce the uncovered set to ``ell`` vertices using the lattice.

    Each round takes ``k+1`` uncovered vertices ``U`` and an index ``i`` with
    ``i_P(U) - u_i`` in the lattice, borrows a reserve edge meeting ``V_i``,
    decomposes the index vector of the resulting 2k-set over robust vectors,
    and queues the k-sets of the decomposition for the absorbing family.
    """
    H, P, k = state.H, state.P, state.H.k
    lab = P.part_of()
    while popcount(state.uncovered) > ell:
        free = vertices_of(state.uncovered)
        if any(lab[v] == 0 for v in free):
            raise StageFailure("absorption", "uncovered trash vertex", {"vertices": list(free)})
        if len(free) < k + 1:
            raise StageFailure("absorption", "fewer than k+1 uncovered vertices", {"vertices": list(free)})
        U, i = None, None
        for cand in itertools.islice(itertools.combinations(free, k + 1), 200):
            i = find_absorbable_index(cand, P, state.L)
            if i is not None:
                U = cand
                break
        if U is None:
            raise StageFailure("absorption", "no absorbable index for any (k+1)-set", {"vertices": list(free)})
        vec = next((v for v in state.I if v[i - 1] > 0 and state.reserve.get(v)), None)
        if vec is None:
            raise StageFailure("absorption", f"reserve exhausted for part {i}", {"part": i})
        e = state.reserve[vec].pop(0)
        w = next(v for v in vertices_of(e) if lab[v] == i)
        Uprime = mask_of(U) | (e & ~(1 << w))
        target = index_vector(P, vertices_of(Uprime))
        try:
            dec = decompose_vector(target, state.I, state.C)
        except NotRepresentableError as exc:
            raise StageFailure("absorption", str(exc), {"vector": list(target)}) from None
        pool = Uprime
        for g, c in zip(dec.generators, dec.negative):
            for _ in range(c):
                if not state.reserve.get(g):
                    raise StageFailure("absorption", f"reserve exhausted for vector {g}", {"vector": list(g)})
                pool |= state.reserve[g].pop(0)
        by_part = {p: [v for v in vertices_of(pool) if lab[v] == p] for p in range(1, P.r + 1)}
        ksets = []
        for g, b in zip(dec.generators, dec.positive):
            for _ in range(b):
                block = []
                for p, cnt in enumerate(g, start=1):
                    block.extend(by_part[p][:cnt])
                    by_part[p] = by_part[p][cnt:]
                ksets.append(mask_of(block))
        assert not any(by_part.values()) and sum(popcount(s) for s in ksets) == popcount(pool)
        state.pending.extend(ksets)
        state.uncovered = (state.uncovered & ~mask_of(U)) | (1 << w)
        state.log.append({"U": list(U), "i": i, "borrowed": _set(e), "coefficients": list(dec.coefficients)})
    for v, lst in state.reserve.items():
        assert state.reserve_size[v] - len(lst) <= state.reserve_size[v]

    absorbed = direct = 0
    for S in state.pending:
        for idx, (mem, pm, used) in enumerate(state.family):
            if used:
                continue
            new_pm = perfect_matching(H, vertices_of(mem | S))
            if new_pm is not None:
                state.family[idx] = (mem | S, tuple(new_pm), True)
                absorbed += 1
                break
        else:
            if S in H.edge_set:
                state.edges.append(S)
                direct += 1
            else:
                raise StageFailure("absorb", "no family member absorbs a pending k-set", {"S": _set(S)})
    state.log.append({"absorbed": absorbed, "direct": direct})
    state.pending = []


def lattice_absorbing_pipeline(H: Hypergraph, params: LatticeParams | None = None) -> PipelineResult:
    """Near perfect matching through the reachability partition and edge-lattice."""
    params = params or LatticeParams()
    k, n = H.k, H.n
    if n % k == 0:
        raise ValueError("k must not divide n")
    ell = n % k
    thr = params.resolve(n, k)
    trace: dict = {"pipeline": "lattice", "n": n, "k": k, "seed": params.seed, **thr}
    try:
        P = reach_partition(H, params.reach_params(n, k))
        trace["partition"] = P.to_json()
        if P.r == 0:
            raise StageFailure("partition", "no non-trash part")
        mt = MergeTrace()
        P0 = merge_by_transferrals(H, P, thr["tau"], mt)
        trace["merge"] = {"merges": [list(m) for m in mt.merges], "r": P0.r, "partition": P0.to_json()}
        I = robust_vectors(H, P0, thr["tau"])
        if not I:
            raise StageFailure("lattice", "no robust edge-vectors")
        L = lattice_basis(I, P0.r)
        J = [v for v in s_vectors(2 * k, P0.r) if contains(L, v)]
        C = max(1, coefficient_bound(I, J, P0.r, k)) if J else 1
        trace["lattice"] = {"robust_vectors": [list(v) for v in I], "basis": [list(b) for b in L.basis], "C": C}

        fam = build_lattice_family(H, P0, I, params)
        fam.check(H)
        trace["family"] = {"members": [list(m) for m in fam.members], **fam.params, **fam.stats}
        used = fam.vertices

        # Reserve matchings per robust vector.
        per = max(1, math.ceil(C * params.alpha**2 * n))
        lab = P0.part_of()
        rng = _rng(params.seed, _RESERVE)
        order = rng.permutation(len(H.masks)).tolist()
        reserve: dict = {v: [] for v in I}
        for idx in order:
            m = H.masks[idx]
            if m & used:
                continue
            vs = vertices_of(m)
            if any(lab[v] == 0 for v in vs):
                continue
            vec = index_vector(P0, vs)
            if vec in reserve and len(reserve[vec]) < per:
                reserve[vec].append(m)
                used |= m
        short = [list(v) for v, lst in reserve.items() if len(lst) < per]
        if short:
            raise StageFailure("reserve", "not enough disjoint edges per robust vector", {"short": short})
        trace["reserve"] = {"per_vector": per}

        # Cover trash vertices greedily.
        cover = []
        rng = _rng(params.seed, _COVER_TRASH)
        for v in sorted(P0.trash):
            if used >> v & 1:
                continue
            options = [m for m in H.incidence[v] if not m & used]
            if not options:
                raise StageFailure("cover_trash", f"no edge covers trash vertex {v}", {"vertex": v})
            m = options[int(rng.integers(len(options)))]
            cover.append(m)
            used |= m
        trace["cover_trash"] = {"edges": len(cover)}

        rest = [v for v in range(n) if not used >> v & 1]
        M3, how = residual_matching(H, rest, params.residual, params.seed, params.budget)
        covered_rest = mask_of(v for m in M3 for v in vertices_of(m))
        uncovered = mask_of(rest) & ~covered_rest
        trace["residual"] = {"method": how, "size": len(M3), "uncovered": popcount(uncovered)}

        state = _LatticeState(
            H=H,
            P=P0,
            I=I,
            L=L,
            C=C,
            reserve=reserve,
            reserve_size={v: len(lst) for v, lst in reserve.items()},
            family=[(mask_of(mem), pm, False) for mem, pm in zip(fam.members, fam.matchings)],
            edges=cover + list(M3),
            uncovered=uncovered,
        )
        absorb_leftover(state, ell)
        trace["absorption"] = state.log
    except StageFailure as exc:
        trace["failure_detail"] = exc.detail
        return PipelineResult(False, None, exc.stage, exc.reason, trace)
    masks = list(state.edges)
    for lst in state.reserve.values():
        masks.extend(lst)
    for _, pm, _ in state.family:
        masks.extend(pm)
    try:
        M = Matching(n, k, tuple(masks))
    except ValueError as exc:
        return PipelineResult(False, None, "assemble", str(exc), trace)
    return _certify(H, M, trace)


def exact_pipeline(H: Hypergraph, budget: int = DEFAULT_NODE_BUDGET) -> PipelineResult:
    res = matching_number(H, target=H.n // H.k, budget=budget)
    trace = {"pipeline": "exact", "n": H.n, "k": H.k, "status": res.status, "nodes": res.nodes}
    if res.status != "target_reached":
        return PipelineResult(False, res.matching, "exact", res.status, trace)
    return _certify(H, res.matching, trace)
