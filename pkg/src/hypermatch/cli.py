"""Command-line interface: constructions, queries, pipelines, suites and sweeps.

Output is deterministic: identical flags and seed give byte-identical JSON and
CSV regardless of ``--threads``.  ``verify`` exits 0 when every case passes,
1 on any failure, 2 on usage errors and 3 when a case ran out of budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import absorbing, constructions, hgraph, lattice, reachability, thresholds

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def pmap(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """Order-preserving map; a process pool when ``threads > 1``."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * threads))))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def parse_range(text: str) -> list[int]:
    """``"4..10"``, ``"3"`` or ``"1,3,5"``; ``"5..4"`` is empty."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected a..b, a or a,b,c") from None


# --------------------------------------------------------------------------
# verify


@dataclass
class Case:
    id: str
    expected: object
    got: object
    status: str  # "pass", "fail" or "undecided"

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class VerifyReport:
    suite: str
    cases: list[Case] = field(default_factory=list)

    @property
    def exit_status(self) -> int:
        if any(c.status == "fail" for c in self.cases):
            return EXIT_FAIL
        if any(c.status == "undecided" for c in self.cases):
            return EXIT_UNDECIDED
        return EXIT_PASS

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "exit_status": self.exit_status,
            "counts": {s: sum(c.status == s for c in self.cases) for s in ("pass", "fail", "undecided")},
            "cases": [{"id": c.id, "expected": c.expected, "got": c.got, "status": c.status} for c in self.cases],
        }

    def to_text(self) -> str:
        lines = [f"{c.status.upper():9s} {c.id}: expected {c.expected}, got {c.got}" for c in self.cases if not c.passed]
        counts = self.to_json()["counts"]
        lines.append(
            f"suite {self.suite}: {counts['pass']} pass, {counts['fail']} fail, "
            f"{counts['undecided']} undecided -> exit {self.exit_status}"
        )
        return "\n".join(lines) + "\n"


def _barrier_case(args) -> Case:
    spec, budget = args
    H, _ = spec.build()
    target = spec.n // spec.k
    res = hgraph.matching_number(H, target=target, budget=budget)
    sid = f"div n={spec.n} k={spec.k} ell={spec.ell} j={spec.j} n1={spec.n1}"
    if res.status == "undecided":
        return Case(sid, f"nu < {target}", "undecided", "undecided")
    ok = res.status == "target_infeasible" and res.size < target
    return Case(sid, f"nu < {target}", res.size, "pass" if ok else "fail")


def _space_case(args) -> Case:
    n, k, s, budget = args
    res = hgraph.matching_number(constructions.space_barrier(n, k, s), budget=budget)
    sid = f"space n={n} k={k} s={s}"
    if not res.decided:
        return Case(sid, s, "undecided", "undecided")
    return Case(sid, s, res.size, "pass" if res.size == s else "fail")


def barrier_items(kmax: int, nmax: int, space_nmax: int, smax: int, budget: int):
    div = []
    for k in range(3, kmax + 1):
        for n in range(k + 1, nmax + 1):
            if n % k == 0:
                continue
            div.extend((spec, budget) for spec in constructions.admissible_specs(n, k))
    space = [
        (n, 3, s, budget)
        for n in range(3, space_nmax + 1)
        for s in range(0, smax + 1)
        if s * 3 < n
    ]
    return div, space


def suite_barriers(kmax=4, nmax=14, space_nmax=15, smax=4, budget=hgraph.DEFAULT_NODE_BUDGET, threads=1):
    div, space = barrier_items(kmax, nmax, space_nmax, smax, budget)
    return VerifyReport("barriers", pmap(_barrier_case, div, threads) + pmap(_space_case, space, threads))


def _degree_case(spec) -> list[Case]:
    H, _ = spec.build()
    out = []
    for d in range(1, spec.k):
        fd = thresholds.finite_min_degree(spec.n, spec.k, d, spec.ell, spec.j, spec.n1)
        got = hgraph.min_degree(H, d).value
        sid = f"n={spec.n} k={spec.k} ell={spec.ell} j={spec.j} n1={spec.n1} d={d}"
        out.append(Case(sid, fd.value, got, "pass" if fd.value == got else "fail"))
    return out


def degree_items(kmax: int, nmax: int):
    items = []
    for k in range(3, kmax + 1):
        for n in range(k + 1, nmax + 1):
            if n % k:
                items.extend(constructions.admissible_specs(n, k))
    return items


def suite_degree_formulas(kmax=4, nmax=14, threads=1):
    rows = pmap(_degree_case, degree_items(kmax, nmax), threads)
    return VerifyReport("degree-formulas", [c for r in rows for c in r])


def _bounds_case(args) -> list[Case]:
    k, d, ell = args
    res = thresholds.g_optimize(k, d, ell)
    rep = thresholds.g_bounds_check(k, d, ell, res.g)
    return [
        Case(f"k={k} d={d} ell={ell} {c.name}", [c.lower, c.upper], res.g, "pass" if c.passed else "fail")
        for c in rep.checks
    ]


def suite_bounds(kmax=10, K_exact=40, threads=1):
    items = [(k, d, ell) for k in range(3, kmax + 1) for d in range(1, k) for ell in range(0, k)]
    rows = pmap(_bounds_case, items, threads)
    cases = [c for r in rows for c in r]
    for K in range(1, K_exact + 1):
        C = thresholds.half_point_exact(K + 1, 1)
        want = 2**K // 3
        cases.append(Case(f"K={K} min C_i", want, min(C), "pass" if min(C) == want else "fail"))
    return VerifyReport("bounds", cases)


def suite_lattice_regressions(threads=1):
    cases = []
    L = lattice.lattice_basis([(1, 2), (3, 0)], 2)
    cases.append(Case("{(1,2),(3,0)} transferral-free", None, lattice.find_transferral(L), "pass" if lattice.find_transferral(L) is None else "fail"))
    cases.append(Case("{(1,2),(3,0)} contains (2,-2)", True, (2, -2) in L, "pass" if (2, -2) in L else "fail"))
    t = lattice.minimal_symmetric_t(L)
    cases.append(Case("{(1,2),(3,0)} minimal t", 2, t, "pass" if t == 2 else "fail"))
    a = lattice.decompose_vector((2, -2), [(1, 2), (3, 0)], 1).coefficients
    cases.append(Case("(2,-2) coefficients", [-1, 1], list(a), "pass" if a == (-1, 1) else "fail"))
    L3 = lattice.lattice_basis([(1, 1, 1), (0, 0, 3)], 3)
    for v in [(1, 1, -2), (-2, 1, 1), (1, -2, 1)]:
        brute = _brute_member([(1, 1, 1), (0, 0, 3)], v, 4)
        got = v in L3
        cases.append(Case(f"{{(1,1,1),(0,0,3)}} contains {v}", brute, got, "pass" if got == brute else "fail"))
    gens = [(1, 1, 1), (3, 0, 0), (0, 3, 0), (0, 0, 3)]
    L4 = lattice.lattice_basis(gens, 3)
    tr = lattice.find_transferral(L4)
    cases.append(Case("{(1,1,1),(3,0,0),(0,3,0),(0,0,3)} transferral-free", None, tr, "pass" if tr is None else "fail"))
    for v in [(1, 1, -2), (-2, 1, 1), (1, -2, 1)]:
        got = v in L4
        cases.append(Case(f"{{(1,1,1),(3,0,0),(0,3,0),(0,0,3)}} contains {v}", True, got, "pass" if got else "fail"))
    return VerifyReport("lattice-regressions", cases)


def _brute_member(gens, v, R) -> bool:
    for a in itertools.product(range(-R, R + 1), repeat=len(gens)):
        if all(sum(ai * g[c] for ai, g in zip(a, gens)) == v[c] for c in range(len(v))):
            return True
    return False


SUITES = {
    "barriers": lambda a: suite_barriers(a.kmax or 4, a.nmax or 14, a.space_nmax, a.smax, a.budget, a.threads),
    "degree-formulas": lambda a: suite_degree_formulas(a.kmax or 4, a.nmax or 14, a.threads),
    "bounds": lambda a: suite_bounds(a.kmax or 10, a.K_exact, a.threads),
    "lattice-regressions": lambda a: suite_lattice_regressions(a.threads),
}


# --------------------------------------------------------------------------
# sweep

G_COLUMNS = ["k", "d", "ell", "g", "x_star", "j_star"]
CONJ_COLUMNS = ["k", "d", "ell", "g", "space_term", "conjectured", "governing"]


def _fmt(x) -> str:
    return format(x, ".10g") if isinstance(x, float) else str(x)


def _sweep_row(args) -> dict:
    k, d, ell = args
    res = thresholds.g_optimize(k, d, ell)
    sp = thresholds.space_term(k, d)
    return {
        "k": k,
        "d": d,
        "ell": ell,
        "g": res.g,
        "x_star": res.x_star,
        "j_star": res.j_star,
        "space_term": sp,
        "conjectured": max(res.g, sp),
        "governing": thresholds.governing_barrier(k, d, ell),
    }


def sweep_cells(ks: Iterable[int], ds: Iterable[int] | None, ells: Iterable[int] | None):
    cells = []
    for k in ks:
        if k < 2:
            continue
        for d in (ds if ds is not None else range(1, k)):
            if not 1 <= d <= k - 1:
                continue
            for ell in (ells if ells is not None else range(0, k)):
                if 0 <= ell <= k - 1:
                    cells.append((k, d, ell))
    return cells


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def sweep_csv(what: str, ks, ds=None, ells=None, threads: int = 1) -> str:
    if what not in ("g", "conjecture"):
        raise UsageError(f"unknown sweep {what!r}")
    rows = pmap(_sweep_row, sweep_cells(ks, ds, ells), threads)
    return rows_to_csv(rows, G_COLUMNS if what == "g" else CONJ_COLUMNS)


def profile_csv(k: int, d: int, ell: int, points: int = 201) -> str:
    rows = thresholds.profile_curve(k, d, ell, points)
    cols = ["x", "j", "min_profile"] + [f"h_{i}" for i in range(ell + 2)]
    return rows_to_csv(rows, cols)


# --------------------------------------------------------------------------
# commands


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def _load_hg(path: str) -> hgraph.Hypergraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return hgraph.read_hg(text)


def cmd_construct(a) -> int:
    fam = a.family
    sidecar: dict = {"family": fam, "n": a.n, "k": a.k}
    if fam == "space":
        if a.s is None:
            raise UsageError("space needs --s")
        H = constructions.space_barrier(a.n, a.k, a.s)
        sidecar["s"] = a.s
        parts = [list(range(a.s)), list(range(a.s, a.n))]
    elif fam == "divisibility":
        if a.j is None or a.n1 is None:
            raise UsageError("divisibility needs --j and --n1")
        ell = a.n % a.k if a.ell is None else a.ell
        H, P = constructions.divisibility_barrier(a.n, a.k, ell, a.j, a.n1)
        sidecar.update({"ell": ell, "j": a.j, "n1": a.n1})
        parts = [sorted(p) for p in P.parts]
    elif fam == "complete":
        H = hgraph.complete(a.n, a.k)
        parts = [list(range(a.n))]
    else:
        H = hgraph.generate(a.n, a.k, "random", a.p, a.seed)
        sidecar.update({"p": a.p, "seed": a.seed})
        parts = [list(range(a.n))]
    sidecar["edges"] = len(H)
    sidecar["partition"] = [p for p in parts if p]
    comment = " ".join(f"{k}={v}" for k, v in sidecar.items() if k not in ("partition",))
    _write(a.out, hgraph.write_hg(H, comment))
    if a.out and a.out != "-":
        side = a.sidecar or str(Path(a.out).with_suffix(".json"))
        _write(side, dumps(sidecar))
    elif a.json:
        sys.stderr.write(dumps(sidecar))
    return 0


def cmd_degree(a) -> int:
    H = _load_hg(a.file)
    prof = hgraph.min_degree(H, a.d)
    per_set = hgraph.degree_counts(H, a.d)
    counts = Counter(per_set.values())
    zeros = math.comb(H.n, a.d) - len(per_set)
    if zeros:
        counts[0] += zeros
    out = {
        "n": H.n,
        "k": H.k,
        "d": a.d,
        "min_degree": prof.value,
        "witness": list(prof.witness),
        "histogram": {str(v): c for v, c in sorted(counts.items())},
    }
    _emit(a, out, f"delta_{a.d} = {prof.value} (witness {list(prof.witness)})\n")
    return 0


def cmd_threshold(a) -> int:
    res = thresholds.g_optimize(a.k, a.d, a.ell)
    rep = thresholds.g_bounds_check(a.k, a.d, a.ell, res.g)
    out = {
        "k": a.k,
        "d": a.d,
        "ell": a.ell,
        "g": res.g,
        "x_star": res.x_star,
        "j_star": res.j_star,
        "profile": list(res.profile.values),
        "certificate": list(res.certificate),
        "space_term": thresholds.space_term(a.k, a.d),
        "conjectured": thresholds.conjectured_threshold(a.k, a.d, a.ell),
        "governing": thresholds.governing_barrier(a.k, a.d, a.ell),
        "bounds": rep.to_json(),
    }
    if a.finite:
        n, j, n1 = a.finite
        fd = thresholds.finite_min_degree(n, a.k, a.d, a.ell, j, n1)
        out["finite"] = {"n": n, "j": j, "n1": n1, "value": fd.value, "per_t": list(fd.per_t)}
    if a.profile_csv:
        _write(a.profile_csv, profile_csv(a.k, a.d, a.ell, a.points))
    _emit(a, out, f"g({a.k},{a.d},{a.ell}) = {res.g:.6f} at x* = {res.x_star:.6f}, j* = {res.j_star}\n")
    return 0


def cmd_lattice(a) -> int:
    H = _load_hg(a.file)
    try:
        P = lattice.VertexPartition.from_json(H.n, json.loads(Path(a.partition).read_text()))
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad partition file {a.partition}: {exc}") from None
    I = lattice.robust_vectors(H, P, a.tau)
    L = lattice.lattice_basis(I, P.r)
    trans = [
        [i, j]
        for i, j in itertools.combinations(range(1, P.r + 1), 2)
        if lattice.contains(L, lattice.transferral(P.r, i, j))
    ]
    out = {
        "r": P.r,
        "tau": a.tau,
        "robust_vectors": [list(v) for v in I],
        "basis": [list(b) for b in L.basis],
        "transferrals": trans,
        "minimal_t": lattice.minimal_symmetric_t(L) if P.r == 2 else None,
    }
    _emit(a, out, f"robust {out['robust_vectors']}, basis {out['basis']}, transferrals {trans}\n")
    return 0


def cmd_reach(a) -> int:
    H = _load_hg(a.file)
    params = reachability.ReachParams(
        tau1=a.tau1,
        eps_weak=a.eps_weak,
        eps_incidence=a.eps_incidence,
        size_floor=a.size_floor,
        seed=a.seed,
    )
    P = reachability.reach_partition(H, params)
    out = {**P.to_json(), "params": params.to_json()}
    _emit(a, out, f"V0 = {out['V0']}, parts = {out['parts']}\n")
    return 0


def cmd_match(a) -> int:
    H = _load_hg(a.file)
    if H.n % H.k == 0 and a.pipeline != "exact":
        raise UsageError("absorbing pipelines need k not dividing n")
    if a.pipeline == "absorb4":
        if H.k < 6:
            raise UsageError("absorb4 needs k >= 6")
        res = absorbing.npm_via_absorption(H, beta=a.beta, seed=a.seed, residual=a.residual, budget=a.budget)
    elif a.pipeline == "lattice":
        params = absorbing.LatticeParams(residual=a.residual, budget=a.budget, seed=a.seed, alpha=a.alpha)
        res = absorbing.lattice_absorbing_pipeline(H, params)
    else:
        res = absorbing.exact_pipeline(H, budget=a.budget)
    out = res.to_json()
    text = (
        f"success: matching of size {res.size}\n"
        if res.success
        else f"failed at stage {res.stage}: {res.reason}\n"
    )
    _emit(a, out, text)
    return 0 if res.success else 1


def cmd_verify(a) -> int:
    rep = SUITES[a.suite](a)
    _emit(a, rep.to_json(), rep.to_text())
    return rep.exit_status


def cmd_sweep(a) -> int:
    ks = parse_range(a.k)
    ds = parse_range(a.d) if a.d else None
    ells = parse_range(a.ell) if a.ell else None
    _write(a.out, sweep_csv(a.what, ks, ds, ells, a.threads))
    if a.profile_dir:
        Path(a.profile_dir).mkdir(parents=True, exist_ok=True)
        for k, d, ell in sweep_cells(ks, ds, ells):
            _write(str(Path(a.profile_dir) / f"profile_k{k}_d{d}_ell{ell}.csv"), profile_csv(k, d, ell))
    return 0


def _emit(a, obj, text: str) -> None:
    sys.stdout.write(dumps(obj) if a.json else text)


# --------------------------------------------------------------------------
# parser


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="master seed (u64)")
    p.add_argument("--threads", type=int, default=d(1), help="worker processes for independent cases")
    p.add_argument("--json", action="store_true", default=d(False), help="machine-readable JSON output")
    p.add_argument("--budget", type=int, default=d(hgraph.DEFAULT_NODE_BUDGET), help="search-node budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypermatch", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="write a barrier or test hypergraph as .hg")
    p.add_argument("family", choices=["space", "divisibility", "complete", "random"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, help="spine size (space)")
    p.add_argument("--ell", type=int, help="n mod k (divisibility; default derived)")
    p.add_argument("--j", type=int, help="residue (divisibility)")
    p.add_argument("--n1", type=int, help="|V1| (divisibility)")
    p.add_argument("--p", type=float, default=0.5, help="edge probability (random)")
    p.add_argument("--out", help=".hg output path (default stdout)")
    p.add_argument("--sidecar", help="sidecar JSON path (default: .hg path with .json)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("degree", parents=[common], help="minimum d-degree of a .hg file")
    p.add_argument("file")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("threshold", parents=[common], help="g(k,d,ell) with bound checks")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--finite", type=int, nargs=3, metavar=("N", "J", "N1"), help="also report the exact finite degree")
    p.add_argument("--profile-csv", help="write x vs. min-profile plot data")
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("lattice", parents=[common], help="robust edge-lattice of a partitioned .hg")
    p.add_argument("file")
    p.add_argument("--partition", required=True, help='partition JSON {"V0": [...], "parts": [[...], ...]}')
    p.add_argument("--tau", type=int, default=1, help="robustness threshold (edge count)")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("reach", parents=[common], help="reachability partition of a .hg file")
    p.add_argument("file")
    p.add_argument("--tau1", type=int, default=1)
    p.add_argument("--eps-weak", type=float, default=1)
    p.add_argument("--eps-incidence", type=float, default=1)
    p.add_argument("--size-floor", type=int)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("match", parents=[common], help="near perfect matching via a pipeline")
    p.add_argument("file")
    p.add_argument("--pipeline", choices=["absorb4", "lattice", "exact"], default="exact")
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=0.15)
    p.add_argument("--residual", choices=["auto", "exact", "greedy", "none"], default="auto")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--kmax", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--space-nmax", type=int, default=15)
    p.add_argument("--smax", type=int, default=4)
    p.add_argument("--K-exact", dest="K_exact", type=int, default=40)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="CSV table of thresholds over ranges")
    p.add_argument("what", choices=["g", "conjecture"])
    p.add_argument("--k", required=True, help="range, e.g. 4..10")
    p.add_argument("--d", help="range (default 1..k-1)")
    p.add_argument("--ell", help="range (default 0..k-1)")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--profile-dir", help="also write per-cell profile CSVs here")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    if a.threads < 1 or a.budget < 1:
        sys.stderr.write("error: --threads and --budget must be positive\n")
        return EXIT_USAGE
    try:
        return a.func(a)
    except (UsageError, hgraph.HypergraphError, constructions.InadmissibleSpecError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
