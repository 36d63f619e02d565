import itertools
import math
import random

import numpy as np

from hypothesis import HealthCheck, settings

from hypermatch.lattice import s_vectors

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def brute_matching_number(n, k, edges):
    """Largest number of pairwise disjoint edges, by trying subsets from the top."""
    edges = [frozenset(e) for e in edges]
    for size in range(n // k, 0, -1):
        for combo in itertools.combinations(edges, size):
            if len(frozenset().union(*combo)) == size * k:
                return size
    return 0


def brute_min_degree(n, k, edges, d):
    sets = [frozenset(e) for e in edges]
    return min(sum(1 for e in sets if set(S) <= e) for S in itertools.combinations(range(n), d))


def binom_class_sum(K, m, i, x):
    return sum(math.comb(K, j) * x**j * (1 - x) ** (K - j) for j in range(K + 1) if j % m == i % m)


class Enumerated:
    """Every integer combination of ``gens`` with coefficients in [-R, R]."""

    def __init__(self, gens, R):
        G = np.array(gens, dtype=np.int64)
        grid = np.array(list(itertools.product(range(-R, R + 1), repeat=len(gens))), dtype=np.int64)
        self.codes = set(self._code(grid @ G).tolist())

    @staticmethod
    def _code(pts):
        # Coordinates stay far below 2**15 in magnitude at these sizes.
        out = np.zeros(len(pts), dtype=np.int64)
        for c in range(pts.shape[1]):
            out = out * (1 << 16) + (pts[:, c] + (1 << 15))
        return out

    def __contains__(self, v):
        return int(self._code(np.array([v], dtype=np.int64))[0]) in self.codes


class Oracle:
    # Radius 4 first; a few lattices need larger coefficients (e.g. 9 for
    # (3,0,-3) over {(2,0,1),(1,1,1),(0,3,0)}), so escalate before declaring "no".
    def __init__(self, gens):
        self.gens = gens
        self.small = Enumerated(gens, 4)
        self._large = None

    def __contains__(self, v):
        if tuple(v) in self.small:
            return True
        if self._large is None:
            self._large = Enumerated(self.gens, 12)
        return tuple(v) in self._large


def brute_member(gens, v, R=4):
    if not gens:
        return not any(v)
    return tuple(v) in Enumerated(gens, R)


def random_generator_sets(count, seed=11):
    rnd = random.Random(seed)
    out = []
    while len(out) < count:
        r = rnd.randint(1, 3)
        k = rnd.randint(2, 4)
        pool = s_vectors(k, r)
        out.append((r, rnd.sample(pool, min(len(pool), rnd.randint(1, 4)))))
    return out


# One line per acceptance criterion, printed in the terminal summary.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
