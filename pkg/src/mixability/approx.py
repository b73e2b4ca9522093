"""Bottleneck assignment, the d = 3 two-approximation, and the restricted-domain
exact solvers that back the grid-rounding approximation scheme."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .core import (
    BudgetExceeded,
    DimensionError,
    Matrix,
    MixResult,
    Status,
    make_result,
    profile_from_columns,
    shift_normalize,
)
from .exact import count_arrangements, multiset_permutations

DEFAULT_PATTERN_BUDGET = 1_000_000
DEFAULT_ARRANGEMENT_BUDGET = 50_000


def _perfect_matching(allowed: np.ndarray) -> np.ndarray | None:
    match = maximum_bipartite_matching(csr_matrix(allowed.astype(np.int8)), perm_type="column")
    return None if (match < 0).any() else match


def bottleneck_assignment_2d(cost: Sequence[Sequence]) -> tuple[list[int], object]:
    """Perfect matching minimising the largest used cost.

    Binary search over the sorted distinct costs; each probe asks for a
    perfect matching using only entries at or below the threshold. Returns
    ``(assign, value)`` with row ``i`` matched to column ``assign[i]``.
    """
    m = len(cost)
    if m == 0 or any(len(row) != m for row in cost):
        raise DimensionError("cost table must be square and non-empty")
    levels = sorted({c for row in cost for c in row})
    lo, hi = 0, len(levels) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        t = levels[mid]
        allowed = np.array([[c <= t for c in row] for row in cost])
        match = _perfect_matching(allowed)
        if match is None:
            lo = mid + 1
        else:
            best = (mid, match)
            hi = mid - 1
    assert best is not None
    mid, match = best
    return [int(j) for j in match], levels[mid]


@dataclass(frozen=True)
class TripartiteDistance:
    """Entries of an m x 3 matrix as points ``l = 3*row + col``.

    Classes R, G, B are the points of columns 0, 1, 2. The distance
    ``(entry(a) + entry(b)) / 2`` is symmetric and, for nonnegative entries,
    obeys the triangle inequality; it is only used across different classes.
    """

    matrix: Matrix

    def __post_init__(self):
        if self.matrix.d != 3:
            raise DimensionError("needs exactly 3 columns")

    def entry(self, l: int) -> int:
        return self.matrix[l // 3][l % 3]

    def members(self, col: int) -> list[int]:
        return [3 * r + col for r in range(self.matrix.m)]

    def dist(self, a: int, b: int) -> Fraction:
        return Fraction(self.entry(a) + self.entry(b), 2)

    def triple_cost(self, i: int, j: int, k: int) -> Fraction:
        return self.dist(i, j) + self.dist(j, k) + self.dist(k, i)

    def check_triangle(self, points: Iterable[int] | None = None) -> bool:
        pts = list(range(3 * self.matrix.m)) if points is None else list(points)
        for a, b, c in product(pts, repeat=3):
            if self.dist(a, c) > self.dist(a, b) + self.dist(b, c):
                return False
            if self.dist(a, b) != self.dist(b, a):
                return False
        return True


ORDERS = {"RG": (0, 1, 2), "RB": (0, 2, 1), "GB": (1, 2, 0)}


def _two_stage(D: TripartiteDistance, order: tuple[int, int, int]) -> list[list[int]]:
    first, second, third = order
    m = D.matrix.m
    P, Q, S = D.members(first), D.members(second), D.members(third)
    pair, _ = bottleneck_assignment_2d([[D.dist(p, q) for q in Q] for p in P])
    cost = [[D.entry(P[i]) + D.entry(Q[pair[i]]) + D.entry(s) for s in S] for i in range(m)]
    assign, _ = bottleneck_assignment_2d(cost)
    cols: list[list[int]] = [[0] * m for _ in range(3)]
    for i in range(m):
        cols[first][i] = D.entry(P[i])
        cols[second][i] = D.entry(Q[pair[i]])
        cols[third][i] = D.entry(S[assign[i]])
    return cols


def two_approx_gamma_d3(A: Matrix, orders: Sequence[str] = ("RG",)) -> MixResult:
    """Sequential bottleneck matching for three columns; within a factor 2 of gamma.

    Columns ``first`` and ``second`` are matched under the half-sum distance,
    then the matched pairs are matched to the third column under the true
    triple cost. With several ``orders`` the best outcome is kept.
    """
    if A.d != 3:
        raise DimensionError(f"two_approx_gamma_d3 needs d = 3, got {A.d}")
    B, mu = shift_normalize(A)
    D = TripartiteDistance(B)
    best = None
    for name in orders:
        cols = _two_stage(D, ORDERS[name])
        res = make_result(A, "gamma", profile_from_columns(B, cols), Status.RATIO_BOUND, Fraction(2))
        if best is None or res.value < best[0].value:
            best = (res, name)
    res, name = best
    return make_result(
        A, "gamma", res.profile, Status.RATIO_BOUND, Fraction(2), solver="2approx", order=name,
        **({"ratio_caveat": "ratio holds for the shifted instance"} if mu > 0 else {}),
    )


def _same_multiset(A: Matrix) -> list[int]:
    base = sorted(A.column(0))
    for j in range(1, A.d):
        if sorted(A.column(j)) != base:
            raise ValueError(f"column {j} differs from column 0 as a multiset")
    return base


def same_multiset_gamma(A: Matrix, arrangement_budget: int = DEFAULT_ARRANGEMENT_BUDGET) -> MixResult:
    """Exact gamma when every column holds the same multiset.

    Chooses how many columns use each distinct arrangement of the multiset
    (column 0 pinned to the sorted one) by branch and bound; the bound is the
    current row maximum plus the smallest value for each column still open,
    and the search stops once it meets ``ceil(d * sum / m)``.
    """
    base = _same_multiset(A)
    m, d = A.shape
    k = count_arrangements(base)
    if k > arrangement_budget:
        raise BudgetExceeded("multiset arrangements", k, arrangement_budget)
    arrs = list(multiset_permutations(base))
    vmin = base[0]
    floor = -(-d * sum(base) // m)
    best: list = [math.inf, None]
    chosen: list[int] = []

    def dfs(start: int, left: int, partial: tuple[int, ...]) -> bool:
        if left == 0:
            v = max(partial)
            if v < best[0]:
                best[0], best[1] = v, tuple(chosen)
            return best[0] <= floor
        slack = (left - 1) * vmin
        for l in range(start, k):
            nxt = tuple(a + b for a, b in zip(partial, arrs[l]))
            if max(nxt) + slack >= best[0]:
                continue
            chosen.append(l)
            done = dfs(l, left - 1, nxt)
            chosen.pop()
            if done:
                return True
        return False

    dfs(0, d - 1, arrs[0])
    cols = [arrs[0]] + [arrs[l] for l in best[1]]
    P = profile_from_columns(A, cols)
    counts = Counter(cols)
    return make_result(A, "gamma", P, Status.EXACT, solver="multiset", arrangements_used=len(counts))


@dataclass
class PatternModel:
    """Count model for matrices over a fixed value set.

    ``occurrences[i][j]`` is how often ``values[i]`` appears in column ``j``.
    A row pattern is a tuple of value indices, one per column.
    """

    values: tuple[int, ...]
    occurrences: tuple[tuple[int, ...], ...]
    m: int

    @classmethod
    def of(cls, A: Matrix, values: Iterable[int] | None = None) -> PatternModel:
        vals = tuple(sorted(set(A.values() if values is None else values)))
        index = {v: i for i, v in enumerate(vals)}
        occ = [[0] * A.d for _ in vals]
        for row in A:
            for j, v in enumerate(row):
                if v not in index:
                    raise ValueError(f"entry {v} is not in the value set")
                occ[index[v]][j] += 1
        return cls(vals, tuple(map(tuple, occ)), A.m)

    @property
    def s(self) -> int:
        return len(self.values)

    @property
    def d(self) -> int:
        return len(self.occurrences[0])

    def patterns(self) -> Iterable[tuple[int, ...]]:
        return product(range(self.s), repeat=self.d)

    def pattern_sum(self, pattern: Sequence[int]) -> int:
        return sum(self.values[i] for i in pattern)

    def indicator(self, pattern: Sequence[int], i: int, j: int) -> int:
        return int(pattern[j] == i)

    def is_reassembly(self, counts: dict[tuple[int, ...], int]) -> bool:
        if any(q < 0 for q in counts.values()) or sum(counts.values()) != self.m:
            return False
        occ = [[0] * self.d for _ in range(self.s)]
        for p, q in counts.items():
            for j, i in enumerate(p):
                occ[i][j] += q
        return all(tuple(row) == want for row, want in zip(occ, self.occurrences))

    def candidate_sums(self) -> list[int]:
        """Sorted distinct sums of patterns built only from values present per column."""
        sums = {0}
        for j in range(self.d):
            present = [self.values[i] for i in range(self.s) if self.occurrences[i][j]]
            sums = {a + b for a in sums for b in present}
        return sorted(sums)

    def feasible(self, gamma: int) -> dict[tuple[int, ...], int] | None:
        """Pattern counts reassembling the matrix with every row sum at most ``gamma``.

        Rows are built one at a time; the next row always takes the smallest
        value left in column 0 and the remaining columns are tried from the
        largest value down. Dead count states are memoised.
        """
        s, d, vals = self.s, self.d, self.values
        start = tuple(tuple(self.occurrences[i][j] for i in range(s)) for j in range(d))
        total = sum(vals[i] * self.occurrences[i][j] for i in range(s) for j in range(d))
        if total > gamma * self.m:
            return None
        dead: set = set()
        rows: list[tuple[int, ...]] = []

        def dfs(state, left: int, remaining: int) -> bool:
            if left == 0:
                return True
            if state in dead or remaining > gamma * left:
                return False
            mins = []
            spread = 0
            for col in state:
                lo = 0
                while not col[lo]:
                    lo += 1
                hi = s - 1
                while not col[hi]:
                    hi -= 1
                mins.append(vals[lo])
                spread = max(spread, vals[hi] - vals[lo])
            # suffix[j]: cheapest completion of columns j..d-1
            suffix = [0] * (d + 1)
            for j in range(d - 1, -1, -1):
                suffix[j] = suffix[j + 1] + mins[j]
            if suffix[0] + spread > gamma:
                dead.add(state)
                return False
            first = state[0].index(next(n for n in state[0] if n))
            pattern = [first]

            def choose(j: int, partial: int) -> bool:
                if j == d:
                    new = tuple(col[:p] + (col[p] - 1,) + col[p + 1:] for col, p in zip(state, pattern))
                    rows.append(tuple(pattern))
                    if dfs(new, left - 1, remaining - partial):
                        return True
                    rows.pop()
                    return False
                rest = suffix[j + 1]
                col = state[j]
                for i in range(s - 1, -1, -1):
                    if col[i] and partial + vals[i] + rest <= gamma:
                        pattern.append(i)
                        if choose(j + 1, partial + vals[i]):
                            return True
                        pattern.pop()
                return False

            if choose(1, vals[first]):
                return True
            dead.add(state)
            return False

        if not dfs(start, self.m, total):
            return None
        return dict(Counter(rows))


def fixed_valueset_gamma(
    A: Matrix, values: Iterable[int] | None = None, pattern_budget: int = DEFAULT_PATTERN_BUDGET
) -> MixResult:
    """Exact gamma for matrices over a small value set and few columns.

    Binary search over candidate pattern sums; each probe is an integer
    feasibility question about pattern counts.
    """
    model = PatternModel.of(A, values)
    if model.s**model.d > pattern_budget:
        raise BudgetExceeded("pattern universe", model.s**model.d, pattern_budget)
    cands = model.candidate_sums()
    floor = -(-A.total() // A.m)
    ceiling = max(sum(r) for r in A)
    cands = [g for g in cands if floor <= g <= ceiling]
    # the average bound is often tight, so try it before bisecting
    best = model.feasible(cands[0])
    lo, hi = (1, len(cands) - 1) if best is None else (0, -1)
    while lo <= hi:
        mid = (lo + hi) // 2
        sol = model.feasible(cands[mid])
        if sol is None:
            lo = mid + 1
        else:
            best, hi = sol, mid - 1
    # the input itself is a witness for the largest candidate
    assert best is not None
    assert model.is_reassembly(best)
    rows = [[model.values[i] for i in p] for p, q in sorted(best.items()) for _ in range(q)]
    P = profile_from_columns(A, [list(c) for c in zip(*rows)])
    return make_result(A, "gamma", P, Status.EXACT, solver="valueset", patterns_used=len(best))


def ptas_gamma(A: Matrix, epsilon: Fraction | int | str) -> MixResult:
    """(1 + epsilon)-approximation of gamma by rounding entries up to a grid.

    Grid step is ``epsilon * a / d`` with ``a`` the largest (shifted) entry;
    the rounded instance has at most ``ceil(d / epsilon) + 1`` values and is
    solved exactly. The reported value is the true max row sum of ``A`` under
    the profile found, which lies between gamma and the rounded optimum.
    """
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    B, mu = shift_normalize(A)
    astar = B.max_entry()
    meta = {"solver": "ptas", "epsilon": str(eps)}
    if mu > 0:
        meta["ratio_caveat"] = "input had negative entries; ratio holds for the shifted instance"
    if astar == 0:
        return make_result(A, "gamma", fixed_valueset_gamma(B).profile, Status.RATIO_BOUND, 1 + eps, **meta)
    step = eps * astar / B.d
    grid = Matrix.of([[math.ceil(v / step) for v in row] for row in B])
    assert grid.max_entry() <= math.ceil(B.d / eps)
    res = fixed_valueset_gamma(grid)
    meta["rounded_value"] = str(res.value * step - B.d * mu)
    return make_result(A, "gamma", res.profile, Status.RATIO_BOUND, 1 + eps, **meta)
