"""Exact solvers: enumeration, the fixed-row-count DP, the 0/1 balancing
algorithm and its two-value extension, and the two-column sort."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterator, Sequence

from .core import (
    BudgetExceeded,
    DimensionError,
    Matrix,
    MixResult,
    PermutationProfile,
    Status,
    complement,
    make_result,
    profile_from_columns,
    shift_normalize,
    target_row_sum,
)

DEFAULT_BRUTE_BUDGET = 2_000_000
DEFAULT_STATE_BUDGET = 1_000_000


def brute_force_size(m: int, d: int) -> int:
    """Number of profiles enumerated once column 0 is pinned to the identity."""
    return math.factorial(m) ** (d - 1)


def _min_max_search(cols: list[tuple[int, ...]], m: int) -> tuple[int, tuple[int, ...]]:
    """Minimise the max row sum over all rearrangements of columns 1..d-1.

    Profiles are visited in lexicographic order and only strict improvements
    are kept, so the returned profile is the lexicographically smallest optimum.
    Pruning uses ``partial[i] + sum(min of later columns)`` as a lower bound on
    the final row ``i``.
    """
    d = len(cols)
    perms = list(permutations(range(m)))
    placed = []
    for j in range(d):
        opts = []
        for p in perms:
            new = [0] * m
            for r in range(m):
                new[p[r]] = cols[j][r]
            opts.append(tuple(new))
        placed.append(opts)
    rest_min = [0] * (d + 1)
    for j in range(d - 1, -1, -1):
        rest_min[j] = rest_min[j + 1] + min(cols[j])
    floor = -(-sum(map(sum, cols)) // m)

    best = [math.inf, ()]
    choice = [0] * d

    def dfs(j: int, partial: tuple[int, ...]) -> bool:
        if j == d:
            value = max(partial)
            if value < best[0]:
                best[0] = value
                best[1] = tuple(choice[1:])
            return best[0] <= floor
        slack = rest_min[j + 1]
        for k, col in enumerate(placed[j]):
            nxt = tuple(a + b for a, b in zip(partial, col))
            if max(nxt) + slack >= best[0]:
                continue
            choice[j] = k
            if dfs(j + 1, nxt):
                return True
        return False

    dfs(1, cols[0])
    return best[0], tuple(perms[k] for k in best[1])


def _brute(A: Matrix, objective: str, budget: int) -> MixResult:
    m, d = A.shape
    size = brute_force_size(m, d)
    if size > budget:
        raise BudgetExceeded("brute force profiles", size, budget)
    sign = 1 if objective == "gamma" else -1
    cols = [tuple(sign * v for v in c) for c in A.columns()]
    _, rest = _min_max_search(cols, m)
    P = PermutationProfile((tuple(range(m)),) + rest)
    return make_result(A, objective, P, Status.EXACT, solver="brute")


def brute_force_gamma(A: Matrix, budget: int = DEFAULT_BRUTE_BUDGET) -> MixResult:
    """Exact minimal maximum row sum by pruned enumeration of all profiles."""
    return _brute(A, "gamma", budget)


def brute_force_beta(A: Matrix, budget: int = DEFAULT_BRUTE_BUDGET) -> MixResult:
    """Exact maximal minimum row sum by pruned enumeration of all profiles."""
    return _brute(A, "beta", budget)


def multiset_permutations(values: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Distinct orderings of a multiset in lexicographic order."""
    a = sorted(values)
    n = len(a)
    while True:
        yield tuple(a)
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        k = n - 1
        while a[k] <= a[i]:
            k -= 1
        a[i], a[k] = a[k], a[i]
        a[i + 1 :] = reversed(a[i + 1 :])


def count_arrangements(values: Sequence[int]) -> int:
    n = math.factorial(len(values))
    for v in set(values):
        n //= math.factorial(values.count(v))
    return n


@dataclass
class DpState:
    partial_sums: tuple[int, ...]
    columns_consumed: int

    def __post_init__(self):
        if list(self.partial_sums) != sorted(self.partial_sums):
            raise ValueError("partial sums must be sorted")


@dataclass
class DpTable:
    """Reachable sorted partial-row-sum vectors, one layer per column.

    ``layers[j]`` maps each state after columns 0..j to the (predecessor,
    arrangement) that first reached it; layer 0 holds the sorted column 0.
    An arrangement lists the column values given to the predecessor's sorted
    slots. When ``closed_last`` is set, the last layer only holds the
    countermonotone successor of each predecessor, which is all gamma needs.
    """

    matrix: Matrix
    layers: list[dict] = field(default_factory=list)
    closed_last: bool = False

    @property
    def final_states(self) -> list[tuple[int, ...]]:
        return sorted(self.layers[-1])

    def states(self, j: int) -> list[DpState]:
        return [DpState(s, j + 1) for s in sorted(self.layers[j])]

    def realize(self, state: tuple[int, ...], j: int | None = None) -> list[tuple[int, ...]]:
        """Columns 0..j, rearranged so their row sums sort to ``state``."""
        if j is None:
            j = len(self.layers) - 1
        arrangements = []
        s = state
        for layer in range(j, 0, -1):
            prev, arr = self.layers[layer][s]
            arrangements.append(arr)
            s = prev
        arrangements.reverse()

        A = self.matrix
        first = sorted(A.column(0))
        columns = [first]
        partial = list(first)
        for arr in arrangements:
            order = sorted(range(A.m), key=lambda i: (partial[i], i))
            col = [0] * A.m
            for slot, row in enumerate(order):
                col[row] = arr[slot]
                partial[row] += arr[slot]
            columns.append(col)
        assert tuple(sorted(partial)) == state
        return [tuple(c) for c in columns]


def dp_successors(state: Sequence[int], column: Sequence[int], budget: int | None = None) -> dict:
    """Distinct sorted successors of ``state`` when ``column`` is added in any order.

    Slots are filled left to right and partial assignments that leave the same
    remaining values and the same multiset of new sums are merged. Maps each
    successor to the lexicographically smallest arrangement reaching it.
    """
    vals = sorted(set(column))
    level: dict = {(tuple(column.count(v) for v in vals), ()): ()}
    for slot, base in enumerate(state):
        nxt: dict = {}
        for (rem, partial), arr in level.items():
            for vi, v in enumerate(vals):
                if rem[vi]:
                    key = (
                        rem[:vi] + (rem[vi] - 1,) + rem[vi + 1 :],
                        tuple(sorted(partial + (base + v,))),
                    )
                    if key not in nxt:
                        nxt[key] = arr + (v,)
        if budget is not None and len(nxt) > budget:
            raise BudgetExceeded("dp transition frontier", None, budget)
        level = nxt
    return {partial: arr for (_, partial), arr in level.items()}


def dp_table(A: Matrix, state_budget: int = DEFAULT_STATE_BUDGET, close_last: bool = False) -> DpTable:
    m, d = A.shape
    table = DpTable(A, closed_last=close_last and d >= 2)
    table.layers.append({tuple(sorted(A.column(0))): None})
    for j in range(1, d):
        column = list(A.column(j))
        nxt: dict = {}
        if table.closed_last and j == d - 1:
            desc = tuple(sorted(column, reverse=True))
            for state in sorted(table.layers[-1]):
                new = tuple(sorted(s + a for s, a in zip(state, desc)))
                nxt.setdefault(new, (state, desc))
        else:
            for state in sorted(table.layers[-1]):
                for new, arr in dp_successors(state, column, state_budget).items():
                    if new not in nxt:
                        nxt[new] = (state, arr)
                if len(nxt) > state_budget:
                    raise BudgetExceeded(f"dp states at column {j}", None, state_budget)
        table.layers.append(nxt)
    return table


def dp_gamma(A: Matrix, state_budget: int = DEFAULT_STATE_BUDGET) -> MixResult:
    """Exact gamma for small row counts via DP over sorted partial row sums.

    The last column is paired countermonotonically with each reachable state,
    which minimises that state's maximum, so it is not enumerated.
    """
    B, _ = shift_normalize(A)
    table = dp_table(B, state_budget, close_last=True)
    best = min(table.final_states, key=lambda s: (s[-1], s))
    P = profile_from_columns(B, table.realize(best))
    return make_result(A, "gamma", P, Status.EXACT, solver="dp", states=sum(map(len, table.layers)))


def dp_beta(A: Matrix, state_budget: int = DEFAULT_STATE_BUDGET) -> MixResult:
    C, _ = complement(A)
    res = dp_gamma(C, state_budget)
    return make_result(A, "beta", res.profile, Status.EXACT, solver="dp")


def dp_is_mixable(A: Matrix, state_budget: int = DEFAULT_STATE_BUDGET) -> bool:
    """Whether the constant vector of the target row sum is reachable."""
    r = target_row_sum(A)
    return r is not None and dp_gamma(A, state_budget).value == r


@dataclass
class DefectLedger:
    """Per-row defects ``target - row_sum`` and their absolute total."""

    target: int
    defects: list[int]

    @classmethod
    def of(cls, target: int, sums: Sequence[int]) -> DefectLedger:
        return cls(target, [target - s for s in sums])

    @property
    def total_defect(self) -> int:
        return sum(abs(x) for x in self.defects)


@dataclass(frozen=True)
class NotMixable:
    """Divisibility witness: ``m`` does not divide the grand total."""

    total: int
    m: int

    def __bool__(self) -> bool:
        return False


def _balance_binary(columns: list[list[int]], target: int) -> tuple[list[list[int]], int]:
    """Swap entries of columns 1.. so every row has ``target`` ones.

    Rows with surplus and a 1 in the current column hand it to rows with a
    deficit and a 0 there, most extreme defects first (ties: lower row index).
    Returns the rearranged columns and the number of elementary steps taken.
    """
    m = len(columns[0])
    sums = [sum(c[i] for c in columns) for i in range(m)]
    ledger = DefectLedger.of(target, sums)
    delta = ledger.defects
    steps = 0
    for j in range(1, len(columns)):
        col = columns[j]
        surplus = [i for i in range(m) if delta[i] < 0 and col[i] == 1]
        deficit = [i for i in range(m) if delta[i] > 0 and col[i] == 0]
        steps += m
        t = min(len(surplus), len(deficit))
        if t == 0:
            continue
        surplus.sort(key=lambda i: (delta[i], i))
        deficit.sort(key=lambda i: (-delta[i], i))
        before = ledger.total_defect
        for a, b in zip(surplus[:t], deficit[:t]):
            col[a], col[b] = 0, 1
            delta[a] += 1
            delta[b] -= 1
            steps += 1
        assert ledger.total_defect == before - 2 * t
    return columns, steps


def zero_one_mixability(A: Matrix) -> MixResult | NotMixable:
    """Decide complete mixability of a 0/1 matrix in O(m*d).

    Mixable exactly when ``m`` divides the number of ones; the returned
    profile then gives every row the same count.
    """
    if any(v not in (0, 1) for row in A for v in row):
        raise ValueError("zero_one_mixability needs entries in {0, 1}")
    total = A.total()
    if total % A.m:
        return NotMixable(total, A.m)
    columns, steps = _balance_binary([list(c) for c in A.columns()], total // A.m)
    P = profile_from_columns(A, columns)
    res = make_result(A, "mixability", P, Status.EXACT, solver="zero_one", steps=steps)
    assert res.balanced
    return res


def two_value_gamma(A: Matrix) -> MixResult:
    """Exact gamma for matrices with at most two distinct values.

    Entries map to bits; ones are spread so every row holds ceil(T/m) or
    floor(T/m) of them. A fixed virtual column with the missing ones makes the
    total divisible, so the 0/1 balancing routine does the work.
    """
    vals = A.values()
    if len(vals) > 2:
        raise ValueError(f"two_value_gamma needs at most two distinct values, got {len(vals)}")
    m, d = A.shape
    if len(vals) == 1:
        return make_result(A, "gamma", PermutationProfile.identity(m, d), Status.EXACT, solver="two_value", mixable=True)
    lo = vals[0]
    bits = [[1 if v != lo else 0 for v in c] for c in A.columns()]
    t = sum(map(sum, bits))
    per_row = -(-t // m)
    pad = m * per_row - t
    virtual = [1] * pad + [0] * (m - pad)
    columns, steps = _balance_binary([virtual] + bits, per_row)
    hi = vals[1]
    new_cols = [[hi if b else lo for b in c] for c in columns[1:]]
    P = profile_from_columns(A, new_cols)
    res = make_result(A, "gamma", P, Status.EXACT, solver="two_value", steps=steps, mixable=pad == 0)
    assert res.value == d * lo + (hi - lo) * per_row
    return res


def gamma_two_columns(A: Matrix) -> MixResult:
    """Exact gamma for d = 2: pair the smallest of one column with the largest of the other."""
    if A.d != 2:
        raise DimensionError(f"gamma_two_columns needs d = 2, got {A.d}")
    a = sorted(A.column(0))
    b = sorted(A.column(1), reverse=True)
    P = profile_from_columns(A, [a, b])
    return make_result(A, "gamma", P, Status.EXACT, solver="two_column")


def beta_two_columns(A: Matrix) -> MixResult:
    C, _ = complement(A)
    return make_result(A, "beta", gamma_two_columns(C).profile, Status.EXACT, solver="two_column")
