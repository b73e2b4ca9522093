"""Swapping (antisorting) heuristic with cycle protection and random restarts.

A column is *violating* when it is not oppositely ordered against the row
sums of the remaining columns. Re-sorting such a column never lowers the
minimal row sum, so every profile the heuristic returns is a certified
lower bound on beta (and, via the complement, an upper bound on gamma).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from typing import Literal

import numpy as np

from .core import (
    BudgetExceeded,
    DimensionError,
    Matrix,
    MixResult,
    Status,
    complement,
    make_result,
    oppositely_ordered,
    profile_from_columns,
)

Mode = Literal["resort", "single"]


@dataclass
class SwapTrace:
    # each step: (column, rows whose entry in that column changed)
    steps: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    min_row_sum_history: list[int] = field(default_factory=list)
    restarts_used: int = 0
    stopped_by: str = ""


def _rest_sums(cols: list[list[int]], sums: list[int], j: int) -> list[int]:
    return [s - v for s, v in zip(sums, cols[j])]


def _violating(cols: list[list[int]], sums: list[int]) -> int | None:
    for j in range(len(cols)):
        if not oppositely_ordered(_rest_sums(cols, sums, j), cols[j]):
            return j
    return None


def find_violating_column(A: Matrix) -> int | None:
    """Smallest column index that is not oppositely ordered against the other columns' row sums."""
    if A.d < 2:
        raise DimensionError("need at least two columns")
    cols = [list(c) for c in A.columns()]
    return _violating(cols, [sum(r) for r in A])


def _resort(x: list[int], y: list[int]) -> list[int]:
    order = sorted(range(len(x)), key=lambda i: (x[i], i))
    new = [0] * len(y)
    for row, v in zip(order, sorted(y, reverse=True)):
        new[row] = v
    return new


def _single_swap(x: list[int], y: list[int]) -> list[int]:
    # i1: the lowest row sum x+y among rows strictly dominated by another row
    m = len(x)
    best = None
    for i1 in sorted(range(m), key=lambda i: (x[i] + y[i], i)):
        partners = [k for k in range(m) if x[i1] < x[k] and y[i1] < y[k]]
        if partners:
            best = (i1, max(partners, key=lambda k: (y[k], -k)))
            break
    assert best is not None
    i1, i2 = best
    new = list(y)
    new[i1], new[i2] = new[i2], new[i1]
    return new


def swap_step(A: Matrix, j: int, mode: Mode = "resort") -> Matrix:
    """Rearrange column ``j`` so it becomes oppositely ordered to the other columns' sums.

    ``mode="single"`` performs one transposition of a strictly comonotone pair instead.
    """
    cols = [list(c) for c in A.columns()]
    sums = [sum(r) for r in A]
    x = _rest_sums(cols, sums, j)
    if oppositely_ordered(x, cols[j]):
        raise ValueError(f"column {j} is already oppositely ordered")
    cols[j] = _resort(x, cols[j]) if mode == "resort" else _single_swap(x, cols[j])
    return Matrix.from_columns(cols, scale=A.scale, shift=A.shift)


def antisort_columns(
    A: Matrix, step_budget: int | None = None, mode: Mode = "resort"
) -> tuple[Matrix, SwapTrace, bool]:
    """Re-sort violating columns until none is left, a state repeats, or the budget runs out.

    Returns the best (largest minimal row sum) matrix seen, the trace, and
    whether the run ended with no violating column.
    """
    m, d = A.shape
    if step_budget is None:
        step_budget = 100 * m * d
    cols = [list(c) for c in A.columns()]
    sums = [sum(r) for r in A]
    trace = SwapTrace(min_row_sum_history=[min(sums)], restarts_used=1)
    best_cols, best_min = [c[:] for c in cols], min(sums)
    seen = {tuple(sorted(A.entries))}
    converged = False
    while True:
        j = _violating(cols, sums) if d >= 2 else None
        if j is None:
            converged = True
            trace.stopped_by = "converged"
            break
        if len(trace.steps) >= step_budget:
            trace.stopped_by = "budget"
            break
        x = _rest_sums(cols, sums, j)
        old = cols[j]
        new = _resort(x, old) if mode == "resort" else _single_swap(x, old)
        cols[j] = new
        sums = [s + b - a for s, a, b in zip(sums, old, new)]
        low = min(sums)
        if low < trace.min_row_sum_history[-1]:
            raise AssertionError("minimal row sum decreased during a swap step")
        trace.steps.append((j, tuple(i for i in range(m) if old[i] != new[i])))
        trace.min_row_sum_history.append(low)
        if low > best_min:
            best_cols, best_min = [c[:] for c in cols], low
        key = tuple(sorted(zip(*cols)))
        if key in seen:
            trace.stopped_by = "cycle"
            break
        seen.add(key)
    if converged:
        best_cols = cols
    return Matrix.from_columns(best_cols, scale=A.scale, shift=A.shift), trace, converged


def _restart(A: Matrix, seed: int, k: int, step_budget: int | None, mode: Mode) -> tuple[int, list[list[int]], bool]:
    rng = np.random.default_rng([seed, k])
    cols = [list(A.column(0))]
    for j in range(1, A.d):
        c = A.column(j)
        cols.append([c[i] for i in rng.permutation(A.m)])
    start = Matrix.from_columns(cols)
    out, _, converged = antisort_columns(start, step_budget, mode)
    return min(sum(r) for r in out), [list(c) for c in out.columns()], converged


def _restart_args(args):
    return _restart(*args)


def randomized_beta(
    A: Matrix,
    restarts: int = 10,
    seed: int = 0,
    *,
    step_budget: int | None = None,
    mode: Mode = "resort",
    workers: int = 1,
) -> MixResult:
    """Best minimal row sum over ``restarts`` randomly permuted starts.

    Restart ``k`` draws its permutations from a generator seeded with
    ``(seed, k)``; ties go to the lowest restart index, so the answer does not
    depend on ``workers``.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    jobs = [(A, seed, k, step_budget, mode) for k in range(restarts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_restart_args, jobs))
    else:
        outcomes = [_restart(*job) for job in jobs]
    best_k = max(range(restarts), key=lambda k: (outcomes[k][0], -k))
    value, cols, _ = outcomes[best_k]
    P = profile_from_columns(A, cols)
    res = make_result(
        A,
        "beta",
        P,
        Status.HEURISTIC_LOWER_BOUND,
        solver="swap",
        restarts=restarts,
        seed=seed,
        best_restart=best_k,
        converged_restarts=sum(1 for o in outcomes if o[2]),
    )
    assert res.value == value
    return res


def randomized_gamma(
    A: Matrix,
    restarts: int = 10,
    seed: int = 0,
    *,
    step_budget: int | None = None,
    mode: Mode = "resort",
    workers: int = 1,
) -> MixResult:
    """Upper bound on gamma: run the beta heuristic on ``l - A`` and map back."""
    C, _ = complement(A)
    res = randomized_beta(C, restarts, seed, step_budget=step_budget, mode=mode, workers=workers)
    return make_result(
        A, "gamma", res.profile, Status.HEURISTIC_UPPER_BOUND, **{**res.meta, "solver": "swap"}
    )


def distinct_rowsum_diagnostic(A: Matrix, budget: int = 200_000) -> bool:
    """Check whether swapping is guaranteed to make strict progress on ``A``.

    Every column must hold ``m`` distinct values, and every submatrix with one
    column removed must have ``m`` distinct row sums under every rearrangement.
    """
    m, d = A.shape
    if m == 1:
        return True
    if any(len(set(c)) < m for c in A.columns()):
        return False
    if d == 1:
        return True
    size = d * math.factorial(m) ** max(d - 2, 0)
    if size > budget:
        raise BudgetExceeded("row-sum diagnostic arrangements", size, budget)
    perms = list(permutations(range(m)))
    for drop in range(d):
        cols = [A.column(j) for j in range(d) if j != drop]
        if not _all_distinct(cols, perms, m):
            return False
    return True


def _all_distinct(cols, perms, m) -> bool:
    def rec(j: int, partial: tuple[int, ...]) -> bool:
        if j == len(cols):
            return len(set(partial)) == m
        return all(
            rec(j + 1, tuple(partial[p[r]] + cols[j][r] for r in range(m)))
            for p in perms
        )

    return rec(1, tuple(cols[0]))
