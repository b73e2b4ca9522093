"""Name-based solver dispatch used by the CLI and the VaR pipeline."""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .approx import fixed_valueset_gamma, ptas_gamma, same_multiset_gamma, two_approx_gamma_d3
from .core import BudgetExceeded, Matrix, MixResult, Status, complement, make_result, target_row_sum
from .exact import (
    DEFAULT_BRUTE_BUDGET,
    DEFAULT_STATE_BUDGET,
    NotMixable,
    brute_force_beta,
    brute_force_gamma,
    brute_force_size,
    dp_gamma,
    gamma_two_columns,
    two_value_gamma,
    zero_one_mixability,
)
from .swapping import randomized_beta, randomized_gamma

SOLVERS = ("auto", "brute", "dp", "swap", "2approx", "ptas", "multiset", "valueset")
DP_ROW_CAP = 6


def _auto_gamma(A: Matrix, opts: dict[str, Any]) -> MixResult:
    """Cheapest applicable exact method; refuses rather than falling back to a heuristic."""
    if len(A.values()) <= 2:
        return two_value_gamma(A)
    if A.d == 2:
        return gamma_two_columns(A)
    if A.m == 1 or A.d == 1:
        return brute_force_gamma(A)
    tried = []
    if A.m <= opts.get("dp_row_cap", DP_ROW_CAP):
        try:
            return dp_gamma(A, opts.get("budget_states", DEFAULT_STATE_BUDGET))
        except BudgetExceeded as exc:
            tried.append(str(exc))
    budget = opts.get("budget_steps", DEFAULT_BRUTE_BUDGET)
    if brute_force_size(A.m, A.d) <= budget:
        return brute_force_gamma(A, budget)
    tried.append(f"brute force: needs {brute_force_size(A.m, A.d)} profiles > budget {budget}")
    raise BudgetExceeded(
        "no exact solver fits the budgets (" + "; ".join(tried) + "); try --solver swap or ptas", None, budget
    )


def gamma(A: Matrix, solver: str = "auto", **opts: Any) -> MixResult:
    if solver == "auto":
        return _auto_gamma(A, opts)
    if solver == "brute":
        return brute_force_gamma(A, opts.get("budget_steps", DEFAULT_BRUTE_BUDGET))
    if solver == "dp":
        return dp_gamma(A, opts.get("budget_states", DEFAULT_STATE_BUDGET))
    if solver == "swap":
        return randomized_gamma(
            A, opts.get("restarts", 10), opts.get("seed", 0),
            step_budget=opts.get("budget_steps"), workers=opts.get("workers", 1),
        )
    if solver == "2approx":
        return two_approx_gamma_d3(A)
    if solver == "ptas":
        return ptas_gamma(A, opts.get("epsilon", Fraction(1, 2)))
    if solver == "multiset":
        return same_multiset_gamma(A)
    if solver == "valueset":
        return fixed_valueset_gamma(A)
    raise ValueError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")


def beta(A: Matrix, solver: str = "auto", **opts: Any) -> MixResult:
    """Beta of ``A`` as ``d*l - gamma(l - A)``, with ``l`` the largest entry.

    Heuristic and ratio statuses are mirrored: an upper bound on gamma of the
    complement is a lower bound on beta.
    """
    if solver == "brute":
        return brute_force_beta(A, opts.get("budget_steps", DEFAULT_BRUTE_BUDGET))
    if solver == "swap":
        return randomized_beta(
            A, opts.get("restarts", 10), opts.get("seed", 0),
            step_budget=opts.get("budget_steps"), workers=opts.get("workers", 1),
        )
    C, _ = complement(A)
    res = gamma(C, solver, **opts)
    status = {Status.HEURISTIC_UPPER_BOUND: Status.HEURISTIC_LOWER_BOUND}.get(res.status, res.status)
    meta = dict(res.meta)
    if res.status is Status.RATIO_BOUND:
        meta["ratio_caveat"] = "ratio applies to gamma of the complement, not to beta"
    return make_result(A, "beta", res.profile, status, res.ratio, **meta)


def check(A: Matrix, **opts: Any) -> tuple[bool, MixResult | NotMixable]:
    """Decide complete mixability with an exact method.

    Returns the decision and either the exact gamma result (whose profile
    balances the rows when mixable) or a divisibility witness.
    """
    if all(v in (0, 1) for row in A for v in row):
        res = zero_one_mixability(A)
        return bool(res), res
    target = target_row_sum(A)
    if target is None:
        return False, NotMixable(A.total(), A.m)
    res = _auto_gamma(A, opts)
    return res.value == target, res
