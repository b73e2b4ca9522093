"""Quantile matrices and dependence-uncertainty bounds on the alpha-quantile of a sum.

Each marginal is given by its quantiles ``q_r = F^-1(r/N)``, r = 0..N. The
upper bound on the quantile of the sum is beta of the matrix built from the
upper-tail rows (r/N >= alpha); the lower bound is gamma of the matrix built
from the lower-tail rows (r/N <= alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Literal, Sequence

from . import solve
from .core import Matrix, MixResult, Status

# which quantile indices may feed the rows: 1..N (the dominated step CDF),
# 0..N-1 (the dominating one), or all of 0..N
Grid = Literal["drop_first", "drop_last", "full"]

MAPPING_NOTE = (
    "upper = beta of the upper-tail quantile matrix, lower = gamma of the "
    "lower-tail quantile matrix"
)


@dataclass(frozen=True)
class DiscreteMarginal:
    """Quantiles ``q_0 <= ... <= q_N`` of one marginal, as exact rationals."""

    quantiles: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.quantiles) < 2:
            raise ValueError("need N >= 1, i.e. at least two quantiles")
        if any(b < a for a, b in zip(self.quantiles, self.quantiles[1:])):
            raise ValueError("quantiles must be non-decreasing")

    @property
    def N(self) -> int:
        return len(self.quantiles) - 1

    def _steps(self, lo: int, hi: int, x) -> Fraction:
        x = Fraction(x)
        return Fraction(sum(1 for q in self.quantiles[lo:hi] if x >= q), self.N)

    def upper_cdf(self, x) -> Fraction:
        """Step function with mass 1/N at q_0..q_{N-1}; dominates the true CDF."""
        return self._steps(0, self.N, x)

    def lower_cdf(self, x) -> Fraction:
        """Step function with mass 1/N at q_1..q_N; dominated by the true CDF."""
        return self._steps(1, self.N + 1, x)


def discretize_marginal(source: Sequence | Callable[[Fraction], Any], N: int | None = None) -> DiscreteMarginal:
    """Build a marginal from N+1 quantile values or from a quantile function.

    A callable is evaluated at ``r/N`` (as a Fraction) for r = 0..N.
    """
    if callable(source):
        if N is None or N < 1:
            raise ValueError("N >= 1 is required with a quantile function")
        qs = [source(Fraction(r, N)) for r in range(N + 1)]
    else:
        qs = list(source)
        if N is not None and len(qs) != N + 1:
            raise ValueError(f"expected {N + 1} quantiles, got {len(qs)}")
    return DiscreteMarginal(tuple(Fraction(q) for q in qs))


def quantile_matrix(marginals: Sequence[DiscreteMarginal], r_lo: int = 0, r_hi: int | None = None) -> Matrix:
    """Rows r_lo..r_hi (inclusive), column j holding the quantiles of marginal j."""
    if not marginals:
        raise ValueError("need at least one marginal")
    N = marginals[0].N
    if any(mg.N != N for mg in marginals):
        raise ValueError("marginals have different N")
    if r_hi is None:
        r_hi = N
    if not 0 <= r_lo <= r_hi <= N:
        raise ValueError(f"row range [{r_lo}, {r_hi}] outside 0..{N}")
    return Matrix.from_rationals([mg.quantiles[r] for mg in marginals] for r in range(r_lo, r_hi + 1))


def tail_rows(N: int, alpha: Fraction, side: str, grid: Grid) -> tuple[int, int]:
    """Inclusive row range for one side; closed comparisons on r/N against alpha."""
    lo, hi = {"drop_first": (1, N), "drop_last": (0, N - 1), "full": (0, N)}[grid]
    if side == "upper":
        lo = max(lo, math.ceil(alpha * N))
    else:
        hi = min(hi, math.floor(alpha * N))
    if lo > hi:
        raise ValueError(f"empty {side} tail for alpha={alpha}, N={N}")
    return lo, hi


@dataclass(frozen=True)
class VarBoundReport:
    alpha: Fraction
    lower: Fraction
    upper: Fraction
    solver: str
    lower_status: str
    upper_status: str
    lower_result: MixResult = field(repr=False, compare=False)
    upper_result: MixResult = field(repr=False, compare=False)
    rows: dict[str, tuple[int, int]] = field(default_factory=dict, compare=False)
    note: str = MAPPING_NOTE

    def __post_init__(self):
        if self.lower_status == self.upper_status == Status.EXACT.value and self.lower > self.upper:
            raise ValueError("exact bounds out of order")


def var_bounds(
    marginals: Sequence[DiscreteMarginal],
    alpha,
    N: int | None = None,
    solver: str = "brute",
    *,
    upper_grid: Grid = "drop_first",
    lower_grid: Grid = "drop_last",
    **opts: Any,
) -> VarBoundReport:
    """Bounds on the alpha-quantile of the sum over all dependence structures.

    With a heuristic solver the reported interval sits inside the exact one:
    the upper side is a lower bound on beta and the lower side an upper bound
    on gamma.
    """
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    n = marginals[0].N
    if N is not None and N != n:
        raise ValueError(f"marginals are discretised with N={n}, not {N}")
    up_rows = tail_rows(n, alpha, "upper", upper_grid)
    lo_rows = tail_rows(n, alpha, "lower", lower_grid)
    A_up = quantile_matrix(marginals, *up_rows)
    A_lo = quantile_matrix(marginals, *lo_rows)
    up = solve.beta(A_up, solver, **opts)
    lo = solve.gamma(A_lo, solver, **opts)
    return VarBoundReport(
        alpha=alpha,
        lower=A_lo.original_row_sum(lo.value),
        upper=A_up.original_row_sum(up.value),
        solver=solver,
        lower_status=lo.status_label,
        upper_status=up.status_label,
        lower_result=lo,
        upper_result=up,
        rows={"upper": up_rows, "lower": lo_rows},
    )
