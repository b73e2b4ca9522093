"""Matrix and permutation primitives shared by every solver.

Entries are stored as exact Python integers. Rational input is scaled by the
LCM of its denominators on ingestion, and the scale (plus any additive shift
applied later) is kept on the matrix so results can be mapped back:

    original_entry = (stored_entry - shift) / scale

Permutation convention: ``perms[j][r]`` is the row that original row ``r`` of
column ``j`` moves to, so ``apply_profile(A, P)[perms[j][r]][j] == A[r][j]``.
All indices are 0-based.
"""

from __future__ import annotations

import enum
import math

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Sequence

Number = int | Fraction | str


class MixabilityError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(MixabilityError, ValueError):
    pass


class BudgetExceeded(MixabilityError):
    """A solver refused to run because its enumeration budget is too small."""

    def __init__(self, what: str, needed: int | None, budget: int):
        self.what = what
        self.needed = needed
        self.budget = budget
        need = "unknown" if needed is None else str(needed)
        super().__init__(f"{what}: needs {need} > budget {budget}")


@dataclass(frozen=True)
class Matrix:
    entries: tuple[tuple[int, ...], ...]
    scale: int = 1
    shift: int = 0

    def __post_init__(self):
        if not self.entries or not self.entries[0]:
            raise DimensionError("matrix needs m >= 1 rows and d >= 1 columns")
        d = len(self.entries[0])
        for row in self.entries:
            if len(row) != d:
                raise DimensionError("matrix rows have different lengths")
            for v in row:
                if not isinstance(v, int) or isinstance(v, bool):
                    raise TypeError(f"matrix entries must be int, got {type(v).__name__}")
        if self.scale < 1:
            raise ValueError("scale must be >= 1")

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> Matrix:
        return cls(tuple(tuple(int(v) for v in row) for row in rows))

    @classmethod
    def from_rationals(cls, rows: Iterable[Iterable[Number]]) -> Matrix:
        """Build a matrix from exact rationals, scaling by the LCM of denominators."""
        frows = [[Fraction(v) for v in row] for row in rows]
        scale = 1
        for row in frows:
            for v in row:
                scale = math.lcm(scale, v.denominator)
        return cls(
            tuple(tuple(int(v * scale) for v in row) for row in frows), scale=scale
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], scale: int = 1, shift: int = 0) -> Matrix:
        if not columns:
            raise DimensionError("no columns")
        return cls(tuple(zip(*[tuple(c) for c in columns])), scale=scale, shift=shift)

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def d(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.m, self.d

    @cached_property
    def _columns(self) -> tuple[tuple[int, ...], ...]:
        return tuple(zip(*self.entries))

    def column(self, j: int) -> tuple[int, ...]:
        return self._columns[j]

    def columns(self) -> list[tuple[int, ...]]:
        return list(self._columns)

    def total(self) -> int:
        return sum(sum(row) for row in self.entries)

    def min_entry(self) -> int:
        return min(min(row) for row in self.entries)

    def max_entry(self) -> int:
        return max(max(row) for row in self.entries)

    def values(self) -> list[int]:
        return sorted({v for row in self.entries for v in row})

    def with_entries(self, rows: Iterable[Iterable[int]]) -> Matrix:
        """Same scale and shift, new entries."""
        return Matrix(tuple(tuple(r) for r in rows), scale=self.scale, shift=self.shift)

    def original_entry(self, v: int) -> Fraction:
        return Fraction(v - self.shift, self.scale)

    def original_row_sum(self, s: int) -> Fraction:
        """Map a stored row sum back to the units of the original input."""
        return Fraction(s - self.d * self.shift, self.scale)

    def original_rows(self) -> list[list[Fraction]]:
        return [[self.original_entry(v) for v in row] for row in self.entries]

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.entries[i]


@dataclass(frozen=True)
class PermutationProfile:
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.perms:
            raise DimensionError("profile needs at least one permutation")
        m = len(self.perms[0])
        for p in self.perms:
            if sorted(p) != list(range(m)):
                raise ValueError(f"not a permutation of 0..{m - 1}: {p}")

    @classmethod
    def identity(cls, m: int, d: int) -> PermutationProfile:
        return cls(tuple(tuple(range(m)) for _ in range(d)))

    @classmethod
    def of(cls, perms: Iterable[Iterable[int]]) -> PermutationProfile:
        return cls(tuple(tuple(int(i) for i in p) for p in perms))

    @property
    def m(self) -> int:
        return len(self.perms[0])

    @property
    def d(self) -> int:
        return len(self.perms)

    def compose(self, after: PermutationProfile) -> PermutationProfile:
        """Profile equal to applying ``self`` first, then ``after``."""
        if after.shape != self.shape:
            raise DimensionError("profile shapes differ")
        return PermutationProfile(
            tuple(tuple(q[p[r]] for r in range(self.m)) for p, q in zip(self.perms, after.perms))
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.m, self.d

    def as_lists(self) -> list[list[int]]:
        return [list(p) for p in self.perms]


class Status(str, enum.Enum):
    EXACT = "exact"
    HEURISTIC_LOWER_BOUND = "heuristic_lower_bound"
    HEURISTIC_UPPER_BOUND = "heuristic_upper_bound"
    RATIO_BOUND = "ratio_bound"


@dataclass(frozen=True)
class MixResult:
    """Value of an objective together with the profile that witnesses it.

    ``value`` and ``row_sums`` are in stored (integer) units of the matrix
    the solver was given. ``ratio`` is set only for ``Status.RATIO_BOUND``.
    """

    objective: str
    value: int
    profile: PermutationProfile
    status: Status
    row_sums: tuple[int, ...]
    ratio: Fraction | None = None
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.objective not in ("gamma", "beta", "mixability"):
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.objective == "gamma" and self.value != max(self.row_sums):
            raise ValueError("gamma value must equal the max row sum")
        if self.objective == "beta" and self.value != min(self.row_sums):
            raise ValueError("beta value must equal the min row sum")
        if (self.status is Status.RATIO_BOUND) != (self.ratio is not None):
            raise ValueError("ratio is required exactly for ratio_bound status")

    @property
    def status_label(self) -> str:
        if self.status is Status.RATIO_BOUND:
            return f"ratio_bound({self.ratio})"
        return self.status.value

    @property
    def balanced(self) -> bool:
        """True when every row sum is equal, i.e. the profile mixes the matrix completely."""
        return len(set(self.row_sums)) == 1


def check_profile(A: Matrix, P: PermutationProfile) -> None:
    if P.shape != A.shape:
        raise DimensionError(f"profile shape {P.shape} does not match matrix shape {A.shape}")


def apply_profile(A: Matrix, P: PermutationProfile) -> Matrix:
    check_profile(A, P)
    out = [[0] * A.d for _ in range(A.m)]
    for j, p in enumerate(P.perms):
        for r in range(A.m):
            out[p[r]][j] = A.entries[r][j]
    return A.with_entries(out)


def row_sums(A: Matrix) -> tuple[int, ...]:
    return tuple(sum(row) for row in A.entries)


def profile_row_sums(A: Matrix, P: PermutationProfile) -> tuple[int, ...]:
    return row_sums(apply_profile(A, P))


def target_row_sum(A: Matrix) -> int | None:
    """The common row sum a complete mix would need, or None if m does not divide the total."""
    q, r = divmod(A.total(), A.m)
    return q if r == 0 else None


def complement(A: Matrix) -> tuple[Matrix, int]:
    """Return ``(l - A, l)`` with ``l`` the largest entry."""
    l = A.max_entry()
    return Matrix(tuple(tuple(l - v for v in row) for row in A.entries)), l


def beta_from_gamma(gamma_of_complement: int, d: int, l: int) -> int:
    return d * l - gamma_of_complement


def oppositely_ordered(x: Sequence[int], y: Sequence[int]) -> bool:
    """True iff some ordering sorts ``x`` ascending and ``y`` descending at once."""
    if len(x) != len(y):
        raise DimensionError("vectors have different lengths")
    order = sorted(range(len(x)), key=lambda i: (x[i], -y[i]))
    return all(y[a] >= y[b] for a, b in zip(order, order[1:]))


def drop_column(A: Matrix, j: int) -> Matrix:
    if A.d < 2:
        raise DimensionError("cannot drop the only column")
    if not 0 <= j < A.d:
        raise IndexError(f"column {j} out of range for d={A.d}")
    return A.with_entries(row[:j] + row[j + 1 :] for row in A.entries)


def shift_normalize(A: Matrix) -> tuple[Matrix, int]:
    """Add ``mu = -min(A)`` to every entry so the smallest becomes zero."""
    mu = -A.min_entry()
    if mu == 0:
        return A, 0
    shifted = Matrix(
        tuple(tuple(v + mu for v in row) for row in A.entries),
        scale=A.scale,
        shift=A.shift + mu,
    )
    return shifted, mu


def profile_from_columns(A: Matrix, new_columns: Sequence[Sequence[int]]) -> PermutationProfile:
    """Recover a profile mapping ``A`` onto a matrix with the given rearranged columns.

    Equal values are matched in row order, which keeps the result deterministic.
    """
    if len(new_columns) != A.d:
        raise DimensionError("wrong number of columns")
    perms = []
    for j, new_col in enumerate(new_columns):
        col = A.column(j)
        if len(new_col) != A.m:
            raise DimensionError("column length mismatch")
        # stable sorts pair the k-th copy of a value in A with its k-th copy in new_col
        src = sorted(range(A.m), key=col.__getitem__)
        dst = sorted(range(A.m), key=new_col.__getitem__)
        perm = [0] * A.m
        for r, new_row in zip(src, dst):
            if col[r] != new_col[new_row]:
                raise ValueError(f"column {j} is not a rearrangement of the input column")
            perm[r] = new_row
        perms.append(tuple(perm))
    return PermutationProfile(tuple(perms))


def make_result(
    A: Matrix,
    objective: str,
    P: PermutationProfile,
    status: Status,
    ratio: Fraction | None = None,
    **meta: Any,
) -> MixResult:
    """Evaluate ``P`` on ``A`` and wrap it; the value is read off the row sums."""
    sums = profile_row_sums(A, P)
    value = min(sums) if objective == "beta" else max(sums)
    return MixResult(objective, value, P, status, sums, ratio, dict(meta))
