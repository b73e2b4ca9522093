"""Instance generators with known answers, and the hardness-reduction instances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    DimensionError,
    Matrix,
    PermutationProfile,
    apply_profile,
    row_sums,
)


def _constant_row_sum(A: Matrix, name: str) -> int:
    sums = set(row_sums(A))
    if len(sums) != 1:
        raise ValueError(f"{name} must have constant row sums, got {sorted(sums)}")
    return sums.pop()


def glue(A: Matrix, B: Matrix) -> Matrix:
    """Block matrix with entry ``A[i][j] + B[k][l]`` at ``(m2*i + k, d2*j + l)``.

    Both inputs need constant row sums; the result has row sum ``d2*sA + d1*sB``.
    """
    sa = _constant_row_sum(A, "A")
    sb = _constant_row_sum(B, "B")
    m2, d2 = B.shape
    rows = []
    for i in range(A.m):
        for k in range(m2):
            rows.append(tuple(A[i][j] + B[k][l] for j in range(A.d) for l in range(d2)))
    C = Matrix.of(rows)
    assert set(row_sums(C)) == {d2 * sa + A.d * sb}
    return C


def glue_columnwise(A: Matrix, B: Matrix) -> Matrix:
    """Row ``m2*i + k`` is ``A[i] + B[k]`` elementwise; needs ``A.d == B.d``.

    This keeps the column count, which is what the consecutive-integers
    recursion uses. Constant row sums ``sA`` and ``sB`` give ``sA + sB``.
    """
    if A.d != B.d:
        raise DimensionError("column counts differ")
    sa = _constant_row_sum(A, "A")
    sb = _constant_row_sum(B, "B")
    C = Matrix.of(tuple(a + b for a, b in zip(ra, rb)) for ra in A for rb in B)
    assert set(row_sums(C)) == {sa + sb}
    return C


@dataclass(frozen=True)
class ConsecutiveSpec:
    N: int
    d: int
    profile: PermutationProfile | None = None

    def __post_init__(self):
        if self.N < 1 or self.d < 1:
            raise ValueError("N and d must be >= 1")
        if self.profile is not None and self.profile.shape != (self.N, self.d):
            raise DimensionError("profile shape does not match (N, d)")

    @classmethod
    def random(cls, N: int, d: int, seed: int) -> ConsecutiveSpec:
        rng = np.random.default_rng(seed)
        return cls(N, d, PermutationProfile.of(rng.permutation(N) for _ in range(d)))


def consecutive_matrix(spec: ConsecutiveSpec) -> Matrix:
    A = Matrix.of([[i + 1] * spec.d for i in range(spec.N)])
    return A if spec.profile is None else apply_profile(A, spec.profile)


def a_d_k(d: int, k: int) -> int:
    """Uniform row sum of a mixed (d**k, d) consecutive-integers matrix: d*(d**k + 1)/2."""
    if d < 1 or k < 0:
        raise ValueError("need d >= 1 and k >= 0")
    return d * (d**k + 1) // 2


def a_d_k_double_sum(d: int, k: int) -> int:
    return d + sum(i * d ** (j - 1) for i in range(d) for j in range(1, k + 1))


def cyclic_matrix(d: int, scale: int = 1, offset: int = 0) -> Matrix:
    """``scale * ((i + j) mod d) + offset``; every row and column is a permutation of the residues."""
    return Matrix.of([[scale * ((i + j) % d) + offset for j in range(d)] for i in range(d)])


def mixable_consecutive_construction(d: int, k: int, max_rows: int = 1 << 20) -> tuple[Matrix, PermutationProfile]:
    """Rearrange the (d**k, d) consecutive-integers matrix to constant row sums ``a_d_k(d, k)``.

    Returns the rearranged matrix and the profile that produces it from the
    identity-ordered matrix.
    """
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    if d**k > max_rows:
        raise ValueError(f"d**k = {d**k} rows exceeds max_rows={max_rows}")
    A = cyclic_matrix(d, offset=1)
    for step in range(1, k):
        A = glue_columnwise(A, cyclic_matrix(d, scale=d**step))
    N = d**k
    perms = []
    for j in range(d):
        p = [0] * N
        for r, v in enumerate(A.column(j)):
            p[v - 1] = r
        perms.append(tuple(p))
    P = PermutationProfile(tuple(perms))
    assert set(row_sums(A)) == {a_d_k(d, k)}
    return A, P


def int_log_floor(N: int, d: int) -> int:
    k, p = 0, 1
    while p * d <= N:
        p *= d
        k += 1
    return k


def int_log_ceil(N: int, d: int) -> int:
    k, p = 0, 1
    while p < N:
        p *= d
        k += 1
    return k


def consecutive_bounds(N: int, d: int) -> tuple[int, int]:
    """Bracket ``a_d(floor(log_d N)) <= beta <= gamma <= a_d(ceil(log_d N))``."""
    if d < 2 or N < d:
        raise ValueError("need d >= 2 and N >= d")
    return a_d_k(d, int_log_floor(N, d)), a_d_k(d, int_log_ceil(N, d))


def adversarial_identity(N: int) -> Matrix:
    """(N, 3) consecutive-integers matrix with every column in identity order."""
    if N < 2:
        raise ValueError("N must be >= 2")
    return consecutive_matrix(ConsecutiveSpec(N, 3))


def partition_instance(values: Sequence[int]) -> Matrix:
    """Two rows: the values, then zeros. Mixable iff the values split into equal halves."""
    if not values:
        raise ValueError("need at least one value")
    return Matrix.of([list(values), [0] * len(values)])


def n3dm_instance(xs: Sequence[int], ys: Sequence[int], zs: Sequence[int]) -> Matrix:
    if not (len(xs) == len(ys) == len(zs)) or not xs:
        raise DimensionError("the three sequences need the same positive length")
    return Matrix.from_columns([xs, ys, zs])


def additive_stress_instance(A: Matrix, K: int, K_prime: int | None = None) -> Matrix:
    """Append the column ``(K', 2K', ..., mK')``.

    With ``A`` completely mixable and ``K'`` large, any two row sums differ by
    at least ``K'``, so estimating gamma to within ``K`` decides mixability.
    The default ``K' = max(2*d*a*, K) + 1`` uses ``a*`` = largest entry.
    """
    if K_prime is None:
        K_prime = max(2 * A.d * A.max_entry(), K) + 1
    return Matrix.of(row + ((i + 1) * K_prime,) for i, row in enumerate(A))
