"""Rearrangement solvers for complete mixability and extremal row sums."""

from .core import (
    BudgetExceeded,
    DimensionError,
    Matrix,
    MixabilityError,
    MixResult,
    PermutationProfile,
    Status,
    apply_profile,
    beta_from_gamma,
    complement,
    drop_column,
    oppositely_ordered,
    row_sums,
    shift_normalize,
    target_row_sum,
)

__version__ = "0.1.0"
