import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from mixability.core import Matrix  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def matrices(draw, max_m=4, max_d=3, lo=0, hi=9, min_m=1, min_d=1):
    m = draw(st.integers(min_m, max_m))
    d = draw(st.integers(min_d, max_d))
    rows = draw(st.lists(st.lists(st.integers(lo, hi), min_size=d, max_size=d), min_size=m, max_size=m))
    return Matrix.of(rows)


def random_matrix(rng: random.Random, m: int, d: int, lo: int = 0, hi: int = 9) -> Matrix:
    return Matrix.of([[rng.randint(lo, hi) for _ in range(d)] for _ in range(m)])


@pytest.fixture
def rng():
    return random.Random(20240611)
