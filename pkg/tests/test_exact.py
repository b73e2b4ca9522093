from itertools import product

import pytest
from hypothesis import given, strategies as st

from conftest import matrices, random_matrix
from oracles import naive_beta, naive_gamma, naive_mixable
from mixability import exact
from mixability.constructions import ConsecutiveSpec, consecutive_matrix
from mixability.core import BudgetExceeded, DimensionError, Matrix, Status, apply_profile, row_sums
from mixability.exact import (
    DefectLedger,
    DpState,
    NotMixable,
    beta_two_columns,
    brute_force_beta,
    brute_force_gamma,
    count_arrangements,
    dp_beta,
    dp_gamma,
    dp_is_mixable,
    dp_successors,
    dp_table,
    gamma_two_columns,
    multiset_permutations,
    two_value_gamma,
    zero_one_mixability,
)

TWO_RANGES = Matrix.from_columns([[0, 1, 2, 3], [0, 1, 2, 3]])
PARTITION = Matrix.of([[3, 1, 2], [0, 0, 0]])


def _assert_witness(A, res):
    assert res.status is Status.EXACT
    sums = row_sums(apply_profile(A, res.profile))
    assert sums == res.row_sums
    assert res.value == (max(sums) if res.objective == "gamma" else min(sums))


class TestBruteForce:
    def test_two_ranges(self):
        res = brute_force_gamma(TWO_RANGES)
        assert res.value == 3 and set(res.row_sums) == {3}
        assert brute_force_beta(TWO_RANGES).value == 3

    def test_partition_matrix(self):
        assert brute_force_gamma(PARTITION).value == 3
        assert brute_force_beta(PARTITION).value == 3

    def test_three_by_three_consecutive(self):
        A = consecutive_matrix(ConsecutiveSpec(3, 3))
        assert brute_force_gamma(A).value == 6 == brute_force_beta(A).value

    @pytest.mark.parametrize("row", [[4], [1, 2, 3], [0, -2, 7, 1]])
    def test_single_row(self, row):
        A = Matrix.of([row])
        assert brute_force_gamma(A).value == sum(row) == brute_force_beta(A).value

    def test_budget_refusal(self):
        A = Matrix.of([[i, i] for i in range(9)])
        with pytest.raises(BudgetExceeded):
            brute_force_gamma(A, budget=1000)
        with pytest.raises(BudgetExceeded):
            brute_force_beta(A, budget=1000)

    @given(matrices(max_m=4, max_d=3, lo=-3, hi=6))
    def test_matches_naive_oracle(self, A):
        rows = [list(r) for r in A]
        g, b = brute_force_gamma(A), brute_force_beta(A)
        assert g.value == naive_gamma(rows)
        assert b.value == naive_beta(rows)
        _assert_witness(A, g)
        _assert_witness(A, b)

    def test_deterministic(self, rng):
        for _ in range(20):
            A = random_matrix(rng, 4, 3)
            assert brute_force_gamma(A) == brute_force_gamma(A)


class TestArrangements:
    @pytest.mark.parametrize("values", [[1, 2, 3], [1, 1, 2], [0, 0, 0], [2, 1, 2, 1]])
    def test_distinct_and_complete(self, values):
        arrs = list(multiset_permutations(values))
        assert len(arrs) == len(set(arrs)) == count_arrangements(values)
        assert arrs == sorted(arrs)
        assert all(sorted(a) == sorted(values) for a in arrs)


class TestDp:
    def test_state_invariant(self):
        with pytest.raises(ValueError):
            DpState((3, 1), 1)

    def test_successors_of_zero_state(self):
        succ = dp_successors((0, 0), [1, 2])
        assert succ == {(1, 2): (1, 2)}
        succ = dp_successors((0, 5), [1, 2])
        assert set(succ) == {(1, 7), (2, 6)}
        assert succ[(2, 6)] == (2, 1)

    def test_nine_by_three_consecutive(self):
        A = consecutive_matrix(ConsecutiveSpec(9, 3))
        res = dp_gamma(A)
        assert res.value == 15 and set(res.row_sums) == {15}
        assert dp_is_mixable(A)

    @pytest.mark.parametrize("c, m, d", [(4, 3, 3), (0, 2, 5), (7, 5, 2)])
    def test_constant_matrix(self, c, m, d):
        assert dp_gamma(Matrix.of([[c] * d] * m)).value == d * c

    def test_negative_entries(self):
        A = Matrix.of([[-3, 2], [1, -1], [0, 0]])
        assert dp_gamma(A).value == naive_gamma([list(r) for r in A])
        assert dp_beta(A).value == naive_beta([list(r) for r in A])

    def test_state_budget_refusal(self):
        A = consecutive_matrix(ConsecutiveSpec(6, 4))
        with pytest.raises(BudgetExceeded):
            dp_gamma(A, state_budget=10)

    def test_soundness_every_state_realizable(self, rng):
        for _ in range(15):
            A = random_matrix(rng, rng.randint(2, 4), rng.randint(2, 4), 0, 4)
            table = dp_table(A)
            for j in range(A.d):
                for state in table.states(j):
                    cols = table.realize(state.partial_sums, j)
                    for c, orig in zip(cols, A.columns()):
                        assert sorted(c) == sorted(orig)
                    sums = [sum(c[i] for c in cols) for i in range(A.m)]
                    assert tuple(sorted(sums)) == state.partial_sums
                    assert state.columns_consumed == j + 1

    def test_full_table_has_every_reachable_final_state(self):
        A = Matrix.of([[0, 1, 2], [2, 1, 0], [1, 1, 1]])
        from oracles import all_arrangements

        reachable = {tuple(sorted(sum(r) for r in M)) for M in all_arrangements([list(r) for r in A])}
        assert set(dp_table(A).final_states) == reachable

    @given(matrices(max_m=4, max_d=4, hi=6))
    def test_matches_brute_force(self, A):
        res = dp_gamma(A)
        assert res.value == brute_force_gamma(A).value
        _assert_witness(A, res)
        assert dp_beta(A).value == brute_force_beta(A).value

    def test_exhaustive_small_entries(self):
        for m, d in [(2, 2), (2, 3), (3, 2)]:
            for flat in product(range(3), repeat=m * d):
                A = Matrix.of([flat[i * d:(i + 1) * d] for i in range(m)])
                assert dp_gamma(A).value == brute_force_gamma(A).value


class TestZeroOne:
    def test_already_balanced(self):
        res = zero_one_mixability(Matrix.of([[1, 0], [0, 1]]))
        assert res and res.meta["steps"] <= 2 * 2 and set(res.row_sums) == {1}
        assert apply_profile(Matrix.of([[1, 0], [0, 1]]), res.profile).entries == ((1, 0), (0, 1))

    def test_one_swap(self):
        A = Matrix.of([[1, 1], [0, 0]])
        res = zero_one_mixability(A)
        assert res.value == 1
        assert apply_profile(A, res.profile).entries == ((1, 0), (0, 1))
        assert naive_mixable([[1, 1], [0, 0]])

    def test_not_divisible(self):
        res = zero_one_mixability(Matrix.of([[1], [0]]))
        assert isinstance(res, NotMixable) and not res
        assert (res.total, res.m) == (1, 2)

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            zero_one_mixability(Matrix.of([[2, 0]]))

    def test_defect_ledger(self):
        ledger = DefectLedger.of(2, [3, 1, 2])
        assert ledger.defects == [-1, 1, 0] and ledger.total_defect == 2
        assert DefectLedger.of(2, [2, 2]).total_defect == 0

    @given(matrices(max_m=6, max_d=6, hi=1))
    def test_decision_is_divisibility(self, A):
        res = zero_one_mixability(A)
        assert bool(res) == (A.total() % A.m == 0)
        if res:
            _assert_witness(A, res)
            assert len(set(res.row_sums)) == 1
            assert res.meta["steps"] <= 2 * A.m * A.d

    @given(matrices(max_m=4, max_d=3, hi=1))
    def test_decision_matches_naive(self, A):
        assert bool(zero_one_mixability(A)) == naive_mixable([list(r) for r in A])

    def test_potential_drops_by_twice_the_swaps(self, monkeypatch):
        seen = []
        real = exact._balance_binary

        def spy(columns, target):
            before = [sum(c[i] for c in columns) for i in range(len(columns[0]))]
            out, steps = real(columns, target)
            after = [sum(c[i] for c in out) for i in range(len(out[0]))]
            seen.append((DefectLedger.of(target, before).total_defect, DefectLedger.of(target, after).total_defect))
            return out, steps

        monkeypatch.setattr(exact, "_balance_binary", spy)
        zero_one_mixability(Matrix.of([[1, 1, 1], [0, 0, 0], [1, 1, 1]]))
        assert seen == [(4, 0)]


class TestTwoValue:
    @pytest.mark.parametrize(
        "rows, expected",
        [([[5, 5], [5, 5]], 10), ([[7, 3], [3, 7]], 10), ([[7], [3]], 7), ([[0, 4, 4], [0, 0, 4]], 8)],
    )
    def test_examples(self, rows, expected):
        A = Matrix.of(rows)
        res = two_value_gamma(A)
        assert res.value == expected == naive_gamma(rows)
        _assert_witness(A, res)

    def test_rejects_three_values(self):
        with pytest.raises(ValueError):
            two_value_gamma(Matrix.of([[0, 1, 2]]))

    @given(st.integers(-3, 3), st.integers(1, 5), matrices(max_m=4, max_d=4, hi=1))
    def test_matches_brute_force(self, a, gap, bits):
        A = Matrix.of([[a + gap * v for v in r] for r in bits])
        res = two_value_gamma(A)
        assert res.value == brute_force_gamma(A).value
        _assert_witness(A, res)
        assert res.meta["mixable"] == bool(zero_one_mixability(bits))


class TestTwoColumns:
    @pytest.mark.parametrize("N", [1, 4, 7])
    def test_ranges(self, N):
        A = Matrix.from_columns([list(range(N + 1))] * 2)
        res = gamma_two_columns(A)
        assert res.value == N and set(res.row_sums) == {N}

    def test_example(self):
        A = Matrix.of([[1, 10], [2, 20]])
        assert gamma_two_columns(A).value == 21 == naive_gamma([[1, 10], [2, 20]])

    def test_constant(self):
        assert gamma_two_columns(Matrix.of([[6, 6]] * 4)).value == 12

    def test_wrong_width(self):
        with pytest.raises(DimensionError):
            gamma_two_columns(Matrix.of([[1, 2, 3]]))

    @given(matrices(max_m=5, min_d=2, max_d=2, lo=-4, hi=9))
    def test_matches_brute_force(self, A):
        g, b = gamma_two_columns(A), beta_two_columns(A)
        assert g.value == brute_force_gamma(A).value
        assert b.value == brute_force_beta(A).value
        _assert_witness(A, g)
        _assert_witness(A, b)
