"""Acceptance suite: nine criteria, each printing one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (the lines are printed
even under output capture) or ``python tests/test_acceptance.py``.
"""

import json
import random
import re
import sys
import time
from fractions import Fraction
from itertools import product
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import naive_beta, naive_gamma  # noqa: E402
from mixability import cli, io  # noqa: E402
from mixability.approx import (  # noqa: E402
    fixed_valueset_gamma,
    ptas_gamma,
    same_multiset_gamma,
    two_approx_gamma_d3,
)
from mixability.constructions import (  # noqa: E402
    a_d_k,
    adversarial_identity,
    mixable_consecutive_construction,
)
from mixability.core import Matrix, apply_profile, complement, profile_from_columns, row_sums  # noqa: E402
from mixability.exact import (  # noqa: E402
    brute_force_beta,
    brute_force_gamma,
    dp_beta,
    dp_gamma,
    gamma_two_columns,
    two_value_gamma,
    zero_one_mixability,
)
from mixability.swapping import antisort_columns, randomized_beta, randomized_gamma  # noqa: E402
from mixability.varbounds import discretize_marginal, quantile_matrix, var_bounds  # noqa: E402

pytestmark = pytest.mark.acceptance

SEED = 20240611


def report(capsys, n, title, ok, elapsed, limit, detail=""):
    line = f"criterion {n} [{title}]: {'PASS' if ok and elapsed < limit else 'FAIL'} ({elapsed:.1f}s / limit {limit}s){' ' + detail if detail else ''}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok and elapsed < limit


def _matrices(m, d, values):
    for flat in product(values, repeat=m * d):
        yield Matrix.of([flat[i * d:(i + 1) * d] for i in range(m)])


def _canonical(A):
    return tuple(sorted(tuple(sorted(c)) for c in A.columns()))


def _max_row(A, res):
    return max(row_sums(apply_profile(A, res.profile)))


# corpus shared by criteria 4 and 7
def _random_corpus():
    rng = random.Random(SEED)
    out = []
    for _ in range(500):
        m, d = rng.randint(1, 4), rng.randint(1, 4)
        out.append(Matrix.of([[rng.randint(0, 9) for _ in range(d)] for _ in range(m)]))
    return out


def _derived_variants(A, rng):
    """Same-multiset and two-value relatives of a random instance, so every solver sees it."""
    base = list(A.column(0))
    same = Matrix.from_columns([base] + [rng.sample(base, len(base)) for _ in range(A.d - 1)])
    cut = sorted(v for row in A for v in row)[(A.m * A.d) // 2]
    two = Matrix.of([[9 if v >= cut else 2 for v in row] for row in A])
    return same, two


def _solvers_agree(A, oracle):
    """Run each applicable solver; return the names that disagree with the oracle."""
    bad = []
    checks = [("dp", dp_gamma), ("valueset", fixed_valueset_gamma)]
    if A.d == 2:
        checks.append(("two_columns", gamma_two_columns))
    if len(A.values()) <= 2:
        checks.append(("two_value", two_value_gamma))
    if len({tuple(sorted(c)) for c in A.columns()}) == 1:
        checks.append(("multiset", same_multiset_gamma))
    for name, fn in checks:
        res = fn(A)
        if res.value != oracle or _max_row(A, res) != res.value:
            bad.append(name)
    return [n for n, _ in checks], bad


def criterion_1(capsys=None):
    t = time.perf_counter()
    problems = []
    for d, k in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)]:
        A, P = mixable_consecutive_construction(d, k)
        target = a_d_k(d, k)
        if set(row_sums(A)) != {target}:
            problems.append(f"rows of ({d},{k})")
        g, b = dp_gamma(A).value, dp_beta(A).value
        if not g == b == target:
            problems.append(f"({d},{k}): dp gamma {g}, beta {b}, closed form {target}")
    assert a_d_k(3, 1) == 6 and a_d_k(3, 2) == 15
    ok = not problems
    return report(capsys, 1, "closed-form regression", ok, time.perf_counter() - t, 10, "; ".join(problems))


def criterion_2(capsys=None):
    t = time.perf_counter()
    problems = []
    for k, N in [(1, 3), (2, 9), (3, 27)]:
        out, trace, converged = antisort_columns(adversarial_identity(N))
        if not converged or sorted(row_sums(out)) != list(range(N + 2, 2 * N + 2)):
            problems.append(f"N={N}: row sums {sorted(row_sums(out))}")
        gap = a_d_k(3, k) - min(row_sums(out))
        if 2 * gap < N - 1:
            problems.append(f"N={N}: gap {gap}")
    return report(capsys, 2, "adversarial swapping exhibit", not problems, time.perf_counter() - t, 1,
                  "; ".join(problems))


def criterion_3(capsys=None):
    t = time.perf_counter()
    problems, count, worst = [], 0, 0.0
    for m in range(1, 5):
        for d in range(1, 5):
            for A in _matrices(m, d, (0, 1)):
                count += 1
                res = zero_one_mixability(A)
                divisible = A.total() % m == 0
                g = brute_force_gamma(A).value
                brute_mixable = g * m == A.total()
                if bool(res) != divisible or bool(res) != brute_mixable:
                    problems.append(str(A.entries))
                if res:
                    worst = max(worst, res.meta["steps"] / (m * d))
                    if len(set(res.row_sums)) != 1:
                        problems.append(f"unbalanced {A.entries}")
    linear = worst <= 2
    ok = not problems and linear
    return report(capsys, 3, "0/1 theorem", ok, time.perf_counter() - t, 60,
                  f"{count} matrices, max steps/(m*d) = {worst:.2f}" + ("; " + "; ".join(problems[:5]) if problems else ""))


def criterion_4(capsys=None):
    t = time.perf_counter()
    problems, count, uses = [], 0, {}
    cache = {}
    for m in range(1, 4):
        for d in range(1, 5):
            for n, A in enumerate(_matrices(m, d, (0, 1, 2))):
                key = _canonical(A)
                if key not in cache or n % 97 == 0:
                    g = brute_force_gamma(A).value
                    if cache.setdefault(key, g) != g:
                        problems.append(f"oracle not invariant on {A.entries}")
                applied, bad = _solvers_agree(A, cache[key])
                count += 1
                for name in applied:
                    uses[name] = uses.get(name, 0) + 1
                problems += [f"{name} on {A.entries}" for name in bad]
    rng = random.Random(SEED + 1)
    for A in _random_corpus():
        for B in (A, *_derived_variants(A, rng)):
            applied, bad = _solvers_agree(B, brute_force_gamma(B).value)
            count += 1
            for name in applied:
                uses[name] = uses.get(name, 0) + 1
            problems += [f"{name} on {B.entries}" for name in bad]
    detail = f"{count} instances; solver runs " + ", ".join(f"{k}={v}" for k, v in sorted(uses.items()))
    if problems:
        detail += "; " + "; ".join(problems[:5])
    return report(capsys, 4, "oracle equivalence", not problems, time.perf_counter() - t, 300, detail)


def criterion_5(capsys=None):
    t = time.perf_counter()
    rng = random.Random(SEED + 5)
    problems = []
    for _ in range(300):
        m, d = rng.randint(1, 4), rng.randint(1, 3)
        rows = [[rng.randint(0, 9) for _ in range(d)] for _ in range(m)]
        l = max(max(r) for r in rows)
        comp = [[l - v for v in r] for r in rows]
        if naive_beta(rows) != d * l - naive_gamma(comp):
            problems.append(str(rows))
    return report(capsys, 5, "duality identity", not problems, time.perf_counter() - t, 60, "; ".join(problems[:5]))


def criterion_6(capsys=None):
    t = time.perf_counter()
    rng = random.Random(SEED + 6)
    problems, worst = [], {"2approx": Fraction(1)}
    for _ in range(200):
        m = rng.randint(1, 5)
        A = Matrix.of([[rng.randint(0, 9) for _ in range(3)] for _ in range(m)])
        g = brute_force_gamma(A).value
        two = two_approx_gamma_d3(A)
        if not (g <= two.value <= 2 * g) or _max_row(A, two) != two.value:
            problems.append(f"2approx {A.entries}")
        if g:
            worst["2approx"] = max(worst["2approx"], Fraction(two.value, g))
        for eps in (Fraction(1), Fraction(1, 2), Fraction(1, 4)):
            res = ptas_gamma(A, eps)
            if not (g <= res.value <= (1 + eps) * g) or _max_row(A, res) != res.value:
                problems.append(f"ptas({eps}) {A.entries}")
            if g:
                key = f"ptas({eps})"
                worst[key] = max(worst.get(key, Fraction(1)), Fraction(res.value, g))
    detail = "worst observed ratios " + ", ".join(f"{k}={float(v):.3f}" for k, v in worst.items())
    if problems:
        detail += "; " + "; ".join(problems[:5])
    return report(capsys, 6, "approximation contracts", not problems, time.perf_counter() - t, 300, detail)


def criterion_7(capsys=None):
    t = time.perf_counter()
    problems, steps, count = [], 0, 0
    for N in (3, 9, 27):
        _, trace, _ = antisort_columns(adversarial_identity(N))
        h = trace.min_row_sum_history
        steps += len(h) - 1
        if any(a > b for a, b in zip(h, h[1:])):
            problems.append(f"history N={N}")

    def check(A, seed):
        nonlocal steps, count
        count += 1
        if A.d >= 2:
            for mode in ("resort", "single"):
                _, trace, _ = antisort_columns(A, mode=mode)
                h = trace.min_row_sum_history
                steps += len(h) - 1
                if any(a > b for a, b in zip(h, h[1:])):
                    problems.append(f"history {A.entries}")
        lo = randomized_beta(A, restarts=2, seed=seed).value
        hi = randomized_gamma(A, restarts=2, seed=seed).value
        if lo > brute_force_beta(A).value or hi < brute_force_gamma(A).value:
            problems.append(f"bounds {A.entries}")

    seen = set()
    for m in range(1, 4):
        for d in range(1, 5):
            for n, A in enumerate(_matrices(m, d, (0, 1, 2))):
                if (m, d) == (3, 4):
                    key = _canonical(A)
                    if key in seen:
                        continue
                    seen.add(key)
                check(A, n)
    for n, A in enumerate(_random_corpus()):
        check(A, n)
    detail = f"{count} instances, {steps} swap steps checked"
    if problems:
        detail += "; " + "; ".join(problems[:5])
    return report(capsys, 7, "swapping certificate soundness", not problems, time.perf_counter() - t, 300, detail)


def criterion_8(capsys=None):
    t = time.perf_counter()
    problems = []
    for N in (4, 8):
        u = discretize_marginal(range(N + 1))
        A = quantile_matrix([u, u])
        if sorted(row_sums(A)) != list(range(0, 2 * N + 1, 2)):
            problems.append(f"comonotone N={N}")
        P = profile_from_columns(A, [list(range(N + 1)), list(range(N, -1, -1))])
        if set(row_sums(apply_profile(A, P))) != {N}:
            problems.append(f"countermonotone N={N}")
        for alpha in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)):
            for grids in ({}, {"upper_grid": "full", "lower_grid": "full"}):
                try:
                    brute = var_bounds([u, u], alpha, solver="brute", **grids)
                except ValueError:
                    continue
                dp = var_bounds([u, u], alpha, solver="dp", **grids)
                swap = var_bounds([u, u], alpha, solver="swap", restarts=3, seed=N, **grids)
                if (brute.lower, brute.upper) != (dp.lower, dp.upper):
                    problems.append(f"brute/dp N={N} alpha={alpha}")
                if not (brute.lower <= swap.lower and swap.upper <= brute.upper):
                    problems.append(f"swap interval N={N} alpha={alpha}")
        if var_bounds([u, u], 0, upper_grid="full").upper != N:
            problems.append(f"alpha=0 upper N={N}")
    return report(capsys, 8, "VaR pipeline consistency", not problems, time.perf_counter() - t, 30, "; ".join(problems))


def _without_timing(text):
    doc = json.loads(text)
    doc.pop("timing", None)
    return json.dumps(doc, indent=2, sort_keys=True)


def criterion_9(tmp_dir, capsys=None):
    t = time.perf_counter()
    tmp = Path(tmp_dir)
    inst = tmp / "inst.csv"
    inst.write_text("4,0,7,2\n1,9,2,2\n3,3,8,0\n5,6,1,9\n2,2,2,7\n")
    marg = tmp / "marg.csv"
    marg.write_text("# N=6 d=3\n" + "".join(f"{r},{r * r},{2 * r + 1}\n" for r in range(7)))
    commands = [
        ["gamma", inst, "--solver", "swap", "--seed", "1", "--restarts", "6"],
        ["beta", inst, "--solver", "swap", "--seed", "2", "--restarts", "6"],
        ["gamma", inst, "--solver", "swap", "--seed", "3", "--restarts", "4", "--budget-steps", "3"],
        ["var-bounds", marg, "--alpha", "1/2", "--solver", "swap", "--seed", "5", "--restarts", "4"],
        ["gamma", inst, "--solver", "ptas", "--epsilon", "1/4"],
        ["gen", "consecutive", "--N", "7", "--d", "3", "--seed", "11"],
    ]
    problems = []
    for k, argv in enumerate(commands):
        outputs = []
        variants = [[], [], ["--workers", "2"]] if argv[0] != "gen" else [[], []]
        for v, extra in enumerate(variants):
            out = tmp / f"c{k}_{v}.out"
            code = cli.run([str(a) for a in argv] + extra + ["--output", str(out)])
            text = out.read_text() if code == 0 else f"exit {code}"
            outputs.append(text if argv[0] == "gen" else _without_timing(text))
        if any(o != outputs[0] for o in outputs):
            problems.append(" ".join(map(str, argv[:3])))
    raw = [re.sub(r'"seconds": [0-9.e-]+', "", (tmp / f"c0_{v}.out").read_text()) for v in range(3)]
    if len(set(raw)) != 1:
        problems.append("raw text differs outside the timing field")
    return report(capsys, 9, "determinism", not problems, time.perf_counter() - t, 60, "; ".join(problems))


def test_criterion_1_closed_form(capsys):
    assert criterion_1(capsys)


def test_criterion_2_adversarial_exhibit(capsys):
    assert criterion_2(capsys)


def test_criterion_3_zero_one_theorem(capsys):
    assert criterion_3(capsys)


def test_criterion_4_oracle_equivalence(capsys):
    assert criterion_4(capsys)


def test_criterion_5_duality(capsys):
    assert criterion_5(capsys)


def test_criterion_6_approximation_contracts(capsys):
    assert criterion_6(capsys)


def test_criterion_7_swapping_soundness(capsys):
    assert criterion_7(capsys)


def test_criterion_8_var_pipeline(capsys):
    assert criterion_8(capsys)


def test_criterion_9_determinism(tmp_path, capsys):
    assert criterion_9(tmp_path, capsys)


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as d:
        results = [criterion_1(), criterion_2(), criterion_3(), criterion_4(), criterion_5(),
                   criterion_6(), criterion_7(), criterion_8(), criterion_9(d)]
    sys.exit(0 if all(results) else 1)
