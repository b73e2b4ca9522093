"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 solver refused (budget) or a
document failed verification.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import constructions, io, solve
from .core import BudgetExceeded, MixabilityError
from .verify import verify
from .varbounds import var_bounds

EXIT_OK, EXIT_INPUT, EXIT_REFUSED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _solver_args(p: argparse.ArgumentParser, default: str = "auto") -> None:
    p.add_argument("--solver", default=default, choices=solve.SOLVERS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--epsilon", type=Fraction, default=Fraction(1, 2))
    p.add_argument("--budget-steps", type=int, default=None,
                   help="enumeration budget (brute force profiles, swap steps per restart)")
    p.add_argument("--budget-states", type=int, default=None, help="DP state budget")
    p.add_argument("--workers", type=int, default=1, help="processes for swap restarts")
    p.add_argument("--output", type=Path, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mixability", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="decide complete mixability exactly")
    p.add_argument("path", type=Path)
    p.add_argument("--budget-steps", type=int, default=None)
    p.add_argument("--budget-states", type=int, default=None)
    p.add_argument("--output", type=Path, default=None)

    for name, what in (("gamma", "minimal maximum row sum"), ("beta", "maximal minimum row sum")):
        p = sub.add_parser(name, help=what)
        p.add_argument("path", type=Path)
        _solver_args(p)

    p = sub.add_parser("gen", help="write a generated instance as CSV")
    p.add_argument("kind", choices=[
        "consecutive", "mixable-consecutive", "adversarial-identity",
        "partition", "n3dm", "glue", "additive-stress",
    ])
    p.add_argument("--N", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int, default=None, help="random column orders (consecutive)")
    p.add_argument("--values", type=_ints, help="comma-separated integers (partition)")
    p.add_argument("--x", type=_ints)
    p.add_argument("--y", type=_ints)
    p.add_argument("--z", type=_ints)
    p.add_argument("--a", type=Path, help="first instance (glue)")
    p.add_argument("--b", type=Path, help="second instance (glue)")
    p.add_argument("--columnwise", action="store_true", help="glue rows elementwise, keeping d")
    p.add_argument("--input", type=Path, help="base instance (additive-stress)")
    p.add_argument("--K", type=int, default=1)
    p.add_argument("--K-prime", type=int, default=None)
    p.add_argument("--output", type=Path, default=None)

    p = sub.add_parser("var-bounds", help="bounds on the alpha-quantile of the sum")
    p.add_argument("path", type=Path, help="marginals CSV")
    p.add_argument("--alpha", type=Fraction, required=True)
    p.add_argument("--N", type=int, default=None)
    _solver_args(p, default="brute")

    p = sub.add_parser("verify", help="re-apply a result's profile and check its claims")
    p.add_argument("path", type=Path, help="instance CSV")
    p.add_argument("result", type=Path, help="result JSON")
    return parser


def _opts(args) -> dict:
    opts = {"seed": args.seed, "restarts": args.restarts, "epsilon": args.epsilon, "workers": args.workers}
    if args.budget_steps is not None:
        opts["budget_steps"] = args.budget_steps
    if args.budget_states is not None:
        opts["budget_states"] = args.budget_states
    return opts


def _parameters(args, solver: str) -> dict:
    params = {"solver": solver}
    if solver == "swap":
        params.update(seed=args.seed, restarts=args.restarts)
    if solver == "ptas":
        params["epsilon"] = io.format_rational(args.epsilon)
    for key in ("budget_steps", "budget_states"):
        if getattr(args, key, None) is not None:
            params[key] = getattr(args, key)
    return params


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)


def _gen(args):
    need = lambda *names: [n for n in names if getattr(args, n) is None]  # noqa: E731
    missing = {
        "consecutive": need("N", "d"),
        "mixable-consecutive": need("d", "k"),
        "adversarial-identity": need("N"),
        "partition": need("values"),
        "n3dm": need("x", "y", "z"),
        "glue": need("a", "b"),
        "additive-stress": need("input"),
    }[args.kind]
    if missing:
        raise io.InputError(f"gen {args.kind} needs --{', --'.join(missing)}")
    if args.kind == "consecutive":
        spec = (constructions.ConsecutiveSpec(args.N, args.d) if args.seed is None
                else constructions.ConsecutiveSpec.random(args.N, args.d, args.seed))
        return constructions.consecutive_matrix(spec)
    if args.kind == "mixable-consecutive":
        return constructions.mixable_consecutive_construction(args.d, args.k)[0]
    if args.kind == "adversarial-identity":
        return constructions.adversarial_identity(args.N)
    if args.kind == "partition":
        return constructions.partition_instance(args.values)
    if args.kind == "n3dm":
        return constructions.n3dm_instance(args.x, args.y, args.z)
    if args.kind == "glue":
        A, B = io.read_instance(args.a), io.read_instance(args.b)
        return (constructions.glue_columnwise if args.columnwise else constructions.glue)(A, B)
    return constructions.additive_stress_instance(io.read_instance(args.input), args.K, args.K_prime)


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = time.perf_counter()
    try:
        if args.command == "gen":
            _emit(io.format_instance(_gen(args)), args.output)
            return EXIT_OK
        if args.command == "verify":
            problems = verify(args.path.read_text(), args.result.read_text())
            for line in problems:
                print(line, file=sys.stderr)
            print("ok" if not problems else "FAILED")
            return EXIT_OK if not problems else EXIT_REFUSED
        if args.command == "var-bounds":
            marginals = io.parse_marginals(args.path.read_text())
            report = var_bounds(marginals, args.alpha, args.N, args.solver, **_opts(args))
            doc = io.var_bounds_document(report, _parameters(args, args.solver))
        elif args.command == "check":
            A = io.read_instance(args.path)
            opts = {k: v for k, v in (("budget_steps", args.budget_steps), ("budget_states", args.budget_states))
                    if v is not None}
            mixable, res = solve.check(A, **opts)
            params = {k: v for k, v in opts.items()}
            doc = io.check_document(A, mixable, res, params)
        else:
            A = io.read_instance(args.path)
            fn = solve.gamma if args.command == "gamma" else solve.beta
            res = fn(A, args.solver, **_opts(args))
            doc = io.result_document(A, res, _parameters(args, args.solver), args.solver)
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (OSError, ValueError, MixabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    doc["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    _emit(io.dumps(doc), args.output)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
