"""Instance/marginal CSV files and JSON result documents."""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

from .core import Matrix, MixResult
from .exact import NotMixable
from .varbounds import DiscreteMarginal, VarBoundReport

_HEADER = re.compile(r"^#\s*(.*)$")
_FIELD = re.compile(r"(\w+)\s*=\s*(\S+)")


class InputError(ValueError):
    pass


def _parse_header(line: str) -> dict[str, str]:
    m = _HEADER.match(line.strip())
    return dict(_FIELD.findall(m.group(1))) if m else {}


def _parse_table(text: str) -> tuple[dict[str, str], list[list[Fraction]]]:
    header: dict[str, str] = {}
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            header.update(_parse_header(line))
            continue
        try:
            rows.append([Fraction(cell.strip()) for cell in line.split(",")])
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"line {lineno}: cannot parse {line!r} as rationals") from exc
    if not rows:
        raise InputError("no data rows")
    if any(len(r) != len(rows[0]) for r in rows):
        raise InputError("rows have different lengths")
    return header, rows


def _check_header(header: dict[str, str], key: str, actual: int) -> None:
    if key in header and int(header[key]) != actual:
        raise InputError(f"header says {key}={header[key]} but data has {actual}")


def parse_instance(text: str) -> Matrix:
    """CSV rows of integers or rationals; optional ``# m=.. d=.. scale=..`` header.

    With ``scale=s`` the listed numbers are read as ``s`` times the actual entries.
    """
    header, rows = _parse_table(text)
    _check_header(header, "m", len(rows))
    _check_header(header, "d", len(rows[0]))
    scale = Fraction(header.get("scale", "1"))
    if scale <= 0:
        raise InputError("scale must be positive")
    return Matrix.from_rationals([[v / scale for v in row] for row in rows])


def read_instance(path: str | Path) -> Matrix:
    return parse_instance(Path(path).read_text())


def format_instance(A: Matrix) -> str:
    lines = [f"# m={A.m} d={A.d} scale={A.scale}"]
    lines += [",".join(str(v - A.shift) for v in row) for row in A]
    return "\n".join(lines) + "\n"


def parse_marginals(text: str) -> list[DiscreteMarginal]:
    """One marginal per column, rows r = 0..N, optional ``# N=.. d=..`` header."""
    header, rows = _parse_table(text)
    _check_header(header, "N", len(rows) - 1)
    _check_header(header, "d", len(rows[0]))
    try:
        return [DiscreteMarginal(tuple(col)) for col in zip(*rows)]
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def result_document(A: Matrix, res: MixResult, parameters: dict[str, Any], solver: str) -> dict[str, Any]:
    return {
        "objective": res.objective,
        "value": format_rational(A.original_row_sum(res.value)),
        "status": res.status_label,
        "profile": res.profile.as_lists(),
        "row_sums": [format_rational(A.original_row_sum(s)) for s in res.row_sums],
        "solver": res.meta.get("solver", solver),
        "parameters": parameters,
        "meta": {k: v for k, v in sorted(res.meta.items()) if k != "solver"},
    }


def check_document(A: Matrix, mixable: bool, res: MixResult | NotMixable, parameters: dict[str, Any]) -> dict[str, Any]:
    if isinstance(res, NotMixable):
        return {
            "objective": "mixability",
            "mixable": False,
            "value": None,
            "status": "exact",
            "witness": {"reason": "m does not divide the grand total", "total": format_rational(
                Fraction(res.total - A.m * A.d * A.shift, A.scale)), "m": res.m},
            "solver": "divisibility",
            "parameters": parameters,
        }
    doc = result_document(A, res, parameters, res.meta.get("solver", "auto"))
    doc["objective"] = "mixability"
    doc["mixable"] = mixable
    doc["gamma"] = doc.pop("value")
    doc["value"] = doc["gamma"] if mixable else None
    return doc


def var_bounds_document(report: VarBoundReport, parameters: dict[str, Any]) -> dict[str, Any]:
    def side(res: MixResult) -> dict[str, Any]:
        return {
            "objective": res.objective,
            "status": res.status_label,
            "profile": res.profile.as_lists(),
        }

    return {
        "objective": "var_bounds",
        "alpha": format_rational(report.alpha),
        "lower": format_rational(report.lower),
        "upper": format_rational(report.upper),
        "lower_status": report.lower_status,
        "upper_status": report.upper_status,
        "rows": {k: list(v) for k, v in report.rows.items()},
        "solver": report.solver,
        "note": report.note,
        "lower_result": side(report.lower_result),
        "upper_result": side(report.upper_result),
        "parameters": parameters,
    }


def dumps(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
