"""Independent check of a result document against its instance file.

Deliberately self-contained: it parses the CSV itself and re-applies the
profile with plain rational arithmetic, sharing no code with the solvers.
"""

from __future__ import annotations

import json
from fractions import Fraction


def _read_rows(text: str) -> list[list[Fraction]]:
    scale = Fraction(1)
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for part in line[1:].split():
                if part.startswith("scale="):
                    scale = Fraction(part[len("scale="):])
            continue
        rows.append([Fraction(c.strip()) / scale for c in line.split(",")])
    return rows


def _mixed_sums(rows: list[list[Fraction]], perms) -> tuple[list[Fraction] | None, str]:
    m, d = len(rows), len(rows[0])
    if perms is None:
        return None, "document has no profile to check"
    if len(perms) != d:
        return None, f"profile has {len(perms)} permutations, instance has {d} columns"
    for j, p in enumerate(perms):
        if sorted(p) != list(range(m)):
            return None, f"profile entry {j} is not a permutation of 0..{m - 1}"
    mixed = [[Fraction(0)] * d for _ in range(m)]
    for j, p in enumerate(perms):
        for r in range(m):
            mixed[p[r]][j] = rows[r][j]
    return [sum(row) for row in mixed], ""


def _verify_var_bounds(rows: list[list[Fraction]], doc: dict) -> list[str]:
    # the instance text is the marginals table; each side uses a block of its rows
    problems = []
    for side, pick in (("upper", min), ("lower", max)):
        lo, hi = doc["rows"][side]
        sums, err = _mixed_sums(rows[lo:hi + 1], doc[f"{side}_result"].get("profile"))
        if sums is None:
            problems.append(f"{side}: {err}")
        elif Fraction(doc[side]) != pick(sums):
            problems.append(f"{side}: claimed {doc[side]} but the profile gives {pick(sums)}")
    return problems


def verify(instance_text: str, document_text: str) -> list[str]:
    """Return a list of problems; empty means the document checks out."""
    rows = _read_rows(instance_text)
    doc = json.loads(document_text)
    if doc.get("objective") == "var_bounds":
        return _verify_var_bounds(rows, doc)
    problems = []
    sums, err = _mixed_sums(rows, doc.get("profile"))
    if sums is None:
        return [err]
    claimed = [Fraction(s) for s in doc.get("row_sums", [])]
    if claimed != sums:
        problems.append("row_sums do not match the re-applied profile")
    objective = doc.get("objective")
    value = doc.get("gamma") if objective == "mixability" else doc.get("value")
    if objective == "beta":
        expected = min(sums)
    else:
        expected = max(sums)
    if value is None or Fraction(value) != expected:
        problems.append(f"claimed value {value} but the profile gives {expected}")
    if objective == "mixability" and doc.get("mixable") and len(set(sums)) != 1:
        problems.append("claimed mixable but row sums differ")
    return problems
