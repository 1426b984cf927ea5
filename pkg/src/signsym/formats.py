"""Text and JSON problem documents, solution files and signed cycle notation.

Problem text format::

    # comments start with '#'
    name: example
    variables: x1 x2 x3
    minimize: x1 - x2 + x3
    subject to:
    x1 - x2 + x3 <= 1
    x2 <= x1

Rows may carry variables on both sides and use ``<=``, ``>=`` or ``=``;
an optional ``label:`` prefix on a row is ignored.  Numbers are exact
decimals or fractions (``0.25``, ``3/4``).

Cycle notation is 1-based; a minus sign (or ``~``) marks a complemented
literal, so ``(1 -2 3)`` sends x1 to the complement of x2, the complement
of x2 to x3 and x3 back to x1.  The mirrored cycle ``(-1 2 -3)`` is implied
and never printed.  A cycle that is its own mirror is written out in full,
e.g. ``(1 -1)`` for complementing x1.
"""
from __future__ import annotations

import json
import re
from collections import defaultdict
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .model import (
    EQ,
    GE,
    LE,
    BinaryProblem,
    Constraint,
    RowPermutation,
    SignedPermutation,
    as_fraction,
    make_constraint,
)


class DocumentError(ValueError):
    """Malformed input document; carries a 1-based line and column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class CycleSyntaxError(ValueError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:/\d+)?)"
    r"|(?P<name>[A-Za-z_~][A-Za-z0-9_.~\[\]]*)"
    r"|(?P<sense><=|>=|=<|=>|==|=)"
    r"|(?P<op>[+\-*]))"
)
_SENSES = {"<=": LE, "=<": LE, ">=": GE, "=>": GE, "=": EQ, "==": EQ}
_NAME = r"[A-Za-z_~][A-Za-z0-9_.~\[\]]*"
_HEADERS = {
    "name", "variables", "binary", "binaries", "minimize", "minimise", "min",
    "maximize", "maximise", "max", "subject to", "st", "constraints",
}
_NON_BINARY = {"integer", "integers", "general", "generals", "continuous", "bounds", "semicontinuous"}


def _tokenize(text: str, line: int, col0: int):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            col = col0 + pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise DocumentError(f"unexpected character {text[col - col0]!r}", line, col + 1)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), col0 + start + 1))
        pos = m.end()
    return tokens


def _parse_linear(tokens, line: int, names: dict[str, int]):
    """Linear expression -> ({var index: coef}, constant)."""
    coefs: dict[int, Fraction] = defaultdict(Fraction)
    const = Fraction(0)
    i = 0
    if not tokens:
        raise DocumentError("empty expression", line)
    first = True
    while i < len(tokens):
        sign = 1
        kind, text, col = tokens[i]
        if kind == "op" and text in "+-":
            sign = -1 if text == "-" else 1
            i += 1
        elif not first:
            raise DocumentError(f"expected '+' or '-' before {text!r}", line, col)
        first = False
        if i >= len(tokens):
            raise DocumentError("expression ends with an operator", line)
        kind, text, col = tokens[i]
        number = None
        if kind == "num":
            number = Fraction(text)
            i += 1
            if i < len(tokens) and tokens[i][0] == "op" and tokens[i][1] == "*":
                i += 1
                if i >= len(tokens) or tokens[i][0] != "name":
                    raise DocumentError("expected a variable after '*'", line, col)
            kind, text, col = tokens[i] if i < len(tokens) else (None, None, None)
        if kind == "name":
            if text not in names:
                raise DocumentError(f"unknown variable {text!r}", line, col)
            coefs[names[text]] += sign * (number if number is not None else 1)
            i += 1
        elif number is not None:
            const += sign * number
        else:
            raise DocumentError(f"unexpected token {text!r}", line, col)
    return {j: a for j, a in coefs.items() if a != 0}, const


def _split_header(raw: str):
    m = re.match(r"\s*([A-Za-z][A-Za-z ]*?)\s*:(.*)$", raw)
    if not m:
        return None, raw
    return m.group(1).lower(), m.group(2)


def parse_problem(text: str) -> BinaryProblem:
    """Parse a problem document (text or JSON) into a canonical BinaryProblem."""
    if text.lstrip().startswith("{"):
        try:
            return problem_from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise DocumentError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    name = "problem"
    names: dict[str, int] | None = None
    var_list: list[str] = []
    objective = None
    offset = Fraction(0)
    rows = []
    in_rows = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        key, rest = _split_header(line)
        if key is not None and (key in _HEADERS or key in _NON_BINARY or not in_rows):
            col0 = len(line) - len(rest)
            if key == "name":
                name = rest.strip() or name
            elif key in ("variables", "binary", "binaries"):
                var_list = rest.split()
                seen = set()
                for v in var_list:
                    if not re.fullmatch(_NAME, v):
                        raise DocumentError(f"invalid variable name {v!r}", lineno, line.index(v) + 1)
                    if v in seen:
                        raise DocumentError(f"duplicate variable {v!r}", lineno, line.index(v) + 1)
                    seen.add(v)
                names = {v: j for j, v in enumerate(var_list)}
            elif key in ("minimize", "minimise", "min"):
                if names is None:
                    raise DocumentError("objective before variable declaration", lineno, 1)
                tokens = _tokenize(rest, lineno, col0)
                if any(t[0] == "sense" for t in tokens):
                    raise DocumentError("objective must not contain a relation", lineno)
                objective, offset = _parse_linear(tokens, lineno, names) if tokens else ({}, Fraction(0))
            elif key in ("maximize", "maximise", "max"):
                raise DocumentError("only minimization is supported", lineno, 1)
            elif key in _NON_BINARY:
                raise DocumentError(f"non-binary declaration {key!r}: all variables are binary", lineno, 1)
            elif key in ("subject to", "st", "constraints"):
                if names is None:
                    raise DocumentError("constraints before variable declaration", lineno, 1)
                in_rows = True
                if rest.strip():
                    rows.append(_parse_row(rest, lineno, col0, names))
            else:
                raise DocumentError(f"unknown section {key!r}", lineno, 1)
            continue
        if not in_rows:
            raise DocumentError(f"expected a 'key:' line, got {line.strip()!r}", lineno, 1)
        label = re.match(r"\s*[A-Za-z_][\w.\[\]]*\s*:", line)
        col0 = label.end() if label else 0
        rows.append(_parse_row(line[col0:], lineno, col0, names))
    if names is None:
        raise DocumentError("missing 'variables:' declaration")
    objective = objective or {}
    return BinaryProblem(
        n=len(var_list),
        rows=tuple(rows),
        objective=tuple(objective.get(j, Fraction(0)) for j in range(len(var_list))),
        objective_offset=offset,
        name=name,
        var_names=tuple(var_list),
    )


def _parse_row(text: str, lineno: int, col0: int, names) -> Constraint:
    tokens = _tokenize(text, lineno, col0)
    senses = [k for k, t in enumerate(tokens) if t[0] == "sense"]
    if len(senses) != 1:
        raise DocumentError("a row needs exactly one of <=, >=, =", lineno, col0 + 1)
    k = senses[0]
    lhs, lconst = _parse_linear(tokens[:k], lineno, names)
    rhs, rconst = _parse_linear(tokens[k + 1 :], lineno, names)
    coefs = defaultdict(Fraction, lhs)
    for j, a in rhs.items():
        coefs[j] -= a
    return make_constraint(coefs, _SENSES[tokens[k][1]], rconst - lconst)


def _fmt_linear(terms: Sequence[tuple[str, Fraction]], const: Fraction = Fraction(0)) -> str:
    parts = []
    for name, a in terms:
        mag = abs(a)
        body = name if mag == 1 else f"{mag} {name}"
        if not parts:
            parts.append(body if a > 0 else "-" + body)
        else:
            parts.append(("+ " if a > 0 else "- ") + body)
    if const != 0 or not parts:
        if not parts:
            parts.append(str(const))
        else:
            parts.append(("+ " if const > 0 else "- ") + str(abs(const)))
    return " ".join(parts)


def format_row(problem: BinaryProblem, row: Constraint) -> str:
    names = problem.var_names
    lhs = _fmt_linear([(names[j], a) for j, a in row.coefficients])
    return f"{lhs} {row.sense} {row.rhs}"


def format_problem(problem: BinaryProblem) -> str:
    names = problem.var_names
    obj = _fmt_linear(
        [(names[j], c) for j, c in enumerate(problem.objective) if c != 0], problem.objective_offset
    )
    lines = [
        f"name: {problem.name}",
        "variables: " + " ".join(names),
        f"minimize: {obj}",
        "subject to:",
    ]
    lines.extend(format_row(problem, row) for row in problem.rows)
    return "\n".join(lines) + "\n"


def _json_number(value) -> Fraction:
    if isinstance(value, bool):
        raise DocumentError(f"expected a number, got {value!r}")
    if isinstance(value, float):
        value = repr(value)
    try:
        return as_fraction(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise DocumentError(f"expected a number, got {value!r}") from None


def problem_from_json(doc: dict) -> BinaryProblem:
    try:
        var_list = list(doc["variables"])
    except (KeyError, TypeError):
        raise DocumentError("missing 'variables' list") from None
    if len(set(var_list)) != len(var_list):
        raise DocumentError("duplicate variable names")
    if doc.get("sense", "minimize") != "minimize":
        raise DocumentError("only minimization is supported")
    if doc.get("types") not in (None, "binary"):
        raise DocumentError("all variables must be binary")
    names = {v: j for j, v in enumerate(var_list)}

    def terms(mapping, where):
        out = {}
        for v, a in mapping.items():
            if v not in names:
                raise DocumentError(f"unknown variable {v!r} in {where}")
            out[names[v]] = _json_number(a)
        return out

    obj = terms(doc.get("objective", {}), "objective")
    rows = []
    for k, row in enumerate(doc.get("constraints", [])):
        sense = _SENSES.get(row.get("sense"))
        if sense is None:
            raise DocumentError(f"constraint {k}: bad sense {row.get('sense')!r}")
        rows.append(make_constraint(terms(row.get("terms", {}), f"constraint {k}"), sense, _json_number(row.get("rhs", 0))))
    return BinaryProblem(
        n=len(var_list),
        rows=tuple(rows),
        objective=tuple(obj.get(j, Fraction(0)) for j in range(len(var_list))),
        objective_offset=_json_number(doc.get("offset", 0)),
        name=str(doc.get("name", "problem")),
        var_names=tuple(var_list),
    )


def problem_to_json(problem: BinaryProblem) -> dict:
    names = problem.var_names
    return {
        "name": problem.name,
        "variables": list(names),
        "objective": {names[j]: str(c) for j, c in enumerate(problem.objective) if c != 0},
        "offset": str(problem.objective_offset),
        "constraints": [
            {
                "terms": {names[j]: str(a) for j, a in row.coefficients},
                "sense": row.sense,
                "rhs": str(row.rhs),
            }
            for row in problem.rows
        ],
    }


def read_problem(path: str | Path) -> BinaryProblem:
    return parse_problem(Path(path).read_text())


def parse_solution(text: str, n: int | None = None) -> tuple[int, ...]:
    """First non-comment line of 0/1 characters (spaces allowed)."""
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].replace(" ", "").replace(",", "").strip()
        if not line:
            continue
        if set(line) - {"0", "1"}:
            raise DocumentError(f"solution must be 0/1 characters, got {line!r}")
        values = tuple(int(ch) for ch in line)
        if n is not None and len(values) != n:
            raise DocumentError(f"solution has {len(values)} entries, problem has {n} variables")
        return values
    raise DocumentError("empty solution file")


def _literal_map(perm: SignedPermutation) -> dict[int, int]:
    """Action on 1-based signed literals."""
    sigma = {}
    for j, (i, s) in enumerate(perm.targets):
        sigma[j + 1] = s * (i + 1)
        sigma[-(j + 1)] = -s * (i + 1)
    return sigma


def format_cycles(perm: SignedPermutation) -> str:
    """Cycle text of a signed permutation; ``"()"`` for the identity."""
    sigma = _literal_map(perm)
    seen = set()
    out = []
    for start in range(1, perm.n + 1):
        if start in seen or sigma[start] == start:
            continue
        cycle = [start]
        lit = sigma[start]
        while lit != start:
            cycle.append(lit)
            lit = sigma[lit]
        seen.update(cycle)
        seen.update(-l for l in cycle)
        out.append("(" + " ".join(str(l) for l in cycle) + ")")
    return "".join(out) or "()"


def format_row_permutation(rows: RowPermutation) -> str:
    return format_cycles(SignedPermutation.from_perm(rows.mapping))


def parse_cycles(text: str, n: int) -> SignedPermutation:
    text = text.strip()
    if not re.fullmatch(r"(\(\s*[^()]*\))*", text.replace(" ", "")) and text not in ("", "id"):
        raise CycleSyntaxError(f"malformed cycle text {text!r}")
    sigma: dict[int, int] = {}
    used: set[int] = set()
    for body in re.findall(r"\(([^()]*)\)", text):
        items = [t for t in re.split(r"[\s,]+", body.strip()) if t]
        if not items:
            continue
        lits = []
        for t in items:
            m = re.fullmatch(r"([-~]?)(\d+)", t)
            if not m:
                raise CycleSyntaxError(f"bad literal {t!r}")
            k = int(m.group(2))
            if not 1 <= k <= n:
                raise CycleSyntaxError(f"index {k} out of range 1..{n}")
            lits.append(-k if m.group(1) else k)
        idx = [abs(l) for l in lits]
        half = len(lits) // 2
        self_mirror = (
            len(lits) % 2 == 0 and lits[half:] == [-l for l in lits[:half]] and len(set(idx[:half])) == half
        )
        if not self_mirror and len(set(idx)) != len(idx):
            raise CycleSyntaxError(f"index repeated inside cycle ({body.strip()})")
        if used & set(idx):
            raise CycleSyntaxError(f"index appears in more than one cycle: ({body.strip()})")
        used.update(idx)
        for a, b in zip(lits, lits[1:] + lits[:1]):
            sigma[a] = b
            sigma[-a] = -b
    targets = []
    for j in range(1, n + 1):
        t = sigma.get(j, j)
        targets.append((abs(t) - 1, 1 if t > 0 else -1))
    try:
        return SignedPermutation.from_targets(targets)
    except ValueError as exc:
        raise CycleSyntaxError(str(exc)) from None


def format_literal(problem: BinaryProblem, var: int, negated: bool) -> str:
    return ("~" if negated else "") + problem.var_names[var]
