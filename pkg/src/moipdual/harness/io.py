"""Line-oriented instance files.

::

    # comments run to the end of the line
    moip 1
    objectives 2
    variables 2
    var 0 inf
    var 0 inf
    C
    2 1
    1 2
    constraints 1
    1 1 <= 2 dualized

Numbers may be integers, decimals or ``p/q``.  Rows read ``<=`` or ``>=``;
``>=`` rows are negated on input.  ``dualized`` marks rows of ``A¹``.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..exceptions import ParseError
from ..model import MoipInstance

MAX_DENOMINATOR = 1024


class _Lines:
    def __init__(self, text: str):
        self.items = []
        for no, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0]
            if body.strip():
                self.items.append((no, body))
        self.pos = 0
        self.last = len(text.splitlines()) or 1

    def next(self, what: str):
        if self.pos >= len(self.items):
            raise ParseError(f"unexpected end of input, expected {what}", self.last + 1)
        item = self.items[self.pos]
        self.pos += 1
        return item[0], _tokens(item[1])

    def done(self) -> bool:
        return self.pos >= len(self.items)


def _tokens(body: str) -> list:
    out = []
    i = 0
    while i < len(body):
        if body[i].isspace():
            i += 1
            continue
        j = i
        while j < len(body) and not body[j].isspace():
            j += 1
        out.append((body[i:j], i + 1))
        i = j
    return out


def _number(tok: str, line: int, col: int, allow_inf: bool = False) -> float:
    low = tok.lower()
    if allow_inf and low in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        val = float(Fraction(tok))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"expected a number, found {tok!r}", line, col) from None
    if not math.isfinite(val):
        raise ParseError(f"number out of range: {tok!r}", line, col)
    return val


def _keyword(lines: _Lines, word: str, count: bool) -> int | None:
    line, toks = lines.next(f"'{word}'")
    if not toks or toks[0][0] != word:
        got = toks[0][0] if toks else ""
        raise ParseError(f"expected '{word}', found {got!r}", line, toks[0][1] if toks else 1)
    if not count:
        if len(toks) != 1:
            raise ParseError(f"unexpected token {toks[1][0]!r}", line, toks[1][1])
        return None
    if len(toks) != 2:
        col = toks[2][1] if len(toks) > 2 else len(word) + 2
        raise ParseError(f"'{word}' takes exactly one integer", line, col)
    tok, col = toks[1]
    if not tok.isdigit():
        raise ParseError(f"expected a nonnegative integer, found {tok!r}", line, col)
    return int(tok)


def parse_instance(text: str) -> MoipInstance:
    lines = _Lines(text)
    line, toks = lines.next("'moip 1'")
    if [t for t, _ in toks] != ["moip", "1"]:
        got = toks[0][0] if toks else ""
        raise ParseError(f"expected header 'moip 1', found {' '.join(t for t, _ in toks)!r}",
                         line, toks[0][1] if toks else 1)
    k = _keyword(lines, "objectives", True)
    n = _keyword(lines, "variables", True)
    if k < 1 or n < 1:
        raise ParseError("objectives and variables must be positive", line)
    lower, upper = [], []
    for _ in range(n):
        line, toks = lines.next("'var lo hi'")
        if not toks or toks[0][0] != "var":
            raise ParseError(f"expected 'var', found {toks[0][0]!r}", line, toks[0][1])
        if len(toks) != 3:
            raise ParseError("'var' takes a lower and an upper bound", line, toks[0][1])
        lo = _number(toks[1][0], line, toks[1][1])
        hi = _number(toks[2][0], line, toks[2][1], allow_inf=True)
        if lo != int(lo) or (math.isfinite(hi) and hi != int(hi)):
            raise ParseError("variable bounds must be integers", line, toks[1][1])
        lower.append(lo)
        upper.append(hi)
    _keyword(lines, "C", False)
    C = []
    for _ in range(k):
        line, toks = lines.next("an objective row")
        if len(toks) != n:
            raise ParseError(f"objective row needs {n} values, found {len(toks)}", line,
                             toks[min(len(toks), n) - 1][1] if toks else 1)
        C.append([_number(t, line, c) for t, c in toks])
    m = _keyword(lines, "constraints", True)
    A, b, dual = [], [], []
    for i in range(m):
        line, toks = lines.next("a constraint row")
        if len(toks) < n + 2:
            raise ParseError(f"constraint row needs {n} coefficients, a relation and a rhs", line,
                             toks[-1][1] if toks else 1)
        coeffs = [_number(t, line, c) for t, c in toks[:n]]
        rel, rcol = toks[n]
        if rel not in ("<=", ">="):
            raise ParseError(f"unknown relation token {rel!r} (use <= or >=)", line, rcol)
        rhs = _number(toks[n + 1][0], line, toks[n + 1][1])
        rest = toks[n + 2 :]
        if rest and (rest[0][0] != "dualized" or len(rest) > 1):
            bad = rest[0] if rest[0][0] != "dualized" else rest[1]
            raise ParseError(f"unexpected token {bad[0]!r}", line, bad[1])
        if rest:
            dual.append(i)
        sign = -1.0 if rel == ">=" else 1.0
        A.append([sign * a + 0.0 for a in coeffs])
        b.append(sign * rhs + 0.0)
    if not lines.done():
        line, toks = lines.next("end of input")
        raise ParseError(f"unexpected trailing content {toks[0][0]!r}", line, toks[0][1])
    A_arr = np.array(A, dtype=float).reshape(m, n)
    return MoipInstance(np.array(C), A_arr, np.array(b, dtype=float), np.array(lower),
                        np.array(upper), tuple(dual))


def format_number(v: float) -> str:
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == int(v) and abs(v) < 2**53:
        return str(int(v))
    f = Fraction(v)
    if f.denominator <= MAX_DENOMINATOR:
        return f"{f.numerator}/{f.denominator}"
    return repr(v)


def serialize_instance(inst: MoipInstance) -> str:
    out = ["moip 1", f"objectives {inst.k}", f"variables {inst.n}"]
    for lo, hi in zip(inst.lower, inst.upper):
        out.append(f"var {format_number(lo)} {format_number(hi)}")
    out.append("C")
    for row in inst.C:
        out.append(" ".join(format_number(v) for v in row))
    out.append(f"constraints {inst.m}")
    for i in range(inst.m):
        line = " ".join(format_number(v) for v in inst.A[i]) + f" <= {format_number(inst.b[i])}"
        if i in inst.dualized:
            line += " dualized"
        out.append(line)
    return "\n".join(out) + "\n"


def _display(v: float) -> str:
    # 12 significant digits hide float noise such as 0.5249999999999999
    v = float(f"{float(v):.12g}") + 0.0
    return format_number(v)


def format_points(points) -> str:
    """One point per line, coordinates separated by spaces (display precision)."""
    return "".join(" ".join(_display(v) for v in p) + "\n" for p in points)
