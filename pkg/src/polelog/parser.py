"""Polynomial expression parser.

Grammar (no implicit multiplication)::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary | '/' unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := NUMBER | NAME | '(' expr ')'

Division is only allowed by a nonzero constant, which is how rational
coefficients such as ``3/2*x`` are written.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .poly import InhomogeneousError, Poly, poly_add, poly_mul

__all__ = ["PolySyntaxError", "parse_poly", "parse_terms", "parse_rational"]


class PolySyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PolySyntaxError(f"unexpected character {text[start]!r}", text, start)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            if op == "**":
                raise PolySyntaxError("use '^' for powers", text, start)
            toks.append(("op", op, start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.names = list(names)
        self.index = {v: i for i, v in enumerate(self.names)}
        self.toks = _tokenize(text)
        self.i = 0
        self.n = len(self.names)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise PolySyntaxError(msg, self.text, tok[2])

    def const(self, c) -> dict:
        c = Fraction(c)
        return {(0,) * self.n: c} if c else {}

    def parse(self) -> dict:
        if self.peek()[0] == "end":
            self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            tok = self.peek()
            if tok[0] in ("num", "name") or tok[1] == "(":
                self.error("implicit multiplication is not allowed", tok)
            self.error(f"unexpected {tok[1]!r}", tok)
        return p

    def expr(self) -> dict:
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = poly_add(p, q, 1 if op == "+" else -1)
        return p

    def term(self) -> dict:
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            tok = self.take()
            q = self.unary()
            if tok[1] == "*":
                p = poly_mul(p, q)
            else:
                if any(any(m) for m in q) or not q:
                    self.error("division only by a nonzero constant", tok)
                c = next(iter(q.values()))
                p = {m: v / c for m, v in p.items()}
        return p

    def unary(self) -> dict:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            p = self.unary()
            return p if tok[1] == "+" else {m: -v for m, v in p.items()}
        return self.power()

    def power(self) -> dict:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num" or not tok[1].isdigit():
                self.error("exponent must be a nonnegative integer", tok)
            out = self.const(1)
            for _ in range(int(tok[1])):
                out = poly_mul(out, base)
            return out
        return base

    def atom(self) -> dict:
        tok = self.take()
        if tok[0] == "num":
            return self.const(Fraction(tok[1]))
        if tok[0] == "name":
            if tok[1] not in self.index:
                self.error(f"unknown variable {tok[1]!r}", tok)
            m = [0] * self.n
            m[self.index[tok[1]]] = 1
            return {tuple(m): Fraction(1)}
        if tok[1] == "(":
            p = self.expr()
            close = self.take()
            if close[1] != ")":
                self.error("expected ')'", close)
            return p
        self.error("expected a number, variable or '('", tok)


def _infer_names(text: str) -> list[str]:
    seen = []
    for m in re.finditer(r"[A-Za-z_][A-Za-z0-9_]*", text):
        if m.group(0) not in seen:
            seen.append(m.group(0))
    order = ["x", "y", "z", "w"]
    if all(v in order for v in seen):
        return [v for v in order if v in seen]
    return sorted(seen)


def parse_terms(text: str, names: Sequence[str] | None = None) -> tuple[dict, list[str]]:
    names = list(names) if names else _infer_names(text)
    return _Parser(text, names).parse(), names


def parse_poly(text: str, names: Sequence[str] | None = None, weights: Sequence[int] | None = None) -> Poly:
    """Parse ``text`` into a weighted homogeneous :class:`Poly`.

    ``names`` fixes the variable order (default: the variables that occur,
    x, y, z, w first).  ``weights`` default to all ones.
    """
    terms, names = parse_terms(text, names)
    if not terms:
        raise ValueError("the polynomial is zero")
    if weights is not None and len(weights) != len(names):
        raise ValueError(f"{len(weights)} weights given for {len(names)} variables")
    return Poly.from_terms(terms, weights, names)


def parse_rational(s: str) -> Fraction:
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {s!r}") from exc


# re-exported for callers that catch parse failures uniformly
ParseErrors = (PolySyntaxError, InhomogeneousError)
