"""Parser for the polynomial text grammar.

Grammar: integers, rationals ``p/q`` (integer literals only), symbol names
matching ``[A-Za-z][A-Za-z0-9_]*``, operators ``+ - * ^``, parentheses.
Jet symbols are written ``<fn>_<indices>`` (``f_23`` is the second derivative
of ``f`` by the coordinates labelled 2 and 3) and must be declared in the
symbol table.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .poly import Frac, Poly, UnknownSymbolError, VarTable


class ParseError(Exception):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at offset {position}")


_TOKEN_KINDS = ("int", "name", "op", "end")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
        elif ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
        elif ch in "+-*^()/":
            tokens.append(("op", ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character '{ch}'", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, vt: VarTable):
        self.text = text
        self.vt = vt
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect_op(self, op: str):
        kind, val, at = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected '{op}'", at)

    def parse(self) -> Poly:
        p = self.expr()
        kind, val, at = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected '{val}'", at)
        return p

    def expr(self) -> Poly:
        kind, val, at = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.next()
            sign = -1 if val == "-" else 1
        p = self.term()
        if sign < 0:
            p = -p
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                q = self.term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def term(self) -> Poly:
        p = self.factor()
        while True:
            kind, val, at = self.peek()
            if kind == "op" and val == "*":
                self.next()
                p = p * self.factor()
            elif kind == "op" and val == "/":
                raise ParseError("'/' is only allowed between integer literals", at)
            else:
                return p

    def factor(self) -> Poly:
        p = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            kind, val, at = self.next()
            if kind != "int":
                raise ParseError("exponent must be an integer literal", at)
            return p ** int(val)
        return p

    def atom(self) -> Poly:
        kind, val, at = self.next()
        if kind == "op" and val == "-":
            return -self.atom()
        if kind == "op" and val == "+":
            return self.atom()
        if kind == "int":
            kind2, val2, _ = self.peek()
            if kind2 == "op" and val2 == "/":
                self.next()
                kind3, val3, at3 = self.next()
                if kind3 != "int":
                    raise ParseError("rational literal needs an integer denominator", at3)
                if int(val3) == 0:
                    raise ParseError("zero denominator in rational literal", at3)
                return Poly.const(self.vt, Fraction(int(val), int(val3)))
            return Poly.const(self.vt, int(val))
        if kind == "name":
            if not self.vt.has(val):
                raise UnknownSymbolError(val, at)
            return Poly.var(self.vt, val)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        raise ParseError(f"unexpected {'end of input' if kind == 'end' else repr(val)}", at)


def parse_poly(text: str, vt: VarTable) -> Poly:
    """Parse an expression in the polynomial grammar against a symbol table."""
    return _Parser(text, vt).parse()


def parse_ring_elem(value: Union[str, dict], vt: VarTable):
    """Parse a scenario ring element: a polynomial string or a {num, den} pair."""
    if isinstance(value, str):
        return parse_poly(value, vt)
    if isinstance(value, dict) and set(value) <= {"num", "den"}:
        num = parse_poly(value["num"], vt)
        den = parse_poly(value.get("den", "1"), vt)
        return Frac(num, den)
    raise ParseError("ring element must be a string or a {num, den} object", 0)
