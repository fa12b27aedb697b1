"""Exact sparse multivariate polynomials over arbitrary-precision rationals.

Symbols come in two kinds.  *Coordinates* are ordinary polynomial variables.
*Jet symbols* are formal generators standing for smooth coefficient functions
of the coordinates and their partial derivatives; the ring itself treats them
as plain variables, and the chain rule lives entirely in
:func:`partial_derivative`.

A monomial is an exponent tuple over the full symbol list (coordinates first,
then jet symbols in declaration order).  A polynomial is a dict mapping
monomials to nonzero ``Fraction`` coefficients.  The default term order is
graded reverse lexicographic; ``lex`` is available as an option.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Union

Monomial = tuple  # exponent tuple, one int per symbol
Coeff = Fraction

MONOMIAL_ORDERS = ("grevlex", "lex")

_SUFFIX_RE = re.compile(r"^[A-Za-z_]+([0-9]+)$")
_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


class PolyError(Exception):
    """Base class for polynomial-layer errors."""


class UnknownSymbolError(PolyError):
    def __init__(self, name: str, position: Optional[int] = None):
        self.name = name
        self.position = position
        where = f" at offset {position}" if position is not None else ""
        super().__init__(f"unknown symbol '{name}'{where}")


class JetOrderError(PolyError):
    """A derivative would exceed a jet's declared maximal order."""


class NotDivisibleError(PolyError):
    """Exact division failed with a nonzero remainder."""


@dataclass(frozen=True)
class JetSpec:
    """A smooth coefficient function: name, dependency set, maximal derivative order."""

    name: str
    depends: tuple
    max_order: int = 2


def _coord_labels(coords: Sequence[str]) -> tuple:
    """Single-character index label per coordinate, from a numeric name suffix when present."""
    labels = []
    for pos, name in enumerate(coords):
        m = _SUFFIX_RE.match(name)
        labels.append(m.group(1) if m else str(pos + 1))
    if len(set(labels)) != len(labels) or any(len(l) != 1 for l in labels):
        labels = [str(i + 1) for i in range(len(coords))]
    if any(len(l) != 1 for l in labels):
        raise PolyError("coordinate index labels must be single characters (at most 9 coordinates)")
    return tuple(labels)


class VarTable:
    """Symbol table: ordered coordinates plus jet symbols up to each jet's max order.

    The symbol order (coordinates in declaration order, then jet symbols by
    declaration, derivative order and sorted multi-index) fixes the monomial
    order and is part of every report.
    """

    def __init__(self, coords: Sequence[str], jets: Sequence[JetSpec] = (), order: str = "grevlex"):
        if order not in MONOMIAL_ORDERS:
            raise PolyError(f"unknown monomial order '{order}'")
        coords = tuple(coords)
        if len(set(coords)) != len(coords):
            raise PolyError("coordinate names must be unique")
        for name in coords:
            if not _NAME_RE.match(name):
                raise PolyError(f"bad coordinate name '{name}'")
        self.order = order
        self.coords = coords
        self.labels = _coord_labels(coords)
        self.jets = tuple(jets)
        self._label_to_coord = {l: i for i, l in enumerate(self.labels)}
        symbols = list(coords)
        self._jet_of_symbol = {}
        for jspec in self.jets:
            if not _NAME_RE.match(jspec.name):
                raise PolyError(f"bad jet name '{jspec.name}'")
            if jspec.name in symbols:
                raise PolyError(f"duplicate symbol '{jspec.name}'")
            bad = [d for d in jspec.depends if d not in coords]
            if bad:
                raise PolyError(f"jet '{jspec.name}' depends on unknown coordinate '{bad[0]}'")
            dep_labels = sorted(self.labels[coords.index(d)] for d in jspec.depends)
            for k in range(jspec.max_order + 1):
                for multi in itertools.combinations_with_replacement(dep_labels, k):
                    name = jspec.name if k == 0 else jspec.name + "_" + "".join(multi)
                    if name in symbols:
                        raise PolyError(f"duplicate symbol '{name}'")
                    self._jet_of_symbol[len(symbols)] = (jspec, multi)
                    symbols.append(name)
        self.symbols = tuple(symbols)
        self._index = {name: i for i, name in enumerate(symbols)}
        self.nsyms = len(symbols)
        self._zero_mono = (0,) * self.nsyms

    # -- lookups ---------------------------------------------------------

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownSymbolError(name) from None

    def has(self, name: str) -> bool:
        return name in self._index

    def is_coord(self, i: int) -> bool:
        return i < len(self.coords)

    def coord_index(self, name: str) -> int:
        i = self.index(name)
        if not self.is_coord(i):
            raise PolyError(f"'{name}' is not a coordinate")
        return i

    def symbol_derivative(self, sym: int, coord: int) -> Optional[int]:
        """Index of d(symbol)/d(coordinate), None if that derivative is zero."""
        if self.is_coord(sym):
            return sym if sym == coord else None
        jspec, multi = self._jet_of_symbol[sym]
        label = self.labels[coord]
        if label not in {self.labels[self.coords.index(d)] for d in jspec.depends}:
            return None
        if len(multi) + 1 > jspec.max_order:
            raise JetOrderError(
                f"derivative of '{self.symbols[sym]}' by '{self.coords[coord]}' exceeds "
                f"max order {jspec.max_order} of jet '{jspec.name}'")
        new_multi = tuple(sorted(multi + (label,)))
        return self._index[jspec.name + "_" + "".join(new_multi)]

    def is_jet_free(self, mono: Monomial) -> bool:
        return all(e == 0 for e in mono[len(self.coords):])

    # -- monomial order --------------------------------------------------

    def mono_key(self, m: Monomial):
        """Sort key: larger key = larger monomial in the table's order."""
        if self.order == "lex":
            return m
        return (sum(m), tuple(-e for e in reversed(m)))

    def mono_mul(self, a: Monomial, b: Monomial) -> Monomial:
        return tuple(x + y for x, y in zip(a, b))

    def mono_divides(self, a: Monomial, b: Monomial) -> bool:
        return all(x <= y for x, y in zip(a, b))

    def mono_div(self, a: Monomial, b: Monomial) -> Monomial:
        return tuple(x - y for x, y in zip(a, b))

    def mono_lcm(self, a: Monomial, b: Monomial) -> Monomial:
        return tuple(max(x, y) for x, y in zip(a, b))

    def mono_gcd(self, a: Monomial, b: Monomial) -> Monomial:
        return tuple(min(x, y) for x, y in zip(a, b))

    def mono_str(self, m: Monomial) -> str:
        parts = []
        for name, e in zip(self.symbols, m):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    # -- derived tables --------------------------------------------------

    def with_order(self, order: str) -> "VarTable":
        return VarTable(self.coords, self.jets, order)

    def extended(self, extra_coord: str) -> "VarTable":
        """New table with one extra coordinate appended after the existing ones."""
        if self.has(extra_coord):
            raise PolyError(f"symbol '{extra_coord}' already declared")
        return VarTable(self.coords + (extra_coord,), self.jets, self.order)

    def describe(self) -> dict:
        return {
            "order": self.order,
            "coords": list(self.coords),
            "jets": [
                {"name": j.name, "depends": list(j.depends), "max_order": j.max_order}
                for j in self.jets
            ],
        }

    def __eq__(self, other) -> bool:
        return (isinstance(other, VarTable) and self.order == other.order
                and self.coords == other.coords and self.jets == other.jets)

    def __hash__(self):
        return hash((self.order, self.coords, self.jets))

    def __repr__(self):
        return f"VarTable(coords={self.coords}, jets={[j.name for j in self.jets]}, order={self.order})"


class Poly:
    """Immutable sparse polynomial: dict of exponent tuples to nonzero rationals."""

    __slots__ = ("vt", "terms")

    def __init__(self, vt: VarTable, terms: dict):
        self.vt = vt
        self.terms = {m: c for m, c in terms.items() if c != 0}

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(vt: VarTable) -> "Poly":
        return Poly(vt, {})

    @staticmethod
    def const(vt: VarTable, value) -> "Poly":
        c = Fraction(value)
        return Poly(vt, {(0,) * vt.nsyms: c} if c else {})

    @staticmethod
    def var(vt: VarTable, name: str) -> "Poly":
        i = vt.index(name)
        mono = tuple(1 if j == i else 0 for j in range(vt.nsyms))
        return Poly(vt, {mono: Fraction(1)})

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in m) for m in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise PolyError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def leading(self):
        """(monomial, coefficient) of the leading term; error on zero."""
        if not self.terms:
            raise PolyError("zero polynomial has no leading term")
        m = max(self.terms, key=self.vt.mono_key)
        return m, self.terms[m]

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.vt is not self.vt and other.vt != self.vt:
                raise PolyError("mixed symbol tables")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.vt, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly(self.vt, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vt, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Frac):
            return NotImplemented
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        out: dict = {}
        mul = self.vt.mono_mul
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = mul(m1, m2)
                s = out.get(m, Fraction(0)) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly(self.vt, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise PolyError("exponent must be a non-negative integer")
        result = Poly.const(self.vt, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def term_mul(self, mono: Monomial, coeff: Fraction) -> "Poly":
        mul = self.vt.mono_mul
        return Poly(self.vt, {mul(m, mono): c * coeff for m, c in self.terms.items()})

    def scaled(self, k) -> "Poly":
        k = Fraction(k)
        if not k:
            return Poly.zero(self.vt)
        return Poly(self.vt, {m: c * k for m, c in self.terms.items()})

    # -- equality and rendering ------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.vt, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.vt == other.vt and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def sorted_terms(self) -> Iterator:
        for m in sorted(self.terms, key=self.vt.mono_key, reverse=True):
            yield m, self.terms[m]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = self.vt.mono_str(m)
            if mono == "1":
                body = str(c) if c > 0 else str(-c)
            else:
                a = abs(c)
                body = mono if a == 1 else f"{a}*{mono}"
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"Poly({self})"

    # -- calculus helpers --------------------------------------------------

    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        from math import gcd
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def monomial_gcd(self) -> Monomial:
        it = iter(self.terms)
        g = next(it, self.vt._zero_mono)
        for m in it:
            g = self.vt.mono_gcd(g, m)
        return g


def partial_derivative(p: Poly, coord: str) -> Poly:
    """d(p)/d(coordinate), applying the jet chain rule to jet symbols."""
    vt = p.vt
    ci = vt.coord_index(coord)
    out = Poly.zero(vt)
    for m, c in p.terms.items():
        for s, e in enumerate(m):
            if e == 0:
                continue
            lowered = list(m)
            lowered[s] -= 1
            if vt.is_coord(s):
                if s != ci:
                    continue
            else:
                ds = vt.symbol_derivative(s, ci)
                if ds is None:
                    continue
                lowered[ds] += 1
            out = out + Poly(vt, {tuple(lowered): c * e})
    return out


def divide_exact(num: Poly, den: Poly) -> Poly:
    """Quotient q with num = q*den; NotDivisibleError if the division is inexact."""
    if den.is_zero():
        raise PolyError("division by the zero polynomial")
    vt = num.vt
    lead_m, lead_c = den.leading()
    q = Poly.zero(vt)
    r = num
    while not r.is_zero():
        m, c = r.leading()
        if not vt.mono_divides(lead_m, m):
            raise NotDivisibleError(f"leading term {vt.mono_str(m)} not divisible by {vt.mono_str(lead_m)}")
        t = Poly(vt, {vt.mono_div(m, lead_m): c / lead_c})
        q = q + t
        r = r - t * den
    return q


class Frac:
    """Fraction of polynomials.  Equality is cross-multiplication equality.

    Canonicalization only strips the shared monomial factor and the
    denominator's rational content (no multivariate gcd, by design).
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Optional[Poly] = None):
        if den is None:
            den = Poly.const(num.vt, 1)
        if den.is_zero():
            raise PolyError("zero denominator")
        g = num.vt.mono_gcd(num.monomial_gcd(), den.monomial_gcd()) if not num.is_zero() else den.monomial_gcd()
        if any(g):
            strip = lambda p: Poly(p.vt, {p.vt.mono_div(m, g): c for m, c in p.terms.items()})
            num, den = strip(num), strip(den)
        c = den.content()
        _, lead = den.leading()
        if lead < 0:
            c = -c
        if c != 1:
            num = num.scaled(Fraction(1) / c)
            den = den.scaled(Fraction(1) / c)
        if num.is_zero():
            den = Poly.const(num.vt, 1)
        self.num = num
        self.den = den

    @staticmethod
    def of(x: Union["Frac", Poly, int, Fraction], vt: Optional[VarTable] = None) -> "Frac":
        if isinstance(x, Frac):
            return x
        if isinstance(x, Poly):
            return Frac(x)
        if vt is None:
            raise PolyError("need a VarTable to coerce a constant")
        return Frac(Poly.const(vt, x))

    @property
    def vt(self) -> VarTable:
        return self.num.vt

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> Poly:
        if not self.is_polynomial():
            return divide_exact(self.num, self.den)
        return self.num.scaled(Fraction(1) / self.den.constant_value())

    def _coerce(self, other) -> "Frac":
        if isinstance(other, Frac):
            return other
        if isinstance(other, Poly):
            return Frac(other)
        if isinstance(other, (int, Fraction)):
            return Frac(Poly.const(self.vt, other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.den == o.den:
            return Frac(self.num + o.num, self.den)
        return Frac(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return Frac(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Frac(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.num.is_zero():
            raise PolyError("division by zero fraction")
        return Frac(self.num * o.den, self.den * o.num)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return frac_eq(self, o)

    def __hash__(self):
        raise TypeError("Frac is unhashable (equality is cross-multiplication)")

    def __str__(self):
        if self.is_polynomial():
            return str(self.as_poly())
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"Frac({self})"


def frac_eq(x: Frac, y: Frac) -> bool:
    """True iff x.num*y.den - y.num*x.den is the zero polynomial."""
    return (x.num * y.den - y.num * x.den).is_zero()


def frac_partial(x: Frac, coord: str) -> Frac:
    n, d = x.num, x.den
    return Frac(partial_derivative(n, coord) * d - n * partial_derivative(d, coord), d * d)


RingElem = Union[Poly, Frac]


def as_frac(x: RingElem) -> Frac:
    return x if isinstance(x, Frac) else Frac(x)
