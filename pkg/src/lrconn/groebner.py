"""Ideals, Buchberger's algorithm, canonical normal forms and cofactor division.

Desk-scale implementation: normal selection strategy (smallest pair lcm in the
ambient monomial order), coprime-pair criterion, monic normalization, reduced
bases.  Every basis element carries its expression in the original generators,
so division can report cofactors against the user's generating set.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .poly import (Frac, Monomial, NotDivisibleError, Poly, PolyError, VarTable,
                   as_frac, divide_exact)

DEFAULT_COFACTOR_BOUND_SLACK = 2


def _divide_tracked(p: Poly, divisors: Sequence[Poly], chooser=None):
    """Multivariate division: p = sum q_i divisors_i + r, r irreducible.

    ``chooser(candidates)`` picks among eligible divisor indices (default:
    first, which makes the reduction deterministic).
    """
    vt = p.vt
    leads = [d.leading() for d in divisors]
    qs = [Poly.zero(vt) for _ in divisors]
    r = Poly.zero(vt)
    work = p
    while not work.is_zero():
        m, c = work.leading()
        candidates = [i for i, (lm, _) in enumerate(leads) if vt.mono_divides(lm, m)]
        if not candidates:
            t = Poly(vt, {m: c})
            r = r + t
            work = work - t
            continue
        i = candidates[0] if chooser is None else chooser(candidates)
        lm, lc = leads[i]
        t = Poly(vt, {vt.mono_div(m, lm): c / lc})
        qs[i] = qs[i] + t
        work = work - t * divisors[i]
    return qs, r


def divide(p: Poly, divisors: Sequence[Poly]):
    return _divide_tracked(p, divisors)


class Ideal:
    """Ideal given by generators; reduced Groebner basis computed lazily.

    ``basis_in_generators[k]`` expresses basis element k as a combination of
    the original generators (change-of-basis record).
    """

    def __init__(self, generators: Sequence[Poly], vt: Optional[VarTable] = None):
        gens = [g for g in generators if not g.is_zero()]
        if vt is None:
            if not gens:
                raise PolyError("empty ideal needs an explicit symbol table")
            vt = gens[0].vt
        self.vt = vt
        self.generators = list(gens)
        self._basis: Optional[List[Poly]] = None
        self._basis_expr: Optional[List[List[Poly]]] = None

    def is_trivial(self) -> bool:
        return not self.generators

    @property
    def basis(self) -> List[Poly]:
        if self._basis is None:
            self._basis, self._basis_expr = buchberger(self.generators, self.vt)
        return self._basis

    @property
    def basis_in_generators(self) -> List[List[Poly]]:
        self.basis
        return self._basis_expr

    def contains(self, p: Poly) -> bool:
        return normal_form(p, self).is_zero()

    def power(self, k: int) -> "Ideal":
        if k < 1:
            raise PolyError("ideal power needs k >= 1")
        if k == 1:
            return Ideal(list(self.generators), self.vt)
        prods = []
        for combo in itertools.combinations_with_replacement(self.generators, k):
            q = combo[0]
            for f in combo[1:]:
                q = q * f
            prods.append(q)
        return Ideal(prods, self.vt)

    def describe(self) -> List[str]:
        return sorted(str(g) for g in self.basis)


def buchberger(gens: Sequence[Poly], vt: VarTable):
    """Reduced Groebner basis with change-of-basis tracking.

    Returns (basis, expr) where expr[k] is the cofactor row expressing
    basis[k] over the input generators.
    """
    n_in = len(gens)

    def unit_row(i: int) -> List[Poly]:
        return [Poly.const(vt, 1 if j == i else 0) for j in range(n_in)]

    def row_sub(r1, r2, t: Poly):
        return [a - t * b for a, b in zip(r1, r2)]

    work: List[Tuple[Poly, List[Poly]]] = []
    for i, g in enumerate(gens):
        if g.is_zero():
            continue
        _, lc = g.leading()
        work.append((g.scaled(Fraction(1) / lc), [x.scaled(Fraction(1) / lc) for x in unit_row(i)]))

    basis = list(work)

    def reduce_tracked(p: Poly, row: List[Poly]):
        leads = [b.leading() for b, _ in basis]
        while not p.is_zero():
            m, c = p.leading()
            hit = None
            for k, (lm, lc) in enumerate(leads):
                if vt.mono_divides(lm, m):
                    hit = (k, lm, lc)
                    break
            if hit is None:
                break
            k, lm, lc = hit
            t = Poly(vt, {vt.mono_div(m, lm): c / lc})
            p = p - t * basis[k][0]
            row = row_sub(row, basis[k][1], t)
        return p, row

    pairs = {(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))}
    while pairs:
        # normal strategy: smallest lcm of leading monomials in the ambient order
        i, j = min(pairs, key=lambda ij: (vt.mono_key(vt.mono_lcm(basis[ij[0]][0].leading()[0],
                                                                 basis[ij[1]][0].leading()[0])), ij))
        pairs.discard((i, j))
        fi, ri = basis[i]
        fj, rj = basis[j]
        mi, ci = fi.leading()
        mj, cj = fj.leading()
        lcm = vt.mono_lcm(mi, mj)
        if vt.mono_mul(mi, mj) == lcm:
            continue  # coprime leading terms reduce to zero
        ti = Poly(vt, {vt.mono_div(lcm, mi): Fraction(1) / ci})
        tj = Poly(vt, {vt.mono_div(lcm, mj): Fraction(1) / cj})
        s = ti * fi - tj * fj
        srow = row_sub([ti * a for a in ri], rj, tj)
        s, srow = reduce_tracked(s, srow)
        if s.is_zero():
            continue
        _, lc = s.leading()
        s = s.scaled(Fraction(1) / lc)
        srow = [a.scaled(Fraction(1) / lc) for a in srow]
        basis.append((s, srow))
        k = len(basis) - 1
        pairs.update((m, k) for m in range(k))

    # minimalize: keep only elements whose leading monomial no kept element divides
    # (divisibility refines the monomial order, so an ascending sweep suffices)
    minimal: List[Tuple[Poly, List[Poly]]] = []
    for g, row in sorted(basis, key=lambda br: vt.mono_key(br[0].leading()[0])):
        lm = g.leading()[0]
        if any(vt.mono_divides(h.leading()[0], lm) for h, _ in minimal):
            continue
        minimal.append((g, row))

    # fully reduce tails against the other minimal elements
    reduced: List[Tuple[Poly, List[Poly]]] = []
    for k, (g, row) in enumerate(minimal):
        others = [minimal[m] for m in range(len(minimal)) if m != k]
        p = g
        out = Poly.zero(vt)
        out_row = row
        leads = [h.leading() for h, _ in others]
        while not p.is_zero():
            m, c = p.leading()
            hit = next((idx for idx, (lm, _) in enumerate(leads) if vt.mono_divides(lm, m)), None)
            if hit is None:
                t = Poly(vt, {m: c})
                out = out + t
                p = p - t
            else:
                lm, lc = leads[hit]
                t = Poly(vt, {vt.mono_div(m, lm): c / lc})
                p = p - t * others[hit][0]
                out_row = row_sub(out_row, others[hit][1], t)
        _, lc = out.leading()
        reduced.append((out.scaled(Fraction(1) / lc), [a.scaled(Fraction(1) / lc) for a in out_row]))

    reduced.sort(key=lambda br: vt.mono_key(br[0].leading()[0]))
    return [g for g, _ in reduced], [row for _, row in reduced]


class QuotientRing:
    """Polynomial ring modulo an ideal, with canonical normal forms."""

    def __init__(self, vt: VarTable, ideal: Optional[Ideal] = None):
        self.vt = vt
        self.ideal = ideal if ideal is not None else Ideal([], vt)
        for g in self.ideal.generators:
            if not all(vt.is_jet_free(m) for m in g.terms):
                raise PolyError("ideals must be jet-free")

    @property
    def is_free(self) -> bool:
        return self.ideal.is_trivial()

    def nf(self, p: Poly) -> Poly:
        if self.ideal.is_trivial():
            return p
        return normal_form(p, self.ideal)

    def is_zero_mod(self, x) -> bool:
        if isinstance(x, Frac):
            if self.nf(x.den).is_zero():
                raise PolyError("denominator lies in the ideal")
            return self.nf(x.num).is_zero()
        return self.nf(x).is_zero()

    def eq_mod(self, x, y) -> bool:
        if isinstance(x, Frac) or isinstance(y, Frac):
            xf, yf = as_frac(x), as_frac(y)
            return self.is_zero_mod(xf.num * yf.den - yf.num * xf.den)
        return self.is_zero_mod(x - y)

    def nf_elem(self, x):
        """Normal form for reporting: reduces Poly; reduces a Frac numerator."""
        if isinstance(x, Frac):
            return Frac(self.nf(x.num), x.den)
        return self.nf(x)

    def parse(self, text: str) -> Poly:
        from .parser import parse_poly
        return parse_poly(text, self.vt)

    def describe(self) -> dict:
        d = self.vt.describe()
        d["ideal"] = [str(g) for g in self.ideal.generators]
        return d


def normal_form(p: Poly, ideal: Ideal) -> Poly:
    """Remainder of full division by the reduced basis (canonical representative)."""
    _, r = _divide_tracked(p, ideal.basis)
    return r


def normal_form_shuffled(p: Poly, ideal: Ideal, rng) -> Poly:
    """Normal form computed with a randomized reducer choice (confluence probe)."""
    _, r = _divide_tracked(p, ideal.basis, chooser=lambda cands: rng.choice(cands))
    return r


def ideal_power(ideal: Ideal, k: int) -> Ideal:
    return ideal.power(k)


def reduce_with_cofactors(p: Poly, gens: Sequence[Poly], degree_bound: Optional[int] = None):
    """Division with cofactors against the given generators.

    Returns (cofactors, remainder) with p = sum cofactors[i]*gens[i] + remainder
    and the remainder fully reduced modulo the ideal generated by ``gens``.
    Cofactors are reported against the original generators; when plain division
    stalls they are completed through a degree-bounded linear solve, then
    through the Groebner change-of-basis record.
    """
    vt = p.vt
    gens = list(gens)
    if not gens:
        return [], p
    qs, r = _divide_tracked(p, gens)
    ideal = Ideal(gens, vt)
    r_nf = normal_form(r, ideal)
    if r_nf == r:
        return qs, r
    residue = r - r_nf  # lies in the ideal
    if degree_bound is None:
        degree_bound = max(p.total_degree(), sum(g.total_degree() for g in gens)) + DEFAULT_COFACTOR_BOUND_SLACK
    extra = express_in_generators(residue, gens, degree_bound)
    if extra is None:
        bqs, brem = _divide_tracked(residue, ideal.basis)
        if not brem.is_zero():
            raise PolyError("internal: ideal member did not reduce to zero")
        rows = ideal.basis_in_generators
        extra = [Poly.zero(vt) for _ in gens]
        for bq, row in zip(bqs, rows):
            for i in range(len(gens)):
                extra[i] = extra[i] + bq * row[i]
    return [a + b for a, b in zip(qs, extra)], r_nf


def _monomials_up_to(vt: VarTable, degree: int):
    """All exponent tuples of total degree <= degree (deterministic order)."""
    nz = vt.nsyms
    out = []

    def rec(prefix, remaining, idx):
        if idx == nz - 1:
            for e in range(remaining + 1):
                out.append(tuple(prefix + [e]))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e, idx + 1)

    if nz == 0:
        return [()]
    rec([], degree, 0)
    return out


def express_in_generators(p: Poly, gens: Sequence[Poly], degree_bound: int,
                          ring: Optional[QuotientRing] = None) -> Optional[List[Poly]]:
    """Solve p = sum h_i*gens_i with deg(h_i) <= degree_bound, exactly or mod the ring's ideal.

    Returns the cofactors h_i, or None when no solution exists within the bound.
    """
    vecs = [[g] for g in gens]
    target = [p]
    return module_cofactors(target, vecs, degree_bound, ring)


def module_cofactors(target: Sequence[Poly], gens: Sequence[Sequence[Poly]], degree_bound: int,
                     ring: Optional[QuotientRing] = None) -> Optional[List[Poly]]:
    """Polynomial cofactors h with sum h_k * gens[k] = target componentwise (mod the ring ideal).

    Coefficient-matching linear solve over the rationals; unknowns are the
    monomial coefficients of each h_k up to the degree bound.
    """
    if not gens:
        return None
    vt = target[0].vt
    ncomp = len(target)
    reduce = (lambda q: ring.nf(q)) if ring is not None else (lambda q: q)
    monos = _monomials_up_to(vt, degree_bound)
    columns = []  # one column per unknown (k, mono): the stacked coefficient vector
    keys = {}

    def stamp(poly_by_comp):
        col = {}
        for comp, q in enumerate(poly_by_comp):
            for m, c in q.terms.items():
                keys.setdefault((comp, m), len(keys))
                col[(comp, m)] = c
        return col

    for k, gvec in enumerate(gens):
        for mono in monos:
            contrib = [reduce(gvec[comp].term_mul(mono, Fraction(1))) if comp < len(gvec) else Poly.zero(vt)
                       for comp in range(ncomp)]
            columns.append(((k, mono), stamp(contrib)))
    tcol = stamp([reduce(t) for t in target])

    nrows = len(keys)
    ncols = len(columns)
    A = [[Fraction(0)] * (ncols + 1) for _ in range(nrows)]
    for j, (_, col) in enumerate(columns):
        for key, c in col.items():
            A[keys[key]][j] = c
    for key, c in tcol.items():
        A[keys[key]][ncols] = c

    # exact Gaussian elimination, first-nonzero pivot
    pivots = []
    row = 0
    for col in range(ncols):
        sel = None
        for r in range(row, nrows):
            if A[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        A[row], A[sel] = A[sel], A[row]
        pv = A[row][col]
        A[row] = [x / pv for x in A[row]]
        for r in range(nrows):
            if r != row and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[row])]
        pivots.append((row, col))
        row += 1
        if row == nrows:
            break
    for r in range(row, nrows):
        if A[r][ncols] != 0:
            return None
    sol = [Fraction(0)] * ncols
    for r, c in pivots:
        sol[c] = A[r][ncols]
    out = [Poly.zero(vt) for _ in gens]
    for j, ((k, mono), _) in enumerate(columns):
        if sol[j]:
            out[k] = out[k] + Poly(vt, {mono: sol[j]})
    # verify (the system can be consistent only mod the ideal)
    for comp in range(ncomp):
        acc = Poly.zero(vt)
        for k, gvec in enumerate(gens):
            if comp < len(gvec):
                acc = acc + out[k] * gvec[comp]
        if not reduce(acc - target[comp]).is_zero():
            return None
    return out
