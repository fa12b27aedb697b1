"""Derivations, Lie-Rinehart presentations and alternating forms on generators.

A presentation is finite data: generator derivations tangent to the ideal,
structure constants expanding brackets over the generators, and syzygy
columns.  Alternating forms are stored by their values on strictly increasing
generator tuples; bracket insertions are always expanded through the declared
structure constants, never re-derived, so abstract presentations whose
elements are not faithful derivations are supported uniformly.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

from .groebner import QuotientRing, module_cofactors
from .poly import Frac, Poly, PolyError, RingElem, VarTable, as_frac, frac_partial, partial_derivative
from .report import Check


class LieAlgError(Exception):
    pass


class Derivation:
    """Concrete derivation sum_i coeffs[i] * d/d(coord_i) of a quotient ring."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: QuotientRing, coeffs: Sequence[Poly]):
        if len(coeffs) != len(ring.vt.coords):
            raise LieAlgError("derivation needs one coefficient per coordinate")
        self.ring = ring
        self.coeffs = tuple(coeffs)

    def __call__(self, p: RingElem) -> RingElem:
        if isinstance(p, Frac):
            out = Frac(Poly.zero(self.ring.vt))
            for c, x in zip(self.coeffs, self.ring.vt.coords):
                out = out + Frac(c) * frac_partial(p, x)
            return out
        out = Poly.zero(self.ring.vt)
        for c, x in zip(self.coeffs, self.ring.vt.coords):
            out = out + c * partial_derivative(p, x)
        return out

    def bracket(self, other: "Derivation") -> "Derivation":
        return Derivation(self.ring, [self(y) - other(x) for x, y in zip(self.coeffs, other.coeffs)])

    def __add__(self, other: "Derivation") -> "Derivation":
        return Derivation(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def scale(self, p: Poly) -> "Derivation":
        return Derivation(self.ring, [p * a for a in self.coeffs])

    def is_zero_mod(self) -> bool:
        return all(self.ring.nf(c).is_zero() for c in self.coeffs)

    def __str__(self):
        parts = [f"({c})*d/d{x}" for c, x in zip(self.coeffs, self.ring.vt.coords) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"


def deriv_apply(X: Derivation, p: RingElem) -> RingElem:
    return X(p)


def deriv_bracket(X: Derivation, Y: Derivation) -> Derivation:
    return X.bracket(Y)


class LRPresentation:
    """Finite presentation of a Lie-Rinehart algebra over a quotient ring.

    gens[i] is the anchor image of the i-th generator; structure[i][j] is the
    coefficient vector of [X_i, X_j] over the generators; syzygies is a list
    of columns s with sum_k s[k]*X_k = 0 as a derivation mod the ideal.
    """

    def __init__(self, ring: QuotientRing, gens: Sequence[Derivation],
                 structure: Sequence[Sequence[Sequence[Poly]]],
                 syzygies: Sequence[Sequence[Poly]] = (),
                 names: Optional[Sequence[str]] = None):
        self.ring = ring
        self.gens = list(gens)
        self.size = len(gens)
        self.structure = [[list(structure[i][j]) for j in range(self.size)] for i in range(self.size)]
        self.syzygies = [list(col) for col in syzygies]
        self.names = list(names) if names else [f"X{i+1}" for i in range(self.size)]

    @staticmethod
    def from_derivations(ring: QuotientRing, gens: Sequence[Derivation],
                         syzygies: Sequence[Sequence[Poly]] = (),
                         names: Optional[Sequence[str]] = None,
                         degree_bound: int = 4) -> "LRPresentation":
        """Compute structure constants by expressing brackets over the generators."""
        l = len(gens)
        zero = Poly.zero(ring.vt)
        structure = [[[zero] * l for _ in range(l)] for _ in range(l)]
        vecs = [list(g.coeffs) for g in gens]
        for i in range(l):
            for j in range(i + 1, l):
                br = gens[i].bracket(gens[j])
                sol = module_cofactors(list(br.coeffs), vecs, degree_bound, ring)
                if sol is None:
                    raise LieAlgError(
                        f"bracket [{i+1},{j+1}] is not expressible over the generators "
                        f"within degree {degree_bound}")
                structure[i][j] = sol
                structure[j][i] = [-c for c in sol]
        return LRPresentation(ring, gens, structure, syzygies, names)

    def bracket_coeffs(self, i: int, j: int) -> List[Poly]:
        return self.structure[i][j]

    def act(self, i: int, p: RingElem) -> RingElem:
        return self.gens[i](p)


def verify_presentation(L: LRPresentation) -> List[Check]:
    """Tangency, bracket/structure agreement and syzygy annihilation, mod the ideal."""
    ring = L.ring
    checks: List[Check] = []
    for i, X in enumerate(L.gens):
        bad = [str(g) for g in ring.ideal.generators if not ring.is_zero_mod(X(g))]
        checks.append(Check(f"tangency[{L.names[i]}]", not bad, bad))
    for i in range(L.size):
        for j in range(L.size):
            br = L.gens[i].bracket(L.gens[j])
            combo = Derivation(ring, [Poly.zero(ring.vt)] * len(ring.vt.coords))
            for k, ck in enumerate(L.structure[i][j]):
                combo = combo + L.gens[k].scale(ck)
            witnesses = []
            for x in ring.vt.coords:
                delta = br(Poly.var(ring.vt, x)) - combo(Poly.var(ring.vt, x))
                if not ring.is_zero_mod(delta):
                    witnesses.append(f"coordinate {x}: {ring.nf(delta)}")
            if i < j or witnesses:
                checks.append(Check(f"bracket[{L.names[i]},{L.names[j]}]", not witnesses, witnesses))
    for i in range(L.size):
        for j in range(L.size):
            for k in range(L.size):
                anti = L.structure[i][j][k] + L.structure[j][i][k]
                if not ring.is_zero_mod(anti):
                    checks.append(Check(f"antisymmetry[c{ i+1 }{ j+1 }^{ k+1 }]", False,
                                        [str(ring.nf(anti))]))
    for a, col in enumerate(L.syzygies):
        witnesses = []
        for x in ring.vt.coords:
            val = Poly.zero(ring.vt)
            for k, s in enumerate(col):
                val = val + s * L.gens[k](Poly.var(ring.vt, x))
            if not ring.is_zero_mod(val):
                witnesses.append(f"coordinate {x}: {ring.nf(val)}")
        checks.append(Check(f"syzygy[column {a+1}]", not witnesses, witnesses))
    return checks


# ---------------------------------------------------------------------------
# alternating forms on generator tuples


def _sort_tuple_sign(t: Sequence[int]) -> Tuple[Optional[tuple], int]:
    """Sorted tuple and permutation sign; (None, 0) when an index repeats."""
    t = tuple(t)
    if len(set(t)) != len(t):
        return None, 0
    sign = 1
    lst = list(t)
    for i in range(len(lst)):
        m = min(range(i, len(lst)), key=lambda k: lst[k])
        if m != i:
            lst[i], lst[m] = lst[m], lst[i]
            sign = -sign
    return tuple(lst), sign


class GenForm:
    """Scalar alternating form recorded by its values on increasing generator tuples."""

    def __init__(self, L: LRPresentation, arity: int, values: Optional[dict] = None):
        self.L = L
        self.arity = arity
        self.values = dict(values) if values else {}

    @staticmethod
    def zero(L: LRPresentation, arity: int) -> "GenForm":
        return GenForm(L, arity)

    @staticmethod
    def scalar(L: LRPresentation, value: RingElem) -> "GenForm":
        return GenForm(L, 0, {(): value})

    def _zero_entry(self):
        return Poly.zero(self.L.ring.vt)

    def tuples(self):
        return itertools.combinations(range(self.L.size), self.arity)

    def get(self, t: Sequence[int]) -> RingElem:
        if self.arity == 0:
            return self.values.get((), self._zero_entry())
        st, sign = _sort_tuple_sign(t)
        if st is None:
            return self._zero_entry()
        v = self.values.get(st, self._zero_entry())
        return v if sign == 1 else -v

    def set(self, t: Sequence[int], value: RingElem) -> None:
        st, sign = _sort_tuple_sign(t)
        if st is None:
            raise LieAlgError("repeated index in alternating form tuple")
        self.values[st] = value if sign == 1 else -value

    def map(self, fn: Callable[[RingElem], RingElem]) -> "GenForm":
        return GenForm(self.L, self.arity, {t: fn(v) for t, v in self.values.items()})

    def __add__(self, other: "GenForm") -> "GenForm":
        out = GenForm(self.L, self.arity, dict(self.values))
        for t, v in other.values.items():
            out.values[t] = out.values.get(t, self._zero_entry()) + v
        return out

    def __neg__(self) -> "GenForm":
        return self.map(lambda v: -v)

    def __sub__(self, other: "GenForm") -> "GenForm":
        return self + (-other)

    def is_zero_mod(self) -> bool:
        ring = self.L.ring
        return all(ring.is_zero_mod(v) for v in self.values.values())

    def nonzero_witnesses(self) -> List[str]:
        ring = self.L.ring
        out = []
        for t in self.tuples():
            v = self.values.get(t)
            if v is not None and not ring.is_zero_mod(v):
                out.append(f"{t}: {ring.nf_elem(v)}")
        return out


class MatForm:
    """Square-matrix-valued alternating form; entries use the Christoffel layout
    (row = input generator index of the carrier, column = output index)."""

    def __init__(self, L: LRPresentation, arity: int, size: int, values: Optional[dict] = None):
        self.L = L
        self.arity = arity
        self.size = size
        self.values = dict(values) if values else {}

    @staticmethod
    def zero(L: LRPresentation, arity: int, size: int) -> "MatForm":
        return MatForm(L, arity, size)

    def _zero_mat(self):
        z = Poly.zero(self.L.ring.vt)
        return [[z] * self.size for _ in range(self.size)]

    def tuples(self):
        return itertools.combinations(range(self.L.size), self.arity)

    def get(self, t: Sequence[int]):
        if self.arity == 0:
            return self.values.get((), self._zero_mat())
        st, sign = _sort_tuple_sign(t)
        if st is None:
            return self._zero_mat()
        m = self.values.get(st, self._zero_mat())
        return m if sign == 1 else [[-x for x in row] for row in m]

    def set(self, t: Sequence[int], mat) -> None:
        st, sign = _sort_tuple_sign(t)
        if st is None:
            raise LieAlgError("repeated index in alternating form tuple")
        self.values[st] = mat if sign == 1 else [[-x for x in row] for row in mat]

    def map(self, fn) -> "MatForm":
        return MatForm(self.L, self.arity, self.size,
                       {t: [[fn(x) for x in row] for row in m] for t, m in self.values.items()})

    def __add__(self, other: "MatForm") -> "MatForm":
        out = MatForm(self.L, self.arity, self.size, dict(self.values))
        for t, m in other.values.items():
            cur = out.values.get(t, self._zero_mat())
            out.values[t] = mat_add(cur, m)
        return out

    def __neg__(self) -> "MatForm":
        return self.map(lambda v: -v)

    def __sub__(self, other: "MatForm") -> "MatForm":
        return self + (-other)

    def is_zero_mod(self) -> bool:
        ring = self.L.ring
        return all(ring.is_zero_mod(x) for m in self.values.values() for row in m for x in row)

    def nonzero_witnesses(self) -> List[str]:
        ring = self.L.ring
        out = []
        for t in self.tuples():
            m = self.values.get(t)
            if m is None:
                continue
            for r, row in enumerate(m):
                for c, x in enumerate(row):
                    if not ring.is_zero_mod(x):
                        out.append(f"{t} entry ({r+1},{c+1}): {ring.nf_elem(x)}")
        return out


# -- matrix helpers ----------------------------------------------------------

def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]

def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]

def mat_mul(a, b):
    n, mid, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = a[i][0] * b[0][j]
            for k in range(1, mid):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out

def mat_scale(a, s):
    return [[s * x for x in row] for row in a]

def mat_transpose(a):
    return [list(col) for col in zip(*a)]

def mat_apply_deriv(X: Derivation, a):
    return [[X(x) for x in row] for row in a]

def identity_mat(vt: VarTable, n: int):
    one, zero = Poly.const(vt, 1), Poly.zero(vt)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


# -- differential, cup product, defects --------------------------------------

def ddr(omega: Union[GenForm, MatForm], L: Optional[LRPresentation] = None):
    """Alternating-sum differential on generator tuples.

    Bracket insertions are expanded through the declared structure constants.
    Works for scalar and matrix-valued forms alike (entries differentiated by
    the generator anchors).
    """
    if L is None:
        L = omega.L
    m = omega.arity
    if m + 1 > L.size:
        if isinstance(omega, MatForm):
            return MatForm.zero(L, m + 1, omega.size)
        return GenForm.zero(L, m + 1)
    is_mat = isinstance(omega, MatForm)
    out = MatForm.zero(L, m + 1, omega.size) if is_mat else GenForm.zero(L, m + 1)
    for t in itertools.combinations(range(L.size), m + 1):
        if is_mat:
            acc = omega._zero_mat()
        else:
            acc = Poly.zero(L.ring.vt)
        for pos, idx in enumerate(t):
            rest = t[:pos] + t[pos + 1:]
            val = omega.get(rest)
            term = mat_apply_deriv(L.gens[idx], val) if is_mat else L.gens[idx](val)
            if pos % 2:
                term = mat_scale(term, -1) if is_mat else -term
            acc = mat_add(acc, term) if is_mat else acc + term
        for a in range(m + 1):
            for b in range(a + 1, m + 1):
                rest = tuple(x for pos, x in enumerate(t) if pos not in (a, b))
                coeffs = L.structure[t[a]][t[b]]
                for k, ck in enumerate(coeffs):
                    if ck.is_zero():
                        continue
                    val = omega.get((k,) + rest)
                    term = mat_scale(val, ck) if is_mat else ck * val
                    if (a + b) % 2 == 0:
                        term = mat_scale(term, -1) if is_mat else -term
                    acc = mat_add(acc, term) if is_mat else acc + term
        out.set(t, acc)
    return out


def _shuffles(k: int, m: int):
    """Shuffle split positions of range(k+m) with the permutation sign."""
    idx = tuple(range(k + m))
    for first in itertools.combinations(idx, k):
        second = tuple(i for i in idx if i not in first)
        perm = first + second
        # sign of the permutation sending position i to perm[i]
        sign = 1
        seen = list(perm)
        for i in range(len(seen)):
            while seen[i] != i:
                j = seen[i]
                seen[i], seen[j] = seen[j], seen[i]
                sign = -sign
        yield first, second, sign


def cup(a: Union[GenForm, MatForm], b: Union[GenForm, MatForm]):
    """Shuffle product; matrix-valued factors multiply their values."""
    L = a.L
    k, m = a.arity, b.arity
    a_mat, b_mat = isinstance(a, MatForm), isinstance(b, MatForm)
    if a_mat or b_mat:
        size = a.size if a_mat else b.size
        out = MatForm.zero(L, k + m, size)
    else:
        out = GenForm.zero(L, k + m)
    if k + m > L.size:
        return out
    for t in itertools.combinations(range(L.size), k + m):
        acc = out._zero_mat() if isinstance(out, MatForm) else Poly.zero(L.ring.vt)
        for first, second, sign in _shuffles(k, m):
            va = a.get(tuple(t[i] for i in first))
            vb = b.get(tuple(t[i] for i in second))
            if a_mat and b_mat:
                term = mat_mul(va, vb)
            elif a_mat:
                term = mat_scale(va, vb)
            elif b_mat:
                term = mat_scale(vb, va)
            else:
                term = va * vb
            if sign < 0:
                term = mat_scale(term, -1) if isinstance(out, MatForm) else -term
            acc = mat_add(acc, term) if isinstance(out, MatForm) else acc + term
        out.set(t, acc)
    return out


def comm_square(C: MatForm) -> MatForm:
    """(i,j) -> C_i C_j - C_j C_i on increasing pairs (Christoffel layout)."""
    out = MatForm.zero(C.L, 2, C.size)
    for i, j in itertools.combinations(range(C.L.size), 2):
        ci, cj = C.get((i,)), C.get((j,))
        out.set((i, j), mat_sub(mat_mul(ci, cj), mat_mul(cj, ci)))
    return out


def comm_square_t(C: MatForm) -> MatForm:
    """(i,j) -> C_j C_i - C_i C_j; the transposed-layout half square."""
    return -comm_square(C)


def mc_defect(C: MatForm, L: Optional[LRPresentation] = None, sign: int = -1) -> MatForm:
    """ddr(C) + sign * (C_i C_j - C_j C_i): the flatness defect of a matrix one-form."""
    if C.arity != 1:
        raise LieAlgError("defect is defined for matrix one-forms")
    if sign not in (1, -1):
        raise LieAlgError("sign must be +1 or -1")
    sq = comm_square(C)
    return ddr(C, L) + (sq if sign == 1 else -sq)


def form_wellformed(omega: Union[GenForm, "Metric"], L: LRPresentation) -> bool:
    """Necessary multilinearity condition: syzygy contractions vanish mod the ideal."""
    ring = L.ring
    if hasattr(omega, "entries"):  # metric-like symmetric array
        mat = omega.entries
        for col in L.syzygies:
            for j in range(L.size):
                acc = Poly.zero(ring.vt)
                for k in range(L.size):
                    acc = acc + col[k] * mat[k][j]
                if not ring.is_zero_mod(acc):
                    return False
        return True
    if omega.arity == 0:
        return True
    for col in L.syzygies:
        for rest in itertools.combinations(range(L.size), omega.arity - 1):
            acc = None
            for k in range(L.size):
                term = col[k] * omega.get((k,) + rest)
                acc = term if acc is None else acc + term
            if acc is not None and not ring.is_zero_mod(acc):
                return False
    return True
