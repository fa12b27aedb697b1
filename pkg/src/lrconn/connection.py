"""Connections by Christoffel data: covariant derivatives, curvature, torsion,
metric compatibility, the alternating-sum equations for metric connections,
and localization consistency checks.

Layout: gamma[i][mu][nu] is the coefficient of v_nu in nabla_{X_i} v_mu, so
each gamma[i] is a matrix whose rows are indexed by the input generator.
Vector values are coefficient rows; endomorphisms act through
D_i(phi) = X_i(phi) + phi*gamma_i - gamma_i*phi.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .liealg import (Derivation, GenForm, LRPresentation, MatForm, ddr,
                     form_wellformed, identity_mat, mat_add, mat_apply_deriv,
                     mat_mul, mat_scale, mat_sub)
from .poly import Frac, Poly, PolyError, RingElem, as_frac, divide_exact, frac_eq
from .report import Check


class ConnectionError_(Exception):
    pass


class SyzygiesPresentError(ConnectionError_):
    """Raised when a naive linear solve is requested over a syzygy-laden presentation."""


class SingularMetricError(ConnectionError_):
    pass


class ModuleCarrier:
    """Module with beta chosen generators; optionally the presentation itself."""

    def __init__(self, rank: int, syzygies: Sequence[Sequence[Poly]] = (),
                 is_tangent: bool = False):
        self.rank = rank
        self.syzygies = [list(c) for c in syzygies]
        for col in self.syzygies:
            if len(col) != rank:
                raise ConnectionError_("carrier syzygy column length must equal the rank")
        self.is_tangent = is_tangent

    @staticmethod
    def of_presentation(L: LRPresentation) -> "ModuleCarrier":
        return ModuleCarrier(L.size, L.syzygies, is_tangent=True)

    @staticmethod
    def free(rank: int) -> "ModuleCarrier":
        return ModuleCarrier(rank)


class Connection:
    """Christoffel tensor over a presentation; entries polynomial or fractional."""

    def __init__(self, L: LRPresentation, carrier: ModuleCarrier,
                 gamma: Sequence[Sequence[Sequence[RingElem]]]):
        self.L = L
        self.carrier = carrier
        b = carrier.rank
        if len(gamma) != L.size or any(len(m) != b or any(len(r) != b for r in m) for m in gamma):
            raise ConnectionError_("christoffel tensor must have shape l x beta x beta")
        self.gamma = [[list(row) for row in mat] for mat in gamma]
        self.mode = "fractional" if any(
            isinstance(x, Frac) and not x.is_polynomial()
            for mat in self.gamma for row in mat for x in row) else "polynomial"

    @staticmethod
    def zero(L: LRPresentation, carrier: ModuleCarrier) -> "Connection":
        z = Poly.zero(L.ring.vt)
        return Connection(L, carrier, [[[z] * carrier.rank for _ in range(carrier.rank)]
                                       for _ in range(L.size)])

    def matrices(self) -> List[List[List[RingElem]]]:
        return self.gamma

    def matrix_form(self) -> MatForm:
        form = MatForm(self.L, 1, self.carrier.rank)
        for i in range(self.L.size):
            form.set((i,), self.gamma[i])
        return form

    def perturbed(self, eta: MatForm) -> "Connection":
        if eta.arity != 1 or eta.size != self.carrier.rank:
            raise ConnectionError_("perturbation must be a matrix one-form on the carrier")
        gam = [mat_add(self.gamma[i], eta.get((i,))) for i in range(self.L.size)]
        return Connection(self.L, self.carrier, gam)


# -- covariant derivatives ----------------------------------------------------


class VecForm:
    """Alternating form with carrier-coefficient row values."""

    def __init__(self, L: LRPresentation, arity: int, rank: int, values: Optional[dict] = None):
        self.L = L
        self.arity = arity
        self.rank = rank
        self.values = dict(values) if values else {}

    def _zero(self):
        return [Poly.zero(self.L.ring.vt)] * self.rank

    def get(self, t):
        from .liealg import _sort_tuple_sign
        if self.arity == 0:
            return self.values.get((), self._zero())
        st, sign = _sort_tuple_sign(t)
        if st is None:
            return self._zero()
        v = self.values.get(st, self._zero())
        return v if sign == 1 else [-x for x in v]

    def set(self, t, vec):
        from .liealg import _sort_tuple_sign
        st, sign = _sort_tuple_sign(t)
        if st is None:
            raise ConnectionError_("repeated index in form tuple")
        self.values[st] = list(vec) if sign == 1 else [-x for x in vec]

    @staticmethod
    def basis_vector(L: LRPresentation, rank: int, mu: int) -> "VecForm":
        vec = [Poly.const(L.ring.vt, 1 if i == mu else 0) for i in range(rank)]
        return VecForm(L, 0, rank, {(): vec})

    def tuples(self):
        return itertools.combinations(range(self.L.size), self.arity)


def _vec_cov(conn: Connection, i: int, vec):
    """nabla_{X_i} of a coefficient row: X_i(w) + w * gamma_i."""
    X = conn.L.gens[i]
    derived = [X(x) for x in vec]
    g = conn.gamma[i]
    out = []
    for nu in range(conn.carrier.rank):
        acc = derived[nu]
        for mu in range(conn.carrier.rank):
            acc = acc + vec[mu] * g[mu][nu]
        out.append(acc)
    return out


def cov_deriv(conn: Connection, omega: VecForm) -> VecForm:
    """Covariant alternating-sum derivative of a carrier-valued form."""
    L = conn.L
    m = omega.arity
    out = VecForm(L, m + 1, omega.rank)
    if m + 1 > L.size:
        return out
    for t in itertools.combinations(range(L.size), m + 1):
        acc = omega._zero()
        for pos, idx in enumerate(t):
            rest = t[:pos] + t[pos + 1:]
            term = _vec_cov(conn, idx, omega.get(rest))
            if pos % 2:
                term = [-x for x in term]
            acc = [a + b for a, b in zip(acc, term)]
        for a in range(m + 1):
            for b in range(a + 1, m + 1):
                rest = tuple(x for pos, x in enumerate(t) if pos not in (a, b))
                for k, ck in enumerate(L.structure[t[a]][t[b]]):
                    if ck.is_zero():
                        continue
                    val = omega.get((k,) + rest)
                    term = [ck * x for x in val]
                    if (a + b) % 2 == 0:
                        term = [-x for x in term]
                    acc = [p + q for p, q in zip(acc, term)]
        out.set(t, acc)
    return out


def end_cov(conn: Connection, i: int, phi):
    """Induced endomorphism-connection: X_i(phi) + phi*gamma_i - gamma_i*phi."""
    X = conn.L.gens[i]
    g = conn.gamma[i]
    return mat_add(mat_apply_deriv(X, phi), mat_sub(mat_mul(phi, g), mat_mul(g, phi)))


def cov_deriv_end(conn: Connection, omega: MatForm) -> MatForm:
    """Covariant derivative of an endomorphism-valued form."""
    L = conn.L
    m = omega.arity
    out = MatForm(L, m + 1, omega.size)
    if m + 1 > L.size:
        return out
    for t in itertools.combinations(range(L.size), m + 1):
        acc = omega._zero_mat()
        for pos, idx in enumerate(t):
            rest = t[:pos] + t[pos + 1:]
            term = end_cov(conn, idx, omega.get(rest))
            if pos % 2:
                term = mat_scale(term, -1)
            acc = mat_add(acc, term)
        for a in range(m + 1):
            for b in range(a + 1, m + 1):
                rest = tuple(x for pos, x in enumerate(t) if pos not in (a, b))
                for k, ck in enumerate(L.structure[t[a]][t[b]]):
                    if ck.is_zero():
                        continue
                    term = mat_scale(omega.get((k,) + rest), ck)
                    if (a + b) % 2 == 0:
                        term = mat_scale(term, -1)
                    acc = mat_add(acc, term)
        out.set(t, acc)
    return out


# -- curvature, torsion, metric ------------------------------------------------


def curvature_matrix(conn: Connection) -> MatForm:
    """R_ij = X_i(g_j) - X_j(g_i) + g_j g_i - g_i g_j - sum_k c_ij^k g_k."""
    L = conn.L
    out = MatForm(L, 2, conn.carrier.rank)
    for i, j in itertools.combinations(range(L.size), 2):
        gi, gj = conn.gamma[i], conn.gamma[j]
        mat = mat_sub(mat_apply_deriv(L.gens[i], gj), mat_apply_deriv(L.gens[j], gi))
        mat = mat_add(mat, mat_sub(mat_mul(gj, gi), mat_mul(gi, gj)))
        for k, ck in enumerate(L.structure[i][j]):
            if not ck.is_zero():
                mat = mat_sub(mat, mat_scale(conn.gamma[k], ck))
        out.set((i, j), mat)
    return out


class Metric:
    """Symmetric bilinear values on generator pairs of the presentation."""

    def __init__(self, L: LRPresentation, entries: Sequence[Sequence[RingElem]]):
        self.L = L
        n = L.size
        if len(entries) != n or any(len(r) != n for r in entries):
            raise ConnectionError_("metric must be a square matrix over the generators")
        self.entries = [list(r) for r in entries]
        ring = L.ring
        for i in range(n):
            for j in range(i + 1, n):
                if not ring.eq_mod(self.entries[i][j], self.entries[j][i]):
                    raise ConnectionError_(f"metric entries ({i+1},{j+1}) and ({j+1},{i+1}) differ")

    def wellformed(self) -> bool:
        return form_wellformed(self, self.L)

    def det(self) -> RingElem:
        return _det(self.entries)


def _det(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _det(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def _deriv_from_coeffs(L: LRPresentation, coeffs: Sequence[RingElem]) -> List[RingElem]:
    """Action of sum_k coeffs[k] X_k on each coordinate (fraction-aware)."""
    ring = L.ring
    out = []
    for x in ring.vt.coords:
        xv = Poly.var(ring.vt, x)
        acc = None
        for k, ck in enumerate(coeffs):
            term = ck * L.gens[k](xv)
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def torsion_check(conn: Connection) -> List[Check]:
    """For each pair, the derivation sum_k (g_ij^k - g_ji^k - c_ij^k) X_k kills the coordinates mod I."""
    if not conn.carrier.is_tangent:
        raise ConnectionError_("torsion is defined for connections on the presentation itself")
    L = conn.L
    ring = L.ring
    checks = []
    for i, j in itertools.combinations(range(L.size), 2):
        coeffs = [conn.gamma[i][j][k] - conn.gamma[j][i][k] - L.structure[i][j][k]
                  for k in range(L.size)]
        vals = _deriv_from_coeffs(L, coeffs)
        witnesses = [f"coordinate {x}: nonzero" for x, v in zip(ring.vt.coords, vals)
                     if not ring.is_zero_mod(v)]
        checks.append(Check(f"torsion[{L.names[i]},{L.names[j]}]", not witnesses, witnesses))
    return checks


def metric_compat_check(conn: Connection, G: Metric) -> List[Check]:
    """X_i(G_jk) = sum_m g_ij^m G_mk + sum_m g_ik^m G_jm, mod the ideal."""
    L = conn.L
    ring = L.ring
    checks = []
    for i in range(L.size):
        bad = []
        for j in range(L.size):
            for k in range(L.size):
                lhs = L.gens[i](G.entries[j][k])
                rhs = None
                for m in range(L.size):
                    term = conn.gamma[i][j][m] * G.entries[m][k] + conn.gamma[i][k][m] * G.entries[j][m]
                    rhs = term if rhs is None else rhs + term
                if not ring.eq_mod(lhs, rhs):
                    bad.append(f"(i,j,k)=({i+1},{j+1},{k+1})")
        checks.append(Check(f"metric-compat[{L.names[i]}]", not bad, bad))
    return checks


def koszul_rhs(G: Metric, i: int, j: int, k: int) -> RingElem:
    """X_i(G_jk) + X_j(G_ki) - X_k(G_ij) plus the three structure-constant terms."""
    L = G.L
    r = L.gens[i](G.entries[j][k]) + L.gens[j](G.entries[k][i]) - L.gens[k](G.entries[i][j])
    for m in range(L.size):
        c_ij = L.structure[i][j][m]
        c_jk = L.structure[j][k][m]
        c_ki = L.structure[k][i][m]
        if not c_ij.is_zero():
            r = r + c_ij * G.entries[m][k]
        if not c_jk.is_zero():
            r = r - c_jk * G.entries[m][i]
        if not c_ki.is_zero():
            r = r + c_ki * G.entries[m][j]
    return r


def koszul_verify(conn: Connection, G: Metric) -> List[Check]:
    """2 sum_m g_ij^m G_mk = rhs(i,j,k) for every index triple, mod the ideal."""
    L = conn.L
    ring = L.ring
    checks = []
    for i in range(L.size):
        for j in range(L.size):
            for k in range(L.size):
                lhs = None
                for m in range(L.size):
                    term = 2 * (conn.gamma[i][j][m] * G.entries[m][k])
                    lhs = term if lhs is None else lhs + term
                ok = ring.eq_mod(lhs, koszul_rhs(G, i, j, k))
                checks.append(Check(f"koszul[{i+1},{j+1},{k+1}]", ok))
    return checks


def _solve_linear_frac(A: List[List[Frac]], b: List[Frac]) -> List[Frac]:
    """Exact Gaussian elimination over the fraction field, first-nonzero pivot."""
    n = len(A)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not M[r][col].is_zero()), None)
        if piv is None:
            raise SingularMetricError("metric matrix is singular")
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [x / pv for x in M[col]]
        for r in range(n):
            if r != col and not M[r][col].is_zero():
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def reduce_frac_to_invertibles(x: Frac, invertibles: Sequence[Poly], max_power: int = 4) -> Frac:
    """Rewrite num/den with a denominator that is a product of declared invertibles.

    Searches products of bounded total power and uses exact division; returns
    the input unchanged when no such rewrite exists.
    """
    if x.is_polynomial():
        return x
    if not invertibles:
        return x
    for total in range(0, max_power + 1):
        for combo in itertools.combinations_with_replacement(range(len(invertibles)), total):
            d = Poly.const(x.vt, 1)
            for i in combo:
                d = d * invertibles[i]
            try:
                num = divide_exact(x.num * d, x.den)
            except PolyError:
                continue
            return Frac(num, d)
    return x


def koszul_solve_free(G: Metric, invertibles: Sequence[Poly] = (),
                      check_roundtrip: bool = True) -> Connection:
    """Solve the metric-connection equations by exact elimination over fractions.

    Only legal on syzygy-free presentations; the result is verified against
    the equations, torsion-freeness and metric compatibility before returning.
    """
    L = G.L
    if L.syzygies:
        raise SyzygiesPresentError(
            "presentation declares syzygies; naive linear solving is unsound there, "
            "use verification against supplied christoffel data instead")
    n = L.size
    Gf = [[as_frac(G.entries[i][j]) for j in range(n)] for i in range(n)]
    A = [[2 * Gf[k][m] for m in range(n)] for k in range(n)]
    gamma = []
    for i in range(n):
        mat = []
        for j in range(n):
            b = [as_frac(koszul_rhs(G, i, j, k)) for k in range(n)]
            sol = _solve_linear_frac(A, b)
            sol = [reduce_frac_to_invertibles(x, invertibles) for x in sol]
            mat.append(sol)
        gamma.append(mat)
    conn = Connection(L, ModuleCarrier.of_presentation(L), gamma)
    if check_roundtrip:
        bad = [c.name for c in koszul_verify(conn, G) if not c.passed]
        bad += [c.name for c in torsion_check(conn) if not c.passed]
        bad += [c.name for c in metric_compat_check(conn, G) if not c.passed]
        if bad:
            raise ConnectionError_(f"solved connection failed its own verification: {bad[:5]}")
    return conn


# -- identities ----------------------------------------------------------------


def bianchi_checks(conn: Connection) -> List[Check]:
    """Differential identity of the curvature, and the cyclic identity on tangent carriers."""
    L = conn.L
    ring = L.ring
    checks = []
    R = curvature_matrix(conn)
    dR = cov_deriv_end(conn, R)
    witnesses = dR.nonzero_witnesses()
    checks.append(Check("bianchi-second", not witnesses, witnesses[:6]))
    if conn.carrier.is_tangent:
        bad = []
        for i, j, k in itertools.combinations(range(L.size), 3):
            acc = [Poly.zero(ring.vt)] * L.size
            for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
                row = R.get((a, b))[c]
                acc = [x + y for x, y in zip(acc, row)]
            vals = _deriv_from_coeffs(L, acc)
            if any(not ring.is_zero_mod(v) for v in vals):
                bad.append(f"triple ({i+1},{j+1},{k+1})")
        checks.append(Check("bianchi-first", not bad, bad))
    return checks


def curvature_perturbation_check(conn: Connection, eta: MatForm) -> bool:
    """Curvature of (connection + eta) minus the predicted expansion vanishes mod I."""
    from .liealg import comm_square_t
    R0 = curvature_matrix(conn)
    R1 = curvature_matrix(conn.perturbed(eta))
    predicted = R0 + cov_deriv_end(conn, eta) + comm_square_t(eta)
    return (R1 - predicted).is_zero_mod()


def connection_affinity_check(c1: Connection, c2: Connection) -> List[Check]:
    """The difference of two connections contracts to zero against the presentation syzygies."""
    L = c1.L
    ring = L.ring
    checks = []
    for a, col in enumerate(L.syzygies):
        bad = []
        for mu in range(c1.carrier.rank):
            coeffs = []
            for lam in range(c1.carrier.rank):
                acc = None
                for i in range(L.size):
                    term = col[i] * (c1.gamma[i][mu][lam] - c2.gamma[i][mu][lam])
                    acc = term if acc is None else acc + term
                coeffs.append(acc)
            vals = _deriv_from_coeffs(L, coeffs) if c1.carrier.is_tangent else coeffs
            if any(not ring.is_zero_mod(v) for v in vals):
                bad.append(f"carrier index {mu+1}")
        checks.append(Check(f"affinity[syzygy column {a+1}]", not bad, bad))
    return checks


# -- localization ---------------------------------------------------------------


def _loc_cov(conn: Connection, lower: Sequence[Frac], vec: Sequence[Frac]) -> List[Frac]:
    """nabla over a fraction-coefficient combination of generators, on a fraction row."""
    L = conn.L
    out = [Frac(Poly.zero(L.ring.vt))] * conn.carrier.rank
    for i, h in enumerate(lower):
        if h.is_zero():
            continue
        X = L.gens[i]
        step = [as_frac(X(v)) for v in vec]
        g = conn.gamma[i]
        for nu in range(conn.carrier.rank):
            acc = step[nu]
            for mu in range(conn.carrier.rank):
                acc = acc + vec[mu] * as_frac(g[mu][nu])
            out[nu] = out[nu] + h * acc
    return out


def localization_check(conn: Connection, s: Poly, t: Poly, r: Poly,
                       v_index: int, x_index: int, y_index: int,
                       u: Optional[Poly] = None) -> List[Check]:
    """Representative independence and curvature scaling for localized data.

    Checks, as cross-multiplied fraction identities mod the ideal, that
    nabla_{X/s}(v/t) is unchanged under (v, t) -> (u v, u t), and that the
    localized curvature of (X/r, Y/s) on v/t is R(X, Y)v / (r s t).
    """
    L = conn.L
    ring = L.ring
    vt = ring.vt
    for name, den in (("s", s), ("t", t), ("r", r)):
        if ring.nf(den).is_zero():
            raise ConnectionError_(f"denominator {name} is a zero divisor mod the ideal")
    if u is None:
        u = Poly.var(vt, vt.coords[0])
    checks = []
    rank = conn.carrier.rank
    zero = Frac(Poly.zero(vt))
    one = Frac(Poly.const(vt, 1))

    def base_vec(mu):
        return [one if i == mu else zero for i in range(rank)]

    def nabla_frac(x_idx: int, s_den: Poly, vec: List[Frac], t_den: Poly) -> List[Frac]:
        # nabla_{X/s}(w/t) = (t*nabla_X w - X(t) w) / (s t^2), extended to fraction rows
        X = L.gens[x_idx]
        nw = _loc_cov(conn, [one if i == x_idx else zero for i in range(L.size)], vec)
        xt = as_frac(X(t_den))
        den = Frac(Poly.const(vt, 1), s_den * t_den * t_den)
        return [(as_frac(t_den) * nw[k] - xt * vec[k]) * den for k in range(rank)]

    v0 = base_vec(v_index)
    lhs = nabla_frac(x_index, s, v0, t)
    uv = [as_frac(u) * x for x in v0]
    rhs = nabla_frac(x_index, s, uv, u * t)
    bad = [f"component {k+1}" for k in range(rank) if not ring.eq_mod(lhs[k], rhs[k])]
    checks.append(Check("localization-representative", not bad, bad))

    # curvature scaling: [nabla_{X/r}, nabla_{Y/s}] - nabla_{[X/r, Y/s]} on v/t
    def nabla_general(lower: List[Frac], vec: List[Frac]) -> List[Frac]:
        return _loc_cov(conn, lower, vec)

    rf, sf, tf = Frac(r), Frac(s), Frac(t)
    Xl = [one / rf if i == x_index else zero for i in range(L.size)]
    Yl = [one / sf if i == y_index else zero for i in range(L.size)]
    vloc = [(one / tf) if i == v_index else zero for i in range(rank)]
    first = nabla_general(Xl, nabla_general(Yl, vloc))
    second = nabla_general(Yl, nabla_general(Xl, vloc))
    # [X/r, Y/s] = (rs[X,Y] - r X(s) Y + s Y(r) X) / (r^2 s^2)
    den = rf * rf * sf * sf
    br_lower = [zero] * L.size
    for k, ck in enumerate(L.structure[x_index][y_index]):
        if not ck.is_zero():
            br_lower[k] = br_lower[k] + Frac(r * s * ck) / den
    Xf = L.gens[x_index]
    br_lower[y_index] = br_lower[y_index] - Frac(r * Xf(s)) / den
    br_lower[x_index] = br_lower[x_index] + Frac(s * L.gens[y_index](r)) / den
    third = nabla_general(br_lower, vloc)
    lhs_curv = [first[k] - second[k] - third[k] for k in range(rank)]
    R = curvature_matrix(conn)
    row = R.get((x_index, y_index))[v_index]
    scale = Frac(Poly.const(vt, 1), r * s * t)
    rhs_curv = [as_frac(row[k]) * scale for k in range(rank)]
    bad = [f"component {k+1}" for k in range(rank)
           if not ring.is_zero_mod((lhs_curv[k] - rhs_curv[k]).num)]
    checks.append(Check("localization-curvature-scaling", not bad, bad))
    return checks
