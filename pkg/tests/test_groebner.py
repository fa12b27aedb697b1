import random

import pytest

from lrconn.groebner import (Ideal, QuotientRing, buchberger, express_in_generators,
                             module_cofactors, normal_form, normal_form_shuffled,
                             reduce_with_cofactors)
from lrconn.parser import parse_poly
from lrconn.poly import JetSpec, Poly, PolyError, VarTable, divide_exact


@pytest.fixture
def vt():
    return VarTable(("u1", "u2", "u3"))


def P(vt, s):
    return parse_poly(s, vt)


def test_principal_already_reduced(vt):
    ideal = Ideal([P(vt, "u1*u2 - u3^2")])
    assert ideal.basis == [P(vt, "u1*u2 - u3^2")]


def test_two_generator_reduction(vt):
    # hand S-polynomial oracle: S(u1, u1*u2-u3^2) reduces to u3^2
    ideal = Ideal([P(vt, "u1"), P(vt, "u1*u2 - u3^2")])
    assert ideal.basis == [P(vt, "u1"), P(vt, "u3^2")]


def test_sphere_principal():
    svt = VarTable(("x", "y", "z"))
    g = parse_poly("x^2 + y^2 + z^2 - 1", svt)
    assert Ideal([g]).basis == [g]


def test_basis_change_of_basis_rows(vt):
    gens = [P(vt, "u1"), P(vt, "u1*u2 - u3^2")]
    basis, rows = buchberger(gens, vt)
    for b, row in zip(basis, rows):
        acc = Poly.zero(vt)
        for r, g in zip(row, gens):
            acc = acc + r * g
        assert acc == b


def test_normal_form_cone(vt):
    ring = QuotientRing(vt, Ideal([P(vt, "u1*u2 - u3^2")]))
    assert ring.nf(P(vt, "u1*u2")) == P(vt, "u3^2")
    assert ring.nf(P(vt, "u1*u2 - u3^2")).is_zero()
    assert ring.nf(P(vt, "u2 + u3*(u1*u2 - u3^2)")) == P(vt, "u2")


def test_nf_idempotent_and_multiplicative(vt):
    ring = QuotientRing(vt, Ideal([P(vt, "u1*u2 - u3^2")]))
    rng = random.Random(23)
    from tests.test_poly import rand_poly
    for _ in range(100):
        p, q = rand_poly(vt, rng), rand_poly(vt, rng)
        assert ring.nf(ring.nf(p)) == ring.nf(p)
        assert ring.nf(p + q) == ring.nf(ring.nf(p) + ring.nf(q))
        assert ring.nf(p * q) == ring.nf(ring.nf(p) * ring.nf(q))


def test_nf_confluence_shuffled(vt):
    ideal = Ideal([P(vt, "u1"), P(vt, "u1*u2 - u3^2"), P(vt, "u2*u3 - u1")])
    rng = random.Random(29)
    from tests.test_poly import rand_poly
    for _ in range(100):
        p = rand_poly(vt, rng, nterms=6, maxdeg=4)
        base = normal_form(p, ideal)
        assert normal_form_shuffled(p, ideal, rng) == base


def test_principal_membership_vs_divide(vt):
    f = P(vt, "u1*u2 - u3^2")
    ideal = Ideal([f])
    rng = random.Random(31)
    from tests.test_poly import rand_poly
    for _ in range(100):
        a = rand_poly(vt, rng)
        member = a * f
        assert normal_form(member, ideal).is_zero()
        assert divide_exact(member, f) == a if not a.is_zero() else True
        outside = member + P(vt, "u2")
        assert normal_form(outside, ideal) == normal_form(P(vt, "u2"), ideal)


def test_ideal_power(vt):
    f = P(vt, "u1*u2 - u3^2")
    ideal = Ideal([f])
    sq = ideal.power(2)
    assert sq.basis == [Poly(vt, (f * f).terms)]
    assert sq.contains(f * P(vt, "u1") * f)
    assert not sq.contains(f)
    assert ideal.power(1).basis == ideal.basis


def test_ideal_power_requires_positive(vt):
    with pytest.raises(PolyError):
        Ideal([P(vt, "u1")]).power(0)


def test_reduce_with_cofactors_cone(vt):
    # applying the first tangent field to the cone equation gives cofactor 2
    f = P(vt, "u1*u2 - u3^2")
    target = P(vt, "2*u1*u2 - 2*u3^2")
    cof, rem = reduce_with_cofactors(target, [f])
    assert rem.is_zero() and cof == [P(vt, "2")]


def test_reduce_with_cofactors_remainder(vt):
    cof, rem = reduce_with_cofactors(P(vt, "u2"), [P(vt, "u1*u2 - u3^2")])
    assert cof == [Poly.zero(vt)] and rem == P(vt, "u2")
    cof, rem = reduce_with_cofactors(Poly.zero(vt), [P(vt, "u1")])
    assert rem.is_zero() and cof == [Poly.zero(vt)]


def test_reduce_with_cofactors_non_groebner(vt):
    gens = [P(vt, "u1 + u2"), P(vt, "u1")]
    p = P(vt, "u2^2 + u1*u3")
    cof, rem = reduce_with_cofactors(p, gens)
    acc = Poly.zero(vt)
    for c, g in zip(cof, gens):
        acc = acc + c * g
    assert acc + rem == p
    assert normal_form(rem, Ideal(gens)) == rem


def test_express_in_generators(vt):
    gens = [P(vt, "u1"), P(vt, "u2 + u3")]
    p = P(vt, "u3*u1 + 2*u2 + 2*u3")
    sol = express_in_generators(p, gens, 2)
    assert sol is not None
    acc = Poly.zero(vt)
    for h, g in zip(sol, gens):
        acc = acc + h * g
    assert acc == p


def test_module_cofactors_mod_ideal(vt):
    ring = QuotientRing(vt, Ideal([P(vt, "u1*u2 - u3^2")]))
    # u2*X + (-u3)*Y = 0 mod the cone ideal for X=(u1,), Y=(u3,)
    target = [Poly.zero(vt)]
    sol = module_cofactors([P(vt, "u3^2")], [[P(vt, "u1*u2")]], 2, ring)
    assert sol is not None and ring.nf(sol[0] * P(vt, "u1*u2") - P(vt, "u3^2")).is_zero()


def test_jet_free_ideal_enforced():
    jvt = VarTable(("u1", "u2"), [JetSpec("f", ("u1",), 1)])
    with pytest.raises(PolyError):
        QuotientRing(jvt, Ideal([Poly.var(jvt, "f")]))


def test_lex_order_elimination():
    vt = VarTable(("x", "y"), order="lex")
    ideal = Ideal([parse_poly("x^2 + y^2 - 1", vt), parse_poly("x - y", vt)])
    basis = ideal.basis
    assert any(all(m[0] == 0 for m in g.terms) for g in basis)
