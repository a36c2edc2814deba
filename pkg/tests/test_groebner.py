import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from freediv.exactpoly import MonomialOrder, polynomial_ring
from freediv.groebner import (
    Ideal,
    Lifter,
    Timeout,
    budget,
    dimension,
    groebner_basis,
    height,
    intersect,
    is_groebner,
    module_membership,
    normal_form,
    regular_sequence_failure_locus,
    saturation,
    syzygies,
)
from test_exactpoly import to_sympy

R = polynomial_ring("x,y,z")


def gens(*texts, ring=R):
    return [ring.parse(t) for t in texts]


def sympy_reduced_basis(polys, order="grevlex"):
    syms = sympy.symbols(polys[0].ring.names)
    G = sympy.groebner([to_sympy(p) for p in polys], *syms, order=order)
    return {sympy.expand(g / sympy.Poly(g, *syms).LC(order=order)) for g in G.exprs}


def test_basis_matches_sympy_on_textbook_ideal():
    I = gens("x^2 + y*z - 2", "x*y - z^2", "y^3 - x")
    G = groebner_basis(I)
    assert is_groebner(G)
    assert {to_sympy(g) for g in G} == sympy_reduced_basis(I)


def test_lex_elimination_of_twisted_cubic():
    Rl = polynomial_ring("t,x,y,z", MonomialOrder.lex())
    I = Ideal(gens("x - t", "y - t^2", "z - t^3", ring=Rl), Rl)
    E = I.eliminate(["t"])
    S = polynomial_ring("x,y,z")
    assert E.to_ring(S) == Ideal(gens("y - x^2", "z - x^3", ring=S), S)


def test_unit_and_zero_ideals():
    assert Ideal(gens("x", "x + 1"), R).is_unit()
    assert Ideal([], R).is_zero()
    assert dimension(Ideal([R.one()], R)) == -1
    assert dimension(Ideal([], R)) == 3
    assert height(Ideal(gens("x", "y"), R)) == 2


def test_quotient_saturation_intersection():
    I = Ideal(gens("x^2*y", "x*y^2"), R)
    assert I.quotient(R.parse("x")) == Ideal(gens("x*y", "y^2"), R)
    sat, k = saturation(I, R.parse("x"))
    assert sat == Ideal(gens("y"), R) and k == 2
    J = intersect(Ideal(gens("x"), R), Ideal(gens("y"), R))
    assert J == Ideal(gens("x*y"), R)


def test_syzygies_of_koszul_pair():
    g = gens("x", "y")
    syz = syzygies(g)
    assert len(syz) == 1
    a, b = syz.generators[0]
    assert a * g[0] + b * g[1] == 0
    assert {str(a), str(b)} in ({"y", "-x"}, {"-y", "x"})


def test_lifter_recovers_cofactors():
    I = gens("x^2 - y", "x*y - z")
    p = R.parse("x + 1") * I[0] + R.parse("z") * I[1]
    a = Lifter(I).lift(p)
    assert a is not None and a[0] * I[0] + a[1] * I[1] == p
    assert Lifter(I).lift(R.parse("x")) is None


def test_regular_sequence_locus_for_non_regular_pair():
    # (x*y, x*z) fails to be regular exactly along x = 0
    rep = regular_sequence_failure_locus(gens("x*y", "x*z"))
    assert not rep.is_regular_globally
    assert rep.locus == Ideal(gens("x"), R)
    rep = regular_sequence_failure_locus(gens("x", "y", "z"))
    assert rep.is_regular_globally and rep.locus.is_unit()


def test_budgets_raise_timeout():
    I = gens("x^5 + y^4 + z^3 - 1", "x^3 + y^3 + z^2 - 1", "x*y*z - 1")
    with pytest.raises(Timeout):
        with budget(steps=20):
            groebner_basis(I)
    with pytest.raises(Timeout):
        with budget(seconds=0.0):
            groebner_basis(I)


# ---------------------------------------------------------------------------
# randomized engine properties

monos = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
poly_dicts = st.dictionaries(monos, st.integers(-3, 3).filter(bool), min_size=1, max_size=3)
ideals = st.lists(poly_dicts, min_size=1, max_size=3)


def _ideal(ds):
    return [p for p in (R.from_dict(d) for d in ds) if p]


@settings(max_examples=200)
@given(ideals)
def test_buchberger_self_check(ds):
    I = _ideal(ds)
    G = groebner_basis(I)
    assert is_groebner(G)
    for g in I:
        assert normal_form(g, G) == 0
    lift = Lifter(I)
    for g in G:
        a = lift.lift(g)
        assert a is not None and sum((c * h for c, h in zip(a, I)), R.zero()) == g
    assert {to_sympy(g) for g in G} == sympy_reduced_basis(I)


@settings(max_examples=200)
@given(ideals, poly_dicts)
def test_normal_form_idempotent(ds, pd):
    I = _ideal(ds)
    G = groebner_basis(I)
    p = R.from_dict(pd)
    r = normal_form(p, G)
    assert normal_form(r, G) == r
    assert Ideal(I, R).contains(p - r)
    lms = [g.leading_monomial() for g in G]
    for e, _ in r.items():
        assert not any(all(a <= b for a, b in zip(m, e)) for m in lms)


@settings(max_examples=200)
@given(ideals)
def test_syzygy_soundness(ds):
    I = _ideal(ds)
    syz = syzygies(I)
    for v in syz:
        assert sum((a * g for a, g in zip(v, I)), R.zero()) == 0
    # the Koszul relations are consequences of the computed generators
    for i in range(len(I)):
        for j in range(i + 1, len(I)):
            k = [R.zero()] * len(I)
            k[i], k[j] = I[j], -I[i]
            assert module_membership(R, k, syz.generators)
