import math
from itertools import product

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from freediv.exactpoly import MonomialOrder, polynomial_ring
from freediv.logderiv import Divisor, NonReducedError
from freediv.lindiag import bernstein
from corpus import CORPUS
from freediv.weyl import (
    LeftIdeal,
    ann_fs,
    apply_operator,
    apply_to_fs,
    bm_algebra,
    central_slice,
    colon_by_central,
    minimal_central_polynomial,
    operator_from_json,
    operator_to_json,
    symbol,
    weyl_algebra,
)

W = weyl_algebra("x,y")
Ws = weyl_algebra("x,y", s=True)
R = polynomial_ring("x,y")


def test_commutation_relations():
    x, dx, y, dy = (W.gen(v) for v in ("x", "dx", "y", "dy"))
    assert dx * x == x * dx + 1
    assert dx * y == y * dx
    assert dx ** 2 * x ** 2 == x ** 2 * dx ** 2 + 4 * x * dx + 2
    B = bm_algebra(["x"])
    s, dt = B.gen("s"), B.gen("dt")
    assert dt * s == (s - 1) * dt
    assert dt ** 2 * s ** 2 == (s - 2) ** 2 * dt ** 2


def test_products_do_not_depend_on_the_order():
    V = weyl_algebra("x,y", order=MonomialOrder.weighted({"dx": 1, "dy": 1}))
    P, Q = "x^2*dx*dy + 3*y*dy", "dx^2 - x*y*dy + 1"
    assert (V.parse(P) * V.parse(Q)).as_dict() == (W.parse(P) * W.parse(Q)).as_dict()


def test_action_on_polynomials():
    P = W.parse("x*dx + y*dy")
    g = R.parse("x^3 + x*y")
    assert apply_operator(P, g) == R.parse("3*x^3 + 2*x*y")
    assert apply_operator(W.parse("dx^2"), g) == R.parse("6*x")


def test_action_on_fs():
    f = R.parse("x*y")
    assert apply_to_fs(Ws.parse("x*dx - s"), f).is_zero()
    v = apply_to_fs(Ws.parse("dx"), f)
    # dx f^s = s y f^(s-1)
    assert v.pole == 1 and str(v.numerator) == "y*s"


def test_ann_fs_normal_crossing():
    f = R.parse("x*y")
    A = ann_fs(f, ring=Ws)
    expected = LeftIdeal([Ws.parse("x*dx - s"), Ws.parse("y*dy - s")], Ws)
    assert A.issubset(expected) and expected.issubset(A)
    for g in A.groebner():
        assert apply_to_fs(g, f).is_zero()


def test_bernstein_two_methods_agree_on_cusp():
    # an independent check: the elimination slice and the linear-algebra search
    d = Divisor(R.parse("x^2 - y^3"))
    b = bernstein(d, method="linear")
    assert b == bernstein(d, method="elimination")
    s = polynomial_ring("s").gen("s")
    assert b.to_ring(s.ring) == (s + 1) * (s + mpq(5, 6)) * (s + mpq(7, 6))


def test_colon_and_central_slice():
    # (s+1)(s+2) * (x*dx - s) against the ideal it generates
    I = LeftIdeal([Ws.parse("(s+1)*(s+2)*(x*dx - s)"), Ws.parse("(s+2)*dy")], Ws)
    C = colon_by_central(I, Ws.parse("s + 2"))
    assert C.contains(Ws.parse("(s+1)*(x*dx - s)")) and C.contains(Ws.parse("dy"))
    assert not C.contains(Ws.parse("x*dx - s"))
    J = LeftIdeal([Ws.parse("s^2 - 1"), Ws.parse("dx")], Ws)
    assert str(central_slice(J)) == "s^2 - 1"
    assert str(minimal_central_polynomial(J, Ws.parse("x"))) == "s^2 - 1"


@pytest.mark.parametrize("name", ["x", "nc2", "cusp", "three_lines", "nonqh", "nc3", "four_lines", "d4"])
def test_annihilator_has_no_central_slice(name):
    # f^s satisfies no polynomial identity in s alone
    variables, poly = CORPUS[name]
    d = Divisor.parse(poly, variables)
    assert central_slice(ann_fs(d.f, ring=d.weyl)).is_zero()


def test_operator_json_round_trip():
    P = Ws.parse("1/2*x^2*dx*dy - 3*s*dy + 7")
    data = operator_to_json(P)
    assert operator_from_json(data) == P
    assert data["terms"][0][1] == "1/2"


def test_non_reduced_divisor_reports_witness():
    with pytest.raises(NonReducedError) as err:
        Divisor(polynomial_ring("x").parse("x^2"))
    assert str(err.value.witness) == "x"


# ---------------------------------------------------------------------------
# brute-force agreement with the symbol product formula


def _sym(P, xs, xis):
    """Normally ordered operator in D_2 as a commutative sympy expression in x, xi."""
    out = 0
    for e, c in P.as_dict().items():
        term = sympy.Rational(int(c.numerator), int(c.denominator))
        for v, k in zip(xs + xis, e):
            term *= v ** k
        out += term
    return sympy.expand(out)


def _leibniz(a, b, xs, xis, bound):
    # sigma(PQ) = sum_k 1/k! d_xi^k sigma(P) d_x^k sigma(Q)
    out = 0
    for k in product(range(bound + 1), repeat=len(xs)):
        da, db = a, b
        for v, j in zip(xis, k):
            da = sympy.diff(da, v, j)
        for v, j in zip(xs, k):
            db = sympy.diff(db, v, j)
        out += da * db / math.prod(math.factorial(j) for j in k)
    return sympy.expand(out)


coeff = st.integers(-3, 3).filter(bool)
op_terms = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 3), st.integers(0, 3))
    .filter(lambda e: e[2] + e[3] <= 3),
    coeff, min_size=1, max_size=4)
poly_terms = st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(lambda e: sum(e) <= 4),
    coeff, min_size=1, max_size=5)


@settings(max_examples=200)
@given(op_terms, op_terms, poly_terms)
def test_normal_ordering_and_leibniz_brute_force(pa, qa, ga):
    P, Q, g = W.from_dict(pa), W.from_dict(qa), R.from_dict(ga)
    # the action is a module action: (PQ) g = P (Q g)
    assert apply_operator(P * Q, g) == apply_operator(P, apply_operator(Q, g))
    xs = list(sympy.symbols("x y"))
    xis = list(sympy.symbols("xi1 xi2"))
    assert _sym(P * Q, xs, xis) == _leibniz(_sym(P, xs, xis), _sym(Q, xs, xis), xs, xis, 3)


ops_s = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
    coeff, min_size=1, max_size=4)


@settings(max_examples=200)
@given(ops_s, ops_s)
def test_total_symbol_is_multiplicative(pa, qa):
    P, Q = Ws.from_dict(pa), Ws.from_dict(qa)
    assert symbol(P * Q, "FT") == symbol(P, "FT") * symbol(Q, "FT")
    assert symbol(P * Q, "F") == symbol(P, "F") * symbol(Q, "F")


cubic_terms = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(lambda e: sum(e) <= 3),
    coeff, min_size=1, max_size=5)


@st.composite
def small_divisors(draw):
    x, y = R.gen("x"), R.gen("y")
    kind = draw(st.integers(0, 3))
    if kind == 0:
        roots = draw(st.lists(st.integers(-4, 4), min_size=1, max_size=3, unique=True))
        f = R.one()
        for r in roots:
            f = f * (x - r)
    elif kind == 1:
        slopes = draw(st.lists(st.integers(-3, 3), min_size=1, max_size=3, unique=True))
        f = R.one()
        for a in slopes:
            f = f * (y - a * x)
    elif kind == 2:
        f = x ** draw(st.integers(2, 3)) + draw(coeff) * y ** draw(st.integers(2, 4))
    else:
        # generic quartics are out of reach of the 200-instance time budget
        f = R.from_dict(draw(cubic_terms))
    return f


@settings(max_examples=200)
@given(small_divisors())
def test_b_function_vanishes_at_minus_one(f):
    assume(not f.is_constant())
    try:
        d = Divisor(f)
    except NonReducedError:
        assume(False)
    b = bernstein(d)
    assert b.leading_coefficient() == 1
    assert b.evaluate({"s": -1}) == 0
    # every generator of the computed annihilator kills f^s
    A = ann_fs(d.f, ring=d.weyl)
    for g in A.gens:
        assert apply_to_fs(g, d.f).is_zero()
    assert central_slice(A).is_zero()
