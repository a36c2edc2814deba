from functools import lru_cache

import pytest
from gmpy2 import mpq

from freediv.groebner import Ideal
from freediv.logderiv import Divisor, InvariantError, log_derivations, saito_test, theta_fs
from freediv import lindiag as ld
from freediv.weyl import apply_to_fs, central_slice
from corpus import CORPUS, QUICK, TWO_DIM, diag, flag, report


@lru_cache(maxsize=None)
def setup(name):
    variables, poly = CORPUS[name]
    d = Divisor.parse(poly, variables)
    B = saito_test(d, log_derivations(d))
    theta = theta_fs(d, B)
    return d, B, theta


@lru_cache(maxsize=None)
def kernel(name):
    d, _, theta = setup(name)
    return ld.rees_kernel(d, theta)


@lru_cache(maxsize=None)
def ann(name):
    d, _, theta = setup(name)
    return ld.annihilator(d, theta)


def s_poly(*roots):
    R = ld.s_ring()
    s = R.gen("s")
    out = R.one()
    for r in roots:
        out = out * (s + mpq(r))
    return out


# ---------------------------------------------------------------------------
# Rees kernel


def test_rees_kernel_normal_crossing():
    k = kernel("nc2")
    S = k.ring
    expected = Ideal([S.parse("s - x*xi1"), S.parse("s - y*xi2")], S)
    assert k.full == expected
    assert not k.extras and ld.clt_test(k)


def test_rees_kernel_four_lines_has_one_quadratic_extra():
    k = kernel("four_lines")
    assert [deg for _, deg in k.extras] == [2]
    assert not ld.clt_test(k)
    assert ld.gcl_exponent(k) == 1


def test_cusp_is_of_linear_type():
    assert ld.clt_test(kernel("cusp"))
    assert ld.gcl_exponent(kernel("cusp")) == 0


def test_gcl_exponent_d4():
    assert ld.gcl_exponent(kernel("d4")) == 2


def test_gcl_absent_without_euler_field():
    assert ld.gcl_exponent(kernel("nonqh")) is None


def test_kernel_is_degree_one_colon_f():
    # ker = ker1 : f on free examples
    for name in ["nc2", "cusp", "four_lines", "d4"]:
        k = kernel(name)
        d = setup(name)[0]
        col = k.degree_one.quotient(d.f.to_ring(k.ring))
        assert col == k.full, name


def test_koszul_and_gk_four_lines():
    d, B, theta = setup("four_lines")
    ko = ld.koszul_test(d, list(B))
    assert not ko.holds
    S = ko.locus.ring
    assert ko.locus.contains(S.parse("x1")) and ko.locus.contains(S.parse("x2"))
    assert ld.gk_test(d, theta).holds


# ---------------------------------------------------------------------------
# annihilators and towers


def test_dlt_and_gdl_four_lines():
    d = setup("four_lines")[0]
    data = ann("four_lines")
    assert not ld.dlt_test(data)
    tower = ld.ann_tower(d, data)
    assert [str(c) for c in tower.factors] == ["s + 1/2"]
    assert ld.gdl_witness(d, data, tower) == s_poly("1/2")
    assert ld.gr_ann_check(d, data, kernel("four_lines"))


def test_tower_d4():
    d = setup("d4")[0]
    data = ann("d4")
    tower = ld.ann_tower(d, data)
    assert [str(c) for c in tower.factors] == ["s + 3/5", "s + 2/5"]
    assert tower.terminal == 3
    assert ld.gdl_witness(d, data, tower) == s_poly("3/5", "2/5")
    # the fallback colon route agrees
    assert ld.gdl_witness(d, data, None) == s_poly("3/5", "2/5")
    assert not ld.gr_ann_check(d, data, kernel("d4"))


def test_tower_aborts_on_nonqh_curve():
    d = setup("nonqh")[0]
    with pytest.raises(ld.NonPrincipalStep):
        ld.ann_tower(d, ann("nonqh"))


def test_cusp_bernstein_confirmed_by_functional_equation():
    d = setup("cusp")[0]
    data = ann("cusp")
    b = ld.bernstein(d, data)
    # independent oracle: the elimination slice plus the literal action of P on f^(s+1)
    J = data.ann + type(data.ann)([d.f.to_ring(d.weyl)], d.weyl)
    assert central_slice(J) == b
    fe = ld.functional_equation(d, b, data)
    value = apply_to_fs(fe.P * d.f.to_ring(d.weyl), d.f)
    assert value.pole == 0 and value.numerator == b.to_ring(value.numerator.ring)
    assert b == s_poly(1, "5/6", "7/6")


def test_functional_equation_strategies_agree_on_order():
    d = setup("four_lines")[0]
    data = ann("four_lines")
    b = ld.bernstein(d, data)
    direct = ld.functional_equation(d, b, data, strategy="direct")
    process = ld.functional_equation(d, b, data, strategy="process")
    assert direct.order == process.order == 6
    assert direct.in_ann1 and process.in_ann1


def test_pre_spencer_routes_agree_on_four_lines():
    d, B, theta = setup("four_lines")
    torsion = ld.pre_spencer_test(d, list(B), theta, True)
    direct = ld.pre_spencer_test(d, list(B), theta, False)
    assert torsion.holds and direct.holds
    assert torsion.method != direct.method


def test_spencer_syzygy_needs_all_relations():
    d, B, _ = setup("nc3")
    W = d.weyl0
    ops = [b.operator(W) for b in B]
    assert ld.spencer_syzygy_test(ops, ld.spencer_relations(d, list(B), W))
    assert ld.holonomicity_test(ops)


def test_ann_inverse_and_lct_normal_crossing():
    d = setup("nc2")[0]
    data = ann("nc2")
    b = ld.bernstein(d, data)
    res = ld.ann_f_inverse_check(d, b, data)
    assert res.holds
    assert ld.lct_test(True, res.holds) is True
    assert ld.lct_test(True, None) is None
    assert ld.lct_test(False, None) is False


def test_generated_by_needs_euler_field():
    d = setup("nonqh")[0]
    with pytest.raises(ld.NotApplicable):
        ld.ann_f_generated_by(d, ann("nonqh"))
    assert ld.ann_f_generated_by(setup("nc2")[0], ann("nc2")).holds


def test_rational_roots_and_factoring():
    b = s_poly(1, 1, 1, "1/2", "3/4", "5/4")
    assert ld.rational_roots(b) == [(mpq(-5, 4), 1), (mpq(-1), 3), (mpq(-3, 4), 1), (mpq(-1, 2), 1)]
    assert ld.factored_text(b) == "(s + 1)^3*(s + 1/2)*(s + 3/4)*(s + 5/4)"
    assert ld.integer_roots_below(s_poly(1, 2, "1/2")) == [-2]


# ---------------------------------------------------------------------------
# batteries over the corpus reports


IMPLICATIONS = [
    ("clt", "dlt"),
    ("clt", "koszul"),
    ("clt", "euler_homogeneous"),
    ("koszul", "gk"),
    ("clt", "gr_ann"),
]


@pytest.mark.parametrize("name", QUICK)
def test_implication_battery(name):
    for a, b in IMPLICATIONS:
        if flag(name, a) is True and flag(name, b) is not None:
            assert flag(name, b) is True, f"{a} => {b} fails on {name}"
    if flag(name, "clt"):
        assert diag(name, "gcl")["payload"]["N"] == 0
    if flag(name, "dlt"):
        assert diag(name, "gdl")["payload"]["beta"] == "1"
    if flag(name, "gcl"):
        assert flag(name, "euler_homogeneous") is True


@pytest.mark.parametrize("name", TWO_DIM)
def test_two_dimensional_equivalences(name):
    values = {stage: flag(name, stage) for stage in ("clt", "dlt", "lct", "euler_homogeneous")}
    assert len(set(values.values())) == 1, values


@pytest.mark.parametrize("name", ["four_lines", "d4", "nc2", "cusp", "three_lines", "nc3"])
def test_beta_divides_b(name):
    d = setup(name)[0]
    data = ann(name)
    beta = ld.gdl_witness(d, data)
    b = ld.bernstein(d, data)
    from freediv.groebner import divide_exact

    divide_exact(b.to_ring(beta.ring), beta)  # raises unless beta | b
    assert report(name)["diagnostics"]["bernstein"]["status"] == "proved"


def test_internal_checks_raise_invariant_errors():
    d, B, theta = setup("nc2")
    fake = ld.ThetaOperator(theta[0].delta, theta[0].operator + d.weyl.one())
    with pytest.raises(InvariantError):
        ld.annihilator(d, [fake, theta[1]])
