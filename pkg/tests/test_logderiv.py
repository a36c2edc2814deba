import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freediv.exactpoly import polynomial_ring
from freediv.groebner import Ideal
from freediv.logderiv import (
    Divisor,
    NonReducedError,
    NotApplicable,
    bracket,
    determinant,
    euler_homogeneous_test,
    euler_normalize,
    locally_free,
    log_derivations,
    saito_test,
    theta_fs,
)
from freediv.weyl import apply_to_fs
from corpus import CORPUS


def divisor(name):
    variables, poly = CORPUS[name]
    return Divisor.parse(poly, variables)


def basis(name):
    d = divisor(name)
    return d, saito_test(d, log_derivations(d))


def test_normal_crossing_basis():
    d, B = basis("nc2")
    assert B is not None and len(B) == 2
    assert B.det == B.unit * d.f
    assert sorted(str(w) for w in B.weights) == ["0", "1"]


def test_four_lines_weights_and_determinant():
    d, B = basis("four_lines")
    assert [str(w) for w in B.weights] == ["0", "0", "4"]
    rows = [list(g.coeffs) for g in B]
    assert determinant(rows) == B.unit * d.f
    for g in B:
        assert g(d.f) == g.weight * d.f


@pytest.mark.parametrize("name,weights", [("d4", ["0", "0", "5"]), ("cusp", ["0", "6"]),
                                          ("three_lines", ["0", "3"]), ("nc3", ["0", "0", "1"])])
def test_weights_of_quasi_homogeneous_corpus(name, weights):
    _, B = basis(name)
    assert [str(w) for w in B.weights] == weights


def test_nonqh_curve_is_free_but_not_euler_homogeneous():
    d, B = basis("nonqh")
    assert B is not None
    assert not euler_homogeneous_test(d)
    assert any(g.constant_weight is None for g in B)
    with pytest.raises(NotApplicable):
        euler_normalize(d, B)


def test_cone_over_smooth_conic_is_not_free():
    d = Divisor.parse("x^2 + y^2 + z^2", "x,y,z")
    gens = log_derivations(d)
    assert len(gens) > 3
    assert saito_test(d, gens) is None
    assert not locally_free(d, gens)
    assert euler_homogeneous_test(d)


@pytest.mark.parametrize("name", ["nc2", "cusp", "nonqh", "four_lines", "d4"])
def test_corpus_is_locally_free(name):
    d = divisor(name)
    assert locally_free(d, log_derivations(d))


def test_non_reduced_input():
    with pytest.raises(NonReducedError) as err:
        Divisor.parse("x^2*y", "x,y")
    assert str(err.value.witness) == "x"


def test_euler_normalization_has_weights_zero_zero_one():
    d, B = basis("four_lines")
    E = euler_normalize(d, B)
    assert [str(w) for w in E.weights] == ["0", "0", "1"]


def test_theta_operators_annihilate_fs():
    d, B = basis("d4")
    for t in theta_fs(d, B):
        assert apply_to_fs(t.operator, d.f).is_zero()


def test_brackets_stay_logarithmic():
    d, B = basis("four_lines")
    for a in B:
        for b in B:
            c = bracket(a, b, d)
            assert c(d.f) == c.weight * d.f


coeff = st.integers(-3, 3).filter(bool)


@settings(max_examples=60)
@given(st.lists(st.tuples(coeff, coeff), min_size=1, max_size=4, unique=True))
def test_line_arrangements_are_free(lines):
    # a reduced plane curve is always free; the basis determinant is c * f
    R = polynomial_ring("x,y")
    x, y = R.gens()
    f = R.one()
    for a, b in lines:
        f = f * (a * x + b * y + 1)
    try:
        d = Divisor(f)
    except NonReducedError:
        return
    gens = log_derivations(d)
    for g in gens:
        assert Ideal([d.f], d.ring).contains(g(d.f))
    assert locally_free(d, gens)
    B = saito_test(d, gens)
    assert B is not None and B.det == B.unit * d.f
