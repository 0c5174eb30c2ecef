import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftq.cartan import NodeVector, alpha, coroot, dynkin_data, omega
from shiftq.lweight import (
    IDENTITY,
    AMonomial,
    LWeight,
    LWeightError,
    YMonomial,
    build_named_weight,
    factor_component,
    is_J_dominant,
    is_J_trivial,
    kr_highest_weight,
    lw_A,
    lw_degree,
    lw_from_components,
    lw_from_Y,
    lw_of_A,
    lw_of_Y,
    lw_psi,
    lw_res_J,
    lw_shift,
    lw_to_A,
    lw_to_Y,
    lweight_from_json,
    lweight_to_json,
    parse_lweight,
    render_lweight,
    right_negative,
    varpi,
)

A1, A2, A3, B2 = (dynkin_data(*x) for x in (("A", 1), ("A", 2), ("A", 3), ("B", 2)))


def test_psi_cancels_with_its_inverse():
    assert lw_psi(1, 0) * lw_psi(1, 0, -1) == IDENTITY


def test_psi_tilde_product():
    assert lw_psi(1, 0, -1) * lw_psi(2, 1) == build_named_weight(A2, "psi_tilde", 1, 0)


def test_weight_class_torus():
    lw = LWeight(omega(A1, 1, -2)) * IDENTITY
    assert lw.torus == NodeVector({1: -2}) and not lw.psi


def test_Y_in_psi_form():
    y = lw_from_Y(A1, 1, 0)
    assert y == LWeight({1: 1}, {(1, -1): 1, (1, 1): -1})
    assert varpi(y) == omega(A1, 1)
    assert lw_from_Y(A1, 1, 0, 0) == IDENTITY


def test_Y_in_non_simply_laced_uses_q_i():
    assert lw_from_Y(B2, 1, 0) == LWeight({1: 2}, {(1, -2): 1, (1, 2): -1})


def test_A_in_rank_one():
    assert lw_A(A1, 1, 0) == LWeight({1: 2}, {(1, -2): 1, (1, 2): -1})


def test_A_in_A2_as_Y_monomial():
    expected = lw_of_Y(A2, YMonomial({(1, -1): 1, (1, 1): 1, (2, 0): -1}))
    assert lw_A(A2, 1, 0) == expected
    assert lw_to_Y(A2, lw_A(A2, 1, 0)) == YMonomial({(1, -1): 1, (1, 1): 1, (2, 0): -1})


@pytest.mark.parametrize("cd", [A1, A2, A3, B2, dynkin_data("G", 2), dynkin_data("C", 3)], ids=lambda c: c.name)
def test_varpi_of_A_is_alpha(cd):
    for j in cd.nodes:
        assert varpi(lw_A(cd, j, 3)) == alpha(cd, j)
        assert lw_degree(lw_A(cd, j, 3)).is_zero()


def test_degrees():
    assert lw_degree(lw_psi(2, 5)) == NodeVector({2: 1})
    assert lw_degree(lw_from_Y(A2, 1, 0) * lw_from_Y(A2, 2, 3)).is_zero()
    assert lw_degree(build_named_weight(A2, "psi_tilde", 1, 0)) == NodeVector({1: -1, 2: 1})


def test_restriction():
    pt = build_named_weight(A2, "psi_tilde", 1, 0)
    assert lw_res_J(pt, [1]) == lw_psi(1, 0, -1)
    assert lw_res_J(IDENTITY, [1]) == IDENTITY
    assert lw_res_J(lw_A(A2, 2, 1), [1]) == LWeight({1: -1}, {(1, 0): -1, (1, 2): 1})


def test_shift():
    assert lw_shift(lw_psi(1, 0), 0) == lw_psi(1, 0)
    assert lw_shift(lw_psi(1, 0), 2) == lw_psi(1, 2)
    assert lw_shift(build_named_weight(A2, "psi_tilde", 1, 0), -2) == build_named_weight(A2, "psi_tilde", 1, -2)


def test_J_triviality():
    assert is_J_trivial(lw_psi(2, 1), [1])
    assert not is_J_trivial(lw_psi(1, 0, -1), [1])
    assert is_J_trivial(IDENTITY, [1, 2])


def test_right_negativity():
    assert right_negative(YMonomial({(1, -1): 1, (1, 1): -1}))
    assert not right_negative(YMonomial({(1, 0): 1, (1, 4): 2}))
    m = kr_highest_weight(A1, 1, -3, 2)
    assert m == YMonomial({(1, -3): 1, (1, -1): 1})
    top = lw_of_Y(A1, m) * lw_A(A1, 1, 0, -1)
    assert right_negative(lw_to_Y(A1, top))


def test_kr_highest_weight():
    assert kr_highest_weight(A1, 1, 4, 1) == YMonomial({(1, 4): 1})
    assert kr_highest_weight(A1, 1, -5, 3) == YMonomial({(1, -5): 1, (1, -3): 1, (1, -1): 1})
    assert lw_degree(lw_of_Y(A1, kr_highest_weight(A1, 1, -5, 3))).is_zero()


def test_named_weights():
    assert build_named_weight(A2, "psi_tilde", 1, 0) == lw_psi(1, 0, -1) * lw_psi(2, 1)
    assert build_named_weight(A2, "psi_star", 1, 0) == lw_from_Y(A2, 1, -1) * lw_psi(2, 1)
    assert build_named_weight(A2, "qq_psi_p", 1, 0) == lw_psi(2, 1)
    # B2: long node 1 (d=2) sees node 2 with C_12 = -1; short node 2 sees node 1 with C_21 = -2
    assert build_named_weight(B2, "psi_tilde", 1, 0) == lw_psi(1, 0, -1) * lw_psi(2, 2)
    assert build_named_weight(B2, "psi_tilde", 2, 0) == lw_psi(2, 0, -1) * lw_psi(1, 0) * lw_psi(1, 2)
    with pytest.raises(LWeightError):
        build_named_weight(A2, "nope", 1, 0)


def test_qq_star_weights_differ_by_A():
    for cd in (A2, A3, B2):
        for j in cd.nodes:
            p1 = build_named_weight(cd, "qqstar_psi_p1", j, 0)
            p2 = build_named_weight(cd, "qqstar_psi_p2", j, 0)
            assert p2 == LWeight(alpha(cd, j)) * p1 * lw_A(cd, j, 0, -1)
            star = build_named_weight(cd, "psi_star", j, 0)
            assert p1 == LWeight(omega(cd, j, -1)) * lw_psi(j, 0) * star


def test_to_A_rejects_non_monomials():
    with pytest.raises(LWeightError):
        lw_to_A(A2, lw_psi(1, 0))
    with pytest.raises(LWeightError):
        lw_to_A(A2, lw_A(A2, 1, 0))  # positive power of A


def test_parse_render_json():
    text = "Psi[1,0]^-1 * Psi[2,1] * t[2]^3"
    lw = parse_lweight(text)
    assert render_lweight(lw) == text
    assert parse_lweight(render_lweight(lw)) == lw
    assert lweight_from_json(lweight_to_json(lw)) == lw
    assert parse_lweight("A[1,0]^-1", A2) == lw_A(A2, 1, 0, -1)
    assert parse_lweight("1") == IDENTITY
    for bad in ("Psi[1]", "Q[1,2]", "t[1,2]"):
        with pytest.raises(LWeightError):
            parse_lweight(bad)
    with pytest.raises(LWeightError):
        parse_lweight("Y[1,0]")


def test_factor_component_roundtrip():
    lw = LWeight({1: -3}, {(1, 2): 2, (1, -1): -1, (1, 5): 1})
    assert lw_from_components({1: lw.component(1)}) == lw
    e, fac = factor_component(lw.component(1))
    assert e == -3 and fac == {2: 2, -1: -1, 5: 1}


def test_J_dominance():
    assert is_J_dominant(A2, lw_from_Y(A2, 1, 0), [1])
    assert not is_J_dominant(A2, lw_from_Y(A2, 1, 0, -1), [1])


types = st.sampled_from([A1, A2, A3, B2, dynkin_data("G", 2)])


def lweights(cd):
    keys = st.tuples(st.sampled_from(cd.nodes), st.integers(-4, 4))
    return st.builds(
        LWeight,
        st.dictionaries(st.sampled_from(cd.nodes), st.integers(-5, 5)),
        st.dictionaries(keys, st.integers(-2, 2)),
    )


@settings(max_examples=200)
@given(types, st.data())
def test_group_laws(cd, data):
    a, b, c = (data.draw(lweights(cd)) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * IDENTITY == a and a * a.inverse() == IDENTITY
    assert (a / b) * b == a
    assert varpi(a * b) == varpi(a) + varpi(b)
    assert lw_degree(a * b) == lw_degree(a) + lw_degree(b)
    assert lw_from_components({i: a.component(i) for i in cd.nodes}) == lw_res_J(a, cd.nodes)


@settings(max_examples=200)
@given(types, st.data())
def test_A_monomial_roundtrip(cd, data):
    keys = st.tuples(st.sampled_from(cd.nodes), st.integers(-4, 4))
    m = AMonomial(data.draw(st.dictionaries(keys, st.integers(0, 2))))
    assert lw_to_A(cd, lw_of_A(cd, m)) == m
    y = YMonomial(data.draw(st.dictionaries(keys, st.integers(-2, 2))))
    assert lw_to_Y(cd, lw_of_Y(cd, y)) == y
