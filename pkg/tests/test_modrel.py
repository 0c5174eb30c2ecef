import pytest

from shiftq.cartan import NodeVector, dynkin_data
from shiftq.lweight import LWeight, build_named_weight, lw_psi
from shiftq.modrel import (
    REALIZATIONS,
    RealizationError,
    Window,
    apply_mode,
    drinfeld_tensor,
    extract_h_eigenvalue,
    module_qchar,
    perturb,
    realize,
    rmatrix_check,
    rmatrix_gamma,
    rmatrix_indeterminate,
    verify_definition_relations,
)
from shiftq.qchar import qc_inflation, qc_kr_sl2, qc_neg_prefund_rank1, qc_neg_prefund_sl3_pair
from shiftq.qfield import ONE, PoleError, Q, q_number, qpow, ratq

A1, A2, A3, B2 = (dynkin_data(*x) for x in (("A", 1), ("A", 2), ("A", 3), ("B", 2)))
SMALL = Window(4, 2, 2)


def test_neg_prefund_action():
    V = realize("sl2_neg_prefund", A1, node=1, spec=2)
    a = qpow(2)
    # x+_r v_2 = a^r q^(-2r) v_1
    assert apply_mode(V, 1, 1, 3, 2) == {1: a ** 3 * qpow(-6)}
    # (q - q^-1) x-_r v_1 = a^r q^(-(2r+1)) [2] v_2
    got = apply_mode(V, -1, 1, 1, 1)
    assert got == {2: a * qpow(-3) * q_number(2) / (Q - Q.inverse())}
    assert apply_mode(V, 1, 1, 0, 0) == {}


def test_neg_prefund_coweight_and_lweight():
    V = realize("sl2_neg_prefund", A1, node=1, spec=0)
    assert V.mu == NodeVector({1: -1})
    assert V.lweight(0) == lw_psi(1, 0, -1)


@pytest.mark.parametrize("k", [0, 3, -2])
@pytest.mark.parametrize("m", [1, 2, 3, -1, -2])
def test_h_eigenvalue_on_top(k, m):
    V = realize("sl2_neg_prefund", A1, node=1, spec=k)
    h = extract_h_eigenvalue(V, 0, 1, m, order=4)
    # both expansions of 1/(1 - a z) give h_m = a^m / (m (q - q^-1))
    assert h == qpow(k * m) / (ratq(m) * (Q - Q.inverse()))


def test_h_eigenvalue_needs_nonzero_mode():
    V = realize("sl2_neg_prefund", A1, node=1, spec=0)
    with pytest.raises(RealizationError):
        extract_h_eigenvalue(V, 0, 1, 0)


@pytest.mark.parametrize("name,cd,params", [
    ("sl2_kr", A1, {"node": 1, "length": 2}),
    ("sl2_kr", A1, {"node": 1, "length": 3, "spec": 1}),
    ("sl2_neg_prefund", A1, {"node": 1}),
    ("prefund_tilde_inflation", A2, {"node": 1}),
    ("prefund_tilde_inflation", B2, {"node": 2}),
    ("psi_star_inflation", A2, {"node": 2}),
    ("kr_tilde_inflation", A2, {"node": 1, "length": 2}),
    ("sl3_pair_inflation", A2, {"nodes": (1, 2)}),
    ("invertible", A2, {"torus": {1: 2, 2: -1}}),
    ("pos_prefund", A2, {"node": 2, "spec": 3}),
])
def test_relations_hold(name, cd, params):
    rep = verify_definition_relations(realize(name, cd, **params), SMALL)
    assert rep.ok and rep.skip_count == 0 and rep.attempted > 0


def test_perturbation_is_detected():
    V = realize("sl2_neg_prefund", A1, node=1)
    bad = perturb(V, -1, 1, 1, ratq(2))
    rep = verify_definition_relations(bad, SMALL)
    assert not rep.ok and rep.counterexample is not None


def test_unknown_realization():
    with pytest.raises(RealizationError):
        realize("nope", A1)
    with pytest.raises(RealizationError):
        realize("invertible", A1, torus={3: 1})
    assert "sl3_pair_inflation" in REALIZATIONS


def test_module_qchar_matches_closed_forms():
    assert module_qchar(realize("sl2_neg_prefund", A1, node=1, spec=1), 5).same_terms(
        qc_neg_prefund_rank1(A1, 1, 1, 5))
    assert module_qchar(realize("sl2_kr", A1, node=1, length=3), 5).same_terms(qc_kr_sl2(A1, 1, 0, 3, 5))
    V = realize("prefund_tilde_inflation", A2, node=1)
    w = qc_neg_prefund_rank1(A2, 1, 0, 5)
    assert module_qchar(V, 5).same_terms(qc_inflation(w, build_named_weight(A2, "psi_tilde", 1, 0), A2))
    S = realize("sl3_pair_inflation", A3, nodes=(1, 2))
    c = module_qchar(S, 5)
    assert c.terms == qc_neg_prefund_sl3_pair(A3, 1, 2, 0, 5).terms


def test_drinfeld_tensor_multiplies_phi():
    V = realize("sl2_neg_prefund", A1, node=1, spec=0)
    W = realize("sl2_kr", A1, node=1, length=1, spec=4)
    T = drinfeld_tensor(V, W)
    for lab in T.basis(2):
        assert T.lweight(lab) == V.lweight(lab[0]) * W.lweight(lab[1])
    assert T.mu == V.mu + W.mu


def test_tensor_with_invertible_rescales_x_plus():
    V = realize("sl2_neg_prefund", A1, node=1, spec=0)
    E = realize("invertible", A1, torus={1: 2})
    T = drinfeld_tensor(E, V)
    for r in range(-2, 3):
        got = apply_mode(T, 1, 1, r, (0, 2))
        want = {(0, lab): c * qpow(2) for lab, c in apply_mode(V, 1, 1, r, 2).items()}
        assert got == want
    rep = verify_definition_relations(T, Window(3, 2, 2))
    assert rep.ok


def test_rmatrix_generic():
    a = qpow(4)
    assert rmatrix_gamma(4, 0, 0) == ONE
    assert rmatrix_gamma(4, 1, 0) == a / (a - Q)
    rep = rmatrix_check(4, basis=3, modes=1)
    assert rep.ok and rep.checked > 0


def test_rmatrix_odd_point_is_indeterminate():
    # a = q^-1: (1 - a q) and (a - q^-1) vanish together once l >= m >= 1
    assert rmatrix_indeterminate(-1, 1, 1)
    assert not rmatrix_indeterminate(-1, 0, 1)
    with pytest.raises(PoleError):
        rmatrix_gamma(-1, 1, 1, regularize=False)
    assert rmatrix_gamma(-1, 1, 1) == -Q * qpow(-2)


def test_rmatrix_odd_point_regularized():
    rep = rmatrix_check(-1, basis=3, modes=1)
    assert rep.ok
    assert rep.vanishing() == sorted((l, m) for l in range(4) for m in range(4) if l < m)


def test_rmatrix_table_zero_on_m_ge_1_does_not_intertwine():
    def table(l, m):
        return rmatrix_gamma(-1, l, 0) if m == 0 else ratq(0)

    rep = rmatrix_check(-1, basis=3, modes=1, table=table)
    assert not rep.ok and rep.counterexample is not None
