import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftq.cartan import dynkin_data
from shiftq.lweight import IDENTITY, AMonomial, LWeight, build_named_weight, lw_psi
from shiftq.qchar import (
    InflationFailure,
    QCharError,
    TruncatedQChar,
    build_inflation_data,
    candidate_spectral_set,
    qc_embed_J,
    qc_inflation,
    qc_kr_sl2,
    qc_materialize,
    qc_neg_prefund_rank1,
    qc_neg_prefund_sl3_pair,
    qc_product,
    qc_restrict_J,
    qc_single,
    qc_truncate,
    sl3_pair_count,
    varpi_iota_J,
    varpi_multiset,
    verify_inflation,
)

A1, A2, A3, B2 = (dynkin_data(*x) for x in (("A", 1), ("A", 2), ("A", 3), ("B", 2)))


def A(*keys):
    return AMonomial({k: 1 for k in keys})


def test_neg_prefund_ladder():
    c = qc_neg_prefund_rank1(A1, 1, 0, 3)
    assert c.terms == {A(): 1, A((1, 0)): 1, A((1, 0), (1, -2)): 1, A((1, 0), (1, -2), (1, -4)): 1}
    assert c.top == lw_psi(1, 0, -1)
    assert len(qc_neg_prefund_rank1(B2, 1, 0, 6)) == 7


def test_neg_prefund_uses_q_j_steps():
    c = qc_neg_prefund_rank1(B2, 1, 0, 2)
    assert A((1, 0), (1, -4)) in c.terms


def test_kr_characters():
    c = qc_kr_sl2(A1, 1, 0, 2, 6)
    assert c.terms == {A(): 1, A((1, 0)): 1, A((1, 0), (1, -2)): 1}
    assert len(qc_kr_sl2(A1, 1, 0, 5, 3)) == 4
    assert qc_kr_sl2(A2, 1, 0, 0, 4).terms == {A(): 1}
    with pytest.raises(QCharError):
        qc_kr_sl2(A1, 1, 0, -1, 4)


def test_kr_lives_on_subdiagram():
    assert qc_kr_sl2(A3, 2, 0, 1, 3).cd.nodes == (2,)


@pytest.mark.parametrize("depth", range(0, 9))
def test_sl3_pair_term_count(depth):
    c = qc_neg_prefund_sl3_pair(A2, 1, 2, 0, depth)
    assert len(c) == sl3_pair_count(depth)
    assert all(n == 1 for _, n in c.items)


def test_sl3_pair_small_terms():
    c = qc_neg_prefund_sl3_pair(A2, 1, 2, 0, 3)
    assert c.terms == {
        A(): 1,
        A((1, 0)): 1,
        A((1, 0), (1, -2)): 1,
        A((1, 0), (2, 1)): 1,
        A((1, 0), (1, -2), (1, -4)): 1,
        A((1, 0), (1, -2), (2, 1)): 1,
    }
    assert len(c) == sl3_pair_count(3) == 6
    assert sl3_pair_count(6) == 16
    with pytest.raises(QCharError):
        qc_neg_prefund_sl3_pair(A3, 1, 3, 0, 3)


def test_depth_contract():
    c = qc_neg_prefund_sl3_pair(A2, 1, 2, 0, 8)
    for D in range(9):
        t = qc_truncate(c, D)
        assert t.same_terms(qc_neg_prefund_sl3_pair(A2, 1, 2, 0, D))
        assert all(m.degree() <= D for m, _ in t.items)
    with pytest.raises(QCharError):
        qc_truncate(c, 9)


def test_make_rejects_bad_input():
    with pytest.raises(QCharError):
        TruncatedQChar.make(A1, IDENTITY, -1, {})
    with pytest.raises(QCharError):
        TruncatedQChar.make(A1, IDENTITY, 3, {A(): -1})


def test_product():
    a = qc_neg_prefund_rank1(A1, 1, 0, 4)
    b = qc_single(A1, lw_psi(1, 0), 4)
    p = qc_product(a, b)
    assert p.top == IDENTITY and p.terms == a.terms
    sq = qc_product(qc_kr_sl2(A1, 1, 0, 1, 4), qc_kr_sl2(A1, 1, 0, 1, 4))
    assert sq.terms == {A(): 1, A((1, 0)): 2, AMonomial({(1, 0): 2}): 1}
    with pytest.raises(QCharError):
        qc_product(a, qc_single(A2, IDENTITY, 4))


def test_embed_restrict_roundtrip():
    w = qc_neg_prefund_rank1(A2, 1, 0, 5)
    top = build_named_weight(A2, "psi_tilde", 1, 0)
    v = qc_embed_J(w, A2, top)
    assert v.cd.nodes == (1, 2)
    assert qc_restrict_J(v, [1]).same_terms(w)


def test_inflation_of_neg_prefund():
    w = qc_neg_prefund_rank1(A2, 1, 0, 5)
    top = build_named_weight(A2, "psi_tilde", 1, 0)
    v = qc_inflation(w, top, A2)
    assert verify_inflation(v, w, [1]) == lw_psi(2, 1)
    # materialized l-weights of V restrict to those of W
    assert len(qc_materialize(v)) == len(w)


def test_inflation_failures():
    w = qc_neg_prefund_rank1(A2, 1, 0, 4)
    with pytest.raises(InflationFailure):
        qc_inflation(w, lw_psi(1, 0, -1) * lw_psi(2, 1, -1), A2)
    with pytest.raises(InflationFailure):
        qc_inflation(w, lw_psi(1, 2, -1), A2)
    v = qc_inflation(w, build_named_weight(A2, "psi_tilde", 1, 0), A2)
    extra = TruncatedQChar.make(A2, v.top, 4, {**v.terms, A((2, 1)): 1})
    with pytest.raises(InflationFailure) as exc:
        verify_inflation(extra, w, [1])
    assert exc.value.monomial == A((2, 1))
    missing = TruncatedQChar.make(A2, v.top, 4, {m: n for m, n in v.items if m.degree() < 4})
    with pytest.raises(InflationFailure):
        verify_inflation(missing, w, [1])


def test_weight_multisets_match_under_iota():
    w = qc_neg_prefund_rank1(B2, 2, 0, 5)
    v = qc_inflation(w, build_named_weight(B2, "psi_tilde", 2, 0), B2)
    assert varpi_multiset(v) == varpi_iota_J(w, B2)
    w2 = qc_neg_prefund_sl3_pair(A3, 1, 2, 0, 5)
    v2 = qc_inflation(w2, w2.top * lw_psi(3, 2), A3)
    assert varpi_multiset(v2) == varpi_iota_J(w2, A3)


def test_candidate_spectral_sets():
    assert candidate_spectral_set(A2, 2, 1) == frozenset(range(0, 4))
    assert candidate_spectral_set(B2, 2, 1) == frozenset(range(0, 6))
    with pytest.raises(QCharError):
        candidate_spectral_set(A2, 1, 1)


def _vprime(mult):
    terms = {A(): 1, A((1, 0)): 1, A((1, 0), (2, 1)): mult}
    return TruncatedQChar.make(A2, lw_psi(1, 0, -1), 3, terms)


def test_build_inflation_data_finds_psi():
    data = build_inflation_data(_vprime(1), [1])
    assert data.candidates == {2: frozenset({1})}
    assert data.multiplicities == {(2, 1): 0}
    assert data.psi_p == IDENTITY
    extra = TruncatedQChar.make(A2, lw_psi(1, 0, -1), 3, {A(): 1, A((2, 1)): 2})
    data = build_inflation_data(extra, [1])
    assert data.multiplicities == {(2, 1): 1}
    assert data.psi_p == lw_psi(2, 1)


@settings(max_examples=60)
@given(st.integers(0, 7), st.integers(-4, 4), st.integers(0, 7))
def test_truncate_commutes_with_product(D, k, E):
    a = qc_neg_prefund_rank1(A1, 1, k, D)
    b = qc_kr_sl2(A1, 1, k - 2, 3, D)
    E = min(D, E)
    assert qc_truncate(qc_product(a, b), E).same_terms(qc_product(qc_truncate(a, E), qc_truncate(b, E)))
