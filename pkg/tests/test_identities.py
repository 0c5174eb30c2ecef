import pytest

from shiftq.cartan import dynkin_data
from shiftq.identities import (
    IDENTITIES,
    IdentityError,
    check_identity,
    decompose_rad_top,
    identity_sides,
    materialized_sum,
    qc_rebase,
)
from shiftq.lweight import AMonomial, build_named_weight, lw_psi
from shiftq.qchar import TruncatedQChar, qc_neg_prefund_rank1, qc_single
from shiftq.suite import identity_cases, rad_top_case

A1, A2, A3, B2 = (dynkin_data(*x) for x in (("A", 1), ("A", 2), ("A", 3), ("B", 2)))


def _id(case):
    name, cd, j, k, L = case
    return f"{name}-{cd.name}-j{j}-k{k}" + ("" if L is None else f"-L{L}")


@pytest.mark.parametrize("case", identity_cases(), ids=_id)
def test_identity_holds(case):
    name, cd, j, k, L = case
    rep = check_identity(name, cd, j, k, 6, L)
    assert rep.passed, rep.mismatch
    assert rep.lhs_terms == rep.rhs_terms > 0


@pytest.mark.parametrize("depth", range(0, 9))
def test_identities_hold_at_every_depth(depth):
    assert check_identity("qq_tilde", A2, 1, 0, depth).passed
    assert check_identity("inflated_t_system", B2, 2, 0, depth, 2).passed
    assert check_identity("wronskian", A1, 1, 0, depth).passed


@pytest.mark.parametrize("name,cd,L", [
    ("wronskian", A1, None), ("baxter_qt", A1, None), ("t_system", A1, 2),
    ("qq_tilde", A2, None), ("qq_star", A3, None), ("inflated_t_system", A2, 2),
])
def test_dropping_a_summand_breaks_the_identity(name, cd, L):
    lhs, rhs = identity_sides(name, cd, 1, 0, 5, L)
    ref = lhs[0][0].top
    for c in lhs[0][1:]:
        ref = ref * c.top
    full = materialized_sum(rhs, ref, 5)
    assert materialized_sum(lhs, ref, 5) == full
    for drop in range(len(rhs)):
        part = rhs[:drop] + rhs[drop + 1:]
        assert materialized_sum(part, ref, 5) != full


def test_identity_argument_errors():
    with pytest.raises(IdentityError):
        check_identity("nope", A1, 1, 0)
    with pytest.raises(IdentityError):
        check_identity("t_system", A1, 1, 0, 4, None)
    with pytest.raises(IdentityError):
        check_identity("qq_tilde", A1, 1, 0)
    with pytest.raises(IdentityError):
        check_identity("wronskian", A1, 1, 0, -1)
    assert set(IDENTITIES) == {n for n, *_ in identity_cases()}


def test_report_json():
    js = check_identity("baxter-qt", A1, 1, 3, 4).to_json()
    assert js["identity"] == "baxter_qt" and js["passed"] and js["mismatch"] is None
    assert js["params"] == {"type": "A1", "node": 1, "spec": 3, "depth": 4}


@pytest.mark.parametrize("j", [1, 2])
@pytest.mark.parametrize("k", [0, 3])
def test_rad_top(j, k):
    rad, expected = rad_top_case(A2, j, k, 6)
    assert rad.same_terms(expected)
    assert len(rad) > 0


def test_rad_is_empty_when_product_is_simple():
    c = qc_neg_prefund_rank1(A2, 1, 0, 4)
    assert len(decompose_rad_top(c, c)) == 0


def test_rad_top_rejects_mismatched_tops():
    c = qc_neg_prefund_rank1(A2, 1, 0, 4)
    with pytest.raises(IdentityError):
        decompose_rad_top(c, qc_neg_prefund_rank1(A2, 1, 2, 4))
    with pytest.raises(IdentityError):
        decompose_rad_top(qc_single(A2.subdiagram([1]), c.top, 4), c)


def test_rad_top_rejects_a_too_large_top():
    small = qc_single(A2, lw_psi(1, 0), 4)
    big = qc_single(A2, lw_psi(1, 0), 4)
    big = TruncatedQChar.make(A2, big.top, 4, {AMonomial(): 1, AMonomial({(1, 0): 1}): 1})
    with pytest.raises(IdentityError):
        decompose_rad_top(small, big)


def test_rebase():
    top = build_named_weight(A2, "qq_psi_p", 1, 0)
    c = qc_single(A2, top * lw_psi(1, 0, -1) * lw_psi(1, 0), 3)
    assert qc_rebase(c, top).same_terms(c)
    with pytest.raises(IdentityError):
        qc_rebase(c, lw_psi(2, 7))
