from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftq.qfield import (
    ONE,
    Q,
    ZERO,
    LaurentQ,
    LeadingTermError,
    PoleError,
    QFieldError,
    RatFuncZ,
    RatQ,
    ZeroDivision,
    ZSeries,
    parse_ratq,
    q_binomial,
    q_factorial,
    q_number,
    qpow,
    render_ratq,
    series_exp,
    series_expand,
    series_log,
)

QI = Q.inverse()

laurent = st.dictionaries(
    st.integers(-3, 3), st.fractions(min_value=-3, max_value=3, max_denominator=3), max_size=3
).map(LaurentQ)
nonzero_laurent = laurent.filter(lambda p: not p.is_zero())
ratq = st.builds(RatQ, laurent, nonzero_laurent)


def test_inverse_of_q_minus_q_inverse():
    x = Q - QI
    assert x * x.inverse() == ONE


def test_zero_is_additive_identity():
    assert (Q + QI) + ZERO == Q + QI


def test_long_division_example():
    assert (qpow(2) - qpow(-2)) / (Q - QI) == Q + QI


def test_canonical_form_is_unique():
    a = RatQ(LaurentQ({1: 1, -1: -1}), LaurentQ({0: 1, 2: 1}))
    b = RatQ(LaurentQ({3: 2, 1: -2}), LaurentQ({2: 2, 4: 2}))
    assert a == b and hash(a) == hash(b)
    assert a.den.coeffs.get(0) == 1


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivision):
        ONE / ZERO
    with pytest.raises(ZeroDivision):
        ZERO.inverse()


def test_q_numbers():
    assert q_number(2) == Q + QI
    assert q_number(0) == ZERO
    assert q_number(-3) == -q_number(3)
    assert q_number(3, qpow(2)) == qpow(4) + ONE + qpow(-4)
    assert q_binomial(2, 1) == Q + QI
    assert q_binomial(4, 2) == q_factorial(4) / (q_factorial(2) * q_factorial(2))
    with pytest.raises(QFieldError):
        q_binomial(2, 3)


def test_q_number_matches_quotient_definition():
    for m in range(1, 7):
        assert q_number(m) == (qpow(m) - qpow(-m)) / (Q - QI)


def test_parse_and_render_roundtrip():
    for text in ("(q^2 - q^-2)/(q - q^-1)", "3/2*q^-1 + 1", "-q", "q**3 - 2"):
        x = parse_ratq(text)
        assert parse_ratq(render_ratq(x)) == x
    assert parse_ratq("(q^2 - q^-2)/(q - q^-1)") == Q + QI
    with pytest.raises(QFieldError):
        parse_ratq("q + $")


def test_geometric_series():
    s = series_expand(RatFuncZ([1], [1, -1]), ZSeries.IN_Z, 3)
    assert s.coeffs == (ONE, ONE, ONE, ONE)


def test_polynomial_series_pads_with_zero():
    a = Q
    s = series_expand(RatFuncZ([1, -a]), ZSeries.IN_Z, 2)
    assert s.coeffs == (ONE, -a, ZERO)


def test_prefundamental_top_eigenvalue_cancels():
    a = qpow(3)
    f = RatFuncZ([1, -a * qpow(2)], [1, -a * qpow(2)])
    f = RatFuncZ(f.num, RatFuncZ._pmul(list(f.den), [ONE, -a]))
    s = series_expand(f, ZSeries.IN_Z, 4)
    assert s.coeffs == tuple(a ** n for n in range(5))


def test_inverse_direction_leading_exponent():
    # (1 - a z)^-1 in powers of 1/z starts at z^-1
    a = qpow(2)
    s = series_expand(RatFuncZ([1], [1, -a]), ZSeries.IN_ZINV, 3)
    assert s.lead == -1
    assert s.coeffs[0] == -a.inverse()
    assert s.coeffs[1] == -a.inverse() ** 2


def test_log_of_one_plus_z():
    s = ZSeries(ZSeries.IN_Z, 0, [ONE, ONE, ZERO, ZERO])
    assert series_log(s).coeffs == (ZERO, ONE, RatQ(Fraction(-1, 2)), RatQ(Fraction(1, 3)))


def test_exp_log_of_geometric_series():
    s = series_expand(RatFuncZ([1], [1, -1]), ZSeries.IN_Z, 4)
    assert series_exp(series_log(s)).coeffs == (ONE,) * 5


def test_log_of_prefundamental_series():
    a = qpow(-1)
    s = series_expand(RatFuncZ([1], [1, -a]), ZSeries.IN_Z, 5)
    lg = series_log(s)
    assert lg.coeffs[1:] == tuple(a ** m * Fraction(1, m) for m in range(1, 6))


def test_log_needs_unit_leading_term():
    s = ZSeries(ZSeries.IN_Z, 0, [qpow(2), ONE])
    with pytest.raises(LeadingTermError):
        series_log(s)
    assert series_log(s, normalize=True).coeffs[1] == qpow(-2)


def test_evaluate_at_pole():
    f = RatFuncZ([1], [1, -Q])
    with pytest.raises(PoleError):
        f.evaluate(QI)
    assert f.evaluate(ONE) == (ONE - Q).inverse()


@settings(max_examples=300)
@given(ratq, ratq, ratq)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a and a + b == b + a
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO
    if a:
        assert a * a.inverse() == ONE


@settings(max_examples=100)
@given(st.lists(st.builds(RatQ, laurent), min_size=1, max_size=4), st.sampled_from([ZSeries.IN_Z, ZSeries.IN_ZINV]))
def test_log_exp_roundtrip(tail, direction):
    s = ZSeries(direction, 0, [ONE] + tail)
    assert series_exp(series_log(s)).coeffs == s.coeffs
    t = ZSeries(direction, 0, [ZERO] + tail)
    assert series_log(series_exp(t)).coeffs == t.coeffs


@settings(max_examples=100)
@given(st.integers(-6, 6), st.integers(-6, 6))
def test_qpow_is_a_homomorphism(a, b):
    assert qpow(a) * qpow(b) == qpow(a + b)
    assert qpow(a) ** 3 == qpow(3 * a)
