from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sintsums.qfield import (
    Element,
    FieldError,
    abs_at_place,
    field_norm,
    is_s_integer,
    make_field,
    make_place_set,
    s_norm,
    valuation,
)

from conftest import context


def test_make_field_examples():
    K = make_field(2)
    assert K.discriminant == 8
    assert K.ring_generator == K(0, 1)
    K = make_field(5)
    assert K.discriminant == 5
    assert K.ring_generator == K(Fraction(1, 2), Fraction(1, 2))
    assert make_field(-1).discriminant == -4
    assert make_field(-3).discriminant == -3
    assert make_field("rational").is_rational
    assert make_field("Q").degree == 1


@pytest.mark.parametrize("d", [12, 0, 1, -4, 18, "abc", 2.0])
def test_make_field_rejects(d):
    with pytest.raises(FieldError):
        make_field(d)


def test_field_norm_examples():
    K = make_field(2)
    assert field_norm(K(1, 1)) == -1
    assert field_norm(K(0, 1)) == -2
    assert field_norm(K(3)) == 9
    Q = make_field("Q")
    assert field_norm(Q(3)) == 3


def test_arithmetic_is_exact():
    K = make_field(5)
    phi = K.ring_generator
    assert phi * phi == phi + 1
    assert (phi.inverse() * phi) == 1
    assert phi**-3 * phi**3 == 1
    x = K(Fraction(2, 3), Fraction(-5, 7))
    assert (x - x).is_zero()
    assert x / x == 1
    with pytest.raises(ZeroDivisionError):
        K.zero.inverse()


def test_rational_rejects_irrational_part():
    with pytest.raises(FieldError):
        Element(make_field("Q"), 1, 1)


def test_algebraic_integer_membership():
    K = make_field(5)
    assert K(Fraction(1, 2), Fraction(1, 2)).is_algebraic_integer()
    assert not K(Fraction(1, 2), 0).is_algebraic_integer()
    assert not make_field(3)(Fraction(1, 2), Fraction(1, 2)).is_algebraic_integer()


def test_abs_at_place_examples():
    K, S, _ = context(2, [2])
    inf_minus = S.places[1]
    assert inf_minus.sign == -1
    with mpmath.workdps(30):
        val = abs_at_place(K(1, 1), inf_minus)
        assert abs(val - (mpmath.sqrt(2) - 1)) < mpmath.mpf("1e-25")
    assert abs_at_place(K(2), S.places[2]) == Fraction(1, 4)
    Ki, Si, _ = context(-1)
    assert abs_at_place(Ki(0, 1), Si.places[0]) == 1
    with pytest.raises(FieldError):
        abs_at_place(K.zero, S.places[0])


def test_abs_at_place_no_cancellation():
    K, S, _ = context(2)
    u = K(1, 1)
    with mpmath.workdps(30):
        tiny = abs_at_place(u**40, S.places[1], dps=30)
        big = abs_at_place(u**40, S.places[0], dps=30)
        assert abs(tiny * big - 1) < mpmath.mpf("1e-25")


def test_s_norm_examples():
    K, S, _ = context(2)
    assert s_norm(K(1, 1), S) == 1
    assert s_norm(K(0, 1), S) == 2
    _, S2, _ = context(2, [2])
    assert s_norm(K(0, 1), S2) == 1
    with pytest.raises(FieldError):
        s_norm(K.zero, S)
    with pytest.raises(FieldError):
        s_norm(K(Fraction(1, 3)), S)


def test_is_s_integer_examples():
    K, S, _ = context(2)
    assert not is_s_integer(K(Fraction(1, 3), Fraction(1, 3)), S)
    _, S2, _ = context(2, [2])
    assert is_s_integer(K(0, 1).inverse(), S2)
    assert not is_s_integer(K(0, 1).inverse(), S)
    assert is_s_integer(K.zero, S)


def test_split_prime_places():
    K = make_field(-1)
    S = make_place_set(K, [5])
    assert [v.label for v in S.finite] == ["p5a", "p5b"]
    a, b = S.finite
    assert a.uniformizer.conjugate() == b.uniformizer
    assert valuation(a.uniformizer, a) == 1 and valuation(a.uniformizer, b) == 0
    assert valuation(K(5), a) == 1 and valuation(K(5), b) == 1
    assert valuation(K(Fraction(1, 25)), a) == -2


def test_inert_and_ramified_data():
    K = make_field(2)
    S = make_place_set(K, [2, 3])
    p2, p3 = S.finite
    assert (p2.e, p2.f) == (2, 1)
    assert (p3.e, p3.f) == (1, 2)
    assert valuation(K(2), p2) == 2
    assert valuation(K(9), p3) == 2
    assert s_norm(K(6), S) == 1


def test_non_principal_prime_rejected():
    # 2 ramifies in Q(sqrt -5) as a non-principal prime
    with pytest.raises(FieldError):
        make_place_set(make_field(-5), [2])


def test_placeset_requires_all_infinite_places():
    from sintsums.qfield import Place, PlaceSet

    with pytest.raises(FieldError):
        PlaceSet(make_field(2), (Place("real", 1),))


# ---------------------------------------------------------------------------
# properties

small = st.integers(-30, 30)
rat = st.fractions(min_value=-20, max_value=20, max_denominator=12)
FIELDS = [2, 3, 5, -1, -3, 13, -7]


@given(st.sampled_from(FIELDS), rat, rat, rat, rat)
def test_field_norm_multiplicative(d, a, b, c, e):
    K = make_field(d)
    x, y = K(a, b), K(c, e)
    assert field_norm(x * y) == field_norm(x) * field_norm(y)


CONTEXTS = [(2, ()), (2, (2,)), (5, (11,)), (-1, (5,)), ("Q", (2, 3)), (-3, ()), (3, (3,))]


def _s_integer(K, S, x, y, ks):
    z = K.from_basis(x, y)
    for v, k in zip(S.finite, ks):
        z = z * v.uniformizer**k
    return z


@settings(max_examples=200, deadline=None)
@given(
    st.sampled_from(CONTEXTS),
    small, small, small, small,
    st.lists(st.integers(-3, 3), min_size=4, max_size=4),
    st.lists(st.integers(-3, 3), min_size=4, max_size=4),
)
def test_s_norm_multiplicative_and_integral(ctx, x1, y1, x2, y2, k1, k2):
    K, S, G = context(*ctx)
    if K.is_rational:
        y1 = y2 = 0
    a = _s_integer(K, S, x1, y1, k1)
    b = _s_integer(K, S, x2, y2, k2)
    if a.is_zero() or b.is_zero():
        return
    na, nb = s_norm(a, S), s_norm(b, S)
    assert na.denominator == 1 and na >= 1
    assert s_norm(a * b, S) == na * nb


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(CONTEXTS), small, small, st.integers(0, 5),
       st.lists(st.integers(-4, 4), min_size=4, max_size=4))
def test_s_norm_unit_invariant(ctx, x, y, t, ks):
    K, S, G = context(*ctx)
    if K.is_rational:
        y = 0
    a = K.from_basis(x, y)
    if a.is_zero():
        return
    lam = G.unit(t, ks[: len(G.basis)])
    assert s_norm(lam * a, S) == s_norm(a, S)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(CONTEXTS), small, small)
def test_abs_product_matches_s_norm(ctx, x, y):
    K, S, _ = context(*ctx)
    if K.is_rational:
        y = 0
    a = K.from_basis(x, y)
    if a.is_zero():
        return
    prod = mpmath.mpf(1)
    with mpmath.workdps(30):
        for v in S:
            val = abs_at_place(a, v)
            prod *= mpmath.mpf(val.numerator) / val.denominator if isinstance(val, Fraction) else val
        exact = s_norm(a, S)
        assert abs(prod / (mpmath.mpf(exact.numerator) / exact.denominator) - 1) < mpmath.mpf("1e-12")
