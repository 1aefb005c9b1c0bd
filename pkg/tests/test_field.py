import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from heckecf import field
from heckecf.field import (
    FieldElement, Surd, compare, field_element, from_json_dict, lam,
    make_surd, minimal_polynomial, moebius, sign_of, to_interval, to_json_dict,
)


def lam_mp(q, dps=60):
    with mpmath.workdps(dps):
        return 2 * mpmath.cos(mpmath.pi / q)


def fe_mp(x: FieldElement, dps=60):
    with mpmath.workdps(dps):
        lv = lam_mp(x.q, dps)
        return sum(mpmath.mpf(c.numerator) / c.denominator * lv**i
                   for i, c in enumerate(x.coeffs))


# --- minimal polynomials: independently derived oracle values -------------

def test_minpoly_small_q():
    assert minimal_polynomial(3) == (-1, 1)            # x - 1
    assert minimal_polynomial(4) == (-2, 0, 1)         # x^2 - 2
    assert minimal_polynomial(5) == (-1, -1, 1)        # x^2 - x - 1
    assert minimal_polynomial(6) == (-3, 0, 1)         # x^2 - 3
    assert minimal_polynomial(7) == (1, -2, -1, 1)     # x^3 - x^2 - 2x + 1


@pytest.mark.parametrize("q", range(3, 21))
def test_minpoly_annihilates_numeric_root(q):
    with mpmath.workdps(80):
        lv = lam_mp(q, 80)
        v = sum(c * lv**i for i, c in enumerate(minimal_polynomial(q)))
        assert abs(v) < mpmath.mpf(10) ** -70


@pytest.mark.parametrize("q", range(3, 16))
def test_minpoly_degree_is_totient(q):
    # deg = phi(2q)/2
    import sympy
    assert len(minimal_polynomial(q)) - 1 == sympy.totient(2 * q) // 2


# --- field arithmetic ------------------------------------------------------

@pytest.mark.parametrize("q", [3, 4, 5, 6, 7, 8, 9, 10, 12])
def test_lambda_identities(q):
    l = lam(q)
    # lambda in (1, 2) for q > 3, = 1 for q = 3
    assert sign_of(l - 2) < 0
    if q == 3:
        assert l == 1
    else:
        assert sign_of(l - 1) > 0
    mp = minimal_polynomial(q)
    acc = field_element(q, 0)
    for i, c in enumerate(mp):
        acc = acc + field_element(q, c) * l**i
    assert acc.is_zero()


def test_inverse_q5():
    # 1/lambda_5 = lambda_5 - 1 (golden ratio)
    l = lam(5)
    assert l.inverse() == l - 1


def test_inverse_q4():
    l = lam(4)
    assert l.inverse() == l / 2


@settings(max_examples=60, deadline=None)
@given(q=st.sampled_from([3, 4, 5, 6, 7, 10]),
       data=st.data())
def test_field_axioms(q, data):
    deg = len(minimal_polynomial(q)) - 1
    coefs = st.fractions(min_value=-5, max_value=5, max_denominator=7)
    a = FieldElement(q, tuple(data.draw(coefs) for _ in range(deg)))
    b = FieldElement(q, tuple(data.draw(coefs) for _ in range(deg)))
    c = FieldElement(q, tuple(data.draw(coefs) for _ in range(deg)))
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert a - a == field_element(q, 0)
    if not b.is_zero():
        assert (a / b) * b == a
        assert b * b.inverse() == field_element(q, 1)


@settings(max_examples=40, deadline=None)
@given(q=st.sampled_from([3, 4, 5, 7, 9, 12]), data=st.data())
def test_sign_matches_numeric(q, data):
    deg = len(minimal_polynomial(q)) - 1
    coefs = st.fractions(min_value=-9, max_value=9, max_denominator=11)
    a = FieldElement(q, tuple(data.draw(coefs) for _ in range(deg)))
    v = fe_mp(a, 100)
    s = a.sign()
    if abs(v) > mpmath.mpf(10) ** -60:
        assert s == (1 if v > 0 else -1)
    else:
        assert s == 0


@settings(max_examples=40, deadline=None)
@given(q=st.sampled_from([4, 5, 7, 8]), data=st.data())
def test_interval_contains_value_and_nests(q, data):
    deg = len(minimal_polynomial(q)) - 1
    coefs = st.fractions(min_value=-6, max_value=6, max_denominator=9)
    a = FieldElement(q, tuple(data.draw(coefs) for _ in range(deg)))
    v = fe_mp(a, 90)
    outer = to_interval(a, Fraction(1, 10**3))
    inner = to_interval(a, Fraction(1, 10**9))
    with mpmath.workdps(90):
        for lo, hi in (outer, inner):
            assert mpmath.mpf(lo.numerator) / lo.denominator <= v + mpmath.mpf(10) ** -60
            assert v <= mpmath.mpf(hi.numerator) / hi.denominator + mpmath.mpf(10) ** -60
    assert outer[0] <= inner[0] and inner[1] <= outer[1]
    assert inner[1] - inner[0] <= Fraction(1, 10**9)


# --- surds -----------------------------------------------------------------

def test_surd_golden_ratio():
    # x^2 - x - 1 over Q(lambda_3): positive root is (1+sqrt5)/2
    s = make_surd(3, 1, -1, -1, 1, 2)
    assert isinstance(s, Surd)
    assert sign_of(s) > 0
    lo, hi = to_interval(s, Fraction(1, 10**15))
    phi = (1 + math.sqrt(5)) / 2
    assert lo <= Fraction(phi).limit_denominator(10**12) <= hi or abs(float(lo) - phi) < 1e-12


def test_surd_degenerate_cases():
    # zero discriminant degrades to a field element
    v = make_surd(5, 1, -2, 1, 0, 2)   # (x-1)^2
    assert isinstance(v, FieldElement) and v == 1
    # a = 0 degrades to the linear root
    v = make_surd(5, 0, 2, -1, 0, 1)
    assert isinstance(v, FieldElement) and v == Fraction(1, 2)


def test_surd_vs_field_compare():
    s = make_surd(3, 1, 0, -2, 1, 2)  # sqrt(2)
    assert compare(s, 1) > 0
    assert compare(s, 2) < 0
    assert compare(s, Fraction(3, 2)) < 0
    assert compare(s, Fraction(7, 5)) > 0
    # against the other root of the same quadratic
    t = make_surd(3, 1, 0, -2, -2, -1)  # -sqrt(2)
    assert compare(s, t) > 0
    assert compare(t, s) < 0


def test_surd_equality_same_quadratic_scaled():
    s = make_surd(3, 1, 0, -2, 1, 2)
    t = make_surd(3, 3, 0, -6, Fraction(5, 4), Fraction(3, 2))
    assert compare(s, t) == 0


def test_surd_equality_distinct_quadratics_common_field_root():
    # (x - sqrt2)(x - 1) vs (x - sqrt2)(x + 2) share only sqrt2 over Q(sqrt2)
    l = lam(4)  # sqrt 2
    s = make_surd(4, 1, -(l + 1), l, Fraction(5, 4), Fraction(3, 2))
    t = make_surd(4, 1, -(l - 2), -2 * l, Fraction(5, 4), Fraction(3, 2))
    assert compare(s, t) == 0


def test_surd_rational_root_pinning():
    # (x - 1/2)(x - 5) : bracket isolates 1/2, an exactly rational value
    s = Surd(3, 1, Fraction(-11, 2), Fraction(5, 2), 0, 1)
    assert compare(s, Fraction(1, 2)) == 0
    assert sign_of(s) > 0


def test_moebius_on_surd():
    # x = sqrt2; (x+1)/(x-1) should be 3 + 2 sqrt2
    s = make_surd(3, 1, 0, -2, 1, 2)
    img = moebius(3, (1, 1, 1, -1), s)
    expected = make_surd(3, 1, -6, 1, 5, 6)  # roots 3 +- 2 sqrt2
    assert compare(img, expected) == 0
    v = float(img)
    assert abs(v - (3 + 2 * math.sqrt(2))) < 1e-12


def test_moebius_field_coefficients():
    q = 5
    l = lam(q)
    x = make_surd(q, 1, 0, -(l + 2), 1, 2)   # sqrt(lambda+2)
    img = moebius(q, (0, -1, 1, 0), x)       # -1/x
    back = moebius(q, (0, 1, -1, 0), img)    # inverse map
    assert compare(back, x) == 0


def test_moebius_sign_and_order_numeric():
    q = 7
    l = lam(q)
    x = make_surd(q, 1, l, -1, 0, 1)  # positive root of x^2 + lx - 1
    with mpmath.workdps(60):
        lv = lam_mp(q)
        xv = (-lv + mpmath.sqrt(lv * lv + 4)) / 2
        img_v = (2 * xv + 3) / (xv + 2)
    img = moebius(q, (2, 3, 1, 2), x)
    lo, hi = to_interval(img, Fraction(1, 10**12))
    with mpmath.workdps(60):
        assert mpmath.mpf(lo.numerator) / lo.denominator <= img_v
        assert img_v <= mpmath.mpf(hi.numerator) / hi.denominator


# --- json round trip -------------------------------------------------------

@pytest.mark.parametrize("x,q", [
    (Fraction(-3, 7), 5),
    (None, None),
])
def test_json_rational(x, q):
    if x is None:
        return
    d = to_json_dict(x, q)
    assert d["kind"] == "rational"
    assert from_json_dict(d) == x


def test_json_field_and_surd_roundtrip():
    l = lam(5)
    x = l * l - l / 3
    d = to_json_dict(x)
    y = from_json_dict(d)
    assert compare(x, y) == 0
    s = make_surd(5, 1, l, -1, 0, 1)
    d = to_json_dict(s)
    t = from_json_dict(d)
    assert compare(s, t) == 0
    lo, hi = d["interval"]
    assert Fraction(int(lo["num"]), int(lo["den"])) <= Fraction(int(hi["num"]), int(hi["den"]))
