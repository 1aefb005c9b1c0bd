"""Tests for the two-sided system and geodesic reduction."""
import random
from fractions import Fraction

import pytest

from heckecf.cf import (
    CFExpansion,
    MoebiusMap,
    constants,
    evaluate,
    expand,
    kappa_q,
)
from heckecf.field import compare, field_element, lam, moebius, neg, sign_of
from heckecf.grammar import first_forbidden
from heckecf.natural_ext import (
    CuspError,
    F_apply,
    F_inverse,
    PointPair,
    ReductionError,
    TruncationError,
    make_pair,
    omega_contains,
    omega_rectangles,
    pair_from_word,
    reduce_geodesic,
)

QS = (3, 4, 5, 6, 7, 8)


def eq(a, b):
    return compare(a, b) == 0


# ---------------------------------------------------------------------------
# the domain


@pytest.mark.parametrize("q", QS)
def test_rectangle_count_and_mirror(q):
    rects = omega_rectangles(q)
    assert len(rects) == 2 * kappa_q(q)
    half = len(rects) // 2
    for r, m in zip(rects[:half], reversed(rects[half:])):
        assert eq(m.x_lo, neg(r.x_hi)) and eq(m.x_hi, neg(r.x_lo))
        assert eq(m.y_lo, neg(r.y_hi)) and eq(m.y_hi, neg(r.y_lo))


@pytest.mark.parametrize("q", QS)
def test_x_projections_tile_interval(q):
    rects = omega_rectangles(q)
    half = len(rects) // 2
    lo = neg(lam(q) / 2)
    cur = lo
    for r in rects[:half]:
        assert eq(r.x_lo, cur)
        cur = r.x_hi
    assert sign_of(cur) == 0
    cur = Fraction(0)
    for r in rects[half:]:
        assert eq(r.x_lo, cur)
        cur = r.x_hi
    assert eq(cur, neg(lo))


def test_q3_rectangles_explicit():
    R = constants(3)["R"]
    a, b = omega_rectangles(3)
    r_minus_1 = moebius(3, (1, -1, 0, 1), R)        # R - 1
    one_minus_r = moebius(3, (-1, 1, 0, 1), R)      # 1 - R
    assert eq(a.x_lo, Fraction(-1, 2)) and sign_of(a.x_hi) == 0
    assert eq(a.y_lo, r_minus_1) and eq(a.y_hi, R)
    assert sign_of(b.x_lo) == 0 and eq(b.x_hi, Fraction(1, 2))
    assert eq(b.y_lo, neg(R)) and eq(b.y_hi, one_minus_r)


def test_q3_membership_examples():
    assert omega_contains(3, Fraction(-1, 4), Fraction(1, 2))
    assert omega_contains(3, 0, 0)                 # closed rectangles
    assert not omega_contains(3, Fraction(1, 4), Fraction(1, 2))


def test_membership_beyond_strip():
    assert not omega_contains(4, Fraction(3), Fraction(0))
    assert not omega_contains(4, Fraction(0), Fraction(3))


# ---------------------------------------------------------------------------
# pairs and the two-sided step

WORDS = {
    3: [(3,), (4, -2), (5, -3, -2), (-4, 6)],
    4: [(3, -2, 4), (2, -2), (-3, 5, 2)],
    5: [(3,), (2, -3, 4), (-2, 2)],
    6: [(4, -2, 3), (2, -1, -3)],
}


@pytest.mark.parametrize("q", sorted(WORDS))
def test_periodic_pairs_in_domain(q):
    for w in WORDS[q]:
        p = pair_from_word(q, w)
        assert omega_contains(q, p.x, p.y)


@pytest.mark.parametrize("q", sorted(WORDS))
def test_apply_inverse_roundtrip_exact(q):
    for w in WORDS[q]:
        p = pair_from_word(q, w)
        p2 = F_inverse(F_apply(p))
        assert eq(p2.x, p.x) and eq(p2.y, p.y)
        assert p2.future.all_digits(8) == p.future.all_digits(8)
        assert p2.past.all_digits(8) == p.past.all_digits(8)
        p3 = F_apply(F_inverse(p))
        assert eq(p3.x, p.x) and eq(p3.y, p.y)


@pytest.mark.parametrize("q", sorted(WORDS))
def test_digit_transfer_bookkeeping(q):
    for w in WORDS[q]:
        p = pair_from_word(q, w)
        head = p.future.digit(1)
        p2 = F_apply(p)
        assert p2.past.digit(1) == head
        assert p2.future.digit(1) == p.future.digit(2)


@pytest.mark.parametrize("q", sorted(WORDS))
def test_fifty_forward_steps_stay_inside(q):
    for w in WORDS[q]:
        p = pair_from_word(q, w)
        for _ in range(50):
            p = F_apply(p)          # raises if the image leaves the domain
        assert omega_contains(q, p.x, p.y)


@pytest.mark.parametrize("q", sorted(WORDS))
def test_shift_conjugacy_on_periodic_words(q):
    # the pair of the rotated word equals the image of the pair of the word
    for w in WORDS[q]:
        p2 = F_apply(pair_from_word(q, w))
        rotated = pair_from_word(q, w[1:] + w[:1])
        assert eq(p2.x, rotated.x)


def test_pair_from_word_rejects_forbidden():
    with pytest.raises(ValueError):
        pair_from_word(3, (2, 2))          # q=3 forbidden block
    with pytest.raises(ValueError):
        pair_from_word(4, (1, 1))
    with pytest.raises(ValueError):
        pair_from_word(4, (3, 0))


def test_make_pair_validates_membership():
    p = make_pair(3, Fraction(-1, 4), Fraction(1, 2))
    assert omega_contains(3, p.x, p.y)
    with pytest.raises(ValueError):
        make_pair(3, Fraction(1, 4), Fraction(1, 2))
    with pytest.raises(ValueError):
        make_pair(3, Fraction(5), Fraction(0))


def test_apply_on_cusp_orbit_raises():
    # a rational future expansion is finite: stepping past its end is a cusp
    p = make_pair(3, Fraction(-1, 4), Fraction(1, 2))
    with pytest.raises(CuspError):
        for _ in range(20):
            p = F_apply(p)


# ---------------------------------------------------------------------------
# geodesic reduction


def check_reduction(q, wm, wp):
    res = reduce_geodesic(wm, wp, q)
    assert eq(res.g.apply(wm), res.w_minus)
    assert eq(res.g.apply(wp), res.w_plus)
    S = MoebiusMap.S(q)
    assert eq(res.x, S.apply(res.w_plus))
    assert eq(res.y, neg(res.w_minus))
    assert omega_contains(q, res.x, res.y)
    return res


def test_already_reduced_identity():
    # w_plus = [4; ov 4], w_minus = [[0; ov -4]]: junction word admissible
    wp = evaluate(CFExpansion(3, 4, (), (4,), False, False))
    wm = evaluate(CFExpansion(3, 0, (), (-4,), False, True))
    res = check_reduction(3, wm, wp)
    assert res.steps == 0
    assert res.word == ()
    assert res.g == MoebiusMap.identity(3)


def test_forced_straddle_q4():
    # junction word (..., -3, 1; 1, 3, ...) contains the forbidden run (1,1)
    wp = evaluate(CFExpansion(4, 1, (), (3,), False, False))
    wm = evaluate(CFExpansion(4, 0, (-1,), (-3,), False, True))
    res = check_reduction(4, wm, wp)
    assert res.steps >= 1


def test_translation_normalisation():
    # far-translated copy of a reduced geodesic comes back via a T power
    q = 4
    wp0 = evaluate(CFExpansion(q, 3, (), (3,), False, False))
    wm0 = evaluate(CFExpansion(q, 0, (), (-3,), False, True))
    shift = MoebiusMap.T(q, 7)
    res = check_reduction(q, shift.apply(wm0), shift.apply(wp0))
    assert eq(res.w_minus, wm0) and eq(res.w_plus, wp0)


def test_cusp_endpoint_raises():
    with pytest.raises(CuspError):
        reduce_geodesic(evaluate(CFExpansion(3, 0, (), (-4,), False, True)),
                        Fraction(1, 3), 3)
    with pytest.raises(CuspError):
        reduce_geodesic(Fraction(1, 3),
                        evaluate(CFExpansion(3, 4, (), (4,), False, False)), 3)


def rand_word(q, rng, n):
    while True:
        w = tuple(rng.choice([d for d in range(-4, 5) if d != 0])
                  for _ in range(n))
        if first_forbidden(q, w * 3) is None:
            return w


@pytest.mark.parametrize("q", (3, 4, 5))
def test_random_geodesics_reduce(q):
    rng = random.Random(100 + q)
    done = 0
    while done < 12:
        wp = evaluate(CFExpansion(q, rng.randint(-3, 3), (),
                                  rand_word(q, rng, rng.randint(1, 3))))
        wm = evaluate(CFExpansion(q, 0, rand_word(q, rng, rng.randint(0, 2)),
                                  rand_word(q, rng, rng.randint(1, 3)),
                                  False, True))
        if eq(wm, wp):
            continue
        check_reduction(q, wm, wp)
        done += 1


@pytest.mark.parametrize("q", (3, 5))
def test_reduction_word_multiplies_to_g(q):
    wp = evaluate(CFExpansion(q, 1, (), (3, -2), False, False))
    wm = evaluate(CFExpansion(q, 0, (-1,), (-3,), False, True))
    res = check_reduction(q, wm, wp)
    g = MoebiusMap.identity(q)
    for tok in res.word:
        if tok == "S":
            g = g @ MoebiusMap.S(q)
        else:
            g = g @ MoebiusMap.T(q, int(tok[2:]))
    assert g == res.g
