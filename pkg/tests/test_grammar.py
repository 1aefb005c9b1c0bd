import random
from fractions import Fraction

import pytest

from heckecf.cf import (
    CFExpansion, MoebiusMap, constants, evaluate, expand, h_q, word_matrix,
)
from heckecf.field import compare, lam, moebius, sign_of
from heckecf.grammar import (
    OrderDomainError, RewriteError, first_forbidden, group_equivalent,
    is_dual_regular, is_regular, lex_compare, r_expansion, rewrite_to_regular,
    tails_equivalent,
)


# --- forbidden block detection ------------------------------------------------

@pytest.mark.parametrize("q,seq,pos", [
    (3, [1], 0), (3, [-1], 0), (3, [2, 1], 0), (3, [2, 5], 0),
    (3, [-2, -3], 0), (3, [3, 2, 2], 1), (3, [2, -3], None), (3, [3, -2, 4], None),
    (4, [1, 1], 0), (4, [1, 2], 0), (4, [1, -2], None), (4, [-1, -5], 0),
    (4, [2, 1], None), (4, [3, 1, 1], 1), (4, [-1, 2], None),
    (5, [1, 1], 0), (5, [1, 2, 1, 3], 0), (5, [1, 2, 1, -3], None),
    (5, [1, 2, -1, 3], None), (5, [1, 2, 1], None), (5, [-1, -2, -1, -1], 0),
    (6, [1, 1, 1], 0), (6, [1, 1, 5], 0), (6, [1, 1, -5], None),
    (6, [1, 5], None), (6, [2, 1, 1, 1], 1), (6, [-1, -1, -2], 0),
    (7, [1, 1, 1], 0), (7, [1, 1, 2, 1, 1, 4], 0), (7, [1, 1, 2, 1, 1, -4], None),
    (7, [1, 1, 2, 1, -1, 4], None), (7, [1, 1, 2, 1, 1], None),
])
def test_first_forbidden(q, seq, pos):
    hit = first_forbidden(q, seq)
    if pos is None:
        assert hit is None
    else:
        assert hit is not None and hit[0] == pos


@pytest.mark.parametrize("q", [3, 4, 5, 6, 7, 8])
def test_expansion_outputs_are_regular(q):
    rng = random.Random(80 + q)
    for _ in range(25):
        x = Fraction(rng.randint(-300, 300), rng.randint(1, 140))
        e = expand(q, x, max_digits=30)
        assert is_regular(e)
        ed = expand(q, x * Fraction(1, 3), dual=True, max_digits=30)
        assert is_dual_regular(ed)


@pytest.mark.parametrize("q", range(3, 11))
def test_r_expansion_is_regular_and_dual_boundary(q):
    e = r_expansion(q)
    assert is_regular(e)
    assert compare(evaluate(e), constants(q)["r"]) == 0
    em = r_expansion(q, -1)
    assert is_regular(em)
    assert compare(evaluate(em), moebius(q, (-1, 0, 0, 1), constants(q)["r"])) == 0


# --- rewrite rules are exact group identities ----------------------------------

@pytest.mark.parametrize("q", range(3, 11))
def test_interior_rules_are_moebius_identities(q):
    h = h_q(q)
    rng = random.Random(q)
    for _ in range(6):
        p = rng.randint(-5, 5)
        b = rng.randint(2, 6) * rng.choice([1, -1])
        m = rng.randint(2, 6)
        if q % 2 == 0:
            lhs = word_matrix(q, p, [1] * (h + 1) + [b])
            rhs = word_matrix(q, p - 1, [-1] * (h - 1) + [b - 1])
            assert lhs.proportional_to(rhs)
            lhs = word_matrix(q, p, [1] * h + [m])
            rhs = word_matrix(q, p - 1, [-1] * h + [m - 1])
            assert lhs.proportional_to(rhs)
        else:
            lhs = word_matrix(q, p, [1] * (h + 1) + [b])
            rhs = word_matrix(q, p - 1, [-1] * h + [b - 1])
            assert lhs.proportional_to(rhs)
            lhs = word_matrix(q, p, [1] * h + [2] + [1] * h + [m])
            rhs = word_matrix(q, p - 1, [-1] * h + [-2] + [-1] * h + [m - 1])
            assert lhs.proportional_to(rhs)


@pytest.mark.parametrize("q", range(3, 11))
def test_trailing_run_rule_value_identity(q):
    h = h_q(q)
    for p in (-3, 0, 2, 5):
        lhs = evaluate(CFExpansion(q, p, tuple([1] * (h + 1))))
        if q % 2 == 0:
            rhs = evaluate(CFExpansion(q, p - 1, tuple([-1] * (h - 1))))
        else:
            rhs = evaluate(CFExpansion(q, p - 1, tuple([-1] * h)))
        assert compare(lhs, rhs) == 0


@pytest.mark.parametrize("q", range(3, 11))
def test_finite_nonuniqueness_identity(q):
    # trailing (1)^h == decrement and flip (even); odd analog with 2 between
    h = h_q(q)
    for a_n in (-2, 3):
        if q % 2 == 0:
            e1 = CFExpansion(q, 0, tuple([a_n] + [1] * h))
            e2 = CFExpansion(q, 0, tuple([a_n - 1] + [-1] * h))
        else:
            e1 = CFExpansion(q, 0, tuple([a_n] + [1] * h + [2] + [1] * h))
            e2 = CFExpansion(q, 0, tuple([a_n - 1] + [-1] * h + [-2] + [-1] * h))
        assert compare(evaluate(e1), evaluate(e2)) == 0


def test_zero_merge_identity():
    for q in (3, 5, 6):
        lhs = word_matrix(q, 0, [2, 0, 3])
        rhs = word_matrix(q, 0, [5])
        assert lhs.proportional_to(rhs)


# --- rewriting ------------------------------------------------------------------

@pytest.mark.parametrize("q", [3, 4, 5, 7])
def test_rewrite_random_finite_words(q):
    rng = random.Random(500 + q)
    checked = 0
    for _ in range(120):
        n = rng.randint(1, 9)
        digits = tuple(rng.randint(-4, 4) for _ in range(n))
        a0 = rng.randint(-2, 2)
        e = CFExpansion(q, a0, digits)
        try:
            v = evaluate(e)
        except (ZeroDivisionError, Exception) as exc:
            if "infinity" in str(exc) or isinstance(exc, ZeroDivisionError):
                with pytest.raises(RewriteError):
                    rewrite_to_regular(e)
                continue
            raise
        out, trace = rewrite_to_regular(e)
        assert is_regular(out)
        assert compare(evaluate(out), v) == 0
        checked += 1
    assert checked > 60


@pytest.mark.parametrize("q", [3, 4, 5, 7])
def test_rewrite_random_periodic_words(q):
    rng = random.Random(900 + q)
    checked = 0
    while checked < 25:
        n = rng.randint(0, 4)
        digits = tuple(rng.randint(-4, 4) for _ in range(n))
        m = rng.randint(1, 4)
        period = tuple(rng.choice([-4, -3, -2, 2, 3, 4]) for _ in range(m))
        e = CFExpansion(q, rng.randint(-2, 2), digits, period)
        try:
            v = evaluate(e)
        except Exception:
            continue
        try:
            out, trace = rewrite_to_regular(e)
        except RewriteError:
            continue
        assert is_regular(out)
        assert compare(evaluate(out), v) == 0
        checked += 1


def test_cascade_q3():
    # [a; 2, (3)*] cascades to [a-1; (-3)*]
    e = CFExpansion(3, 5, (2,), (3,))
    out, trace = rewrite_to_regular(e)
    assert trace.cascade
    assert is_regular(out)
    assert compare(evaluate(out), evaluate(e)) == 0
    assert out.a0 == 4
    whole = list(out.digits) + list(out.period) * 3
    assert whole[:3] == [-3, -3, -3]


@pytest.mark.parametrize("q", [4, 6, 5, 7])
def test_cascade_higher_q(q):
    # a forbidden block followed by the expansion of r cascades forever
    h = h_q(q)
    rp = r_expansion(q)
    if q % 2 == 0:
        digits = tuple([1] * h + [2])
    else:
        digits = tuple([1] * h + [2] + [1] * h + [2])
    e = CFExpansion(q, 1, digits, rp.period)
    out, trace = rewrite_to_regular(e)
    assert trace.cascade
    assert is_regular(out)
    assert compare(evaluate(out), evaluate(e)) == 0
    # the rewritten tail is the expansion of -r
    assert tails_equivalent(out, r_expansion(q, -1))


def test_rewrite_preserves_already_regular():
    e = expand(5, Fraction(5, 13), max_digits=20)
    if not e.truncated:
        out, trace = rewrite_to_regular(e)
        assert out == e and trace.n_steps() == 0


def test_rewrite_infinity_raises():
    # [0; 1, 1] is the point at infinity for q=3
    with pytest.raises(RewriteError):
        rewrite_to_regular(CFExpansion(3, 0, (1, 1)))


# --- lexicographic order ----------------------------------------------------------

def _sample_points(q, rng, count):
    from heckecf.cf import _attracting_fixed_point
    pts = []
    c = constants(q)
    R = c["R"]
    while len(pts) < count:
        kind = rng.choice(["rat", "fix"])
        if kind == "rat":
            x = Fraction(rng.randint(-99, 99), rng.randint(60, 160))
        else:
            k = rng.randint(1, 3)
            W = MoebiusMap.identity(q)
            for _ in range(k):
                W = W @ MoebiusMap.S(q) @ MoebiusMap.T(q, rng.choice([-4, -3, 3, 4]))
            try:
                from heckecf.cf import _approx
                x = _attracting_fixed_point(W)
            except Exception:
                continue
        if compare(x, -R) <= 0 or compare(x, R) >= 0:
            continue
        e = expand(q, x, max_digits=60)
        if e.truncated:
            continue
        pts.append((x, e))
    return pts


@pytest.mark.parametrize("q", [3, 4, 5, 6])
def test_lex_order_matches_value_order(q):
    rng = random.Random(4242 + q)
    pts = _sample_points(q, rng, 12)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            (x, ex), (y, ey) = pts[i], pts[j]
            want = compare(x, y)
            got = lex_compare(ex, ey)
            assert got == want, (str(ex), str(ey), want, got)


@pytest.mark.parametrize("q", [3, 4, 5])
def test_lex_order_dual_leading_zero(q):
    rng = random.Random(777 + q)
    c = constants(q)
    R = c["R"]
    pts = []
    while len(pts) < 8:
        x = Fraction(rng.randint(-200, 200), rng.randint(250, 500))
        if compare(x, -R) <= 0 or compare(x, R) >= 0:
            continue
        e = expand(q, x, dual=True, max_digits=40)
        if e.truncated or e.a0 != 0:
            continue
        pts.append((x, e))
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            (x, ex), (y, ey) = pts[i], pts[j]
            assert lex_compare(ex, ey) == compare(x, y)


def test_lex_order_dual_nonzero_leading_digit_rejected():
    # R_3 has two dual expansions, [0; -2, (-3)*] and [1; (3)*]; a digitwise
    # order over nonzero leading digits would make R_3 precede itself
    e1 = CFExpansion(3, 0, (-2,), (-3,), dual=True)
    e2 = CFExpansion(3, 1, (), (3,), dual=True)
    assert is_dual_regular(e1) and is_dual_regular(e2)
    R = constants(3)["R"]
    assert compare(evaluate(e1), R) == 0
    assert compare(evaluate(e2), R) == 0
    with pytest.raises(OrderDomainError):
        lex_compare(e1, e2)


def test_lex_finite_end_cases():
    # [0; 2] vs [0; 2, b...]: shorter precedes iff next digit negative
    q = 5
    e = CFExpansion(q, 0, (2,))
    e_neg = CFExpansion(q, 0, (2, -3))
    e_pos = CFExpansion(q, 0, (2, 3))
    assert lex_compare(e, e_neg) == -1
    assert lex_compare(e, e_pos) == 1
    assert compare(evaluate(e), evaluate(e_neg)) == -1
    assert compare(evaluate(e), evaluate(e_pos)) == 1


# --- equivalence ---------------------------------------------------------------

def test_tails_equivalent_basics():
    q = 5
    a = CFExpansion(q, 0, (2, 3), (4, -2))
    b = CFExpansion(q, 7, (-3, -2, 4, -2), (4, -2))      # shifted entry
    c = CFExpansion(q, 0, (2,), (-2, 4))                 # rotated period
    d = CFExpansion(q, 0, (2,), (4, 2))
    assert tails_equivalent(a, b)
    assert tails_equivalent(a, c)
    assert not tails_equivalent(a, d)
    assert tails_equivalent(CFExpansion(q, 0, (2,)), CFExpansion(q, 5, (-3, 4)))
    assert not tails_equivalent(a, CFExpansion(q, 0, (2,)))


def test_tails_equivalent_truncated_shift():
    q = 4
    e = expand(q, Fraction(17, 39), max_digits=25)
    assert e.truncated
    shifted = CFExpansion(q, 0, e.digits[3:], None, True)
    assert tails_equivalent(e, shifted)


@pytest.mark.parametrize("q", [3, 4, 5, 7])
def test_group_equivalence_under_moebius_action(q):
    # x and g x have equivalent expansions for g in the group
    from heckecf.cf import _attracting_fixed_point
    rng = random.Random(31337 + q)
    done = 0
    while done < 6:
        W = MoebiusMap.identity(q)
        for _ in range(rng.randint(2, 3)):
            W = W @ MoebiusMap.S(q) @ MoebiusMap.T(q, rng.choice([-4, -3, 3, 4]))
        try:
            x = _attracting_fixed_point(W)
        except Exception:
            continue
        g = MoebiusMap.T(q, rng.randint(-2, 2)) @ MoebiusMap.S(q) @ \
            MoebiusMap.T(q, rng.choice([-3, 2, 3]))
        try:
            y = g.apply(x)
        except ZeroDivisionError:
            continue
        ex = expand(q, x, max_digits=200)
        ey = expand(q, y, max_digits=200)
        if ex.truncated or ey.truncated:
            continue
        assert group_equivalent(ex, ey)
        done += 1


@pytest.mark.parametrize("q", [3, 4, 5, 6, 7])
def test_r_and_minus_r_are_group_equivalent_but_tails_differ(q):
    rp = r_expansion(q, 1)
    rm = r_expansion(q, -1)
    assert not tails_equivalent(rp, rm)
    assert group_equivalent(rp, rm)


def test_inequivalent_points(q=5):
    a = expand(q, Fraction(1, 3), max_digits=25)
    b = r_expansion(q)
    if not a.truncated:
        assert not group_equivalent(a, b)
