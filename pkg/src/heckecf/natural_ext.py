"""Two-sided extension of the digit shift and geodesic reduction.

The one-sided expansion map forgets the digits it has consumed.  The
two-sided system acts on pairs (x, y) where x carries the future digits and
y the past digits; one step moves the leading future digit onto the past
side.  The invariant domain Omega is a finite union of closed rectangles
whose corners are the boundary-orbit points of the two interval maps.

``reduce_geodesic`` takes an oriented geodesic, given by its two real
endpoints, and finds a group element g (a word in S and T) moving it so
that the associated pair (S w_plus', -w_minus') lies in Omega.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .field import AlgebraicReal, compare, neg, sign_of
from .cf import (
    CFExpansion,
    MoebiusMap,
    constants,
    evaluate,
    expand,
    kappa_q,
    nearest_multiple,
    nearest_multiple_dual,
)
from .grammar import first_forbidden
from .symbolic import orbit_points


class ReductionError(ValueError):
    """Geodesic reduction cannot proceed."""


class CuspError(ReductionError):
    """An endpoint has a finite expansion (it is a cusp of the group)."""


class TruncationError(RuntimeError):
    """A step or digit limit was exhausted before the answer was certain."""


# ---------------------------------------------------------------------------
# the domain Omega


@dataclass(frozen=True)
class Rectangle:
    x_lo: AlgebraicReal
    x_hi: AlgebraicReal
    y_lo: AlgebraicReal
    y_hi: AlgebraicReal

    def contains(self, x: AlgebraicReal, y: AlgebraicReal) -> bool:
        return (compare(self.x_lo, x) <= 0 and compare(x, self.x_hi) <= 0
                and compare(self.y_lo, y) <= 0 and compare(y, self.y_hi) <= 0)


@lru_cache(maxsize=None)
def omega_rectangles(q: int) -> tuple[Rectangle, ...]:
    """2*kappa closed rectangles, symmetric under (x, y) -> (-x, -y)."""
    kappa = kappa_q(q)
    phi = orbit_points(q, "f")
    psi = orbit_points(q, "fstar")
    R = constants(q)["R"]
    rects = []
    for i in range(1, kappa + 1):
        rects.append(Rectangle(phi[i - 1], phi[i], psi[kappa - i + 1], R))
    for i in range(kappa, 0, -1):
        rects.append(Rectangle(neg(phi[i]), neg(phi[i - 1]),
                               neg(R), neg(psi[kappa - i + 1])))
    return tuple(rects)


def omega_contains(q: int, x: AlgebraicReal, y: AlgebraicReal) -> bool:
    """Exact membership in the closed domain Omega."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(y, int):
        y = Fraction(y)
    return any(rect.contains(x, y) for rect in omega_rectangles(q))


# ---------------------------------------------------------------------------
# pairs and the two-sided step


@dataclass(frozen=True)
class PointPair:
    """A point of Omega with its two attached digit sequences.

    ``future`` is the expansion of x (regular, leading entry 0); ``past``
    is the expansion of y (dual, leading entry 0)."""

    q: int
    x: AlgebraicReal
    y: AlgebraicReal
    future: CFExpansion
    past: CFExpansion


def _head_digit(exp: CFExpansion) -> int:
    try:
        return exp.digit(1)
    except IndexError:
        if exp.truncated:
            raise TruncationError(
                "expansion digits exhausted (truncated input)") from None
        raise CuspError("expansion terminates; the orbit hits a cusp") \
            from None


def _drop_head(exp: CFExpansion) -> CFExpansion:
    if exp.digits:
        return CFExpansion(exp.q, 0, exp.digits[1:], exp.period,
                           exp.truncated, exp.dual)
    if exp.period:
        p = exp.period
        return CFExpansion(exp.q, 0, (), p[1:] + p[:1], False, exp.dual)
    raise CuspError("expansion terminates; the orbit hits a cusp")


def _prepend(exp: CFExpansion, d: int, dual: bool) -> CFExpansion:
    return CFExpansion(exp.q, 0, (d,) + exp.digits, exp.period,
                       exp.truncated, dual)


def make_pair(q: int, x: AlgebraicReal, y: AlgebraicReal,
              max_digits: int = 128) -> PointPair:
    """Build a pair from two values, attaching their expansions."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(y, int):
        y = Fraction(y)
    fut = expand(q, x, max_digits=max_digits)
    past = expand(q, y, dual=True, max_digits=max_digits)
    if fut.a0 != 0 or past.a0 != 0:
        raise ValueError("point outside the admissible intervals")
    if not omega_contains(q, x, y):
        raise ValueError("pair lies outside the domain")
    return PointPair(q, x, y, fut, past)


def pair_from_word(q: int, word) -> PointPair:
    """Pair of the periodic two-sided sequence (..., w; w, ...)."""
    word = tuple(int(d) for d in word)
    if not word:
        raise ValueError("empty word")
    if any(d == 0 for d in word) or first_forbidden(q, word * 3) is not None:
        raise ValueError("word is not admissible")
    fut = CFExpansion(q, 0, (), word, False, False)
    past = CFExpansion(q, 0, (), tuple(reversed(word)), False, True)
    x = evaluate(fut)
    y = evaluate(past)
    pair = PointPair(q, x, y, fut, past)
    if not omega_contains(q, x, y):
        raise ValueError("pair lies outside the domain")
    return pair


def F_apply(pair: PointPair) -> PointPair:
    """Move the leading future digit to the head of the past."""
    q = pair.q
    d = _head_digit(pair.future)
    step = MoebiusMap.T(q, -d) @ MoebiusMap.S(q)      # z -> -1/z - d*lam
    back = MoebiusMap.S(q) @ MoebiusMap.T(q, d)       # z -> -1/(z + d*lam)
    x2 = step.apply(pair.x)
    y2 = back.apply(pair.y)
    out = PointPair(q, x2, y2, _drop_head(pair.future),
                    _prepend(pair.past, d, dual=True))
    if not omega_contains(q, x2, y2):
        raise ValueError("image left the domain; input pair inadmissible")
    return out


def F_inverse(pair: PointPair) -> PointPair:
    """Move the leading past digit back to the head of the future."""
    q = pair.q
    d = _head_digit(pair.past)
    back = MoebiusMap.S(q) @ MoebiusMap.T(q, d)       # z -> -1/(z + d*lam)
    step = MoebiusMap.T(q, -d) @ MoebiusMap.S(q)      # z -> -1/z - d*lam
    x2 = back.apply(pair.x)
    y2 = step.apply(pair.y)
    out = PointPair(q, x2, y2, _prepend(pair.future, d, dual=False),
                    _drop_head(pair.past))
    if not omega_contains(q, x2, y2):
        raise ValueError("image left the domain; input pair inadmissible")
    return out


# ---------------------------------------------------------------------------
# geodesic reduction


@dataclass(frozen=True)
class ReductionResult:
    q: int
    g: MoebiusMap
    word: tuple[str, ...]          # tokens of g, leftmost applied last
    w_minus: AlgebraicReal
    w_plus: AlgebraicReal
    x: AlgebraicReal               # S(w_plus)
    y: AlgebraicReal               # -w_minus
    steps: int


def _require_infinite(q: int, v: AlgebraicReal, dual: bool,
                      max_digits: int) -> None:
    exp = expand(q, v, dual=dual, max_digits=max_digits)
    if exp.finite:
        raise CuspError("endpoint has a finite expansion (cusp)")


class _Stuck(Exception):
    pass


def _reduce_schedule(q: int, w_minus: AlgebraicReal, w_plus: AlgebraicReal,
                     backward_steps: int, max_steps: int) -> ReductionResult:
    """One reduction attempt: ``backward_steps`` junction shifts towards the
    past, then forward shifts until the pair lands in Omega."""
    R = constants(q)["R"]
    S = MoebiusMap.S(q)
    g = MoebiusMap.identity(q)
    tokens: list[str] = []
    wm, wp = w_minus, w_plus

    def translate():
        nonlocal wm, wp, g
        t = nearest_multiple_dual(q, wm, R)
        if t != 0:
            move = MoebiusMap.T(q, -t)
            wm, wp = move.apply(wm), move.apply(wp)
            g = move @ g
            tokens.append(f"T^{-t}")

    def push(move, toks):
        nonlocal wm, wp, g
        wm, wp = move.apply(wm), move.apply(wp)
        g = move @ g
        tokens.extend(toks)

    for step in range(max_steps):
        translate()
        if sign_of(wm) == 0 or sign_of(wp) == 0:
            raise CuspError("an endpoint hit a cusp during reduction")
        if step >= backward_steps:
            # exit test: the pair of the current geodesic
            a0 = nearest_multiple(q, wp)
            if a0 != 0:        # S(wp) can only lie in the strip if wp is far
                x = S.apply(wp)
                y = neg(wm)
                if omega_contains(q, x, y):
                    return ReductionResult(q, g, tuple(reversed(tokens)),
                                           wm, wp, x, y, step)
            # forward shift: move the leading future digit into the past
            push(S @ MoebiusMap.T(q, -a0),
                 ([f"T^{-a0}"] if a0 else []) + ["S"])
        else:
            # backward shift: move the leading past digit into the future
            b1 = nearest_multiple_dual(q, S.apply(wm), R)
            push(MoebiusMap.T(q, -b1) @ S,
                 ["S"] + ([f"T^{-b1}"] if b1 else []))
    raise _Stuck


def reduce_geodesic(w_minus: AlgebraicReal, w_plus: AlgebraicReal, q: int,
                    max_steps: int = 64,
                    max_digits: int = 128) -> ReductionResult:
    """Move the geodesic (w_minus, w_plus) into reduced position.

    Returns g with (w_minus', w_plus') = g(w_minus, w_plus) such that
    (S w_plus', -w_minus') lies in Omega (tested exactly each round).
    Every move is a single group element: a power of T making the dual head
    of w_minus' zero, a forward junction shift S T^(-a0), or a backward
    junction shift T^(-b1) S.  Forward shifts alone converge for almost
    every geodesic; when the past side approaches the domain boundary from
    outside, a few initial backward shifts resolve it, so attempts with an
    increasing backward prefix are tried in turn.
    """
    if isinstance(w_minus, int):
        w_minus = Fraction(w_minus)
    if isinstance(w_plus, int):
        w_plus = Fraction(w_plus)
    _require_infinite(q, w_minus, True, max_digits)
    _require_infinite(q, w_plus, False, max_digits)
    for backward in (0, 1, 2, 3, 4, 6, 8, 12, 16, 24):
        try:
            return _reduce_schedule(q, w_minus, w_plus, backward,
                                    max_steps + backward)
        except _Stuck:
            continue
    raise TruncationError("no reduced position within the step limit")
