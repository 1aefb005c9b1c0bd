"""Digit grammar of nearest lambda_q-multiple continued fractions.

A digit word is (q-)regular when it contains no forbidden block read
forwards, dual regular when none read backwards.  Forbidden blocks (same
sign throughout, for every m >= 1):

  q = 3:        [+-1]  and  [+-2, +-m]
  q even:       [(+-1)^(h+1)]  and  [(+-1)^h, +-m]
  q odd >= 5:   [(+-1)^(h+1)]  and  [(+-1)^h, +-2, (+-1)^h, +-m]

Words with forbidden blocks can be rewritten, value-preservingly, into
regular form by group identities; infinite cascades converge to a periodic
tail which is detected and verified exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from typing import Optional

from .cf import CFExpansion, constants, evaluate, h_q
from .field import compare

__all__ = [
    "is_regular", "is_dual_regular", "first_forbidden", "lex_compare",
    "rewrite_to_regular", "RewriteTrace", "RewriteError", "OrderDomainError",
    "tails_equivalent", "group_equivalent", "r_expansion",
]


class RewriteError(ValueError):
    pass


class OrderDomainError(ValueError):
    pass


def _sgn(n: int) -> int:
    return 1 if n > 0 else -1 if n < 0 else 0


def window_length(q: int) -> int:
    """Longest forbidden block: h+1 (even q), 2h+2 (odd q)."""
    h = h_q(q)
    return h + 1 if q % 2 == 0 else 2 * h + 2


def _match_forbidden(q: int, seq, i: int) -> Optional[tuple[int, str]]:
    """Forbidden block starting at index i of seq, as (length, kind) with
    kind 'run' ([s^(h+1)]) or 'block', or None.  Only complete blocks count."""
    h = h_q(q)
    n = len(seq)
    if i >= n or seq[i] == 0:
        return None
    s = _sgn(seq[i])
    if q % 2 == 0:
        if i + h >= n:
            return None
        if any(seq[i + j] != s for j in range(h)):
            return None
        if _sgn(seq[i + h]) != s:
            return None
        return (h + 1, "run" if seq[i + h] == s else "block")
    # odd q (h = 0 covers q = 3)
    if any(i + j >= n or seq[i + j] != s for j in range(h)):
        return None
    if i + h < n and seq[i + h] == s:
        return (h + 1, "run")
    if (i + 2 * h + 1 < n and seq[i + h] == 2 * s
            and all(seq[i + h + 1 + j] == s for j in range(h))
            and _sgn(seq[i + 2 * h + 1]) == s):
        return (2 * h + 2, "block")
    return None


def first_forbidden(q: int, seq, start: int = 0) -> Optional[tuple[int, int, str]]:
    """Leftmost forbidden block in the finite word seq: (start, length, kind)."""
    for i in range(start, len(seq)):
        m = _match_forbidden(q, seq, i)
        if m:
            return (i, m[0], m[1])
    return None


def _scan_digits(exp: CFExpansion, extra: int = 0) -> list[int]:
    """Enough digits of exp to decide regularity: the prefix plus enough
    period copies that every junction and in-period window is visible."""
    w = window_length(exp.q) + 1 + extra
    if exp.period:
        n = len(exp.digits) + 3 * len(exp.period) + 3 * w
    else:
        n = len(exp.digits)
    return [exp.digit(i) for i in range(1, n + 1)]


def is_regular(exp: CFExpansion) -> bool:
    """No forbidden block read forwards (a0 plays no role)."""
    if any(d == 0 for d in _scan_digits(exp)):
        return False
    return first_forbidden(exp.q, _scan_digits(exp)) is None


def is_dual_regular(exp: CFExpansion) -> bool:
    """No forbidden block read backwards.

    For an infinite sequence this means: every finite subword, reversed, is
    allowed.  Equivalently the mirrored patterns [m, 1^h] (even),
    [m, 1^h, 2, 1^h] (odd) and [s^(h+1)] never occur forwards.
    """
    seq = _scan_digits(exp)
    if any(d == 0 for d in seq):
        return False
    q = exp.q
    h = h_q(q)
    n = len(seq)
    for i in range(n):
        s = _sgn(seq[i])
        # reversed run is still a run
        if seq[i] == s and all(i + j < n and seq[i + j] == s
                               for j in range(h + 1)):
            return False
        if q % 2 == 0:
            # reversed [1^h, m] = [m, 1^h]
            if (_sgn(seq[i]) == s and i + h < n
                    and all(seq[i + 1 + j] == s for j in range(h))):
                return False
        else:
            # reversed [1^h, 2, 1^h, m] = [m, 1^h, 2, 1^h]
            if (i + 2 * h + 1 < n
                    and all(seq[i + 1 + j] == s for j in range(h))
                    and seq[i + h + 1] == 2 * s
                    and all(seq[i + h + 2 + j] == s for j in range(h))):
                return False
    return True


# ---------------------------------------------------------------------------
# lexicographic order

def _digit_stream(exp: CFExpansion, i: int) -> Optional[int]:
    """Entry i of the sequence (a0, a1, ...); None past the end."""
    if i == 0:
        return exp.a0
    try:
        return exp.digit(i)
    except IndexError:
        return None


def _length_bound(e1: CFExpansion, e2: CFExpansion) -> int:
    pre = max(len(e1.digits), len(e2.digits))
    p1 = len(e1.period) if e1.period else 1
    p2 = len(e2.period) if e2.period else 1
    return pre + math.lcm(p1, p2) + 2


def lex_compare(e1: CFExpansion, e2: CFExpansion) -> int:
    """Exact order of the represented values from the digit sequences alone.

    Both expansions must be regular, or both dual regular with leading
    digit 0 (nonzero leading digits of dual expansions are rejected: the
    same point can carry two dual expansions with different a0, so no
    digitwise order is possible there).
    """
    if e1.q != e2.q:
        raise ValueError("mixed q")
    if e1.dual != e2.dual:
        raise ValueError("cannot mix regular and dual expansions")
    if e1.dual:
        if e1.a0 != 0 or e2.a0 != 0:
            raise OrderDomainError(
                "digitwise order of dual expansions needs leading digit 0")
        if not (is_dual_regular(e1) and is_dual_regular(e2)):
            raise OrderDomainError("dual expansions must be dual regular")
    elif not (is_regular(e1) and is_regular(e2)):
        raise OrderDomainError("expansions must be regular")
    bound = _length_bound(e1, e2)
    n = 0
    while n <= bound:
        a = _digit_stream(e1, n)
        b = _digit_stream(e2, n)
        if a is None and b is None:
            return 0
        if a == b:
            n += 1
            continue
        if n == 0:
            return -1 if e1.a0 < e2.a0 else 1
        if a is None:  # e1 ended
            if e1.truncated:
                raise ValueError("truncated expansion: order undecidable")
            return -1 if b < 0 else 1
        if b is None:
            if e2.truncated:
                raise ValueError("truncated expansion: order undecidable")
            return -1 if a > 0 else 1
        if a * b < 0:
            return -1 if a > 0 else 1
        return -1 if a < b else 1
    if e1.truncated or e2.truncated:
        raise ValueError("truncated expansion: order undecidable")
    return 0  # both eventually periodic and equal through the lcm bound


# ---------------------------------------------------------------------------
# rewriting

@dataclass
class RewriteTrace:
    steps: list = dfield(default_factory=list)   # (rule, index) per application
    cascade: bool = False
    verified_value: bool = False

    def n_steps(self) -> int:
        return len(self.steps)


class _Word:
    """Mutable digit word [a0, d1, d2, ...] with a lazy periodic tail."""

    def __init__(self, exp: CFExpansion):
        if exp.truncated:
            raise RewriteError("cannot rewrite a truncated expansion")
        self.q = exp.q
        self.seq: list[int] = [exp.a0] + list(exp.digits)
        self.period: Optional[tuple[int, ...]] = exp.period or None
        self.tail_pos = 0  # next index into period to unroll

    def ensure(self, k: int) -> None:
        while self.period and len(self.seq) < k:
            self.seq.append(self.period[self.tail_pos])
            self.tail_pos = (self.tail_pos + 1) % len(self.period)

    def has_index(self, k: int) -> bool:
        self.ensure(k + 1)
        return k < len(self.seq)

    def remaining_period(self) -> Optional[tuple[int, ...]]:
        if not self.period:
            return None
        p = self.period
        return tuple(p[(self.tail_pos + j) % len(p)] for j in range(len(p)))

    def to_expansion(self) -> CFExpansion:
        return CFExpansion(self.q, self.seq[0], tuple(self.seq[1:]),
                           self.remaining_period())


def _merge_zeros(w: _Word, trace: RewriteTrace) -> None:
    """[x, 0, y] -> [x + y]; a trailing [x, 0] is dropped entirely since
    ST^x ST^0 fixes 0.  Repeats until no zero digit remains."""
    while True:
        try:
            j = w.seq.index(0, 1)
        except ValueError:
            return
        if j == len(w.seq) - 1 and not w.period:
            if j == 1:
                raise RewriteError("word represents the point at infinity")
            del w.seq[j - 1:j + 1]
            trace.steps.append(("drop_tail_zero", j))
            continue
        w.ensure(j + 2)
        if j + 1 >= len(w.seq):
            raise RewriteError("word represents the point at infinity")
        w.seq[j - 1] += w.seq[j + 1]
        del w.seq[j:j + 2]
        trace.steps.append(("merge_zero", j))


def _apply_rule(w: _Word, i: int, length: int, kind: str,
                trace: RewriteTrace) -> None:
    """Rewrite the forbidden block starting at seq index i (i >= 1)."""
    q, h = w.q, h_q(w.q)
    seq = w.seq
    s = _sgn(seq[i])
    even = (q % 2 == 0)
    if kind == "run":
        b_idx = i + h + 1
        has_b = w.has_index(b_idx)
        emitted = [-s] * (h - 1 if even else h)
        repl = [seq[i - 1] - s] + emitted
        if has_b:
            repl.append(seq[b_idx] - s)
            seq[i - 1:b_idx + 1] = repl
        else:
            seq[i - 1:] = repl
        trace.steps.append(("run", i))
    else:
        if even:
            m_idx = i + h
            repl = [seq[i - 1] - s] + [-s] * h + [seq[m_idx] - s]
            seq[i - 1:m_idx + 1] = repl
        else:
            m_idx = i + 2 * h + 1
            repl = ([seq[i - 1] - s] + [-s] * h + [-2 * s] + [-s] * h
                    + [seq[m_idx] - s])
            seq[i - 1:m_idx + 1] = repl
        trace.steps.append(("block", i))
    _merge_zeros(w, trace)


def _find_leftmost(w: _Word) -> Optional[tuple[int, int, str]]:
    """Leftmost forbidden block among the digits (index >= 1), looking far
    enough into the periodic tail that a purely periodic remainder which is
    regular is accepted as such."""
    wl = window_length(w.q)
    horizon = len(w.seq) + (3 * len(w.period) + 3 * wl if w.period else 0)
    i = 1
    while i < horizon:
        w.ensure(i + wl + 1)
        if i >= len(w.seq):
            return None
        m = _match_forbidden(w.q, w.seq, i)
        if m:
            return (i, m[0], m[1])
        i += 1
    return None


def _primitive_period(p: tuple[int, ...]) -> tuple[int, ...]:
    n = len(p)
    for d in range(1, n + 1):
        if n % d == 0 and p == p[:d] * (n // d):
            return p[:d]
    return p


def _detect_emitted_period(stable: list[int]) -> Optional[tuple[int, tuple[int, ...]]]:
    """Find (start, period) such that stable[start:] is periodic, requiring
    at least three full repetitions as evidence."""
    n = len(stable)
    for d in range(1, n // 3 + 1):
        if all(stable[n - j] == stable[n - j - d] for j in range(1, 2 * d + 1)):
            start = n - 3 * d
            while start > 0 and stable[start - 1] == stable[start - 1 + d]:
                start -= 1
            return (start, tuple(stable[start:start + d]))
    return None


def rewrite_to_regular(exp: CFExpansion,
                       max_steps: Optional[int] = None) -> tuple[CFExpansion, RewriteTrace]:
    """Rewrite an arbitrary digit word (zeros allowed, forbidden blocks
    allowed) into a regular expansion of the same value.

    Forbidden blocks are eliminated leftmost-first by exact group
    identities.  A block that keeps reappearing to the right for more than
    max(64, 8q) consecutive steps is an infinite cascade; its emitted
    periodic tail is extracted and the closed form is verified by exact
    value comparison before being returned.
    """
    q = exp.q
    cascade_threshold = max(64, 8 * q)
    if max_steps is None:
        max_steps = 20000 + 50 * len(exp.digits)
    trace = RewriteTrace()
    w = _Word(exp)
    _merge_zeros(w, trace)
    moving_right = 0
    last_pos = -1
    for _ in range(max_steps):
        hit = _find_leftmost(w)
        if hit is None:
            out = w.to_expansion()
            if not is_regular(out):
                raise RewriteError("rewriting terminated on a non-regular word")
            return out, trace
        i, length, kind = hit
        if i > last_pos:
            moving_right += 1
        else:
            moving_right = 0
        last_pos = i
        if w.period and moving_right >= cascade_threshold:
            return _resolve_cascade(exp, w, i, trace)
        _apply_rule(w, i, length, kind, trace)
    raise RewriteError(f"rewriting did not terminate within {max_steps} steps")


def _resolve_cascade(exp: CFExpansion, w: _Word, i: int,
                     trace: RewriteTrace) -> tuple[CFExpansion, RewriteTrace]:
    stable = w.seq[1:i - 1]  # all final: only seq[i-1:] can still change
    found = _detect_emitted_period(stable)
    if found is None:
        raise RewriteError("cascade detected but no emitted period found")
    start, per = found
    per = _primitive_period(per)
    candidate = CFExpansion(w.q, w.seq[0], tuple(stable[:start]), per)
    if not is_regular(candidate):
        raise RewriteError("cascade closed form is not regular")
    v_in = evaluate(exp)
    v_out = evaluate(candidate)
    if compare(v_in, v_out) != 0:
        raise RewriteError("cascade closed form failed exact value check")
    trace.cascade = True
    trace.verified_value = True
    return candidate, trace


# ---------------------------------------------------------------------------
# tail equivalence and group equivalence

def r_expansion(q: int, sign: int = 1) -> CFExpansion:
    """The purely periodic regular expansion of sign*r_q."""
    h = h_q(q)
    if q == 3:
        per = (3,)
    elif q % 2 == 0:
        per = tuple([1] * (h - 1) + [2])
    else:
        per = tuple([1] * h + [2] + [1] * (h - 1) + [2])
    if sign < 0:
        per = tuple(-d for d in per)
    return CFExpansion(q, 0, (), per)


def _tail_class(exp: CFExpansion):
    """('finite', None) | ('periodic', canonical primitive period)
    | ('truncated', digits)."""
    if exp.period:
        p = _primitive_period(exp.period)
        # canonical rotation: lexicographically smallest
        rots = [p[k:] + p[:k] for k in range(len(p))]
        return ("periodic", min(rots))
    if exp.truncated:
        return ("truncated", exp.digits)
    return ("finite", None)


def tails_equivalent(e1: CFExpansion, e2: CFExpansion) -> bool:
    """Same regular tail up to shifts.  All finite expansions share the
    empty tail.  Truncated expansions are compared on their full available
    suffix overlap (exact only when one is a shift of the other)."""
    k1, v1 = _tail_class(e1)
    k2, v2 = _tail_class(e2)
    if k1 != k2:
        return False
    if k1 == "finite":
        return True
    if k1 == "periodic":
        return v1 == v2
    # both truncated: equivalent iff some suffix of one equals a suffix of
    # the other all the way to the common truncation point
    d1, d2 = list(v1), list(v2)
    for i in range(len(d1)):
        for j in range(len(d2)):
            if d1[i:] == d2[j:]:
                return True
    return False


def group_equivalent(e1: CFExpansion, e2: CFExpansion) -> bool:
    """G_q-equivalence of the represented points: equal regular tails, or
    one tail is that of r_q and the other that of -r_q."""
    if e1.q != e2.q:
        raise ValueError("mixed q")
    if not is_regular(e1):
        e1, _ = rewrite_to_regular(e1)
    if not is_regular(e2):
        e2, _ = rewrite_to_regular(e2)
    if tails_equivalent(e1, e2):
        return True
    rp = r_expansion(e1.q, 1)
    rm = r_expansion(e1.q, -1)
    return ((tails_equivalent(e1, rp) and tails_equivalent(e2, rm))
            or (tails_equivalent(e1, rm) and tails_equivalent(e2, rp)))
