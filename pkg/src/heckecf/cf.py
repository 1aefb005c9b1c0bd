"""Nearest lambda_q-multiple continued fractions.

x = a0*lam + (-1)/(a1*lam + (-1)/(a2*lam + ...)), written [a0; a1, a2, ...].
Digits are produced by the Gauss-type interval maps f (regular, on
[-lam/2, lam/2]) and f* (dual, on [-R, R]).  All digit decisions are exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from .field import (
    AlgebraicReal, FieldElement, Surd, compare, field_element, lam,
    lambda_float, make_surd, minimal_polynomial, moebius, sign_of,
    to_interval,
)

__all__ = [
    "h_q", "kappa_q", "MoebiusMap", "CFExpansion", "modified_floor",
    "nearest_multiple", "nearest_multiple_dual", "f_step", "fstar_step",
    "expand", "evaluate", "convergents", "constants", "parse_cf", "format_cf",
    "word_matrix", "EvaluationError",
]


class EvaluationError(ValueError):
    pass


def h_q(q: int) -> int:
    return (q - 2) // 2 if q % 2 == 0 else (q - 3) // 2


def kappa_q(q: int) -> int:
    return h_q(q) if q % 2 == 0 else q - 2


# ---------------------------------------------------------------------------
# Moebius maps with entries in Q(lambda_q)

class MoebiusMap:
    """2x2 matrix (a b; c d) over Q(lambda_q) acting by z -> (az+b)/(cz+d)."""

    __slots__ = ("q", "a", "b", "c", "d")

    def __init__(self, q, a, b, c, d):
        self.q = q
        self.a = field_element(q, a)
        self.b = field_element(q, b)
        self.c = field_element(q, c)
        self.d = field_element(q, d)

    @staticmethod
    def identity(q):
        return MoebiusMap(q, 1, 0, 0, 1)

    @staticmethod
    def S(q):
        return MoebiusMap(q, 0, -1, 1, 0)

    @staticmethod
    def T(q, n=1):
        return MoebiusMap(q, 1, n * lam(q), 0, 1)

    def __matmul__(self, o: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap(
            self.q,
            self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inverse(self) -> "MoebiusMap":
        det = self.det()
        return MoebiusMap(self.q, self.d / det, -self.b / det,
                          -self.c / det, self.a / det)

    def det(self) -> FieldElement:
        return self.a * self.d - self.b * self.c

    def apply(self, x: AlgebraicReal) -> AlgebraicReal:
        return moebius(self.q, (self.a, self.b, self.c, self.d), x)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __eq__(self, o):
        if not isinstance(o, MoebiusMap):
            return NotImplemented
        return self.q == o.q and self.entries() == o.entries()

    def proportional_to(self, o: "MoebiusMap") -> bool:
        """Equal as Moebius transformations (projectively)."""
        return (self.a * o.b == self.b * o.a and self.a * o.c == self.c * o.a
                and self.a * o.d == self.d * o.a and self.b * o.c == self.c * o.b
                and self.b * o.d == self.d * o.b and self.c * o.d == self.d * o.c)

    def __hash__(self):
        return hash((self.q, self.entries()))

    def __repr__(self):
        return f"MoebiusMap(q={self.q}, [{self.a}, {self.b}; {self.c}, {self.d}])"


def word_matrix(q: int, a0: int, digits) -> MoebiusMap:
    """T^{a0} S T^{a1} ... S T^{an} for digit word a1..an."""
    m = MoebiusMap.T(q, a0)
    S = MoebiusMap.S(q)
    for a in digits:
        m = m @ S @ MoebiusMap.T(q, a)
    return m


# ---------------------------------------------------------------------------
# digit functions

def _approx(x: AlgebraicReal) -> float:
    if isinstance(x, int):
        return float(x)
    if isinstance(x, Fraction):
        return x.numerator / x.denominator
    return float(x)


def _mfloor_oracle(cmp, seed: float) -> int:
    """Modified floor of t given cmp(n) = sign(t - n): the integer n with
    n < t <= n+1 when t > 0, and n <= t < n+1 when t <= 0."""
    n = math.floor(seed)
    if cmp(0) > 0:
        while cmp(n) <= 0:
            n -= 1
        while cmp(n + 1) > 0:
            n += 1
    else:
        while cmp(n) < 0:
            n -= 1
        while cmp(n + 1) >= 0:
            n += 1
    return n


def modified_floor(x: AlgebraicReal) -> int:
    """Floor with the convention floor(n) = n - 1 at positive integers n."""
    xf = _approx(x)
    return _mfloor_oracle(lambda n: compare(x, n), xf)


def nearest_multiple(q: int, x: AlgebraicReal) -> int:
    """Digit <x> = modified_floor(x/lam + 1/2); x - <x>*lam lands in I_q."""
    t_seed = _approx(x) / lambda_float(q) + 0.5
    l = lam(q)

    def cmp(n):  # sign of (x/lam + 1/2 - n) = sign of (x - (n - 1/2) lam)
        return compare(x, l * Fraction(2 * n - 1, 2))

    return _mfloor_oracle(cmp, t_seed)


def nearest_multiple_dual(q: int, x: AlgebraicReal,
                          R: AlgebraicReal | None = None) -> int:
    """Dual digit: the unique b with x - b*lam in the half-open window
    (-R, R].  The upper endpoint is the one kept fixed, so the dual
    expansion of R starts with digit 0 and an exact hit on -R steps off the
    boundary instead of freezing there."""
    if R is None:
        R = constants(q)["R"]
    l = lam(q)
    Rf = _approx(R)
    lf = lambda_float(q)
    if sign_of(x) >= 0:
        t_seed = _approx(x) / lf + 1 - Rf / lf

        def cmp(n):  # sign of (x - (R + (n-1) lam)); rem <= R iff cmp(b+1)<=0
            return compare(x, _shift(R, l * (n - 1)))
    else:
        t_seed = _approx(x) / lf + Rf / lf

        def cmp(n):  # sign of (x - (n lam - R)); rem > -R iff cmp(b) > 0
            return compare(x, _shift(-R, l * n))
    # largest n with cmp(n) > 0 (strict: boundary hits round down)
    n = math.floor(t_seed)
    while cmp(n) <= 0:
        n -= 1
    while cmp(n + 1) > 0:
        n += 1
    return n


def _shift(x: AlgebraicReal, k: FieldElement) -> AlgebraicReal:
    if isinstance(x, Surd):
        return moebius(x.q, (1, k, 0, 1), x)
    return field_element(k.q, x) + k


def _is_zero(x: AlgebraicReal) -> bool:
    return sign_of(x) == 0


def f_step(q: int, x: AlgebraicReal) -> tuple[int, AlgebraicReal]:
    """One step of the regular map: digit a = <-1/x>, remainder -1/x - a*lam."""
    if _is_zero(x):
        raise ZeroDivisionError("f is not defined by a digit at 0")
    y = moebius(q, (0, -1, 1, 0), x)
    a = nearest_multiple(q, y)
    rem = moebius(q, (1, -a * lam(q), 0, 1), y)
    return a, rem


def fstar_step(q: int, x: AlgebraicReal,
               R: AlgebraicReal | None = None) -> tuple[int, AlgebraicReal]:
    """One step of the dual map on [-R, R]."""
    if _is_zero(x):
        raise ZeroDivisionError("f* is not defined by a digit at 0")
    if R is None:
        R = constants(q)["R"]
    y = moebius(q, (0, -1, 1, 0), x)
    a = nearest_multiple_dual(q, y, R)
    rem = moebius(q, (1, -a * lam(q), 0, 1), y)
    return a, rem


# ---------------------------------------------------------------------------
# expansions

@dataclass(frozen=True)
class CFExpansion:
    """[a0; d1, ..., dk, (p1, ..., pm)*]; period=None and truncated=False
    means finite.  ``dual`` marks expansions produced by the dual algorithm."""

    q: int
    a0: int
    digits: tuple[int, ...]
    period: Optional[tuple[int, ...]] = None
    truncated: bool = False
    dual: bool = False

    def digit(self, i: int) -> int:
        """a_i for i >= 1 (a_0 is ``a0``)."""
        if i < 1:
            raise IndexError("digit index starts at 1")
        j = i - 1
        if j < len(self.digits):
            return self.digits[j]
        if self.period:
            return self.period[(j - len(self.digits)) % len(self.period)]
        raise IndexError(f"digit {i} beyond available expansion")

    def n_known(self) -> int:
        return len(self.digits)

    @property
    def finite(self) -> bool:
        return self.period is None and not self.truncated

    def all_digits(self, n: int) -> list[int]:
        return [self.digit(i) for i in range(1, n + 1)]

    def __str__(self):
        return format_cf(self)

    def to_json_dict(self) -> dict:
        return {"q": self.q, "a0": self.a0, "digits": list(self.digits),
                "period": list(self.period) if self.period else None,
                "truncated": self.truncated, "dual": self.dual}

    @staticmethod
    def from_json_dict(d) -> "CFExpansion":
        return CFExpansion(int(d["q"]), int(d["a0"]),
                           tuple(int(x) for x in d["digits"]),
                           tuple(int(x) for x in d["period"]) if d.get("period") else None,
                           bool(d.get("truncated", False)),
                           bool(d.get("dual", False)))


def _remainder_key(x: AlgebraicReal):
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return ("r", x)
    if isinstance(x, FieldElement):
        return ("f", x.coeffs)
    return ("s", x.monic_key())


def _values_equal(x: AlgebraicReal, y: AlgebraicReal) -> bool:
    try:
        return compare(x, y) == 0
    except ValueError:
        return False


def expand(q: int, x: AlgebraicReal, dual: bool = False,
           max_digits: int = 256) -> CFExpansion:
    """Expand x; detects termination and eventual periodicity exactly.

    Non-cycling expansions are truncated at max_digits and flagged.
    """
    consts = constants(q)
    R = consts["R"]
    if isinstance(x, int):
        x = Fraction(x)
    if dual:
        a0 = nearest_multiple_dual(q, x, R)
    else:
        a0 = nearest_multiple(q, x)
    rem = _shift(x, -a0 * lam(q))
    digits: list[int] = []
    seen: dict = {}
    for i in range(max_digits):
        if _is_zero(rem):
            return CFExpansion(q, a0, tuple(digits), None, False, dual)
        key = _remainder_key(rem)
        bucket = seen.setdefault(key, [])
        for j, prev in bucket:
            if _values_equal(rem, prev):
                return CFExpansion(q, a0, tuple(digits[:j]),
                                   tuple(digits[j:]), False, dual)
        bucket.append((len(digits), rem))
        if dual:
            a, rem = fstar_step(q, rem, R)
        else:
            a, rem = f_step(q, rem)
        digits.append(a)
    return CFExpansion(q, a0, tuple(digits), None, True, dual)


def evaluate(exp: CFExpansion, allow_truncated: bool = False) -> AlgebraicReal:
    """Exact value of a finite or eventually periodic expansion.

    Periodic tails are resolved to the attracting fixed point of the period
    word; an elliptic or parabolic period word raises EvaluationError.
    """
    q = exp.q
    if exp.truncated and not allow_truncated:
        raise EvaluationError("expansion was truncated; no exact value")
    pre = word_matrix(q, exp.a0, exp.digits)
    if not exp.period:
        if pre.d.is_zero():
            raise EvaluationError("finite word sends 0 to infinity")
        return pre.apply(Fraction(0))
    S = MoebiusMap.S(q)
    P = MoebiusMap.identity(q)
    for p in exp.period:
        P = P @ S @ MoebiusMap.T(q, p)
    t = _attracting_fixed_point(P)
    return pre.apply(t)


def _attracting_fixed_point(P: MoebiusMap) -> AlgebraicReal:
    """Attracting fixed point of a hyperbolic Moebius map, exact."""
    q = P.q
    a, b, c, d = P.entries()
    if c.is_zero():
        diff = a - d
        if diff.is_zero():
            raise EvaluationError("period word is a translation or identity")
        return b / diff
    # c t^2 + (d - a) t - b = 0
    A, B, C = c, d - a, -b
    disc = B * B - 4 * A * C
    sdisc = disc.sign()
    if sdisc < 0:
        raise EvaluationError("period word is elliptic")
    if sdisc == 0:
        raise EvaluationError("period word is parabolic")
    # isolate the two roots numerically, then certify the brackets exactly
    dps = 40
    while True:
        with mpmath.workdps(dps):
            lv = 2 * mpmath.cos(mpmath.pi / q)

            def fe_val(u):
                return sum(mpmath.mpf(cc.numerator) / cc.denominator * lv**i
                           for i, cc in enumerate(u.coeffs))
            Av, Bv, Cv = fe_val(A), fe_val(B), fe_val(C)
            sq = mpmath.sqrt(Bv * Bv - 4 * Av * Cv)
            roots = sorted([(-Bv - sq) / (2 * Av), (-Bv + sq) / (2 * Av)])
            sep = roots[1] - roots[0]
            cands = []
            ok = True
            for rv in roots:
                eps = sep / 4
                lo = Fraction(str(mpmath.nstr(rv - eps, 30)))
                hi = Fraction(str(mpmath.nstr(rv + eps, 30)))
                s = make_surd(q, A, B, C, lo, hi) if \
                    _sign_change(q, A, B, C, lo, hi) else None
                if s is None:
                    ok = False
                    break
                cands.append(s)
        if ok:
            break
        dps *= 2
        if dps > 1000:
            raise EvaluationError("failed to isolate fixed points")
    for t in cands:
        # attracting <=> |c t + d| > 1 <=> c(a+d) t + (cb + d^2) - 1 > 0
        alpha = c * (a + d)
        beta = c * b + d * d - 1
        val = moebius(q, (alpha, beta, 0, 1), t)
        if sign_of(val) > 0:
            return t
    raise EvaluationError("no attracting fixed point found")


def _sign_change(q, A, B, C, lo, hi) -> bool:
    plo = ((A * lo + B) * lo + C).sign()
    phi = ((A * hi + B) * hi + C).sign()
    return plo * phi < 0


def convergents(exp: CFExpansion, n: int) -> list[tuple[FieldElement, FieldElement]]:
    """(p_k, q_k) for k = 0..n with p_k = a_k lam p_{k-1} - p_{k-2};
    p_0/q_0 = a_0 lam and p_k/q_k = [a0; a1, ..., ak]."""
    q = exp.q
    l = lam(q)
    one = field_element(q, 1)
    zero = field_element(q, 0)
    p_prev2, p_prev = zero, one       # p_{-2}, p_{-1}
    q_prev2, q_prev = -one, zero      # q_{-2}, q_{-1}
    out = []
    for k in range(0, n + 1):
        ak = exp.a0 if k == 0 else exp.digit(k)
        pk = ak * l * p_prev - p_prev2
        qk = ak * l * q_prev - q_prev2
        out.append((pk, qk))
        p_prev2, p_prev = p_prev, pk
        q_prev2, q_prev = q_prev, qk
    return out


# ---------------------------------------------------------------------------
# per-q constants

_const_cache: dict[int, dict] = {}


def constants(q: int) -> dict:
    """h, kappa, lam, R, r and friends.  R = 1 for even q; for odd q it is
    the root of R^2 + (2 - lam) R - 1 = 0 in (lam/2, 1]; r = R - lam."""
    if q in _const_cache:
        return _const_cache[q]
    l = lam(q)
    if q % 2 == 0:
        R: AlgebraicReal = field_element(q, 1)
        r: AlgebraicReal = field_element(q, 1) - l
    else:
        lf = lambda_float(q)
        num = (-(2 - lf) + math.sqrt((2 - lf) ** 2 + 4)) / 2
        lo = Fraction(num - 1e-3).limit_denominator(10**9)
        hi = Fraction(num + 1e-3).limit_denominator(10**9)
        R = make_surd(q, 1, 2 - l, -1, lo, hi)
        r = moebius(q, (1, -l, 0, 1), R)
    d = {
        "q": q,
        "h": h_q(q),
        "kappa": kappa_q(q),
        "lam": l,
        "lam_half": l / 2,
        "R": R,
        "r": r,
    }
    _const_cache[q] = d
    return d


# ---------------------------------------------------------------------------
# text syntax: [a0; d1, d2, (p1, p2)*]  with optional trailing ", ..." for
# truncated expansions

_CF_RE = re.compile(
    r"""^\s*\[\s*(-?\d+)\s*;\s*(.*?)\s*\]\s*$""", re.X)


def format_cf(exp: CFExpansion) -> str:
    parts = [str(d) for d in exp.digits]
    if exp.period:
        parts.append("(" + ", ".join(str(p) for p in exp.period) + ")*")
    if exp.truncated:
        parts.append("...")
    return f"[{exp.a0}; " + ", ".join(parts) + "]" if parts else f"[{exp.a0};]"


def parse_cf(text: str, q: int, dual: bool = False) -> CFExpansion:
    m = _CF_RE.match(text)
    if not m:
        raise ValueError(f"not a valid continued fraction literal: {text!r}")
    a0 = int(m.group(1))
    body = m.group(2)
    digits: list[int] = []
    period: Optional[tuple[int, ...]] = None
    truncated = False
    if body:
        pm = re.search(r"\(\s*([-\d,\s]+)\s*\)\s*\*\s*$", body)
        if pm:
            period = tuple(int(t) for t in pm.group(1).split(","))
            body = body[:pm.start()].rstrip().rstrip(",")
        if body.rstrip().endswith("..."):
            truncated = True
            body = body.rstrip().rstrip(".").rstrip().rstrip(",")
        if body.strip():
            digits = [int(t) for t in body.split(",")]
    if period is not None and truncated:
        raise ValueError("expansion cannot be both periodic and truncated")
    return CFExpansion(q, a0, tuple(digits), period, truncated, dual)
