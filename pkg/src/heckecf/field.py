"""Exact arithmetic in Q(lambda_q), lambda_q = 2*cos(pi/q).

Elements of the number field are polynomials in lambda_q with Fraction
coefficients, reduced modulo the minimal polynomial.  All sign and
comparison decisions are made with rational interval arithmetic around a
certified isolating interval for lambda_q; no floating point enters any
exactness-critical path.

Quadratic irrationalities over the field (fixed points of hyperbolic
Moebius maps) are represented by their quadratic equation together with a
rational isolating interval exhibiting a sign change at the endpoints.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import sympy

__all__ = [
    "minimal_polynomial",
    "lam",
    "field_element",
    "FieldElement",
    "Surd",
    "AlgebraicReal",
    "sign_of",
    "compare",
    "to_interval",
    "neg",
    "moebius",
    "make_surd",
    "as_field",
    "to_json_dict",
    "from_json_dict",
    "lambda_float",
]


# ---------------------------------------------------------------------------
# rational intervals

class Iv:
    """Closed rational interval [lo, hi]; plain arithmetic, no rounding."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        if self.lo > self.hi:
            raise ValueError("empty interval")

    def __add__(self, other):
        if isinstance(other, Iv):
            return Iv(self.lo + other.lo, self.hi + other.hi)
        return Iv(self.lo + other, self.hi + other)

    def __neg__(self):
        return Iv(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Iv) else -Fraction(other))

    def __mul__(self, other):
        if not isinstance(other, Iv):
            other = Iv(other, other)
        cands = (self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi)
        return Iv(min(cands), max(cands))

    def recip(self):
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return Iv(1 / self.hi, 1 / self.lo)

    def contains_zero(self):
        return self.lo <= 0 <= self.hi

    def width(self):
        return self.hi - self.lo

    def sign(self):
        """+1/-1 if the interval is strictly one-signed, else None."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        return None

    def __repr__(self):
        return f"Iv({self.lo}, {self.hi})"


def _simple_below(t: Fraction, limit: int) -> Fraction:
    c = t.limit_denominator(limit)
    if c > t:
        c -= Fraction(1, limit)
    return c


def _simple_above(t: Fraction, limit: int) -> Fraction:
    c = t.limit_denominator(limit)
    if c < t:
        c += Fraction(1, limit)
    return c


def _poly_eval_iv(coeffs, x: Iv) -> Iv:
    """Horner evaluation of a Fraction-coefficient polynomial on an interval."""
    acc = Iv(0, 0)
    for c in reversed(coeffs):
        acc = acc * x + Fraction(c)
    return acc


def _poly_eval(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + Fraction(c)
    return acc


# ---------------------------------------------------------------------------
# minimal polynomial of lambda_q and the isolating interval

_minpoly_cache: dict[int, tuple[int, ...]] = {}
_lam_iv_cache: dict[int, Iv] = {}


def minimal_polynomial(q: int) -> tuple[int, ...]:
    """Monic integer minimal polynomial of lambda_q, low-to-high coefficients.

    lambda_q is a root of 2*T_q(x/2) + 2 (Chebyshev T); the minimal
    polynomial is the irreducible factor vanishing at the numeric root,
    certified by an exact sign change around a rational bracket.
    """
    if q < 3:
        raise ValueError("q must be >= 3")
    if q in _minpoly_cache:
        return _minpoly_cache[q]
    x = sympy.Symbol("x")
    ann = sympy.expand(2 * sympy.chebyshevt(q, x / 2) + 2)
    lam_num = 2 * math.cos(math.pi / q)
    lo = Fraction(lam_num - 1e-6).limit_denominator(10**12)
    hi = Fraction(lam_num + 1e-6).limit_denominator(10**12)
    chosen = None
    for fac, _mult in sympy.factor_list(sympy.Poly(ann, x))[1]:
        cs = [int(c) for c in reversed(fac.all_coeffs())]
        if cs[-1] < 0:
            cs = [-c for c in cs]
        if _poly_eval(cs, lo) * _poly_eval(cs, hi) < 0:
            if chosen is not None:
                raise RuntimeError("ambiguous factor bracket")
            chosen = tuple(cs)
    if chosen is None or chosen[-1] != 1:
        raise RuntimeError(f"failed to isolate minimal polynomial for q={q}")
    _minpoly_cache[q] = chosen
    # the bracket that selected the factor also certifies root isolation
    # (conjugate roots of lambda_q are separated by far more than 2e-6)
    _lam_iv_cache[q] = Iv(lo, hi)
    return chosen


def _lam_interval(q: int, width: Fraction) -> Iv:
    """Rational isolating interval for lambda_q of at most the given width."""
    mp = minimal_polynomial(q)  # also seeds _lam_iv_cache
    iv = _lam_iv_cache[q]
    while iv.width() > width:
        iv = _bisect_once(mp, iv)
        _lam_iv_cache[q] = iv
    return iv


def _bisect_once(coeffs, iv: Iv) -> Iv:
    mid = (iv.lo + iv.hi) / 2
    vm = _poly_eval(coeffs, mid)
    if vm == 0:  # lambda_q rational only for q=3; handled by degree-1 minpoly
        return Iv(mid, mid)
    if _poly_eval(coeffs, iv.lo) * vm < 0:
        return Iv(iv.lo, mid)
    return Iv(mid, iv.hi)


def lambda_float(q: int) -> float:
    return 2 * math.cos(math.pi / q)


# ---------------------------------------------------------------------------
# field elements

def _reduce_mod(coeffs: list[Fraction], q: int) -> tuple[Fraction, ...]:
    mp = minimal_polynomial(q)
    deg = len(mp) - 1
    cs = list(coeffs)
    while len(cs) > deg:
        top = cs.pop()
        if top:
            for i in range(deg):
                cs[len(cs) - deg + i] -= top * mp[i]
    while len(cs) < deg:
        cs.append(Fraction(0))
    return tuple(cs)


@dataclass(frozen=True)
class FieldElement:
    """An element of Q(lambda_q): coeffs[i] is the coefficient of lambda^i."""

    q: int
    coeffs: tuple[Fraction, ...]

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.q != self.q:
                raise ValueError("mixed field degrees")
            return other
        if isinstance(other, (int, Fraction)):
            return field_element(self.q, Fraction(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.q, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.q, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = len(self.coeffs)
        prod = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                if b:
                    prod[i + j] += a * b
        return FieldElement(self.q, _reduce_mod(prod, self.q))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("field element is zero")
        # extended Euclid in Q[x] against the minimal polynomial
        mp = [Fraction(c) for c in minimal_polynomial(self.q)]
        a = list(self.coeffs)
        r0, r1 = mp, _trim(a)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while _deg(r1) > 0:
            qp, rem = _pdivmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _psub(s0, _pmul(qp, s1))
        c = r1[0]  # nonzero constant: minpoly irreducible
        inv = [x / c for x in s1]
        return FieldElement(self.q, _reduce_mod(inv, self.q))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = field_element(self.q, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is irrational")
        return self.coeffs[0]

    def sign(self) -> int:
        if self.is_zero():
            return 0
        if self.is_rational():
            c = self.coeffs[0]
            return (c > 0) - (c < 0)
        width = Fraction(1, 64)
        while True:
            iv = _poly_eval_iv(self.coeffs, _lam_interval(self.q, width))
            s = iv.sign()
            if s is not None:
                return s
            width /= 16

    def interval(self, width: Fraction) -> Iv:
        w = Fraction(1, 64)
        iv = _poly_eval_iv(self.coeffs, _lam_interval(self.q, w))
        while iv.width() > width:
            w /= 16
            iv = _poly_eval_iv(self.coeffs, _lam_interval(self.q, w))
        return iv

    def __float__(self):
        iv = self.interval(Fraction(1, 10**17))
        return float((iv.lo + iv.hi) / 2)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            o = self._coerce(other)
            return self.q == o.q and self.coeffs == o.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.q, self.coeffs))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*l")
            else:
                terms.append(f"{c}*l^{i}")
        return " + ".join(terms) if terms else "0"


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _deg(p):
    return len(_trim(p)) - 1


def _psub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _pdivmod(a, b):
    a = _trim(a)
    b = _trim(b)
    if b == [0]:
        raise ZeroDivisionError
    quo = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    rem = list(a)
    while _deg(rem) >= _deg(b) and rem != [0]:
        shift = _deg(rem) - _deg(b)
        coef = rem[-1] / b[-1]
        quo[shift] += coef
        for i, c in enumerate(b):
            rem[shift + i] -= coef * c
        rem = _trim(rem)
        if rem == [0]:
            break
    return _trim(quo), _trim(rem)


def field_element(q: int, value) -> FieldElement:
    deg = len(minimal_polynomial(q)) - 1
    if isinstance(value, FieldElement):
        if value.q != q:
            raise ValueError("mixed field degrees")
        return value
    if isinstance(value, (int, Fraction)):
        cs = [Fraction(value)] + [Fraction(0)] * (deg - 1)
        return FieldElement(q, tuple(cs))
    if isinstance(value, (list, tuple)):
        return FieldElement(q, _reduce_mod([Fraction(c) for c in value], q))
    raise TypeError(f"cannot make a field element from {value!r}")


def lam(q: int) -> FieldElement:
    deg = len(minimal_polynomial(q)) - 1
    if deg == 1:  # q = 3: lambda = 1
        return FieldElement(q, (Fraction(1),))
    cs = [Fraction(0)] * deg
    cs[1] = Fraction(1)
    return FieldElement(q, tuple(cs))


# ---------------------------------------------------------------------------
# quadratic surds over the field

class Surd:
    """Real root of a*x^2 + b*x + c (a, b, c in Q(lambda_q), a != 0),
    isolated by a rational interval (lo, hi) with sign(p(lo)) != sign(p(hi)).

    The represented value is irrational over Q(lambda_q) whenever the
    quadratic is irreducible; ``make_surd`` degrades reducible cases to
    FieldElement, so in practice values here are genuinely quadratic.
    """

    __slots__ = ("q", "a", "b", "c", "lo", "hi")

    def __init__(self, q, a, b, c, lo, hi):
        self.q = q
        self.a = field_element(q, a)
        self.b = field_element(q, b)
        self.c = field_element(q, c)
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        if self.a.is_zero():
            raise ValueError("leading coefficient vanishes; not a quadratic")
        if self._p_sign(self.lo) * self._p_sign(self.hi) >= 0:
            raise ValueError("interval does not certify a sign change")

    def _p_at(self, t: Fraction) -> FieldElement:
        return (self.a * t + self.b) * t + self.c

    def _p_sign(self, t: Fraction) -> int:
        return self._p_at(t).sign()

    def refine(self, width: Fraction) -> None:
        slo = self._p_sign(self.lo)
        while self.hi - self.lo > width:
            mid = (self.lo + self.hi) / 2
            sm = self._p_sign(mid)
            if sm == 0:
                # mid is a root inside the isolating bracket, hence the
                # represented value itself: pin the interval
                self.lo = self.hi = mid
                return
            if sm == slo:
                self.lo = mid
            else:
                self.hi = mid
        self.simplify_bracket(width)

    def simplify_bracket(self, width=None) -> None:
        """Swap the bracket endpoints for nearby low-complexity rationals.

        Widening (by at most width/4) keeps the represented root inside; an
        exact sign change at the new endpoints certifies it is still the
        only root in between.  Keeps endpoint bit-sizes bounded across long
        Moebius orbits without defeating a requested precision.
        """
        if self.lo == self.hi:
            return
        if width is None:
            width = self.hi - self.lo
        if (self.lo.denominator.bit_length() < 64
                and self.hi.denominator.bit_length() < 64):
            return
        pad = Fraction(width) / 8
        den_limit = max(10**10, 8 * (1 + pad.denominator // max(1, pad.numerator)))
        cl = _simple_below(self.lo - pad, den_limit)
        ch = _simple_above(self.hi + pad, den_limit)
        if cl > self.lo:
            cl = self.lo
        if ch < self.hi:
            ch = self.hi
        if (cl, ch) != (self.lo, self.hi):
            if self._p_sign(cl) * self._p_sign(ch) < 0:
                self.lo, self.hi = cl, ch

    def interval(self, width: Fraction) -> Iv:
        self.refine(width)
        return Iv(self.lo, self.hi)

    def sign(self) -> int:
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        # zero is a root iff c == 0; it is the represented root iff inside
        if self.c.is_zero() and self.lo < 0 < self.hi:
            return 0
        width = self.hi - self.lo
        while self.lo <= 0 <= self.hi:
            width /= 16
            self.refine(width)
            if self.lo == self.hi:  # pinned rational value
                v = self.lo
                return (v > 0) - (v < 0)
        return 1 if self.lo > 0 else -1

    def __neg__(self):
        return Surd(self.q, self.a, -self.b, self.c, -self.hi, -self.lo)

    def __float__(self):
        self.refine(Fraction(1, 10**17))
        return float((self.lo + self.hi) / 2)

    def monic_key(self):
        """Hashable key identifying the quadratic up to scaling."""
        ai = self.a.inverse()
        return ((self.b * ai).coeffs, (self.c * ai).coeffs)

    def __repr__(self):
        return (f"Surd(q={self.q}, [{self.a}]x^2 + [{self.b}]x + [{self.c}], "
                f"({self.lo}, {self.hi}))")


def make_surd(q, a, b, c, lo, hi) -> "AlgebraicReal":
    """Build the root of a x^2 + b x + c isolated by (lo, hi), degrading to a
    FieldElement when the quadratic degenerates (a = 0 or zero discriminant)."""
    a = field_element(q, a)
    b = field_element(q, b)
    c = field_element(q, c)
    if a.is_zero():
        if b.is_zero():
            raise ValueError("degenerate equation")
        return -c / b
    disc = b * b - 4 * a * c
    if disc.is_zero():
        return -b / (2 * a)
    return Surd(q, a, b, c, lo, hi)


AlgebraicReal = Union[Fraction, int, FieldElement, Surd]


def as_field(q: int, x) -> FieldElement:
    if isinstance(x, Surd):
        raise TypeError("surd is not a field element")
    return field_element(q, x)


def _field_iv(x: FieldElement, width: Fraction) -> Iv:
    return x.interval(width)


def sign_of(x: AlgebraicReal) -> int:
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    return x.sign()


def neg(x: AlgebraicReal):
    return -x


def to_interval(x: AlgebraicReal, width=Fraction(1, 10**12)) -> tuple[Fraction, Fraction]:
    width = Fraction(width)
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return (x, x)
    iv = x.interval(width)
    return (iv.lo, iv.hi)


def _compare_field(x: FieldElement, y) -> int:
    return (x - y).sign()


def _surd_vs_field(s: Surd, k: FieldElement) -> int:
    """Sign of (s - k), exact."""
    pk = (s.a * k + s.b) * k + s.c
    if pk.is_zero():
        # k is a root of the quadratic; equal iff k lies inside the bracket
        kl = _compare_field(k, Fraction(s.lo))
        kh = _compare_field(k, Fraction(s.hi))
        if kl > 0 and kh < 0:
            return 0
        # k is the other root; fall through to separation by refinement
    width = s.hi - s.lo
    while True:
        if _compare_field(k, Fraction(s.lo)) <= 0:
            return 1
        if _compare_field(k, Fraction(s.hi)) >= 0:
            return -1
        width /= 16
        s.refine(width)
        if s.lo == s.hi:  # value pinned to an exact rational
            return -_compare_field(k, Fraction(s.lo))


def _quad_common_root(s: Surd, t: Surd):
    """If the two quadratics (same q) share a root, return it as a
    FieldElement, or the string "proportional"; else None."""
    a1, b1, c1 = s.a, s.b, s.c
    a2, b2, c2 = t.a, t.b, t.c
    # eliminate the quadratic term: r(x) = a2*p1(x) - a1*p2(x), degree <= 1
    rb = a2 * b1 - a1 * b2
    rc = a2 * c1 - a1 * c2
    if rb.is_zero() and rc.is_zero():
        return "proportional"
    if rb.is_zero():
        return None  # nonzero constant: no common root
    root = -rc / rb
    if ((a1 * root + b1) * root + c1).is_zero():
        return root
    return None


def _surd_vs_surd(s: Surd, t: Surd) -> int:
    common = _quad_common_root(s, t)
    if common == "proportional":
        # same pair of roots; equal iff they isolate the same one
        while True:
            if s.hi <= t.lo:
                return -1 if s.hi < t.lo else _prop_touch(s, t)
            if t.hi <= s.lo:
                return 1 if t.hi < s.lo else _prop_touch(s, t)
            # overlapping: if a common bracket isolates one root, equal
            lo, hi = min(s.lo, t.lo), max(s.hi, t.hi)
            if s._p_sign(lo) * s._p_sign(hi) < 0:
                return 0
            s.refine((s.hi - s.lo) / 16)
            t.refine((t.hi - t.lo) / 16)
    # distinct quadratics share at most one root, and it lies in the field
    if isinstance(common, FieldElement):
        if _surd_vs_field(s, common) == 0 and _surd_vs_field(t, common) == 0:
            return 0
    while True:
        if s.hi < t.lo:
            return -1
        if t.hi < s.lo:
            return 1
        if s.hi == t.lo or t.hi == s.lo:
            # rational endpoints never equal the irrational values
            return -1 if s.hi <= t.lo else 1
        s.refine((s.hi - s.lo) / 16)
        t.refine((t.hi - t.lo) / 16)


def _prop_touch(s: Surd, t: Surd) -> int:
    # intervals touch at a rational endpoint; values are irrational, refine
    s.refine((s.hi - s.lo) / 16)
    t.refine((t.hi - t.lo) / 16)
    return _surd_vs_surd(s, t)


def compare(x: AlgebraicReal, y: AlgebraicReal) -> int:
    """Exact three-way comparison: -1, 0, +1."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(y, int):
        y = Fraction(y)
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return (x > y) - (x < y)
    if isinstance(x, Surd) and isinstance(y, Surd):
        if x.q != y.q:
            raise ValueError("mixed field degrees")
        return _surd_vs_surd(x, y)
    if isinstance(x, Surd):
        return _surd_vs_field(x, field_element(x.q, y))
    if isinstance(y, Surd):
        return -_surd_vs_field(y, field_element(y.q, x))
    # at least one FieldElement
    q = x.q if isinstance(x, FieldElement) else y.q
    return _compare_field(field_element(q, x), field_element(q, y))


# ---------------------------------------------------------------------------
# Moebius action on algebraic reals

def moebius(q: int, m, x: AlgebraicReal) -> AlgebraicReal:
    """Apply (a x + b)/(c x + d), entries field elements of Q(lambda_q)."""
    a, b, c, d = (field_element(q, t) for t in m)
    det = a * d - b * c
    if det.is_zero():
        raise ValueError("singular transformation")
    if not isinstance(x, Surd):
        x = field_element(q, x)
        den = c * x + d
        if den.is_zero():
            raise ZeroDivisionError("point maps to infinity")
        return (a * x + b) / den
    return _moebius_surd((a, b, c, d), x)


def _iv_of_field(v: FieldElement, width) -> Iv:
    return v.interval(width)


def _moebius_surd(m, s: Surd) -> AlgebraicReal:
    a, b, c, d = m
    q = s.q
    # substitute x = (d y - b)/(-c y + a) into A x^2 + B x + C = 0
    A, B, C = s.a, s.b, s.c
    na = A * d * d - B * c * d + C * c * c
    nb = -2 * A * b * d + B * (a * d + b * c) - 2 * C * a * c
    nc = A * b * b - B * a * b + C * a * a
    if na.is_zero():
        # degenerates to a linear equation => value is a field element;
        # impossible for an irrational surd under an invertible map, but be
        # safe (the quadratic might have had a reducible factor).
        return -nc / nb
    width = s.hi - s.lo
    fw = Fraction(1, 1024)
    while True:
        xiv = Iv(s.lo, s.hi)
        try:
            den_iv = _iv_of_field(c, fw) * xiv + _iv_of_field(d, fw)
            if den_iv.contains_zero():
                raise ZeroDivisionError
            num_iv = _iv_of_field(a, fw) * xiv + _iv_of_field(b, fw)
            h = num_iv * den_iv.recip()
        except ZeroDivisionError:
            width /= 16
            fw /= 16
            s.refine(width)
            continue
        lo, hi = h.lo, h.hi
        pl = ((na * lo + nb) * lo + nc).sign()
        ph = ((na * hi + nb) * hi + nc).sign()
        if pl * ph < 0:
            out = Surd(q, na, nb, nc, lo, hi)
            out.simplify_bracket()
            return out
        # endpoints may coincide with the other root, or the hull may still
        # contain both roots: tighten and retry
        width /= 16
        fw /= 16
        s.refine(width)
        if s.lo == s.hi:  # value got pinned rational along the way
            x = field_element(q, 0) + s.lo
            den = c * x + d
            return (a * x + b) / den


# ---------------------------------------------------------------------------
# JSON serialization

def _frac_json(f: Fraction) -> dict:
    return {"num": str(f.numerator), "den": str(f.denominator)}


def _frac_from_json(d) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


def to_json_dict(x: AlgebraicReal, q: int | None = None) -> dict:
    """Schema: {"q", "kind": rational|field|surd, ...exact payload...,
    "interval": [lo, hi] rational enclosure}."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return {"q": q, "kind": "rational", "value": _frac_json(x),
                "interval": [_frac_json(x), _frac_json(x)]}
    if isinstance(x, FieldElement):
        iv = x.interval(Fraction(1, 10**12))
        return {"q": x.q, "kind": "field",
                "coeffs": [_frac_json(c) for c in x.coeffs],
                "interval": [_frac_json(iv.lo), _frac_json(iv.hi)]}
    if isinstance(x, Surd):
        x.refine(Fraction(1, 10**12))
        return {"q": x.q, "kind": "surd",
                "quad": {"a": [_frac_json(c) for c in x.a.coeffs],
                         "b": [_frac_json(c) for c in x.b.coeffs],
                         "c": [_frac_json(c) for c in x.c.coeffs]},
                "interval": [_frac_json(x.lo), _frac_json(x.hi)]}
    raise TypeError(f"not an algebraic real: {x!r}")


def from_json_dict(d: dict) -> AlgebraicReal:
    kind = d["kind"]
    if kind == "rational":
        return _frac_from_json(d["value"])
    q = int(d["q"])
    if kind == "field":
        return FieldElement(q, tuple(_frac_from_json(c) for c in d["coeffs"]))
    if kind == "surd":
        a = FieldElement(q, tuple(_frac_from_json(c) for c in d["quad"]["a"]))
        b = FieldElement(q, tuple(_frac_from_json(c) for c in d["quad"]["b"]))
        c = FieldElement(q, tuple(_frac_from_json(c) for c in d["quad"]["c"]))
        lo = _frac_from_json(d["interval"][0])
        hi = _frac_from_json(d["interval"][1])
        return Surd(q, a, b, c, lo, hi)
    raise ValueError(f"unknown kind {kind!r}")


def to_json(x: AlgebraicReal, q: int | None = None) -> str:
    return json.dumps(to_json_dict(x, q), sort_keys=True)
