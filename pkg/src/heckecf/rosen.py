"""Conversion between nearest-multiple expansions and Rosen-style fractions.

A Rosen fraction [r0; (e1:r1), (e2:r2), ...] represents

    r0*lam + e1/(r1*lam + e2/(r2*lam + ...))

with integer r_i >= 1 and signs e_i = +-1, while the nearest-multiple
expansion [a0; a1, a2, ...] uses numerators -1 and signed digits.  The two
digit streams determine each other: r_i = |a_i|, e_1 = -sign(a_1) and
e_{i+1} = -sign(a_i * a_{i+1}); conversely a_i = (-1)^i e_1...e_i r_i.
Reduced Rosen fractions (no runs of small digits of the shapes listed in
``is_reduced``) correspond to regular nearest-multiple expansions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

import mpmath

from .cf import CFExpansion, constants
from .field import compare, lam, sign_of

__all__ = [
    "RosenExpansion",
    "ReducednessReport",
    "to_rosen",
    "from_rosen",
    "is_reduced",
    "evaluate_rosen",
    "format_rosen",
    "parse_rosen",
    "rosen_h",
    "normalized_convergent",
]


def rosen_h(q: int) -> int:
    """Maximal run parameter floor((q-3)/2): h_q - 1 for even q, h_q odd."""
    return (q - 3) // 2


@dataclass(frozen=True)
class RosenExpansion:
    """Digits are (sign, magnitude) pairs; ``period`` repeats forever after
    ``digits``.  ``formal`` marks q=3 outputs, where the correspondence with
    reduced fractions is formal only."""

    q: int
    r0: int
    digits: tuple = ()
    period: tuple = ()
    truncated: bool = False
    formal: bool = field(default=False)

    def __post_init__(self):
        for eps, r in tuple(self.digits) + tuple(self.period):
            if eps not in (-1, 1):
                raise ValueError(f"sign must be +-1, got {eps}")
            if not isinstance(r, int) or r < 1:
                raise ValueError(f"magnitude must be a positive integer, got {r}")

    @property
    def finite(self) -> bool:
        return not self.period and not self.truncated

    def stream(self, n: int) -> tuple:
        """First n digit pairs of the (possibly periodic) stream."""
        out = list(self.digits)
        while self.period and len(out) < n:
            out.extend(self.period)
        return tuple(out[:n])


# ---------------------------------------------------------------------------
# conversions
# ---------------------------------------------------------------------------


def _sign(n: int) -> int:
    return 1 if n > 0 else -1


def to_rosen(e: CFExpansion) -> RosenExpansion:
    """Rosen form of a nearest-multiple expansion.

    The sign law is local: e_1 = -sign(a_1), e_{i+1} = -sign(a_i*a_{i+1}),
    r_i = |a_i|; a periodic digit tail therefore maps to a period of the
    same length."""
    digs = tuple(e.digits or ())
    per = tuple(e.period or ())
    for a in digs + per:
        if a == 0:
            raise ValueError("zero digit has no signed representation")

    def eps(prev: Optional[int], cur: int) -> int:
        return -_sign(cur) if prev is None else -_sign(prev * cur)

    out = []
    prev = None
    for a in digs:
        out.append((eps(prev, a), abs(a)))
        prev = a
    per_out = []
    for idx, a in enumerate(per):
        # the sign pairs with the previous digit: the last preperiod digit
        # for the first entry (wrap-around end of the period otherwise)
        before = (digs[-1] if digs else per[-1]) if idx == 0 else per[idx - 1]
        per_out.append((-_sign(before * a), abs(a)))
    if per and digs:
        # the entry-sign into the period must agree with the wrap-around
        # sign, otherwise one unrolled copy is moved into the preperiod
        if -_sign(digs[-1] * per[0]) != -_sign(per[-1] * per[0]):
            shifted = CFExpansion(e.q, e.a0, digs + (per[0],),
                                  per[1:] + (per[0],), e.truncated, e.dual)
            return to_rosen(shifted)
    return RosenExpansion(e.q, e.a0, tuple(out), tuple(per_out),
                          e.truncated, formal=(e.q == 3))


def from_rosen(r: RosenExpansion) -> CFExpansion:
    """Nearest-multiple expansion with digits a_i = (-1)^i e_1...e_i r_i.

    The cumulative sign over one period may be -1, in which case the period
    is doubled to make the signed digits repeat."""
    sign = 1  # running (-1)^i * e_1...e_i

    def step(eps: int) -> int:
        nonlocal sign
        sign = -sign * eps
        return sign

    digs = tuple(step(eps) * mag for eps, mag in r.digits)
    per: tuple = ()
    if r.period:
        factor = 1
        for eps, _ in r.period:
            factor = -factor * eps
        copies = 1 if factor == 1 else 2
        per = tuple(step(eps) * mag
                    for eps, mag in r.period * copies)
    return CFExpansion(r.q, r.r0, digs, per or None, r.truncated)


# ---------------------------------------------------------------------------
# evaluation and text form
# ---------------------------------------------------------------------------


def evaluate_rosen(r: RosenExpansion, dps: int = 50):
    """Value of the fraction: exact (element of Q(lam)) when finite,
    an mpmath real computed at ``dps`` digits otherwise."""
    if r.truncated and not r.period:
        raise ValueError("cannot evaluate a truncated expansion")
    L = lam(r.q)
    if r.finite:
        tail = None
        for eps, mag in reversed(r.digits):
            den = mag * L if tail is None else mag * L + tail
            if sign_of(den) == 0:
                raise ZeroDivisionError("degenerate fraction")
            tail = eps / den
        base = r.r0 * L
        return base if tail is None else base + tail
    with mpmath.workdps(dps + 10):
        lam_f = mpmath.mpf(2) * mpmath.cos(mpmath.pi / r.q)
        depth = max(4 * dps, 8 * len(r.period) if r.period else 0)
        stream = r.stream(len(r.digits) + depth)
        tail = mpmath.mpf(0)
        for eps, mag in reversed(stream):
            tail = eps / (mag * lam_f + tail)
        return +(r.r0 * lam_f + tail)


def format_rosen(r: RosenExpansion) -> str:
    def pair(p):
        return f"({p[0]}:{p[1]})"

    parts = [pair(p) for p in r.digits]
    if r.period:
        parts.append("(" + ", ".join(pair(p) for p in r.period) + ")*")
    if r.truncated:
        parts.append("...")
    return f"[{r.r0}; " + ", ".join(parts) + "]" if parts else f"[{r.r0};]"


_PAIR_RE = re.compile(r"\(\s*([+-]?1)\s*:\s*(\d+)\s*\)")


def parse_rosen(text: str, q: int) -> RosenExpansion:
    m = re.match(r"^\s*\[\s*([+-]?\d+)\s*;(.*)\]\s*$", text)
    if not m:
        raise ValueError(f"not a Rosen fraction: {text!r}")
    r0, body = int(m.group(1)), m.group(2).strip()
    truncated = False
    if body.endswith("..."):
        truncated, body = True, body[:-3].rstrip().rstrip(",")
    per_m = re.search(r"\(\s*(\([^)]*\)\s*(?:,\s*\([^)]*\)\s*)*)\)\s*\*\s*$",
                      body)
    period: tuple = ()
    if per_m:
        period = tuple((int(e), int(v))
                       for e, v in _PAIR_RE.findall(per_m.group(1)))
        body = body[:per_m.start()].rstrip().rstrip(",")
    digits = tuple((int(e), int(v)) for e, v in _PAIR_RE.findall(body))
    return RosenExpansion(q, r0, digits, period, truncated,
                          formal=(q == 3))


# ---------------------------------------------------------------------------
# reducedness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReducednessReport:
    """``violations`` lists (clause, 1-based digit position) for the hard
    clauses 1-4; ``ambiguities`` lists positions whose suffix evaluates to
    +-lam/2, the two-expansions case of clause 5 (reported, not enforced)."""

    reduced: bool
    violations: tuple = ()
    ambiguities: tuple = ()


def _match_run(stream, start, count) -> bool:
    """stream[start:start+count] all equal to (-1, 1)."""
    if start + count > len(stream):
        return False
    return all(stream[start + t] == (-1, 1) for t in range(count))


def is_reduced(r: RosenExpansion, ambiguity: bool = True) -> ReducednessReport:
    """Check the run restrictions of a reduced fraction.

    Clause 1 (all q): no block (*:1), (-1:1)^hR, (-1:*).
    Clause 2 (odd q): no interior block (*:1), (-1:1)^hR.
    Clause 3 (odd q): no block (*:1), (-1:1)^(hR-1), (-1:2), (-1:1)^hR, (-1:*).
    Clause 4 (odd q): a finite expansion does not end in (*:1), (-1:1)^hR.
    Clause 5 is only reported: suffixes of a finite expansion whose value is
    +-lam/2 admit a second expansion."""
    q = r.q
    hR = rosen_h(q)
    reps = 3 if r.period else 1
    stream = list(r.digits) + list(r.period) * reps
    n = len(stream)
    infinite = bool(r.period) or r.truncated
    violations = []
    for i in range(n):
        if stream[i][1] != 1:
            continue
        # clause 1: hR copies of (-1:1) then another (-1:*)
        if (_match_run(stream, i + 1, hR) and i + hR + 1 < n
                and stream[i + hR + 1][0] == -1):
            violations.append((1, i + 1))
        if q % 2 == 1:
            if _match_run(stream, i + 1, hR):
                end = i + hR + 1
                if end < n or (end == n and infinite):
                    violations.append((2, i + 1))
                elif end == n and not infinite:
                    violations.append((4, i + 1))
            if (_match_run(stream, i + 1, hR - 1)
                    and i + hR < n and stream[i + hR] == (-1, 2)
                    and _match_run(stream, i + hR + 1, hR)
                    and i + 2 * hR + 1 < n
                    and stream[i + 2 * hR + 1][0] == -1):
                violations.append((3, i + 1))
    ambiguities = []
    if ambiguity and r.finite and r.digits:
        half = constants(q)["lam_half"]
        for i in range(len(r.digits)):
            suffix = RosenExpansion(q, 0, r.digits[i:])
            try:
                v = evaluate_rosen(suffix)
            except ZeroDivisionError:
                continue
            if compare(v, half) == 0 or compare(v, -half) == 0:
                ambiguities.append(i + 1)
    return ReducednessReport(not violations, tuple(sorted(set(violations))),
                             tuple(ambiguities))


def normalized_convergent(p, qden):
    """Sign-normalized convergent pair (sign(q)*p, |q|)."""
    s = sign_of(qden)
    if s == 0:
        raise ZeroDivisionError("zero denominator")
    return (p if s > 0 else -p, qden if s > 0 else -qden)
