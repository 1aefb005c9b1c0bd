"""Command-line front end (`hecke-cf`) unifying all library modules.

Subcommands: expand, check, rewrite, compare, convergents, constants,
partition, matrix, encode, reduce, spectrum, zeta, rosen.

Exit codes: 0 success; 2 domain error (bad value, cusp, boundary, ...);
3 truncation or internal limit reached; 64 usage error.  Diagnostics go to
stderr as one JSON object per line; data goes to stdout.  Identical
invocations produce byte-identical output.

Value micro-grammar (exact, no floating-point parsing):
  * rationals            "3", "-7/2"
  * field elements       "c0 + c1*l + c2*l^2"      (l denotes lambda_q)
                         coefficient/power shorthands: "-l/2", "l^2/3", "2l"
  * special constants    "r", "-r", "R", "-R"      (the fixed-tail constants)
  * CF literals          "[1; 2, -3, (4, -2)*]"    (evaluated exactly)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from fractions import Fraction

from .field import (FieldElement, Surd, compare, field_element, lam, neg,
                    to_interval, to_json_dict)
from .cf import (CFExpansion, EvaluationError, MoebiusMap, constants,
                 convergents, evaluate, expand, format_cf, parse_cf)
from .grammar import (OrderDomainError, RewriteError, first_forbidden,
                      is_dual_regular, is_regular, r_expansion,
                      rewrite_to_regular, tails_equivalent, window_length)
from .symbolic import (AdmissibilityError, BoundaryError, ConstructionError,
                       build_partition, encode, transition_matrix)
from .natural_ext import CuspError, ReductionError, TruncationError, \
    reduce_geodesic
from .transfer import (CertificationError, DivergenceError, SpectralError,
                       assemble, leading_eigenvalue)
from .rosen import (evaluate_rosen, format_rosen, from_rosen, is_reduced,
                    parse_rosen, to_rosen)

__all__ = ["main", "parse_value"]

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_LIMIT = 3
EXIT_USAGE = 64

DEFAULT_PRECISION = 12


# ---------------------------------------------------------------------------
# value micro-grammar

_TERM_RE = re.compile(
    r"""^(?P<coef>\d+(?:/\d+)?)?      # optional rational coefficient
        \s*\*?\s*
        (?P<lam>l(?:\^(?P<pow>\d+))?)?   # optional power of l
        (?:\s*/\s*(?P<den>\d+))?$        # optional trailing divisor
    """, re.X)

_SPECIALS = {"r": ("r", 1), "-r": ("r", -1), "R": ("R", 1), "-R": ("R", -1)}


def parse_value(text: str, q: int):
    """Parse the value micro-grammar into an exact algebraic real."""
    text = text.strip()
    if not text:
        raise ValueError("empty value")
    if text in _SPECIALS:
        key, sgn = _SPECIALS[text]
        v = constants(q)[key]
        return v if sgn > 0 else neg(v)
    if text.startswith("["):
        return evaluate(parse_cf(text, q))
    # linear combination over l = lambda_q
    total = field_element(q, 0)
    pos = 0
    sign = 1
    n_terms = 0
    dangling = False
    while pos < len(text):
        ch = text[pos]
        if ch in "+-":
            if ch == "-":
                sign = -sign
            dangling = True
            pos += 1
            continue
        if ch.isspace():
            pos += 1
            continue
        nxt = len(text)
        for j in range(pos + 1, len(text)):
            if text[j] in "+-":
                nxt = j
                break
        term = text[pos:nxt].strip()
        m = _TERM_RE.match(term)
        if not m or (m.group("coef") is None and m.group("lam") is None):
            raise ValueError(f"cannot parse value term {term!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("den"):
            coef /= int(m.group("den"))
        coef *= sign
        if m.group("lam"):
            k = int(m.group("pow") or 1)
            piece = field_element(q, coef)
            for _ in range(k):
                piece = piece * lam(q)
        else:
            piece = field_element(q, coef)
        total = total + piece
        n_terms += 1
        sign = 1
        dangling = False
        pos = nxt
    if n_terms == 0 or dangling:
        raise ValueError(f"cannot parse value {text!r}")
    if all(c == 0 for c in total.coeffs[1:]):
        return total.coeffs[0]      # plain rational
    return total


def _expansion_arg(text: str, q: int, dual: bool = False,
                   max_digits: int = 256) -> CFExpansion:
    """A CF literal is taken verbatim; anything else is expanded."""
    text = text.strip()
    if text.startswith("["):
        return parse_cf(text, q, dual=dual)
    return expand(q, parse_value(text, q), dual=dual, max_digits=max_digits)


# ---------------------------------------------------------------------------
# rendering helpers

def _floor_scaled(x, scale: int) -> int:
    """Exact floor(x * scale), independent of interval refinement state."""
    lo, _ = to_interval(x, Fraction(1, 4 * scale))
    n = math.floor(lo * scale)
    while compare(x, Fraction(n + 1, scale)) >= 0:
        n += 1
    while compare(x, Fraction(n, scale)) < 0:
        n -= 1
    return n


def _round_scaled(x, scale: int) -> int:
    """Exact round-half-up of x * scale."""
    lo, _ = to_interval(x, Fraction(1, 4 * scale))
    k = math.floor(lo * scale + Fraction(1, 2))
    while compare(x, Fraction(2 * (k + 1) - 1, 2 * scale)) >= 0:
        k += 1
    while compare(x, Fraction(2 * k - 1, 2 * scale)) < 0:
        k -= 1
    return k


def decimal_str(x, prec: int) -> str:
    """Exact decimal rendering of an algebraic real to `prec` digits."""
    n = _round_scaled(x, 10 ** prec)
    sgn = "-" if n < 0 else ""
    digits = str(abs(n)).rjust(prec + 1, "0")
    if prec == 0:
        return sgn + digits
    return f"{sgn}{digits[:-prec]}.{digits[-prec:]}"


def interval_bounds(x, prec: int) -> tuple[Fraction, Fraction]:
    """Canonical enclosure on the 10^-prec grid (exact, deterministic)."""
    scale = 10 ** prec
    n = _floor_scaled(x, scale)
    lo = Fraction(n, scale)
    if compare(x, lo) == 0:
        return lo, lo
    return lo, Fraction(n + 1, scale)


def interval_strs(x, prec: int) -> list[str]:
    lo, hi = interval_bounds(x, prec)
    return [str(lo), str(hi)]


def field_str(x) -> str:
    """Exact text form in the micro-grammar ("c0 + c1*l + ...")."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, FieldElement):
        parts = []
        for k, c in enumerate(x.coeffs):
            if c == 0:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                unit = "l" if k == 1 else f"l^{k}"
                body = unit if mag == 1 else f"{mag}*{unit}"
            parts.append(("- " if c < 0 else "+ ") + body)
        if not parts:
            return "0"
        head = parts[0]
        head = "-" + head[2:] if head.startswith("- ") else head[2:]
        return " ".join([head] + parts[1:])
    return None  # Surds have no linear form; callers fall back to JSON


def value_json(x, q: int, prec: int) -> dict:
    d = to_json_dict(x, q)
    # replace the raw isolating interval (whose tightness depends on how far
    # earlier operations refined the value) with a canonical grid enclosure
    d["interval"] = [{"num": str(f.numerator), "den": str(f.denominator)}
                     for f in interval_bounds(x, prec)]
    d["decimal"] = decimal_str(x, prec)
    s = field_str(x)
    if s is not None:
        d["text"] = s
    return d


def _print(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def emit_json(obj) -> None:
    _print(json.dumps(obj, ensure_ascii=False))


def emit_csv(header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    sys.stdout.write(buf.getvalue())


def diag(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def _num(z) -> str:
    """Deterministic text form of a float/complex spectral quantity."""
    z = complex(z)
    if abs(z.imag) > 1e-12 * max(1.0, abs(z.real)):
        return f"{z.real:.15g}{z.imag:+.15g}j"
    return f"{z.real:.15g}"


# ---------------------------------------------------------------------------
# subcommand handlers; each returns an exit code

def cmd_expand(a) -> int:
    exp = expand(a.q, parse_value(a.value, a.q),
                 dual=(a.kind == "dual"), max_digits=a.max_digits)
    if a.format == "json":
        emit_json(exp.to_json_dict())
    elif a.format == "csv":
        rows = [(0, exp.a0, 0)]
        rows += [(i + 1, d, 0) for i, d in enumerate(exp.digits)]
        off = len(exp.digits)
        rows += [(off + i + 1, d, 1) for i, d in enumerate(exp.period or ())]
        emit_csv(["position", "digit", "in_period"], rows)
    else:
        _print(format_cf(exp))
    if exp.truncated:
        diag("TruncationLimit",
             f"expansion did not terminate within {a.max_digits} digits")
        return EXIT_LIMIT
    return EXIT_OK


def _scan_word(exp: CFExpansion) -> list[int]:
    word = [exp.a0] + list(exp.digits)
    if exp.period:
        reps = 2 + (window_length(exp.q) // len(exp.period) + 1)
        word += list(exp.period) * reps
    return word


def cmd_check(a) -> int:
    exp = parse_cf(a.cf, a.q, dual=(a.kind == "dual"))
    ok = is_dual_regular(exp) if a.kind == "dual" else is_regular(exp)
    word = _scan_word(exp)
    if a.kind == "dual":
        word = list(reversed(word))
    hit = first_forbidden(a.q, word)
    found = None
    if hit is not None:
        found = {"index": hit[0], "length": hit[1], "kind": hit[2]}
    if a.format == "json":
        emit_json({"q": a.q, "cf": format_cf(exp), "kind": a.kind,
                   "ok": ok, "first_forbidden": found})
    else:
        _print(("regular" if a.kind == "regular" else "dual-regular")
               if ok else "forbidden block at index "
               f"{found['index']} ({found['kind']})" if found
               else "not regular")
    return EXIT_OK


def cmd_rewrite(a) -> int:
    exp = parse_cf(a.cf, a.q)
    out, trace = rewrite_to_regular(exp)
    if a.format == "json":
        emit_json({"q": a.q, "input": format_cf(exp),
                   "output": format_cf(out),
                   "trace": {"steps": [{"rule": r, "index": i}
                                       for r, i in trace.steps],
                             "n_steps": trace.n_steps(),
                             "cascade": trace.cascade,
                             "verified_value": trace.verified_value}})
    else:
        _print(format_cf(out))
        note = f"steps: {trace.n_steps()}"
        if trace.cascade:
            note += " (periodic cascade, value verified exactly)"
        _print(note)
    return EXIT_OK


def cmd_compare(a) -> int:
    e1 = _expansion_arg(a.x, a.q, max_digits=a.max_digits)
    e2 = _expansion_arg(a.y, a.q, max_digits=a.max_digits)
    if not is_regular(e1):
        e1, _ = rewrite_to_regular(e1)
    if not is_regular(e2):
        e2, _ = rewrite_to_regular(e2)
    if tails_equivalent(e1, e2):
        relation = "equivalent"
    else:
        rp, rm = r_expansion(a.q, 1), r_expansion(a.q, -1)
        if ((tails_equivalent(e1, rp) and tails_equivalent(e2, rm))
                or (tails_equivalent(e1, rm) and tails_equivalent(e2, rp))):
            relation = "equivalent_via_r_exception"
        else:
            relation = "not_equivalent"
    if a.format == "json":
        emit_json({"q": a.q, "x": format_cf(e1), "y": format_cf(e2),
                   "relation": relation,
                   "equivalent": relation != "not_equivalent"})
    else:
        _print(relation)
    return EXIT_OK


def cmd_convergents(a) -> int:
    exp = _expansion_arg(a.value, a.q, max_digits=a.max_digits)
    n = a.n
    avail = len(exp.digits) if exp.period is None else None
    if avail is not None and n > avail:
        n = avail
    pairs = convergents(exp, n)
    prec = a.precision
    if a.format == "json":
        emit_json({"q": a.q, "cf": format_cf(exp),
                   "convergents": [
                       {"k": k, "p": field_str(p), "q": field_str(qd),
                        "value": decimal_str(p / qd, prec)
                        if compare(qd, field_element(a.q, 0)) != 0 else None}
                       for k, (p, qd) in enumerate(pairs)]})
    else:
        rows = []
        for k, (p, qd) in enumerate(pairs):
            val = (decimal_str(p / qd, prec)
                   if compare(qd, field_element(a.q, 0)) != 0 else "")
            rows.append((k, field_str(p), field_str(qd), val))
        if a.format == "csv":
            emit_csv(["k", "p", "q", "value"], rows)
        else:
            for k, p, qd, val in rows:
                _print(f"{k}: ({p}) / ({qd})" + (f" = {val}" if val else ""))
    return EXIT_OK


def cmd_constants(a) -> int:
    d = constants(a.q)
    prec = a.precision
    names = ("lam", "lam_half", "R", "r")
    if a.format == "json":
        emit_json({"q": a.q, "h": d["h"], "kappa": d["kappa"],
                   **{k: value_json(d[k], a.q, prec) for k in names}})
    elif a.format == "csv":
        rows = [("q", a.q, ""), ("h", d["h"], ""), ("kappa", d["kappa"], "")]
        for k in names:
            rows.append((k, decimal_str(d[k], prec),
                         field_str(d[k]) or ""))
        emit_csv(["name", "value", "exact"], rows)
    else:
        _print(f"q = {a.q}")
        _print(f"h = {d['h']}")
        _print(f"kappa = {d['kappa']}")
        for k in names:
            lo, hi = interval_strs(d[k], prec)
            exact = field_str(d[k])
            tail = f" = {exact}" if exact else ""
            _print(f"{k} = {decimal_str(d[k], prec)} in [{lo}, {hi}]{tail}")
    return EXIT_OK


def cmd_partition(a) -> int:
    part = build_partition(a.q, a.map, a.cutoff)
    prec = a.precision
    cells = [{"label": c.label,
              "lo": value_json(c.lo, a.q, prec),
              "hi": value_json(c.hi, a.q, prec)} for c in part.cells]
    if a.format == "json":
        emit_json({"q": a.q, "map": a.map, "cutoff": a.cutoff,
                   "alphabet": [c.label for c in part.cells],
                   "cells": cells,
                   "successors": {l: list(s)
                                  for l, s in sorted(part.successors.items())}})
    elif a.format == "csv":
        rows = [(c.label, decimal_str(part.cell(c.label).lo, prec),
                 decimal_str(part.cell(c.label).hi, prec),
                 " ".join(part.successors[c.label])) for c in part.cells]
        emit_csv(["label", "lo", "hi", "successors"], rows)
    else:
        for c in part.cells:
            _print(f"{c.label}: [{decimal_str(c.lo, prec)}, "
                   f"{decimal_str(c.hi, prec)}] -> "
                   + " ".join(part.successors[c.label]))
    return EXIT_OK


def cmd_matrix(a) -> int:
    tm = transition_matrix(a.q, a.map, a.cutoff)
    if a.dot:
        _print(tm.to_dot())
        return EXIT_OK
    if a.format == "json":
        emit_json(tm.to_json_dict())
    elif a.format == "csv":
        emit_csv([""] + list(tm.alphabet),
                 [(lab, *row) for lab, row in zip(tm.alphabet, tm.rows)])
    else:
        width = max(len(l) for l in tm.alphabet)
        _print(" " * (width + 1) + " ".join(tm.alphabet))
        for lab, row in zip(tm.alphabet, tm.rows):
            _print(lab.rjust(width) + "  "
                   + " ".join(str(v).rjust(len(b))
                              for v, b in zip(row, tm.alphabet)))
    return EXIT_OK


def cmd_encode(a) -> int:
    symbols = encode(a.q, parse_value(a.value, a.q), a.map, a.n, a.cutoff)
    if a.format == "json":
        emit_json({"q": a.q, "map": a.map, "n": a.n,
                   "symbols": list(symbols)})
    elif a.format == "csv":
        emit_csv(["step", "symbol"], list(enumerate(symbols)))
    else:
        _print(" ".join(symbols))
    return EXIT_OK


def cmd_reduce(a) -> int:
    wm = parse_value(a.omega_minus, a.q)
    wp = parse_value(a.omega_plus, a.q)
    res = reduce_geodesic(wm, wp, a.q, max_steps=a.max_steps,
                          max_digits=a.max_digits)
    word = " ".join(res.word) if res.word else "1"
    ent = [field_str(e) for e in res.g.entries()]
    prec = a.precision
    if a.format == "json":
        emit_json({"q": a.q, "word": word, "steps": res.steps,
                   "matrix": {"a": ent[0], "b": ent[1],
                              "c": ent[2], "d": ent[3]},
                   "omega_minus": value_json(res.w_minus, a.q, prec),
                   "omega_plus": value_json(res.w_plus, a.q, prec)})
    else:
        _print(f"g = {word}")
        _print(f"matrix = [{ent[0]}, {ent[1]}; {ent[2]}, {ent[3]}]")
        _print(f"omega_minus = {decimal_str(res.w_minus, prec)}")
        _print(f"omega_plus = {decimal_str(res.w_plus, prec)}")
    return EXIT_OK


def _spectral_row(q: int, beta: float, order: int, cutoff):
    import numpy as np
    m = assemble(q, beta, order, digit_cutoff=cutoff)
    eigs = np.linalg.eigvals(m.matrix)
    lam_max = eigs[int(np.argmax(np.abs(eigs)))]
    det = complex(np.prod(1.0 - eigs))
    return lam_max, det, m.error_bound


def cmd_spectrum(a) -> int:
    lam_max, det, err = _spectral_row(a.q, a.beta, a.order, a.cutoff)
    if a.format == "json":
        emit_json({"q": a.q, "beta": a.beta, "order": a.order,
                   "lambda_max": _num(lam_max), "det": _num(det),
                   "error_bound": _num(err)})
    elif a.format == "text":
        _print(f"beta = {a.beta:.15g}")
        _print(f"lambda_max = {_num(lam_max)}")
        _print(f"det(1 - L) = {_num(det)}")
        _print(f"error_bound = {_num(err)}")
    else:
        emit_csv(["beta", "lambda_max", "det", "error_bound"],
                 [(f"{a.beta:.15g}", _num(lam_max), _num(det), _num(err))])
    return EXIT_OK


_GRID_RE = re.compile(r"^([^:]+):([^:]+):([^:]+)$")


def cmd_zeta(a) -> int:
    m = _GRID_RE.match(a.beta_grid.strip())
    if m is None:
        raise ValueError("beta grid must be start:stop:step")
    lo, hi, step = (Fraction(g) for g in m.groups())
    if step <= 0 or hi < lo:
        raise ValueError("beta grid must satisfy start <= stop, step > 0")
    rows = []
    b = lo
    while b <= hi:
        try:
            lam_max, det, err = _spectral_row(a.q, float(b), a.order, a.cutoff)
            rows.append((f"{float(b):.15g}", _num(lam_max),
                         _num(det), _num(err)))
        except DivergenceError as e:
            diag("DivergenceError", f"beta={float(b):.15g}: {e}")
        b += step
    if a.format == "json":
        emit_json({"q": a.q, "order": a.order,
                   "rows": [{"beta": r[0], "lambda_max": r[1],
                             "det": r[2], "error_bound": r[3]}
                            for r in rows]})
    else:
        emit_csv(["beta", "lambda_max", "det", "error_bound"], rows)
    return EXIT_OK


def cmd_rosen(a) -> int:
    prec = a.precision
    if a.to is not None:
        exp = parse_cf(a.to, a.q)
        ros = to_rosen(exp)
        if a.format == "json":
            rep = is_reduced(ros)
            emit_json({"q": a.q, "cf": format_cf(exp),
                       "rosen": format_rosen(ros),
                       "formal": ros.formal,
                       "reduced": rep.reduced,
                       "violations": [list(v) for v in rep.violations],
                       "ambiguities": list(rep.ambiguities)})
        else:
            _print(format_rosen(ros))
            if ros.formal:
                diag("Formal", "q=3 conversion is formal")
    else:
        ros = parse_rosen(a.from_, a.q)
        exp = from_rosen(ros)
        if a.format == "json":
            emit_json({"q": a.q, "rosen": format_rosen(ros),
                       "cf": format_cf(exp),
                       "value": str(evaluate_rosen(ros, dps=prec))
                       if not ros.truncated or ros.period else None})
        else:
            _print(format_cf(exp))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        diag("UsageError", message)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    p = _Parser(prog="hecke-cf",
                description="Exact nearest-multiple continued fractions "
                            "for Hecke triangle groups.")
    sub = p.add_subparsers(dest="subcommand", required=True,
                           parser_class=_Parser)

    def common(sp, formats=("text", "json", "csv")):
        sp.add_argument("--q", type=int, required=True,
                        help="Hecke group index (>= 3)")
        sp.add_argument("--format", choices=formats, default="text")
        sp.add_argument("--precision", type=int, default=None,
                        help="decimal digits for interval output "
                             "(default: HECKE_CF_PRECISION or "
                             f"{DEFAULT_PRECISION})")
        return sp

    sp = common(sub.add_parser("expand", help="expand a value into a CF"))
    sp.add_argument("--value", required=True)
    sp.add_argument("--kind", choices=("regular", "dual"), default="regular")
    sp.add_argument("--max-digits", type=int, default=256)
    sp.set_defaults(func=cmd_expand)

    sp = common(sub.add_parser("check", help="test a CF for regularity"))
    sp.add_argument("--cf", required=True)
    sp.add_argument("--kind", choices=("regular", "dual"), default="regular")
    sp.set_defaults(func=cmd_check)

    sp = common(sub.add_parser("rewrite",
                               help="rewrite a CF into regular form"))
    sp.add_argument("--cf", required=True)
    sp.set_defaults(func=cmd_rewrite)

    sp = common(sub.add_parser("compare",
                               help="decide group equivalence of two points"))
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--max-digits", type=int, default=256)
    sp.set_defaults(func=cmd_compare)

    sp = common(sub.add_parser("convergents", help="convergents p_k/q_k"))
    sp.add_argument("--value", required=True)
    sp.add_argument("-n", type=int, default=10)
    sp.add_argument("--max-digits", type=int, default=256)
    sp.set_defaults(func=cmd_convergents)

    sp = common(sub.add_parser("constants", help="per-q constants"))
    sp.set_defaults(func=cmd_constants)

    sp = common(sub.add_parser("partition", help="Markov partition cells"))
    sp.add_argument("--map", choices=("f", "fstar"), default="f")
    sp.add_argument("--cutoff", type=int, default=8)
    sp.set_defaults(func=cmd_partition)

    sp = common(sub.add_parser("matrix", help="transition matrix"))
    sp.add_argument("--map", choices=("f", "fstar"), default="f")
    sp.add_argument("--cutoff", type=int, default=8)
    sp.add_argument("--dot", action="store_true",
                    help="emit GraphViz DOT instead of the matrix")
    sp.set_defaults(func=cmd_matrix)

    sp = common(sub.add_parser("encode", help="symbolic coding of a point"))
    sp.add_argument("--value", required=True)
    sp.add_argument("--map", choices=("f", "fstar"), default="f")
    sp.add_argument("-n", type=int, default=10)
    sp.add_argument("--cutoff", type=int, default=8)
    sp.set_defaults(func=cmd_encode)

    sp = common(sub.add_parser("reduce",
                               help="reduce a geodesic into the two-sided "
                                    "domain"))
    sp.add_argument("--omega-minus", required=True)
    sp.add_argument("--omega-plus", required=True)
    sp.add_argument("--max-steps", type=int, default=64)
    sp.add_argument("--max-digits", type=int, default=128)
    sp.set_defaults(func=cmd_reduce)

    sp = common(sub.add_parser("spectrum",
                               help="truncated transfer-operator spectrum"),
                formats=("csv", "json", "text"))
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--order", type=int, default=16)
    sp.add_argument("--cutoff", type=int, default=None,
                    help="digit cutoff for direct summation "
                         "(default: closed-form tails)")
    sp.set_defaults(func=cmd_spectrum, format="csv")

    sp = common(sub.add_parser("zeta",
                               help="spectral data on a beta grid"),
                formats=("csv", "json", "text"))
    sp.add_argument("--beta-grid", required=True,
                    help="start:stop:step (exact rationals)")
    sp.add_argument("--order", type=int, default=16)
    sp.add_argument("--cutoff", type=int, default=None)
    sp.set_defaults(func=cmd_zeta, format="csv")

    sp = common(sub.add_parser("rosen",
                               help="convert between CF and Rosen digits"))
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--to", metavar="CF",
                   help="CF literal to convert into Rosen form")
    g.add_argument("--from", dest="from_", metavar="ROSEN",
                   help="Rosen literal to convert into a CF")
    sp.set_defaults(func=cmd_rosen)

    return p


_DOMAIN_ERRORS = (EvaluationError, RewriteError, OrderDomainError,
                  BoundaryError, AdmissibilityError, CuspError,
                  ReductionError, DivergenceError, ZeroDivisionError,
                  ValueError)
_LIMIT_ERRORS = (TruncationError, ConstructionError, SpectralError,
                 CertificationError)


# flags whose arguments may legitimately start with "-" (negative values,
# CF literals with negative digits); joined as --flag=value so the argument
# parser does not mistake them for options
_VALUE_FLAGS = {"--value", "--cf", "--x", "--y", "--omega-minus",
                "--omega-plus", "--to", "--from", "--beta", "--beta-grid"}


def _join_value_flags(argv) -> list[str]:
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = _join_value_flags(list(argv))
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    if args.precision is None:
        env = os.environ.get("HECKE_CF_PRECISION", "")
        try:
            args.precision = int(env) if env else DEFAULT_PRECISION
        except ValueError:
            args.precision = DEFAULT_PRECISION
    if args.precision < 1 or args.precision > 1000:
        diag("DomainError", "precision must be between 1 and 1000")
        return EXIT_DOMAIN
    if args.q < 3:
        diag("DomainError", f"q must be >= 3, got {args.q}")
        return EXIT_DOMAIN
    try:
        return args.func(args)
    except _LIMIT_ERRORS as e:
        diag(type(e).__name__, str(e))
        return EXIT_LIMIT
    except _DOMAIN_ERRORS as e:
        diag(type(e).__name__, str(e))
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
