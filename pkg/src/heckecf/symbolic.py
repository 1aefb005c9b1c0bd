"""Markov partitions and symbolic dynamics for the interval maps.

The two piecewise-Moebius maps (the digit-generating map on I = [-lam/2,
lam/2] and its dual on [-R, R]) admit finite Markov partitions built from the
orbits of the left interval endpoints.  This module constructs those
partitions exactly, derives the cell-to-cell transition structure from the
exact dynamics, and provides the projection between points and symbol
sequences (encode/decode).

Cell labels are strings: "1_2" is the second refined cell of digit +1,
"-2_4" a refined cell of digit -2, "3" / "-3" plain digit cells, and
"T" / "-T" the two tail classes that stand for all digits beyond the
explicit cutoff.  Positive-digit cells live on the negative half-axis.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .field import AlgebraicReal, FieldElement, compare, lam, moebius
from .cf import (
    CFExpansion, constants, evaluate, f_step, fstar_step, h_q, kappa_q,
)

__all__ = [
    "BoundaryError", "ConstructionError", "AdmissibilityError",
    "Cell", "MarkovPartition", "TransitionMatrix",
    "orbit_points", "build_partition", "transition_matrix",
    "encode", "decode", "word_admissible",
]


class BoundaryError(ValueError):
    """A point fell on a partition boundary; the symbol is ambiguous."""


class ConstructionError(RuntimeError):
    """A cell image failed to be an exact union of cells."""


class AdmissibilityError(ValueError):
    """A symbol pair is not allowed by the transition structure."""


# ---------------------------------------------------------------------------
# boundary orbits


def _dual_cf_of_minus_R(q: int) -> CFExpansion:
    """Dual expansion of -R (mirror of the dual expansion of R)."""
    h = h_q(q)
    if q == 3:
        return CFExpansion(q, 0, (2,), (3,), dual=True)
    if q % 2 == 0:
        return CFExpansion(q, 0, (1,) * h, (2,) + (1,) * (h - 1), dual=True)
    return CFExpansion(q, 0, (1,) * h,
                       (2,) + (1,) * h + (2,) + (1,) * (h - 1), dual=True)


def _shifted_value(exp: CFExpansion, n: int) -> AlgebraicReal:
    """Value of the expansion with the first n digits removed."""
    digits = list(exp.digits)
    period = list(exp.period)
    if n <= len(digits):
        digits = digits[n:]
    else:
        k = (n - len(digits)) % len(period)
        digits = []
        period = period[k:] + period[:k]
    return evaluate(CFExpansion(exp.q, 0, tuple(digits), tuple(period) or None,
                                dual=exp.dual))


@lru_cache(maxsize=None)
def orbit_points(q: int, tag: str) -> tuple:
    """Ordered boundary orbit (phi_i for tag 'f', psi_i for 'fstar').

    Returns the points with indices 0..kappa, reindexed so that they are
    increasing; index 0 is the left interval endpoint.  For the dual map the
    orbit is read off the shifts of the dual expansion of -R, which encodes
    the one-sided limits used at partition boundaries.
    """
    if tag not in ("f", "fstar"):
        raise ValueError("tag must be 'f' or 'fstar'")
    h, kappa = h_q(q), kappa_q(q)
    if tag == "f":
        raw = [-lam(q) / 2]
        for _ in range(kappa):
            _, x = f_step(q, raw[-1])
            raw.append(x)
        assert raw[-1].is_zero() if isinstance(raw[-1], FieldElement) \
            else compare(raw[-1], Fraction(0)) == 0, "orbit failed to close"

        def pick(n):
            return raw[n]
    else:
        exp = _dual_cf_of_minus_R(q)
        raw = [_shifted_value(exp, n) for n in range(kappa + 2)]

        def pick(n):
            return raw[n]

    if q % 2 == 0:
        pts = [pick(i) for i in range(kappa + 1)]
    else:
        pts = [None] * (kappa + 1)
        for i in range(h + 1):
            pts[2 * i] = pick(i)
            if 2 * i + 1 <= kappa:
                pts[2 * i + 1] = pick(h + i + 1)
    for a, b in zip(pts, pts[1:]):
        assert compare(a, b) < 0, "orbit points out of order"
    return tuple(pts)


# ---------------------------------------------------------------------------
# cells


@dataclass(frozen=True)
class Cell:
    """One partition cell.  eps is the digit sign; mag is None for a tail
    class; sub indexes refined cells of the same digit."""
    eps: int
    mag: Optional[int]
    sub: Optional[int]
    lo: AlgebraicReal
    hi: AlgebraicReal

    @property
    def digit(self) -> Optional[int]:
        return None if self.mag is None else self.eps * self.mag

    @property
    def label(self) -> str:
        s = "-" if self.eps < 0 else ""
        if self.mag is None:
            return s + "T"
        if self.sub is None:
            return s + str(self.mag)
        return f"{s}{self.mag}_{self.sub}"

    def mirrored(self) -> "Cell":
        return Cell(-self.eps, self.mag, self.sub, _neg(self.hi), _neg(self.lo))

    def contains(self, x: AlgebraicReal) -> bool:
        return compare(self.lo, x) <= 0 and compare(x, self.hi) <= 0


def parse_label(label: str) -> tuple[int, Optional[int], Optional[int]]:
    """Inverse of Cell.label: returns (eps, mag, sub)."""
    eps = 1
    if label.startswith("-"):
        eps, label = -1, label[1:]
    if label == "T":
        return eps, None, None
    if "_" in label:
        m, i = label.split("_")
        return eps, int(m), int(i)
    return eps, int(label), None


def _neg(x: AlgebraicReal):
    if isinstance(x, Fraction):
        return -x
    if isinstance(x, FieldElement):
        return -x
    return -x  # Surd supports __neg__


def _branch_image(q: int, m: int, x: AlgebraicReal) -> AlgebraicReal:
    """-1/x - m*lam applied to x (the digit-m branch of either map)."""
    la = lam(q)
    one = la / la
    return moebius(q, (-(m * la), -one, one, one - one), x)


def _theta(q: int, m: int, x: AlgebraicReal) -> AlgebraicReal:
    """Inverse branch: -1/(x + m*lam)."""
    la = lam(q)
    one = la / la
    return moebius(q, (one - one, -one, one, m * la), x)


def _digit_cell_bounds(q: int, tag: str, m: int):
    """Exact endpoints of the plain digit-m cell (m >= first plain digit)."""
    la = lam(q)
    one = la / la
    if tag == "f":
        lo = -(one + one) / ((2 * m - 1) * la)
        hi = -(one + one) / ((2 * m + 1) * la)
        return lo, hi
    r = constants(q)["r"]
    lo = _theta(q, m, r)        # -1/(r + m*lam)
    hi = _theta(q, m + 1, r)    # -1/(r + (m+1)*lam)
    return lo, hi


def _positive_cells(q: int, tag: str, M: int) -> list[Cell]:
    """Cells of positive digit (negative half-axis), ordered left to right."""
    h, kappa = h_q(q), kappa_q(q)
    la = lam(q)
    one = la / la
    cells: list[Cell] = []
    if tag == "f":
        phi = orbit_points(q, "f")
        if q == 3:
            cells.append(Cell(1, 2, None, Fraction(-1, 2), Fraction(-2, 5)))
            first_plain = 3
        elif q % 2 == 0:
            for i in range(1, kappa):
                cells.append(Cell(1, 1, i, phi[i - 1], phi[i]))
            cells.append(Cell(1, 1, kappa, phi[kappa - 1],
                              -(one + one) / (3 * la)))
            first_plain = 2
        else:
            for i in range(1, kappa - 1):
                cells.append(Cell(1, 1, i, phi[i - 1], phi[i]))
            j1 = -(one + one) / (3 * la)
            j2 = -(one + one) / (5 * la)
            cells.append(Cell(1, 1, kappa - 1, phi[kappa - 2], j1))
            cells.append(Cell(1, 2, kappa - 1, j1, phi[kappa - 1]))
            cells.append(Cell(1, 2, kappa, phi[kappa - 1], j2))
            first_plain = 3
    else:
        psi = orbit_points(q, "fstar")
        if q == 3:
            first_plain = 2
        elif q % 2 == 0:
            for i in range(1, kappa + 1):
                cells.append(Cell(1, 1, i, psi[i - 1], psi[i]))
            first_plain = 2
        else:
            for i in range(1, kappa):
                cells.append(Cell(1, 1, i, psi[i - 1], psi[i]))
            r = constants(q)["r"]
            cells.append(Cell(1, 2, kappa, psi[kappa - 1], psi[kappa]))
            cells.append(Cell(1, 2, kappa + 1, psi[kappa], _theta(q, 3, r)))
            first_plain = 3
    for m in range(first_plain, M + 1):
        lo, hi = _digit_cell_bounds(q, tag, m)
        cells.append(Cell(1, m, None, lo, hi))
    tail_lo, _ = _digit_cell_bounds(q, tag, M + 1)
    cells.append(Cell(1, None, None, tail_lo, Fraction(0)))
    return cells


# ---------------------------------------------------------------------------
# partition


@dataclass(frozen=True)
class MarkovPartition:
    q: int
    tag: str
    cutoff: int
    phi: tuple          # orbit of the left endpoint of the base interval
    psi: tuple          # orbit of -R under the dual map
    cells: tuple        # all cells, ordered left to right across the interval
    images: dict        # label -> (lo, hi) exact image interval
    successors: dict    # label -> tuple of labels tiling the image

    def cell(self, label: str) -> Cell:
        return self._by_label[label]

    @property
    def _by_label(self):
        return {c.label: c for c in self.cells}

    def locate(self, x: AlgebraicReal) -> Cell:
        """Cell containing x; raises BoundaryError on any cell boundary."""
        cells = self.cells
        if compare(x, cells[0].lo) < 0 or compare(x, cells[-1].hi) > 0:
            raise ValueError("point outside the partition interval")
        for c in cells:
            cl, ch = compare(c.lo, x), compare(x, c.hi)
            if cl == 0 or (ch == 0):
                raise BoundaryError(f"point lies on a boundary of cell {c.label}")
            if cl < 0 and ch < 0:
                return c
        raise BoundaryError("point lies on a boundary")

    def fold(self, label: str) -> str:
        """Collapse a digit beyond the cutoff into its tail class."""
        eps, mag, sub = parse_label(label)
        if mag is not None and sub is None and mag > self.cutoff:
            return "T" if eps > 0 else "-T"
        return label


def _tile_check(image_lo, image_hi, cells: list[Cell], owner: str):
    """The image interval must be tiled exactly by the given cells."""
    if not cells:
        raise ConstructionError(f"image of {owner} contains no cell")
    if compare(cells[0].lo, image_lo) != 0:
        raise ConstructionError(f"image of {owner}: left end not a boundary")
    if compare(cells[-1].hi, image_hi) != 0:
        raise ConstructionError(f"image of {owner}: right end not a boundary")
    for a, b in zip(cells, cells[1:]):
        if compare(a.hi, b.lo) != 0:
            raise ConstructionError(f"image of {owner} has a gap at {a.label}")


@lru_cache(maxsize=None)
def build_partition(q: int, tag: str, cutoff: int = 8) -> MarkovPartition:
    if q < 3:
        raise ValueError("q must be >= 3")
    min_cut = 3 if (q % 2 == 1 and q >= 5) else 2
    if cutoff < min_cut:
        raise ValueError(f"cutoff must be >= {min_cut} for q={q}")
    pos = _positive_cells(q, tag, cutoff)
    neg = [c.mirrored() for c in reversed(pos)]
    cells = tuple(pos + neg)
    # exact cover / disjointness of the whole interval
    c0 = constants(q)
    left = -lam(q) / 2 if tag == "f" else orbit_points(q, "fstar")[0]
    if compare(cells[0].lo, left) != 0:
        raise ConstructionError("cells do not start at the interval endpoint")
    for a, b in zip(cells, cells[1:]):
        if compare(a.hi, b.lo) != 0:
            raise ConstructionError(f"gap between cells {a.label}, {b.label}")
        if compare(a.lo, a.hi) >= 0:
            raise ConstructionError(f"cell {a.label} is degenerate")
    # images and successors, derived from the exact dynamics
    images, successors = {}, {}
    R = c0["R"]
    for c in pos:
        if c.mag is None:       # tail class: union of all branches beyond M
            if tag == "f":
                lo, hi = -lam(q) / 2, lam(q) / 2
            else:
                lo, hi = orbit_points(q, "fstar")[1], R  # [r, R]
        else:
            lo = _branch_image(q, c.digit, c.lo)
            hi = _branch_image(q, c.digit, c.hi)
        succ = [d for d in cells
                if compare(lo, d.lo) <= 0 and compare(d.hi, hi) <= 0]
        _tile_check(lo, hi, succ, c.label)
        images[c.label] = (lo, hi)
        successors[c.label] = tuple(d.label for d in succ)
    by_label = {d.label: d for d in cells}
    for c in pos:               # mirror symmetry
        m = c.mirrored()
        lo, hi = images[c.label]
        images[m.label] = (_neg(hi), _neg(lo))
        successors[m.label] = tuple(
            by_label[l].mirrored().label for l in reversed(successors[c.label]))
    phi = orbit_points(q, "f")
    psi = orbit_points(q, "fstar")
    return MarkovPartition(q, tag, cutoff, phi, psi, cells, images, successors)


# ---------------------------------------------------------------------------
# transition matrix


@dataclass(frozen=True)
class TransitionMatrix:
    q: int
    tag: str
    cutoff: int
    alphabet: tuple     # ordered labels
    rows: tuple         # tuple of tuples of 0/1

    def index(self, label: str) -> int:
        return self.alphabet.index(label)

    def allowed(self, a: str, b: str) -> bool:
        return bool(self.rows[self.index(a)][self.index(b)])

    def to_json_dict(self) -> dict:
        return {"q": self.q, "map": self.tag, "cutoff": self.cutoff,
                "alphabet": list(self.alphabet),
                "rows": [list(r) for r in self.rows]}

    def to_dot(self) -> str:
        lines = ["digraph transitions {", "  rankdir=LR;"]
        for a in self.alphabet:
            lines.append(f'  "{a}";')
        for i, a in enumerate(self.alphabet):
            for j, b in enumerate(self.alphabet):
                if self.rows[i][j]:
                    lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines)


def transition_matrix(q: int, tag: str, cutoff: int = 8) -> TransitionMatrix:
    part = build_partition(q, tag, cutoff)
    alphabet = tuple(c.label for c in part.cells)
    idx = {l: i for i, l in enumerate(alphabet)}
    rows = []
    for a in alphabet:
        row = [0] * len(alphabet)
        for b in part.successors[a]:
            row[idx[b]] = 1
        rows.append(tuple(row))
    return TransitionMatrix(q, tag, cutoff, alphabet, tuple(rows))


# ---------------------------------------------------------------------------
# encode / decode


def encode(q: int, x: AlgebraicReal, tag: str = "f", n: int = 10,
           cutoff: int = 8) -> tuple[str, ...]:
    """Symbol sequence of the first n iterates of x under the chosen map.

    Symbols carry the true digit (no tail folding); refined cells are
    resolved by exact location.  Landing exactly on a cell boundary (or on 0)
    raises BoundaryError.
    """
    part = build_partition(q, tag, cutoff)
    out = []
    cur = x
    for _ in range(n):
        cell = part.locate(cur)     # raises BoundaryError at boundaries
        if cell.mag is None:
            # inside the tail region: recover the true digit from the step
            d, nxt = (f_step(q, cur) if tag == "f"
                      else fstar_step(q, cur))
            out.append(str(d))
        else:
            d, nxt = (f_step(q, cur) if tag == "f"
                      else fstar_step(q, cur))
            if d != cell.digit:
                raise ConstructionError(
                    f"digit {d} disagrees with cell {cell.label}")
            out.append(cell.label)
        cur = nxt
    return tuple(out)


def _admissible_pair(part: MarkovPartition, a: str, b: str) -> bool:
    return part.fold(b) in part.successors[part.fold(a)]


def _label_cell(part: MarkovPartition, label: str) -> Cell:
    """Cell for a label, constructing plain digit cells beyond the cutoff."""
    eps, mag, sub = parse_label(label)
    folded = part.fold(label)
    if folded == label or sub is not None:
        try:
            return part.cell(label)
        except KeyError:
            pass
    if mag is None:
        return part.cell(folded)
    lo, hi = _digit_cell_bounds(part.q, part.tag, mag)
    if eps < 0:
        lo, hi = _neg(hi), _neg(lo)
    return Cell(eps, mag, sub, lo, hi)


def decode(q: int, symbols, tag: str = "f", period=None, cutoff: int = 8):
    """Inverse of encode.

    Without a period: returns ("interval", lo, hi), the exact nested-cell
    interval determined by the symbols.  With a period (a further symbol
    list repeated forever): returns ("point", value) with the exact value.
    Inadmissible consecutive symbols raise AdmissibilityError.
    """
    part = build_partition(q, tag, cutoff)
    symbols = list(symbols)
    per = list(period) if period else []
    chain = symbols + per + (per[:1] if per else [])
    for a, b in zip(chain, chain[1:]):
        if not _admissible_pair(part, a, b):
            raise AdmissibilityError(f"symbol pair ({a}, {b}) not allowed")
    if per:
        for a, b in zip(per, per[1:]):
            if not _admissible_pair(part, a, b):
                raise AdmissibilityError(f"symbol pair ({a}, {b}) not allowed")
        digits = [parse_label(s)[0] * parse_label(s)[1] for s in symbols]
        pdigits = [parse_label(s)[0] * parse_label(s)[1] for s in per]
        if any(parse_label(s)[1] is None for s in symbols + per):
            raise ValueError("tail symbols carry no digit; cannot decode "
                             "a periodic tail class")
        val = evaluate(CFExpansion(q, 0, tuple(digits), tuple(pdigits),
                                   dual=(tag == "fstar")))
        return ("point", val)
    if parse_label(symbols[-1])[1] is None:
        cell = part.cell(part.fold(symbols[-1]))
    else:
        cell = _label_cell(part, symbols[-1])
    lo, hi = cell.lo, cell.hi
    for s in reversed(symbols[:-1]):
        eps, mag, sub = parse_label(s)
        if mag is None:
            raise ValueError("tail symbols are only allowed in last position")
        d = eps * mag
        lo, hi = _theta(q, d, lo), _theta(q, d, hi)
    return ("interval", lo, hi)


# ---------------------------------------------------------------------------
# digit-word admissibility (sofic view)


def word_admissible(q: int, digits, tag: str = "f", cutoff: int = 8) -> bool:
    """True iff the digit word labels a path in the transition system.

    Digits with several refined cells are resolved nondeterministically, so
    this checks whether the word occurs as a block of the subshift.
    """
    part = build_partition(q, tag, cutoff)
    digits = list(digits)
    if any(d == 0 for d in digits):
        return False

    def cells_for(d):
        out = [c.label for c in part.cells if c.digit == d]
        if not out and abs(d) > part.cutoff:
            out = ["T" if d > 0 else "-T"]
        return out

    states = set(cells_for(digits[0]))
    if not states:
        return False
    for d in digits[1:]:
        targets = set(cells_for(d))
        states = {b for a in states for b in part.successors[a] if b in targets}
        if not states:
            return False
    return True
