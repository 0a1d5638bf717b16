"""Fourier-Motzkin elimination over integer rows with strictness tracking.

A row is a :class:`~polyclp.poly.Constraint`-shaped triple ``(coeffs, const,
rel)`` meaning ``sum(coeffs[i] * x[i]) + const  rel  0``.  Rows are kept
normalised: integer coefficients whose gcd (constant included) is 1, and
equalities have a positive leading coefficient.

Elimination is exact over the reals, strict inequalities included: the
combination of two inequalities is strict iff at least one of them is.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Sequence

EQ, GEQ, GT = 0, 1, 2

Row = tuple  # (tuple[int, ...], int, int)


class Infeasible(Exception):
    """Raised internally when a ground row is violated."""


def normalize(coeffs: Sequence[int], const: int, rel: int) -> Row | None:
    """Return the normalised row, or None when it is trivially true.

    Raises :class:`Infeasible` for a trivially false row.
    """
    g = 0
    for a in coeffs:
        if a:
            g = gcd(g, a)
    if g == 0:
        if rel == EQ:
            ok = const == 0
        elif rel == GEQ:
            ok = const >= 0
        else:
            ok = const > 0
        if ok:
            return None
        raise Infeasible
    g = gcd(g, const)
    if g != 1:
        coeffs = tuple(a // g for a in coeffs)
        const //= g
    else:
        coeffs = tuple(coeffs)
    if rel == EQ:
        for a in coeffs:
            if a:
                if a < 0:
                    coeffs = tuple(-b for b in coeffs)
                    const = -const
                break
    return (coeffs, const, rel)


def simplify(rows: Iterable[Row], hist: dict | None = None) -> list[Row]:
    """Drop duplicates and syntactically dominated inequalities.

    For inequalities sharing a coefficient vector only the tightest survives
    (smallest constant; strict wins a tie).  An equality absorbs inequalities
    over the same or the negated vector when it implies them; a pair of
    opposite inequalities that pinch to a point becomes an equality, and a
    pair that cannot both hold raises :class:`Infeasible`.

    ``hist`` maps rows to the set of input rows they were derived from and is
    extended for the equalities created here.
    """
    eqs: dict[tuple, int] = {}
    best: dict[tuple, tuple[int, int]] = {}
    order: list[tuple] = []
    for coeffs, const, rel in rows:
        if not any(coeffs):
            if (rel == EQ and const != 0) or (rel == GEQ and const < 0) or (rel == GT and const <= 0):
                raise Infeasible
            continue
        if rel == EQ:
            old = eqs.get(coeffs)
            if old is None:
                eqs[coeffs] = const
                order.append(("e", coeffs))
            elif old != const:
                raise Infeasible
            continue
        cur = best.get(coeffs)
        if cur is None:
            best[coeffs] = (const, rel)
            order.append(("i", coeffs))
        elif const < cur[0] or (const == cur[0] and rel == GT):
            best[coeffs] = (const, rel)
    out: list[Row] = []
    for kind, coeffs in order:
        if kind == "e":
            out.append((coeffs, eqs[coeffs], EQ))
            continue
        const, rel = best[coeffs]
        e = eqs.get(coeffs)
        if e is not None:
            # coeffs.x + e = 0 ; check coeffs.x + const rel 0, i.e. const - e rel 0
            d = const - e
            if d > 0 or (d == 0 and rel == GEQ):
                continue
            raise Infeasible
        neg = tuple(-a for a in coeffs)
        e = eqs.get(neg)
        if e is not None:
            # coeffs.x = e
            d = const + e
            if d > 0 or (d == 0 and rel == GEQ):
                continue
            raise Infeasible
        opp = best.get(neg)
        if opp is not None:
            # coeffs.x >= -const and coeffs.x <= opp_const
            s = const + opp[0]
            if s < 0 or (s == 0 and (rel == GT or opp[1] == GT)):
                raise Infeasible
            if s == 0:
                if coeffs > neg:
                    row = normalize(coeffs, const, EQ)
                    if row is not None:
                        out.append(row)
                        if hist is not None:
                            hist[row] = None
                continue
        out.append((coeffs, const, rel))
    return out


def _combine(p: Row, n: Row, j: int) -> Row | None:
    """Eliminate column j between p (positive at j) and n (negative at j)."""
    a = p[0][j]
    b = -n[0][j]
    coeffs = [b * x + a * y for x, y in zip(p[0], n[0])]
    coeffs[j] = 0
    rel = GT if (p[2] == GT or n[2] == GT) else GEQ
    return normalize(coeffs, b * p[1] + a * n[1], rel)


def _substitute(e: Row, r: Row, j: int) -> Row | None:
    """Eliminate column j from r using equality e."""
    a = e[0][j]
    b = r[0][j]
    if a < 0:
        a = -a
        ec = tuple(-x for x in e[0])
        econst = -e[1]
    else:
        ec, econst = e[0], e[1]
    coeffs = [a * x - b * y for x, y in zip(r[0], ec)]
    coeffs[j] = 0
    return normalize(coeffs, a * r[1] - b * econst, r[2])


def eliminate(rows: list[Row], j: int, hist: dict | None = None, limit: int | None = None) -> list[Row]:
    """Project column j out of ``rows``.  May raise :class:`Infeasible`.

    With ``hist`` given, derived rows record the input rows they combine, and
    combinations of more than ``limit`` inputs are dropped (Kohler's rule:
    such rows are implied by the others).  The rule only covers pure
    inequality combinations, so rows touched by an equality get the history
    None and are never dropped.
    """
    pivot = None
    for r in rows:
        if r[2] == EQ and r[0][j]:
            if pivot is None or _weight(r) < _weight(pivot):
                pivot = r
    out: list[Row] = []
    if pivot is not None:
        for r in rows:
            if r is pivot:
                continue
            if r[0][j]:
                r = _substitute(pivot, r, j)
                if r is None:
                    continue
                if hist is not None:
                    hist[r] = None
            out.append(r)
        return simplify(out, hist)
    pos, neg = [], []
    for r in rows:
        c = r[0][j]
        if c > 0:
            pos.append(r)
        elif c < 0:
            neg.append(r)
        else:
            out.append(r)
    for p in pos:
        for n in neg:
            if hist is not None:
                hp, hn = hist[p], hist[n]
                h = None if hp is None or hn is None else hp | hn
                if h is not None and limit is not None and len(h) > limit:
                    continue
            r = _combine(p, n, j)
            if r is not None:
                out.append(r)
                if hist is not None:
                    _record(hist, r, h)
    return simplify(out, hist)


def _record(hist: dict, row: Row, h: frozenset | None) -> None:
    if row not in hist:
        hist[row] = h
        return
    old = hist[row]
    if old is not None and (h is None or len(h) < len(old)):
        hist[row] = h


def _weight(r: Row) -> int:
    return sum(1 for a in r[0] if a)


def _pick(rows: list[Row], cols: Iterable[int]) -> int:
    """Column to eliminate next: an equality pivot if any, else min #pos*#neg."""
    best = None
    best_cost = None
    for j in cols:
        npos = nneg = 0
        has_eq = False
        for coeffs, _, rel in rows:
            c = coeffs[j]
            if c:
                if rel == EQ:
                    has_eq = True
                    break
                if c > 0:
                    npos += 1
                else:
                    nneg += 1
        cost = -1 if has_eq else npos * nneg
        if best is None or cost < best_cost:
            best, best_cost = j, cost
            if has_eq:
                break
    return best


def project(rows: list[Row], cols: Iterable[int]) -> list[Row]:
    """Eliminate every column in ``cols``.  May raise :class:`Infeasible`."""
    todo = set(cols)
    hist: dict = {}
    for i, r in enumerate(rows):
        hist.setdefault(r, None if r[2] == EQ else frozenset((i,)))
    rows = simplify(rows, hist)
    done = 0
    while todo:
        live = [j for j in sorted(todo) if any(r[0][j] for r in rows)]
        if not live:
            break
        j = _pick(rows, live)
        done += 1
        rows = eliminate(rows, j, hist, done + 1)
        todo.discard(j)
        if len(rows) > PRUNE_THRESHOLD:
            rows = prune(rows)
    return rows


PRUNE_THRESHOLD = 16


def prune(rows: list[Row]) -> list[Row]:
    """Drop inequalities implied by the others (exact LP entailment checks).

    Raises :class:`Infeasible` when the rows have no solution.
    """
    from . import lp

    if not rows:
        return rows
    dim = len(rows[0][0])
    # in an empty system every row is implied; keep that from erasing them all
    if not lp.satisfiable(rows, dim):
        raise Infeasible
    kept = list(rows)
    i = len(kept) - 1
    while i >= 0:
        r = kept[i]
        if r[2] != EQ:
            rest = kept[:i] + kept[i + 1:]
            neg = (tuple(-a for a in r[0]), -r[1], GEQ if r[2] == GT else GT)
            if not lp.satisfiable(rest + [neg], dim):
                kept = rest
        i -= 1
    return kept


def satisfiable(rows: list[Row], dim: int) -> bool:
    try:
        project(rows, range(dim))
    except Infeasible:
        return False
    return True
