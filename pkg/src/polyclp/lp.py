"""Exact feasibility of NNC constraint systems by the simplex method.

The solver works on a condensed dictionary (one column per non-basic
variable) kept fraction-free: entries are integers and the true dictionary is
the stored one divided by ``div``, the absolute value of the last pivot.
Integer pivoting keeps every division exact.  Bland's rule makes the pivot
sequence deterministic and prevents cycling.

Equalities are substituted away first and the free variables are then
pivoted into the basis and dropped, leaving a system over non-negative
slacks.  Strict rows ``a.x + d > 0`` become ``a.x + d - t >= 0`` with
``0 <= t <= 1``; the system has a solution exactly when ``t`` can be positive.
"""

from __future__ import annotations

from . import fm

_AUX = -1  # label of the phase-one artificial variable


class _Dictionary:
    """Rows ``basic[i] = rows[i][0] + sum(rows[i][j] * nonbasic[j-1])``, all over ``div``."""

    def __init__(self, rows: list, basic: list, nonbasic: list):
        self.rows = rows
        self.basic = basic
        self.nonbasic = nonbasic
        self.div = 1
        self.obj: list | None = None

    def pivot(self, r: int, c: int) -> None:
        """Exchange basic row ``r`` with non-basic column ``c`` (column 0 is the constant)."""
        pr = self.rows[r]
        p = pr[c]
        s = 1 if p > 0 else -1
        d = self.div
        for i in range(len(self.rows)):
            if i == r:
                continue
            row = self.rows[i]
            f = row[c]
            if f == 0:
                self.rows[i] = [s * (a * p // d) for a in row]
            else:
                new = [s * ((a * p - f * b) // d) for a, b in zip(row, pr)]
                new[c] = s * f
                self.rows[i] = new
        if self.obj is not None:
            row = self.obj
            f = row[c]
            new = [s * ((a * p - f * b) // d) for a, b in zip(row, pr)]
            new[c] = s * f
            self.obj = new
        new = [-s * a for a in pr]
        new[c] = s * d
        self.rows[r] = new
        self.basic[r], self.nonbasic[c - 1] = self.nonbasic[c - 1], self.basic[r]
        self.div = s * p

    def maximise(self, stop_positive: bool = False) -> None:
        """Simplex on ``obj``; with ``stop_positive`` return once its value is positive."""
        while True:
            obj = self.obj
            if stop_positive and obj[0] > 0:
                return
            c = None
            for j in range(1, len(obj)):
                if obj[j] > 0 and (c is None or self.nonbasic[j - 1] < self.nonbasic[c - 1]):
                    c = j
            if c is None:
                return
            best = None
            for i, row in enumerate(self.rows):
                a = row[c]
                if a >= 0:
                    continue
                if best is None:
                    best = i
                    continue
                b = self.rows[best]
                lhs, rhs = row[0] * -b[c], b[0] * -a
                if lhs < rhs or (lhs == rhs and self.basic[i] < self.basic[best]):
                    best = i
            if best is None:
                return  # unbounded; the objectives used here are bounded
            self.pivot(best, c)

    def drop_column(self, c: int) -> None:
        for row in self.rows:
            del row[c]
        if self.obj is not None:
            del self.obj[c]
        del self.nonbasic[c - 1]


def _without_equalities(rows: list) -> list | None:
    """Substitute equalities away; None when a ground row is violated."""
    rows = list(rows)
    try:
        while True:
            k = next((i for i, r in enumerate(rows) if r[2] == fm.EQ), None)
            if k is None:
                return rows
            e = rows.pop(k)
            j = next((i for i, a in enumerate(e[0]) if a), None)
            if j is None:
                if e[1] != 0:
                    return None
                continue
            out = []
            for r in rows:
                if r[0][j]:
                    r = fm._substitute(e, r, j)
                    if r is None:
                        continue
                out.append(r)
            rows = out
    except fm.Infeasible:
        return None


def satisfiable(rows: list, dim: int) -> bool:
    """True when the NNC system ``rows`` (fm row triples) has a real solution."""
    rows = _without_equalities(rows)
    if rows is None:
        return False
    live = [j for j in range(dim) if any(r[0][j] for r in rows)]
    strict = any(r[2] == fm.GT for r in rows)
    # labels: x_j -> j, t -> dim, slack of row i -> dim + 1 + i
    table = []
    for coeffs, const, rel in rows:
        row = [const] + [coeffs[j] for j in live]
        if strict:
            row.append(-1 if rel == fm.GT else 0)
        table.append(row)
    if strict:
        table.append([1] + [0] * len(live) + [-1])
    nonbasic = live + ([dim] if strict else [])
    basic = [dim + 1 + i for i in range(len(table))]
    dic = _Dictionary(table, basic, nonbasic)

    # pivot the free variables into the basis, then forget their rows
    for x in live:
        c = dic.nonbasic.index(x) + 1
        r = None
        for i, row in enumerate(dic.rows):
            if row[c] != 0 and (r is None or dic.basic[i] < dic.basic[r]):
                r = i
        if r is None:
            dic.drop_column(c)
            continue
        dic.pivot(r, c)
        del dic.rows[r]
        del dic.basic[r]

    # phase one: auxiliary variable added to every row when infeasible at the origin
    if any(row[0] < 0 for row in dic.rows):
        d = dic.div
        for row in dic.rows:
            row.append(d)
        dic.nonbasic.append(_AUX)
        aux = len(dic.nonbasic)
        dic.obj = [0] * (aux + 1)
        dic.obj[aux] = -d
        r = min(range(len(dic.rows)), key=lambda i: (dic.rows[i][0], dic.basic[i]))
        dic.pivot(r, aux)
        dic.maximise()
        if dic.obj[0] < 0:
            return False
        if _AUX in dic.basic:
            r = dic.basic.index(_AUX)
            c = next((j for j in range(1, len(dic.rows[r])) if dic.rows[r][j] != 0), None)
            if c is None:
                del dic.rows[r]
                del dic.basic[r]
            else:
                dic.pivot(r, c)
        dic.drop_column(dic.nonbasic.index(_AUX) + 1)
        dic.obj = None
    if not strict:
        return True

    # phase two: maximise t
    d = dic.div
    if dim in dic.basic:
        dic.obj = list(dic.rows[dic.basic.index(dim)])
    else:
        dic.obj = [0] * (len(dic.nonbasic) + 1)
        dic.obj[dic.nonbasic.index(dim) + 1] = d
    dic.maximise(stop_positive=True)
    return dic.obj[0] > 0
