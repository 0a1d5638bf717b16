"""Independent reference implementations used by the test suite.

Nothing here imports the analyser's kernel: the Fourier-Motzkin oracle works
on dense Fraction rows, and the ground evaluator interprets the random
programs structurally.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import networkx as nx

EQ, GEQ, GT = 0, 1, 2


def _split(rows):
    """Rewrite equalities as two inequalities; rows are (coeffs, const, rel)."""
    out = []
    for coeffs, const, rel in rows:
        coeffs = [Fraction(a) for a in coeffs]
        const = Fraction(const)
        if rel == EQ:
            out.append((coeffs, const, GEQ))
            out.append(([-a for a in coeffs], -const, GEQ))
        else:
            out.append((coeffs, const, rel))
    return out


def _eliminate(rows, j):
    pos = [r for r in rows if r[0][j] > 0]
    neg = [r for r in rows if r[0][j] < 0]
    out = [r for r in rows if r[0][j] == 0]
    for p, n in product(pos, neg):
        a, b = p[0][j], -n[0][j]
        coeffs = [b * x + a * y for x, y in zip(p[0], n[0])]
        rel = GT if GT in (p[2], n[2]) else GEQ
        out.append((coeffs, b * p[1] + a * n[1], rel))
    return out


def _ground_ok(rows):
    for coeffs, const, rel in rows:
        if any(coeffs):
            continue
        if rel == GEQ and const < 0 or rel == GT and const <= 0:
            return False
    return True


def fm_empty(rows, dim) -> bool:
    """Exhaustive Fourier-Motzkin emptiness test (no redundancy removal)."""
    rows = _split(rows)
    for j in range(dim):
        rows = _eliminate(rows, j)
    return not _ground_ok(rows)


def fm_project(rows, dim, drop):
    """Rows of the projection eliminating the columns in ``drop``; None if empty."""
    rows = _split(rows)
    if fm_empty(rows, dim):
        return None
    for j in drop:
        rows = _eliminate(rows, j)
    return [r for r in rows if any(r[0])]


def negations(row):
    coeffs, const, rel = row
    neg = ([-a for a in coeffs], -const)
    if rel == GEQ:
        return [(*neg, GT)]
    if rel == GT:
        return [(*neg, GEQ)]
    return [(coeffs, const, GT), (*neg, GT)]


def fm_entails(rows, dim, row) -> bool:
    return all(fm_empty(list(rows) + [n], dim) for n in negations(row))


def fm_includes(outer, inner, dim) -> bool:
    if fm_empty(inner, dim):
        return True
    return all(fm_entails(inner, dim, r) for r in outer)


def simple_cycles(nodes, edges):
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    g.add_edges_from(edges)
    return [set(c) for c in nx.simple_cycles(g)]


def ground_model(prog, max_rounds: int = 200) -> dict:
    """Least model of a :class:`~polyclp.randprog.RandomProgram` by naive iteration."""
    facts = {p: set() for p in prog.preds}
    for p, x, y in prog.facts:
        facts[p].add((x, y))
    for _ in range(max_rounds):
        new = {p: set(s) for p, s in facts.items()}
        for r in prog.rules:
            kind, arg = r.update
            for x, y in facts[r.src]:
                if not x < r.bound:
                    continue
                if r.y_guard is not None and y < r.y_guard:
                    continue
                x1 = x + r.step
                if kind == "shift":
                    new[r.head].add((x1, y + arg))
                elif kind == "mirror":
                    new[r.head].add((x1, arg - y))
                else:
                    for u, v in facts[arg]:
                        if u <= x:
                            new[r.head].add((x1, y + v))
        if new == facts:
            return facts
        facts = new
    raise RuntimeError("ground model did not converge")


def exp_answers(x: int, y: int) -> list[tuple[int, int, int, int]]:
    """Every answer of ``exp_/4`` computed while running ``exp(x, y, Z)`` top-down."""
    answers = []

    def solve(yy, ac):
        if yy == 0:
            answers.append((x, 0, ac, ac))
            return ac
        z = solve(yy - 1, x * ac)
        answers.append((x, yy, ac, z))
        return z

    if y >= 0:
        solve(y, 1)
    return answers
