from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import poly
from oracles import fm_empty, fm_includes
from polyclp import fm, lp
from polyclp.poly import (
    Constraint,
    LinearExpression,
    Polyhedron,
    PolyhedronError,
    Rel,
    convex_hull,
    widen_standard,
    widen_up_to,
)


def test_make_universe_and_contradiction():
    assert Polyhedron.make(1, []).is_universe()
    assert poly("A >= 0, -A > 0").is_empty


def test_make_drops_duplicates():
    p = Polyhedron.make(2, [Constraint.of((1, -1), 0, Rel.EQ), Constraint.of((1, 0)), Constraint.of((1, 0))])
    assert len(p.raw_constraints) == 2


def test_make_rejects_wrong_dimension():
    with pytest.raises(PolyhedronError):
        Polyhedron.make(1, [Constraint.of((1, 0))])


def test_emptiness_examples():
    assert poly("A > 0, -A >= 0").is_empty
    assert not poly("A >= 0, -A >= 0").is_empty
    assert not Polyhedron.make(0, []).is_empty
    assert Polyhedron.empty(0).is_empty


def test_intersect():
    assert poly("A >= 0").intersect(poly("-A >= -5")) == poly("0 =< A, A =< 5")
    assert poly("A > 1").intersect(poly("-A >= -1")).is_empty


def test_hull_segment():
    assert convex_hull(poly("A = 0"), poly("A = 1")) == poly("0 =< A, A =< 1")


def test_hull_diagonal():
    h = convex_hull(poly("A = 0, B = 0", 2), poly("A = 2, B = 2", 2))
    assert h == poly("A - B = 0, A >= 0, A =< 2", 2)


def test_hull_keeps_strictness():
    # the open end of one operand survives only where the other does not cover it
    h = convex_hull(poly("0 < A, A < 1"), poly("A = 1"))
    assert h == poly("0 < A, A =< 1")
    h = convex_hull(poly("0 < A, A < 1"), poly("2 < A, A < 3"))
    assert h == poly("0 < A, A < 3")


def test_hull_with_open_ray():
    # the set hull is not closed; the least NNC polyhedron around it keeps only
    # the strictness that excludes the corner (0, 1)
    h = convex_hull(poly("A = 0, B = 0", 2), poly("A > 0, B = 1", 2))
    assert h == poly("A >= 0, B >= 0, B =< 1, A - B > -1", 2)
    assert h.contains_point((0, Fraction(1, 2)))
    assert not h.contains_point((0, 1))


def test_entails():
    assert poly("A >= 1").entails(Constraint.of((1,), 0, Rel.GT))
    assert not poly("A >= 0").entails(Constraint.of((1,), 0, Rel.GT))
    assert Polyhedron.empty(1).entails(Constraint.of((1,), 5, Rel.EQ))


def test_includes():
    assert poly("0 =< A, A =< 2").includes(poly("A = 1"))
    p = poly("A > 0, A < 3")
    assert p.includes(p)
    assert not poly("A > 0").includes(poly("A >= 0"))


def test_project_out():
    assert poly("A - B = 0, 0 =< A, A =< 1", 2).project_out([1]) == poly("0 =< A, A =< 1")
    assert poly("A - B > 0, B >= 2", 2).project_out([1]) == poly("A > 2")
    assert poly("A >= 3", 2).project_out([1]) == poly("A >= 3")


def test_remap():
    p = poly("A >= 1").remap({0: 2}, 3)
    assert p == poly("C >= 1", 3)
    q = poly("A + B >= 1", 2)
    assert q.remap({0: 0, 1: 1}, 2) == q
    assert Polyhedron.universe(2).remap({}, 4).is_universe()
    with pytest.raises(PolyhedronError):
        poly("A + B >= 1", 2).remap({0: 0}, 1)


def test_widen_examples():
    assert widen_standard(poly("0 =< A, A =< 1"), poly("0 =< A, A =< 2")) == poly("A >= 0")
    p = poly("0 =< A, A < 4, B = A", 2)
    assert widen_standard(p, p) == p
    assert widen_standard(poly("A = 0"), poly("0 =< A, A =< 1")) == poly("A >= 0")


def test_widen_up_to_examples():
    p1, p2 = poly("0 =< A, A =< 1"), poly("0 =< A, A =< 2")
    assert widen_up_to(p1, p2, poly("A =< 10")) == poly("0 =< A, A =< 10")
    assert widen_up_to(p1, p2, Polyhedron.universe(1)) == widen_standard(p1, p2)
    assert widen_up_to(p1, p2, poly("A =< -1")) == widen_standard(p1, p2)


def test_widening_chain_stabilises():
    w = poly("A = 0")
    for k in range(1, 4):
        nxt = w.hull(poly(f"0 =< A, A =< {k}"))
        w2 = widen_standard(w, nxt)
        if w2 == w:
            break
        w = w2
    assert w == poly("A >= 0")
    assert k <= 2


def test_constraint_count():
    assert Polyhedron.universe(1).constraint_count() == 0
    assert poly("0 =< A, A =< 5").constraint_count() == 2
    assert poly("A >= 0, 2*A >= 0").constraint_count() == 1


def test_minimization_finds_implicit_equalities():
    p = poly("A - B >= 0, B - A >= 0, A >= 1, A + B >= 0", 2)
    cs = p.constraints
    assert sum(c.rel == Rel.EQ for c in cs) == 1
    assert len(cs) == 2


def test_text_form():
    assert poly("1 =< A, A < 10").to_text() == "1*A>=1, -1*A> -10"
    assert Polyhedron.universe(2).to_text() == "true"


def test_linear_expression_constraint():
    e = LinearExpression.var("x", 2) + LinearExpression.const(Fraction(1, 3))
    c = e.constraint(Rel.GT, {"x": 0}, 1)
    assert c == Constraint((6,), 1, Rel.GT)


def test_constraint_normalisation():
    assert Constraint.of((Fraction(1, 2), Fraction(-3, 4)), 1, Rel.EQ) == Constraint((2, -3), 4, Rel.EQ)
    assert Constraint.of((-2, 4), 6, Rel.EQ) == Constraint((1, -2), -3, Rel.EQ)


row_st = st.tuples(
    st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)),
    st.integers(-4, 4),
    st.sampled_from([fm.EQ, fm.GEQ, fm.GEQ, fm.GT]),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(row_st, max_size=7))
def test_emptiness_matches_oracle(rows):
    p = Polyhedron._from_rows(3, list(rows))
    assert p.is_empty == fm_empty(rows, 3)
    assert lp.satisfiable(rows, 3) == (not fm_empty(rows, 3))
    assert fm.satisfiable(rows, 3) == (not fm_empty(rows, 3))


@settings(max_examples=80, deadline=None)
@given(st.lists(row_st, min_size=1, max_size=5), st.lists(row_st, min_size=1, max_size=5))
def test_lattice_bounds(r1, r2):
    p, q = Polyhedron._from_rows(3, r1), Polyhedron._from_rows(3, r2)
    h = p.hull(q)
    assert h.includes(p) and h.includes(q)
    m = p.intersect(q)
    assert p.includes(m) and q.includes(m)
    # the hull is least among the candidates built from either operand's constraints
    for c in p.constraints + q.constraints:
        if p.entails(c) and q.entails(c):
            assert h.entails(c)
    assert fm_includes([c.row for c in h.constraints], r1, 3)


@settings(max_examples=80, deadline=None)
@given(st.lists(row_st, min_size=1, max_size=5), st.lists(row_st, min_size=1, max_size=5))
def test_widening_covers(r1, r2):
    p = Polyhedron._from_rows(3, r1)
    q = p.hull(Polyhedron._from_rows(3, r2))
    w = widen_standard(p, q)
    assert w.includes(p) and w.includes(q)


@settings(max_examples=60, deadline=None)
@given(st.lists(row_st, max_size=5), st.lists(row_st, max_size=5), st.lists(row_st, max_size=5))
def test_includes_is_a_preorder(r1, r2, r3):
    a, b, c = (Polyhedron._from_rows(3, r) for r in (r1, r2, r3))
    assert a.includes(a)
    if a.includes(b) and b.includes(c):
        assert a.includes(c)
    if a.includes(b) and b.includes(a):
        assert a == b
