"""The ten acceptance criteria, one test each.

Each test records a PASS/FAIL line (listed again at the end of the pytest
run).  Criteria that do not hold as stated are marked strict xfail and
explain why; the ledger has the analysis.
"""

from __future__ import annotations

import os
import random
import subprocess
import sys
import time
from itertools import product

import pytest

from conftest import CORPUS, ROOT, poly, record
from oracles import exp_answers, fm_empty, fm_includes, fm_project, ground_model, simple_cycles
from polyclp import fm
from polyclp.engine import AnalysisConfig, analyze, leq
from polyclp.graph import DepGraph, cut_loop_widening_points, feedback_widening_points
from polyclp.poly import Constraint, Polyhedron, Rel, widen_standard
from polyclp.randprog import generate, read_seeds
from polyclp.syntax import parse_program
from polyclp.transforms import parse_goal, query_answer_transform, size_abstract


def load(name: str, goal: str | None = None, norm: str | None = None):
    prog = parse_program((CORPUS / name).read_text())
    if norm:
        prog = size_abstract(prog, norm)
    if goal:
        prog = query_answer_transform(prog, parse_goal(goal))
    return prog


def timed(prog, cfg=AnalysisConfig()):
    start = time.perf_counter()
    res = analyze(prog, cfg)
    return res.interpretation, time.perf_counter() - start


def test_criterion_1_water_level():
    interp, secs = timed(load("waterlevel.clp"), AnalysisConfig(narrow_iters=1, wp_strategy="cutloop"))
    expected = {
        "w0": poly("1 =< A, A < 10"),
        "w1": poly("10 =< A, A < 12"),
        "w2": poly("5 < A, A =< 12"),
        "w3": poly("1 < A, A =< 5"),
    }
    same = all(interp.get((k, 1)) == v for k, v in expected.items())
    record(1, same and secs < 1, f"water-level w0..w3 equal the expected polyhedra (narrow 1, {secs:.3f} s)")
    assert same
    assert secs < 1


@pytest.mark.xfail(strict=True, reason="result is strictly tighter than the expected one over the rationals")
def test_criterion_2_mc91_two_versions():
    interp, secs = timed(load("mc91_two_versions.clp", "main(X,Y)"))
    got = interp[("main_ans", 2)]
    expected = poly("A =< 100, B > 90, B =< 91", 2)
    # what does hold: the result is sound, inside the expected polyhedron,
    # entails each expected constraint and has the same integer points
    assert expected.includes(got)
    for c in expected.constraints:
        assert got.entails(c)
    assert all(got.contains_point((a, 91)) for a in range(-50, 101))
    assert secs < 1
    exact = got == expected
    record(
        2,
        exact,
        f"main_ans is {got.to_text(['A', 'B'])}, inside but not equal to the expected "
        f"A =< 100, 90 < B =< 91 ({secs:.3f} s)",
    )
    assert exact


def test_criterion_3_mc91_original():
    interp, _ = timed(load("mc91.clp", "main(X,Y)"))
    got = interp[("main_ans", 2)]
    above_90 = got.entails(Constraint.of((0, 1), -90, Rel.GT))
    at_most_91 = got.entails(Constraint.of((0, -1), 91, Rel.GEQ))
    ok = above_90 and not at_most_91
    record(3, ok, f"mc91 main_ans {got.to_text(['A', 'B'])} entails B > 90 but not B =< 91")
    assert ok


def test_criterion_4_exp_bounds():
    interp, _ = timed(load("exp.clp", "exp(_,10,_)"), AnalysisConfig(narrow_iters=1))
    got = interp[("exp__ans", 4)]
    second = got.project_out([0, 2, 3])
    answers = [a for x in range(-3, 4) for a in exp_answers(x, 10)]
    ys = [a[1] for a in answers]
    lo, hi = min(ys), max(ys)
    oracle_bounds = poly(f"A >= {lo}, A =< {hi}")
    covers = all(got.contains_point(a) for a in answers)
    ok = second == oracle_bounds and covers
    record(4, ok, f"exp_/4 answers bound the 2nd argument to {second.to_text()}; ground run gives {lo}..{hi}")
    assert covers
    assert second == oracle_bounds


def test_criterion_5_widening_points():
    g = DepGraph.from_edges([1, 2, 3], [(1, 2), (2, 1), (2, 3), (3, 2)])
    cut, fb = cut_loop_widening_points(g), feedback_widening_points(g)
    rng = random.Random(5)
    covered = True
    for _ in range(200):
        n = rng.randint(1, 12)
        p = rng.uniform(0.05, 0.4)
        edges = [(a, b) for a in range(n) for b in range(n) if rng.random() < p]
        rg = DepGraph.from_edges(range(n), edges)
        cycles = simple_cycles(rg.nodes, rg.edges())
        for points in (cut_loop_widening_points(rg), feedback_widening_points(rg)):
            covered &= all(c & set(points) for c in cycles)
    ok = cut == [2] and fb == [1, 2] and covered
    record(5, ok, f"cutloop {cut}, feedback {fb}; loop coverage on 200 random digraphs: {covered}")
    assert cut == [2] and fb == [1, 2]
    assert covered


def _random_rows(rng: random.Random, dim: int) -> list:
    rows = []
    for _ in range(rng.randint(1, 6)):
        coeffs = tuple(rng.randint(-3, 3) for _ in range(dim))
        r = rng.random()
        rel = fm.GT if r < 0.2 else (fm.EQ if r < 0.3 else fm.GEQ)
        rows.append((coeffs, rng.randint(-4, 4), rel))
    return rows


def test_criterion_6_kernel_oracle():
    rng = random.Random(6)
    start = time.perf_counter()
    systems = []
    for _ in range(500):
        dim = rng.randint(1, 3)
        systems.append((dim, _random_rows(rng, dim)))
    bad = []
    for i, (dim, rows) in enumerate(systems):
        p = Polyhedron._from_rows(dim, rows)
        if p.is_empty != fm_empty(rows, dim):
            bad.append(("is_empty", i))
            continue
        for j in range(dim):
            proj = p.project_out([j])
            ref = fm_project(rows, dim, [j])
            if ref is None:
                ok = proj.is_empty
            else:
                ref = [(tuple(c[:j]) + tuple(c[j + 1:]), k, rel) for c, k, rel in ref]
                mine = [c.row for c in proj.constraints] if not proj.is_empty else None
                ok = mine is not None and fm_includes(mine, ref, dim - 1) and fm_includes(ref, mine, dim - 1)
            if not ok:
                bad.append(("project_out", i, j))
    for i in range(len(systems) - 1):
        (d1, r1), (d2, r2) = systems[i], systems[i + 1]
        if d1 != d2:
            continue
        p, q = Polyhedron._from_rows(d1, r1), Polyhedron._from_rows(d2, r2)
        if p.includes(q) != fm_includes(r1, r2, d1) or q.includes(p) != fm_includes(r2, r1, d1):
            bad.append(("includes", i))
        h = p.hull(q)
        if not (fm_includes([c.row for c in h.constraints], r1, d1) and fm_includes([c.row for c in h.constraints], r2, d1)):
            bad.append(("hull", i))
        w = widen_standard(p, h)
        wr = [c.row for c in w.constraints]
        if not (fm_includes(wr, r1, d1) and fm_includes(wr, r2, d1)):
            bad.append(("widen", i))
    secs = time.perf_counter() - start
    ok = not bad and secs < 60
    record(6, ok, f"500 random systems agree with the Fourier-Motzkin oracle, {len(bad)} disagreements ({secs:.1f} s)")
    assert bad == []
    assert secs < 60


STRATEGY_MATRIX = list(product([0, 3], [0, 2], [False, True], ["feedback", "cutloop"]))


def test_criterion_7_soundness():
    seeds = read_seeds(CORPUS / "seeds.txt")
    assert len(seeds) == 50
    missing = []
    facts = 0
    for seed in seeds:
        rp = generate(seed)
        prog = parse_program(rp.to_text())
        model = ground_model(rp)
        facts += sum(len(v) for v in model.values())
        for d, n, u, w in STRATEGY_MATRIX:
            interp = analyze(prog, AnalysisConfig(widen_delay=d, narrow_iters=n, widen_up_to=u, wp_strategy=w)).interpretation
            for pred, pts in model.items():
                p = interp.get((pred, 2))
                for pt in pts:
                    if p is None or not p.contains_point(pt):
                        missing.append((seed, d, n, u, w, pred, pt))
    record(
        7,
        not missing,
        f"{facts} ground facts of 50 random programs covered under all {len(STRATEGY_MATRIX)} strategies, "
        f"{len(missing)} missing",
    )
    assert missing == []


CORPUS_RUNS = [
    ("waterlevel.clp", None, None),
    ("tub.clp", "tubsystem", None),
    ("exp.clp", "exp(_,10,_)", None),
    ("mc91.clp", "main(X,Y)", None),
    ("mc91_two_versions.clp", "main(X,Y)", None),
    ("append.pl", None, "list-length"),
]


def _total(programs, cfg):
    return [sum(p.constraint_count() for p in analyze(prog, cfg).interpretation.values()) for prog in programs]


def test_criterion_8_precision_trend():
    programs = [load(*r) for r in CORPUS_RUNS]
    base = _total(programs, AnalysisConfig())
    narrowed = _total(programs, AnalysisConfig(narrow_iters=2))
    upto = _total(programs, AnalysisConfig(widen_up_to=True))
    narrow_ok = sum(narrowed) >= sum(base)
    upto_ok = sum(upto) >= sum(base)
    record(
        8,
        narrow_ok and upto_ok,
        f"constraint totals: narrowing {sum(narrowed)} vs {sum(base)} without; "
        f"up-to {sum(upto)} vs {sum(base)} without (per program {upto} vs {base})",
    )
    assert narrow_ok
    # the up-to count falls only because predicates become empty; in the
    # lattice, up-to is never less precise on the corpus
    for prog in programs:
        assert leq(analyze(prog, AnalysisConfig(widen_up_to=True)).interpretation, analyze(prog).interpretation)


@pytest.mark.xfail(strict=True, reason="up-to proves two water-level predicates empty, which removes their constraints")
def test_criterion_8_up_to_count():
    programs = [load(*r) for r in CORPUS_RUNS]
    assert sum(_total(programs, AnalysisConfig(widen_up_to=True))) >= sum(_total(programs, AnalysisConfig()))


def test_criterion_9_tub():
    interp, secs = timed(load("tub.clp", "tubsystem"))
    alarm = interp.get(("alarmLogic_ans", 2))
    reachable = alarm is not None and not alarm.intersect(poly("B = 1", 2)).is_empty
    record(9, reachable, f"tub analysis terminates in {secs:.2f} s; alarm value 1 reachable in {alarm and alarm.to_text(['A', 'B'])}")
    assert reachable


DETERMINISM_RUNS = [
    ["waterlevel.clp", "--narrow", "1"],
    ["waterlevel.clp", "--widen-up-to", "--delay", "3", "--wp", "feedback"],
    ["tub.clp", "--qa", "tubsystem"],
    ["exp.clp", "--qa", "exp(_,10,_)", "--narrow", "1"],
    ["mc91.clp", "--qa", "main(X,Y)"],
    ["mc91_two_versions.clp", "--qa", "main(X,Y)", "--narrow", "2"],
    ["append.pl", "--norm", "list-length"],
    ["empty.clp"],
]


def _cli_outputs(hash_seed: str) -> list[str]:
    env = dict(os.environ, PYTHONHASHSEED=hash_seed)
    outs = []
    for argv in DETERMINISM_RUNS:
        cmd = [sys.executable, "-m", "polyclp", "analyze", str(CORPUS / argv[0]), *argv[1:], "--show-counts", "--verbose"]
        proc = subprocess.run(cmd, capture_output=True, text=True, env=env, cwd=ROOT, check=True)
        outs.append(proc.stdout)
    return outs


def test_criterion_10_determinism():
    first, second, third = _cli_outputs("1"), _cli_outputs("1"), _cli_outputs("2")
    ok = first == second == third
    record(10, ok, f"{len(DETERMINISM_RUNS)} corpus reports byte-identical across 3 runs and 2 hash seeds")
    assert ok
