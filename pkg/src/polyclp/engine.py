"""Bottom-up polyhedral fixpoint computation over a CLP program.

Predicates are analysed one strongly connected component at a time, callees
first.  Inside a component the immediate-consequence step is iterated
semi-naively (a clause is re-evaluated only when one of its callees changed
in the previous round), with widening at the selected widening points and
optional glb-narrowing once the component is stable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence, Union

from .graph import (
    DepGraph,
    build_dep_graph,
    cut_loop_widening_points,
    feedback_widening_points,
    find_cycle_avoiding,
    scc_order,
)
from .linear import clause_frame, linearise
from .poly import Polyhedron, widen_standard, widen_up_to
from .syntax import Clause, PredKey, Program, flatten_calls, pred_str

log = logging.getLogger(__name__)

Interpretation = dict  # PredKey -> Polyhedron; absent means bottom


class ConfigError(ValueError):
    pass


class NonConvergence(RuntimeError):
    pass


WIDENING_STRATEGIES = ("cutloop", "feedback", "none")


@dataclass(frozen=True)
class AnalysisConfig:
    widen_delay: int = 0
    narrow_iters: int = 0
    widen_up_to: bool = False
    # "cutloop", "feedback", "none", or an explicit tuple of predicate keys
    wp_strategy: Union[str, tuple] = "cutloop"
    verbose: bool = False
    max_iterations: int = 1000

    def __post_init__(self):
        if self.widen_delay < 0 or self.narrow_iters < 0:
            raise ConfigError("delay and narrowing iterations must be non-negative")
        if isinstance(self.wp_strategy, str) and self.wp_strategy not in WIDENING_STRATEGIES:
            raise ConfigError(f"unknown widening-point strategy {self.wp_strategy!r}")


@dataclass(frozen=True)
class TraceEvent:
    iteration: int
    predicate: PredKey
    op: str  # join | widen | widen-up-to | narrow | stabilised
    count: int

    def __str__(self) -> str:
        return f"iter={self.iteration} pred={pred_str(self.predicate)} op={self.op} count={self.count}"


class AnalysisResult(NamedTuple):
    interpretation: Interpretation
    trace: list
    scc_iterations: list  # (predicates of the SCC, rounds to stabilise)


def leq(i1: Interpretation, i2: Interpretation) -> bool:
    """``i1`` below ``i2`` in the pointwise inclusion order."""
    for key, p in i1.items():
        q = i2.get(key)
        if q is None:
            if not p.is_empty:
                return False
        elif not q.includes(p):
            return False
    return True


class CompiledClause:
    """A clause fixed in its frame: builtin polyhedron plus call remappings."""

    def __init__(self, clause: Clause, program: Program):
        self.clause = clause
        self.key = clause.head.key
        frame, head_dims = clause_frame(clause)
        self.dim = len(frame)
        self.arity = len(head_dims)
        cons = []
        for lit in clause.builtins():
            lc = linearise(lit, frame, self.dim)
            if lc:
                cons.extend(lc)
        self.base = Polyhedron.make(self.dim, cons)
        self.calls = []
        for atom in clause.calls():
            if not program.is_defined(atom.key):
                continue  # extern: unconstrained
            mapping = {i: frame[a.name] for i, a in enumerate(atom.args)}
            self.calls.append((atom.key, mapping))
        self.callees = {k for k, _ in self.calls}

    def evaluate(self, lookup: Callable[[PredKey], Polyhedron | None]) -> Polyhedron | None:
        """Head polyhedron derived from the current facts, or None."""
        if self.base.is_empty:
            return None
        p = self.base
        for key, mapping in self.calls:
            v = lookup(key)
            if v is None:
                return None
            if not v._rows:
                continue
            p = p.intersect(v.remap(mapping, self.dim))
        if self.dim > self.arity:
            p = p.project_out(range(self.arity, self.dim))
        if p.is_empty:
            return None
        return p

    def clause_constraints(self) -> Polyhedron:
        """Builtin constraints of the body projected onto the head."""
        if self.dim > self.arity:
            return self.base.project_out(range(self.arity, self.dim))
        return self.base


def compile_program(program: Program) -> list[CompiledClause]:
    return [CompiledClause(c, program) for c in program.clauses]


def bounding_polyhedra(program: Program) -> dict:
    """Per predicate, the hull over its clauses of the clause constraints."""
    program = flatten_calls(program)
    out = {}
    for cc in compile_program(program):
        b = cc.clause_constraints()
        if b.is_empty:
            out.setdefault(cc.key, None)
            continue
        prev = out.get(cc.key)
        out[cc.key] = b if prev is None else prev.hull(b)
    for key in program.predicates():
        if out.get(key) is None:
            out[key] = Polyhedron.universe(key[1])
    return out


def tp_step(program: Program, interp: Interpretation) -> Interpretation:
    """One application of ``I |-> I hull T_P(I)`` to every predicate."""
    program = flatten_calls(program)
    contrib = _contributions(compile_program(program), interp.get)
    out = dict(interp)
    for key, c in contrib.items():
        old = out.get(key)
        out[key] = c if old is None else old.hull(c)
    return out


def _contributions(clauses: Sequence[CompiledClause], lookup) -> dict:
    contrib: dict = {}
    for cc in clauses:
        r = cc.evaluate(lookup)
        if r is None:
            continue
        prev = contrib.get(cc.key)
        contrib[cc.key] = r if prev is None else prev.hull(r)
    return contrib


def narrow(program: Program, interp: Interpretation, k: int) -> Interpretation:
    """At most ``k`` glb-narrowing passes over the whole program.

    Pass one intersects each value with its transfer-function image; later
    passes intersect the original (widened) value with the image of the
    previous narrowed interpretation, stopping early once nothing changes.
    """
    program = flatten_calls(program)
    clauses = compile_program(program)
    out, _ = _narrow_group(clauses, program.predicates(), interp, {}, k, [0], [])
    return out


def _narrow_group(clauses, preds, widened, outer, k, it, trace):
    """Narrow ``preds`` (values in ``widened``) with other predicates fixed in ``outer``."""
    cur = {p: widened[p] for p in preds if p in widened}
    members = set(preds)
    passes = 0
    for _ in range(k):
        it[0] += 1
        passes += 1
        snapshot = cur

        def lookup(key, snapshot=snapshot):
            return snapshot.get(key) if key in members else outer.get(key)

        contrib = _contributions(clauses, lookup)
        new = {}
        changed = False
        for p in preds:
            w = widened.get(p)
            if w is None:
                continue
            c = contrib.get(p)
            n = None if c is None else w.intersect(c)
            if n is not None and n.is_empty:
                n = None
            old = snapshot.get(p)
            if n is None:
                changed = changed or old is not None
            else:
                new[p] = n
                if old is None or not n.includes(old):
                    changed = True
            trace.append(TraceEvent(it[0], p, "narrow", 0 if n is None else n.constraint_count()))
        cur = new
        if not changed:
            break
    return cur, passes


def select_widening_points(g: DepGraph, strategy) -> list:
    if strategy == "none":
        return []
    if strategy == "feedback":
        return feedback_widening_points(g)
    if strategy == "cutloop":
        return cut_loop_widening_points(g)
    chosen = set(strategy)
    return [n for n in g.nodes if n in chosen]


def validate_widening_points(program: Program, points: Iterable[PredKey]) -> None:
    """Every cycle of the dependency graph must contain a given point."""
    g = build_dep_graph(flatten_calls(program))
    cyc = find_cycle_avoiding(g, points)
    if cyc is not None:
        raise ConfigError(
            "widening points leave a cycle uncovered: " + " -> ".join(pred_str(p) for p in cyc)
        )


def analyze(program: Program, cfg: AnalysisConfig = AnalysisConfig()) -> AnalysisResult:
    program = flatten_calls(program)
    if not isinstance(cfg.wp_strategy, str):
        validate_widening_points(program, cfg.wp_strategy)
    clauses = compile_program(program)
    by_pred: dict = {}
    for cc in clauses:
        by_pred.setdefault(cc.key, []).append(cc)
    graph = build_dep_graph(program)
    bounds = bounding_polyhedra(program) if cfg.widen_up_to else {}
    interp: Interpretation = {}
    trace: list[TraceEvent] = []
    scc_iters: list = []
    it = [0]

    def emit(ev: TraceEvent):
        trace.append(ev)
        if cfg.verbose:
            log.debug("%s", ev)

    for scc in scc_order(graph):
        group = [cc for p in scc.nodes for cc in by_pred.get(p, ())]
        if not scc.recursive:
            it[0] += 1
            contrib = _contributions(group, interp.get)
            for p in scc.nodes:
                if p in contrib:
                    interp[p] = contrib[p]
                    emit(TraceEvent(it[0], p, "join", contrib[p].constraint_count()))
            scc_iters.append((list(scc.nodes), 1))
            continue

        wps = set(select_widening_points(graph.subgraph(scc.nodes), cfg.wp_strategy))
        growth = {p: 0 for p in scc.nodes}
        dirty = None
        rounds = 0
        while True:
            rounds += 1
            if rounds > cfg.max_iterations:
                raise NonConvergence(
                    f"no fixpoint after {cfg.max_iterations} iterations for "
                    + ", ".join(pred_str(p) for p in scc.nodes)
                )
            it[0] += 1
            todo = group if dirty is None else [cc for cc in group if cc.callees & dirty]
            contrib = _contributions(todo, interp.get)
            updates = {}
            for p in scc.nodes:
                c = contrib.get(p)
                if c is None:
                    continue
                old = interp.get(p)
                if old is not None and old.includes(c):
                    continue
                new = c if old is None else old.hull(c)
                op = "join"
                if old is not None and p in wps:
                    if growth[p] >= cfg.widen_delay:
                        if cfg.widen_up_to:
                            new, op = widen_up_to(old, new, bounds[p]), "widen-up-to"
                        else:
                            new, op = widen_standard(old, new), "widen"
                    else:
                        growth[p] += 1
                updates[p] = new
                emit(TraceEvent(it[0], p, op, new.constraint_count()))
            if not updates:
                break
            interp.update(updates)
            dirty = set(updates)
        for p in scc.nodes:
            if p in interp:
                emit(TraceEvent(it[0], p, "stabilised", interp[p].constraint_count()))
        scc_iters.append((list(scc.nodes), rounds))

        if cfg.narrow_iters > 0:
            events: list = []
            narrowed, _ = _narrow_group(group, scc.nodes, interp, interp, cfg.narrow_iters, it, events)
            for ev in events:
                emit(ev)
            for p in scc.nodes:
                if p in narrowed:
                    interp[p] = narrowed[p]
                else:
                    interp.pop(p, None)

    ordered = {p: interp[p] for p in program.predicates() if p in interp}
    return AnalysisResult(ordered, trace, scc_iters)
