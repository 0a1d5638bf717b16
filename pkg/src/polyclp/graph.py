"""Predicate dependency graphs: SCC ordering and widening-point selection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .syntax import Program


@dataclass
class DepGraph:
    """Directed graph with a fixed node order; ``p -> q`` when p calls q."""

    nodes: list
    succ: dict = field(default_factory=dict)

    def __post_init__(self):
        for n in self.nodes:
            self.succ.setdefault(n, [])

    @classmethod
    def from_edges(cls, nodes: Iterable[Hashable], edges: Iterable[tuple]) -> DepGraph:
        g = cls(list(nodes))
        for a, b in edges:
            g.add_edge(a, b)
        return g

    def add_edge(self, a, b) -> None:
        if b not in self.succ[a]:
            self.succ[a].append(b)

    def edges(self) -> list[tuple]:
        return [(a, b) for a in self.nodes for b in self.succ[a]]

    def subgraph(self, nodes: Iterable) -> DepGraph:
        keep = set(nodes)
        order = [n for n in self.nodes if n in keep]
        return DepGraph.from_edges(order, [(a, b) for a, b in self.edges() if a in keep and b in keep])

    def position(self) -> dict:
        return {n: i for i, n in enumerate(self.nodes)}


def build_dep_graph(program: Program) -> DepGraph:
    g = DepGraph(program.predicates())
    for c in program.clauses:
        for a in c.calls():
            if program.is_defined(a.key):
                g.add_edge(c.head.key, a.key)
    return g


@dataclass
class SCC:
    nodes: list
    recursive: bool


def scc_order(g: DepGraph) -> list[SCC]:
    """Strongly connected components, callees before callers (Tarjan)."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[SCC] = []
    counter = 0
    pos = g.position()
    for root in g.nodes:
        if root in index:
            continue
        work = [(root, iter(g.succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(g.succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comp.sort(key=pos.__getitem__)
                rec = len(comp) > 1 or v in g.succ[v]
                out.append(SCC(comp, rec))
    return out


def _ordered(g: DepGraph, chosen) -> list:
    return [n for n in g.nodes if n in chosen]


def feedback_widening_points(g: DepGraph) -> list:
    """Targets of DFS back edges.

    The DFS starts from nodes without predecessors, then from any node still
    unvisited, both in node order.
    """
    has_pred = {b for _, b in g.edges()}
    roots = [n for n in g.nodes if n not in has_pred] + list(g.nodes)
    state: dict = {}  # 1 on stack, 2 finished
    chosen = set()
    for root in roots:
        if root in state:
            continue
        state[root] = 1
        work = [(root, iter(g.succ[root]))]
        while work:
            v, it = work[-1]
            for w in it:
                s = state.get(w)
                if s is None:
                    state[w] = 1
                    work.append((w, iter(g.succ[w])))
                    break
                if s == 1:
                    chosen.add(w)
            else:
                state[v] = 2
                work.pop()
    return _ordered(g, chosen)


def traversal_loops(g: DepGraph) -> list[frozenset]:
    """Loops recorded by the ancestor-tracking traversal.

    Every node is a traversal start (in node order) with one shared visited
    set; reaching a visited node that is also an ancestor records the path
    from it to the current node as a loop.
    """
    visited: set = set()
    loops: list[frozenset] = []
    for start in g.nodes:
        # explicit stack of (node, ancestors) frames, successors in order
        work = [(start, [])]
        while work:
            n, anc = work.pop()
            if n in visited:
                if n in anc:
                    loop = frozenset(anc[: anc.index(n) + 1])
                    if loop not in loops:
                        loops.append(loop)
                continue
            visited.add(n)
            path = [n] + anc
            for s in reversed(g.succ[n]):
                work.append((s, path))
    return loops


def _greedy_cover(g: DepGraph, loops: Sequence[frozenset]) -> list:
    remaining = list(loops)
    chosen: list = []
    while remaining:
        counts = [(sum(1 for l in remaining if n in l), -i, n) for i, n in enumerate(g.nodes)]
        best = max(counts)[2]
        chosen.append(best)
        remaining = [l for l in remaining if best not in l]
    return chosen


def find_cycle_avoiding(g: DepGraph, points: Iterable) -> list | None:
    """A cycle of ``g`` containing none of ``points``, or None."""
    banned = set(points)
    state: dict = {}
    for root in g.nodes:
        if root in banned or root in state:
            continue
        state[root] = 1
        path = [root]
        work = [iter(g.succ[root])]
        while work:
            for w in work[-1]:
                if w in banned:
                    continue
                s = state.get(w)
                if s == 1:
                    return path[path.index(w):]
                if s is None:
                    state[w] = 1
                    path.append(w)
                    work.append(iter(g.succ[w]))
                    break
            else:
                state[path.pop()] = 2
                work.pop()
    return None


def cut_loop_widening_points(g: DepGraph) -> list:
    """Greedy loop cover: repeatedly take the node on the most remaining loops.

    Ties go to the earliest node.  The traversal does not see every cycle of
    a graph, so any cycle the cover misses is added to the loop set and the
    greedy selection rerun; the result therefore meets every cycle.
    """
    loops = traversal_loops(g)
    chosen = _greedy_cover(g, loops)
    while True:
        cyc = find_cycle_avoiding(g, chosen)
        if cyc is None:
            return _ordered(g, set(chosen))
        loops.append(frozenset(cyc))
        chosen = _greedy_cover(g, loops)
