"""Rendering analysis results as text or JSON, and reading them back."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass

from .engine import AnalysisResult
from .poly import Polyhedron, var_names
from .syntax import Program, pred_str


@dataclass
class RunReport:
    # (predicate "name/arity", constrained atom text) in first-definition order
    atoms: list
    total_constraints: int | None = None
    scc_iterations: list | None = None  # ("p/1,q/2", rounds)
    duration: float | None = None
    trace: list | None = None

    @classmethod
    def from_result(
        cls,
        program: Program,
        result: AnalysisResult,
        show_counts: bool = False,
        duration: float | None = None,
        show_trace: bool = False,
    ) -> RunReport:
        atoms = [(pred_str(k), constrained_atom(k, p)) for k, p in result.interpretation.items()]
        rep = cls(atoms)
        if show_counts:
            rep.total_constraints = sum(p.constraint_count() for p in result.interpretation.values())
            rep.scc_iterations = [[",".join(pred_str(k) for k in nodes), n] for nodes, n in result.scc_iterations]
        rep.duration = duration
        if show_trace:
            rep.trace = [str(e) for e in result.trace]
        return rep

    def to_text(self) -> str:
        lines = [text for _, text in self.atoms]
        if self.total_constraints is not None:
            lines.append(f"% constraints: {self.total_constraints}")
        if self.scc_iterations is not None:
            for preds, n in self.scc_iterations:
                lines.append(f"% iterations: {preds} = {n}")
        if self.trace is not None:
            lines.extend(f"% trace: {t}" for t in self.trace)
        if self.duration is not None:
            lines.append(f"% time: {self.duration:.6f} s")
        return "".join(line + "\n" for line in lines)

    def to_json(self) -> str:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        d["atoms"] = [{"predicate": p, "text": t} for p, t in self.atoms]
        return json.dumps(d, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> RunReport:
        d = json.loads(text)
        atoms = [(a["predicate"], a["text"]) for a in d.pop("atoms")]
        rep = cls(atoms, **d)
        if rep.scc_iterations is not None:
            rep.scc_iterations = [list(x) for x in rep.scc_iterations]
        return rep

    @classmethod
    def from_text(cls, text: str) -> RunReport:
        rep = cls([])
        for line in text.splitlines():
            if not line.startswith("%"):
                if line.strip():
                    rep.atoms.append((_atom_key(line), line))
                continue
            body = line[1:].strip()
            tag, _, rest = body.partition(": ")
            if tag == "constraints":
                rep.total_constraints = int(rest)
            elif tag == "iterations":
                preds, _, n = rest.rpartition(" = ")
                rep.scc_iterations = (rep.scc_iterations or []) + [[preds, int(n)]]
            elif tag == "trace":
                rep.trace = (rep.trace or []) + [rest]
            elif tag == "time":
                rep.duration = float(rest.split()[0])
        return rep


def _atom_key(line: str) -> str:
    m = re.match(r"([^( ]+)(\(([^)]*)\))?", line)
    name, args = m.group(1), m.group(3)
    return f"{name}/{0 if args is None else len(args.split(','))}"


def constrained_atom(key, p: Polyhedron) -> str:
    """``p(A,B) :- <constraints>.`` with variables named by argument position."""
    name, arity = key
    names = var_names(arity)
    head = name if arity == 0 else f"{name}({','.join(names)})"
    return f"{head} :- {p.to_text(names)}."
