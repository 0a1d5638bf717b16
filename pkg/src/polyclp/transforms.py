"""Source-to-source transformations applied before analysis.

``size_abstract`` replaces symbolic terms by their size under a norm, so the
polyhedral analysis can relate the sizes of arguments.  ``query_answer_transform``
specialises a program to a goal with the left-to-right magic scheme: every
predicate ``q`` gets a ``q_query`` predicate describing its calls and a
``q_ans`` predicate describing the answers to those calls.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .syntax import (
    CONS,
    Atom,
    Builtin,
    Call,
    Clause,
    Int,
    ParseError,
    Program,
    Struct,
    Term,
    Var,
    parse_clauses,
    standardise,
)

ARITH_FUNCTORS = {
    2: {"+", "-", "*", "/", "//", "mod", ">>", "<<", "\\/", "/\\"},
    1: {"-", "+"},
}

QUERY_SUFFIX = "_query"
ANSWER_SUFFIX = "_ans"


class TransformError(ValueError):
    pass


class Norm(str, Enum):
    TERM_SIZE = "term-size"
    LIST_LENGTH = "list-length"


def is_arithmetic(t: Term) -> bool:
    """Integers and compound terms built only from arithmetic functors."""
    if isinstance(t, Int):
        return True
    if isinstance(t, Var):
        return False
    if t.functor not in ARITH_FUNCTORS.get(len(t.args), ()):
        return False
    return all(isinstance(a, Var) or is_arithmetic(a) for a in t.args)


def _norm_parts(t: Term, norm: Norm) -> tuple[int, list[str]]:
    """Constant part and variable summands of the norm of ``t``."""
    if isinstance(t, Var):
        return 0, [t.name]
    if isinstance(t, Int):
        return 0, []
    if norm is Norm.LIST_LENGTH:
        if t.functor == CONS and len(t.args) == 2:
            c, vs = _norm_parts(t.args[1], norm)
            return c + 1, vs
        return 0, []
    if not t.args:
        return 0, []
    total, vs = 1, []
    for a in t.args:
        c, v = _norm_parts(a, norm)
        total += c
        vs.extend(v)
    return total, vs


def norm_term(t: Term, norm: Norm) -> Term:
    """The norm of ``t`` as an arithmetic term, e.g. ``1+Xs`` for ``[X|Xs]``."""
    c, vs = _norm_parts(t, norm)
    if not vs:
        return Int(c)
    out: Term = Var(vs[0])
    for v in vs[1:]:
        out = Struct("+", (out, Var(v)))
    if c:
        out = Struct("+", (Int(c), out)) if len(vs) == 1 else Struct("+", (out, Int(c)))
    return out


def _symbolic(t: Term) -> bool:
    return not isinstance(t, Var) and not is_arithmetic(t)


def _abstract_arg(t: Term, norm: Norm) -> Term:
    return norm_term(t, norm) if _symbolic(t) else t


def size_abstract(program: Program, norm: Norm | str) -> Program:
    """Replace symbolic terms by their norm throughout the program."""
    norm = Norm(norm)
    out = []
    for c in program.clauses:
        head = Atom(c.head.name, tuple(_abstract_arg(a, norm) for a in c.head.args))
        body = []
        for lit in c.body:
            if isinstance(lit, Call):
                a = lit.atom
                body.append(Call(Atom(a.name, tuple(_abstract_arg(x, norm) for x in a.args))))
            elif lit.op in ("=", "==", "\\=", "\\==") and (_symbolic(lit.lhs) or _symbolic(lit.rhs)):
                body.append(Builtin(lit.op, norm_term(lit.lhs, norm), norm_term(lit.rhs, norm)))
            else:
                body.append(lit)
        out.append(standardise(Clause(head, tuple(body))))
    return Program(tuple(out))


@dataclass(frozen=True)
class Goal:
    atom: Atom
    constraint: tuple = ()  # Builtin literals over the atom's variables

    def __str__(self) -> str:
        if not self.constraint:
            return str(self.atom)
        return f"{self.atom} :- {', '.join(str(b) for b in self.constraint)}"


def parse_goal(text: str) -> Goal:
    """Goal from ``main(X,Y) :- X =< 100`` or a bare atom such as ``exp(_,10,_)``."""
    text = text.strip()
    if not text.endswith("."):
        text += "."
    try:
        clauses = parse_clauses(text, standardise_heads=False)
    except ParseError as e:
        raise TransformError(f"bad goal: {e}") from None
    if len(clauses) != 1:
        raise TransformError("a goal is a single atom with optional constraints")
    c = clauses[0]
    if c.calls():
        raise TransformError("goal constraints must be arithmetic builtins")
    std = standardise(c)
    extra = std.body[: len(std.body) - len(c.body)]
    for lit in extra:
        if not isinstance(lit.rhs, (Var, Int)):
            raise TransformError(f"goal arguments must be variables or integers, found {lit.rhs}")
    return Goal(std.head, tuple(std.body))


def _query_atom(a: Atom) -> Atom:
    return Atom(a.name + QUERY_SUFFIX, a.args)


def _answer_atom(a: Atom) -> Atom:
    return Atom(a.name + ANSWER_SUFFIX, a.args)


def query_answer_transform(program: Program, goal: Goal) -> Program:
    """Left-to-right query-answer transformation of ``program`` for ``goal``.

    Calls to predicates the program does not define are left untouched, so
    they stay unconstrained.
    """
    if not program.is_defined(goal.atom.key):
        raise TransformError(f"goal predicate {goal.atom.name}/{goal.atom.arity} is not defined")
    out = [Clause(_query_atom(goal.atom), goal.constraint)]
    for c in program.clauses:
        hq = Call(_query_atom(c.head))
        prefix: list = []
        ans_body: list = [hq]
        for lit in c.body:
            if isinstance(lit, Builtin):
                prefix.append(lit)
                ans_body.append(lit)
                continue
            a = lit.atom
            if not program.is_defined(a.key):
                prefix.append(lit)
                ans_body.append(lit)
                continue
            out.append(Clause(_query_atom(a), tuple([hq] + prefix)))
            ans = Call(_answer_atom(a))
            prefix.append(ans)
            ans_body.append(ans)
        out.append(Clause(_answer_atom(c.head), tuple(ans_body)))
    return Program(tuple(standardise(c) for c in out))
