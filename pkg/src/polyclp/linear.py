"""Linear approximation of arithmetic builtins and per-clause dimension frames."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .poly import Constraint, LinearExpression, Rel
from .syntax import Builtin, Clause, Int, Struct, Term, Var, parse_term, term_vars

_EQUALITIES = ("is", "=:=", "=", "==")
_DISEQUALITIES = ("\\==", "=\\=", "\\=")


def eval_ground(t: Term):
    """Value of a ground arithmetic term, or None when it has none.

    Bitwise or is never folded: it always gets its single approximating
    constraint, even between integers.
    """
    if isinstance(t, Int):
        return t.value
    if isinstance(t, Var) or not t.args:
        return None
    vals = [eval_ground(a) for a in t.args]
    if any(v is None for v in vals):
        return None
    f = t.functor
    if len(vals) == 1:
        if f == "-":
            return -vals[0]
        if f == "+":
            return vals[0]
        return None
    a, b = vals
    if f == "+":
        return a + b
    if f == "-":
        return a - b
    if f == "*":
        return a * b
    if f == "/":
        return None if b == 0 else Fraction(a) / b
    ints = isinstance(a, int) and isinstance(b, int)
    if not ints:
        return None
    if f == "//":
        return None if b == 0 else int(a / b)
    if f == "mod":
        return None if b == 0 else a % b
    if f == ">>":
        return a >> b if b >= 0 else None
    if f == "<<":
        return a << b if b >= 0 else None
    if f == "/\\":
        return a & b
    return None


def to_linear(t: Term) -> LinearExpression | None:
    """Linear form of an arithmetic term over variable names, constants folded."""
    if isinstance(t, Var):
        return LinearExpression.var(t.name)
    v = eval_ground(t)
    if v is not None:
        return LinearExpression.const(v)
    if isinstance(t, Int) or not t.args:
        return None
    if len(t.args) == 1:
        inner = to_linear(t.args[0])
        if inner is None:
            return None
        return -inner if t.functor == "-" else (inner if t.functor == "+" else None)
    a, b = (to_linear(x) for x in t.args)
    if a is None or b is None:
        return None
    if t.functor == "+":
        return a + b
    if t.functor == "-":
        return a - b
    if t.functor == "*":
        if a.is_constant():
            return b.scale(a.constant)
        if b.is_constant():
            return a.scale(b.constant)
        return None
    if t.functor == "<<":
        k = eval_ground(t.args[1])
        if isinstance(k, int) and k >= 0:
            return a.scale(2 ** k)
    return None


def linear_constraints(lit: Builtin) -> list[tuple[LinearExpression, Rel]] | None:
    """Linear approximation of a builtin over variable names; None is TOP.

    * ``is``/``=:=``/``=`` between linear terms: one equality.
    * ``<``, ``>``, ``=<``, ``>=``: one inequality, strict where the source is.
    * ``X is Y \\/ Z``: ``X =< Y + Z`` (sound for non-negative operands).
    * ``X is E >> k``: ``2^k*X =< E =< 2^k*X + 2^k - 1`` (arithmetic shift).
    * disequalities, products of variables, division: TOP.
    """
    op = lit.op
    if op in _DISEQUALITIES:
        return None
    lhs, rhs = to_linear(lit.lhs), to_linear(lit.rhs)
    if op in _EQUALITIES:
        if lhs is not None and rhs is not None:
            return [(lhs - rhs, Rel.EQ)]
        if lhs is not None:
            return _bitwise(lhs, lit.rhs)
        if rhs is not None and op != "is":
            return _bitwise(rhs, lit.lhs)
        return None
    if lhs is None or rhs is None:
        return None
    if op == "<":
        return [(rhs - lhs, Rel.GT)]
    if op == ">":
        return [(lhs - rhs, Rel.GT)]
    if op == "=<":
        return [(rhs - lhs, Rel.GEQ)]
    if op == ">=":
        return [(lhs - rhs, Rel.GEQ)]
    return None


def _bitwise(x: LinearExpression, t: Term):
    if not isinstance(t, Struct) or len(t.args) != 2:
        return None
    if t.functor == "\\/":
        a, b = to_linear(t.args[0]), to_linear(t.args[1])
        if a is None or b is None:
            return None
        return [(a + b - x, Rel.GEQ)]
    if t.functor == ">>":
        e = to_linear(t.args[0])
        k = eval_ground(t.args[1])
        if e is None or not isinstance(k, int) or k < 0:
            return None
        m = 2 ** k
        return [(e - x.scale(m), Rel.GEQ), (x.scale(m) + LinearExpression.const(m - 1) - e, Rel.GEQ)]
    return None


def linearise(lit: Builtin, frame: Mapping[str, int], dim: int) -> list[Constraint] | None:
    """Kernel constraints for ``lit`` in a clause frame; None means TOP."""
    lc = linear_constraints(lit)
    if lc is None:
        return None
    out = []
    for expr, rel in lc:
        c = expr.constraint(rel, frame, dim)
        if c.is_trivial() and c.const == 0:
            continue
        out.append(c)
    return out


def clause_frame(clause: Clause) -> tuple[dict[str, int], list[int]]:
    """Head variables get dimensions 0..arity-1, other variables follow in first-occurrence order."""
    frame: dict[str, int] = {}
    for a in clause.head.args:
        for v in term_vars(a):
            frame.setdefault(v, len(frame))
    for v in clause.variables():
        frame.setdefault(v, len(frame))
    return frame, list(range(clause.head.arity))


def parse_constraints(text: str, names: Sequence[str]) -> list[Constraint]:
    """Constraints from text such as ``1*A>=1, -1*A> -10`` over the given variable names."""
    text = text.strip()
    if text in ("", "true"):
        return []
    frame = {n: i for i, n in enumerate(names)}
    out = []
    for part in _split_top(text):
        t = parse_term(part)
        if not isinstance(t, Struct) or len(t.args) != 2:
            raise ValueError(f"not a constraint: {part!r}")
        lc = linear_constraints(Builtin(t.functor, t.args[0], t.args[1]))
        if lc is None:
            raise ValueError(f"not a linear constraint: {part!r}")
        for expr, rel in lc:
            unknown = set(expr.coeffs) - set(frame)
            if unknown:
                raise ValueError(f"unknown variables {sorted(unknown)} in {part!r}")
            out.append(expr.constraint(rel, frame, len(names)))
    return out


def _split_top(text: str) -> list[str]:
    depth, start, parts = 0, 0, []
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return [p for p in (s.strip() for s in parts) if p]
