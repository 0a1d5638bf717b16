"""Not-necessarily-closed convex polyhedra over exact rationals.

Polyhedra are kept in constraint form only.  Strict inequalities are native:
every constraint carries a relation tag (``=``, ``>=`` or ``>``) and the
elimination machinery in :mod:`polyclp.fm` tracks strictness.

Values are immutable.  The minimised constraint system is computed lazily
and cached.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import lcm
from typing import Iterable, Mapping, Sequence

from . import fm, lp
from .fm import Infeasible


class PolyhedronError(ValueError):
    """Dimension mismatch or other contract violation."""


class Rel(enum.IntEnum):
    EQ = fm.EQ
    GEQ = fm.GEQ
    GT = fm.GT

    @property
    def symbol(self) -> str:
        return ("=", ">=", ">")[self]


@dataclass(frozen=True)
class LinearExpression:
    """``sum(coeffs[k] * k) + constant`` with rational coefficients.

    Keys are dimension indices for kernel use; the frontend also keys them by
    variable name before a clause frame is fixed.
    """

    coeffs: Mapping = None
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        cs = {k: Fraction(v) for k, v in (self.coeffs or {}).items() if v}
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "constant", Fraction(self.constant))

    @classmethod
    def var(cls, key, coeff=1) -> LinearExpression:
        return cls({key: coeff})

    @classmethod
    def const(cls, value) -> LinearExpression:
        return cls({}, value)

    def is_constant(self) -> bool:
        return not self.coeffs

    def __add__(self, other: LinearExpression) -> LinearExpression:
        cs = dict(self.coeffs)
        for k, v in other.coeffs.items():
            cs[k] = cs.get(k, 0) + v
        return LinearExpression(cs, self.constant + other.constant)

    def __neg__(self) -> LinearExpression:
        return self.scale(-1)

    def __sub__(self, other: LinearExpression) -> LinearExpression:
        return self + (-other)

    def scale(self, k) -> LinearExpression:
        return LinearExpression({v: c * k for v, c in self.coeffs.items()}, self.constant * k)

    def constraint(self, rel: Rel, index: Mapping | None = None, dim: int | None = None) -> Constraint:
        """Constraint ``self rel 0`` in a space of ``dim`` dimensions.

        ``index`` maps keys to dimensions; without it keys must be indices.
        """
        if index is None:
            index = {}
            keys = list(self.coeffs)
            for k in keys:
                index[k] = k
        if dim is None:
            dim = max((index[k] + 1 for k in self.coeffs), default=0)
        coeffs = [Fraction(0)] * dim
        for k, v in self.coeffs.items():
            i = index[k]
            if not 0 <= i < dim:
                raise PolyhedronError(f"dimension index {i} out of range for dimension {dim}")
            coeffs[i] += v
        return Constraint.of(coeffs, self.constant, rel)


@dataclass(frozen=True)
class Constraint:
    """``coeffs . x + const  rel  0`` with coprime integer coefficients."""

    coeffs: tuple[int, ...]
    const: int
    rel: Rel

    @classmethod
    def of(cls, coeffs: Sequence, const=0, rel: Rel = Rel.GEQ) -> Constraint:
        """Build a normalised constraint from rational data.

        A trivially true or false constraint is returned as a zero row with
        constant 0 (true) or -1 (false).
        """
        fr = [Fraction(c) for c in coeffs] + [Fraction(const)]
        m = reduce(lcm, (f.denominator for f in fr), 1)
        ints = [int(f * m) for f in fr]
        try:
            row = fm.normalize(tuple(ints[:-1]), ints[-1], int(rel))
        except Infeasible:
            return cls(tuple(0 for _ in coeffs), -1, Rel.GEQ)
        if row is None:
            return cls(tuple(0 for _ in coeffs), 0, Rel.GEQ)
        return cls._from_row(row)

    @classmethod
    def _from_row(cls, row) -> Constraint:
        return cls(row[0], row[1], Rel(row[2]))

    @property
    def dimension(self) -> int:
        return len(self.coeffs)

    @property
    def row(self):
        return (self.coeffs, self.const, int(self.rel))

    def is_trivial(self) -> bool:
        return not any(self.coeffs)

    def negations(self) -> list[Constraint]:
        """Constraints whose disjunction is the complement of ``self``."""
        neg = tuple(-a for a in self.coeffs)
        if self.rel == Rel.GEQ:
            return [Constraint(neg, -self.const, Rel.GT)]
        if self.rel == Rel.GT:
            return [Constraint(neg, -self.const, Rel.GEQ)]
        return [Constraint(self.coeffs, self.const, Rel.GT), Constraint(neg, -self.const, Rel.GT)]

    def split(self) -> list[Constraint]:
        """Equalities become two opposite inequalities."""
        if self.rel != Rel.EQ:
            return [self]
        neg = tuple(-a for a in self.coeffs)
        return [Constraint(self.coeffs, self.const, Rel.GEQ), Constraint(neg, -self.const, Rel.GEQ)]

    def holds_at(self, point: Sequence) -> bool:
        v = sum(Fraction(a) * p for a, p in zip(self.coeffs, point)) + self.const
        return v == 0 if self.rel == Rel.EQ else (v >= 0 if self.rel == Rel.GEQ else v > 0)

    def sort_key(self):
        first = next((i for i, a in enumerate(self.coeffs) if a), len(self.coeffs))
        return (first, int(self.rel), tuple(-a for a in self.coeffs), self.const)

    def to_text(self, names: Sequence[str] | None = None) -> str:
        return format_constraint(self, names)

    def __str__(self) -> str:
        return self.to_text()


def var_names(n: int) -> list[str]:
    """A, B, ..., Z, A1, B1, ... for the printing frame."""
    out = []
    for i in range(n):
        q, r = divmod(i, 26)
        out.append(chr(ord("A") + r) + (str(q) if q else ""))
    return out


def format_constraint(c: Constraint, names: Sequence[str] | None = None) -> str:
    """Canonical text, e.g. ``1*A+ -5*D= -25`` or ``-1*A> -10``."""
    if names is None:
        names = var_names(len(c.coeffs))
    terms = []
    for a, name in zip(c.coeffs, names):
        if a:
            terms.append(f"{a}*{name}" if a > 0 or not terms else f" {a}*{name}")
    lhs = "+".join(terms) if terms else "0"
    rhs = -c.const
    return f"{lhs}{c.rel.symbol}{rhs}" if rhs >= 0 else f"{lhs}{c.rel.symbol} {rhs}"


def _rows(cs: Iterable[Constraint]) -> list:
    return [c.row for c in cs]


class Polyhedron:
    """An NNC convex polyhedron ``{x in R^n | constraints}``.

    Build with :meth:`make`, :meth:`universe` or :meth:`empty`.  Equality
    (``==``) is semantic: mutual inclusion.
    """

    def __init__(self, dimension: int, rows: Sequence, empty: bool | None = None):
        self.dimension = dimension
        self._rows = tuple(rows)
        if empty is not None:
            self.__dict__["is_empty"] = empty

    # -- construction ----------------------------------------------------

    @classmethod
    def make(cls, dimension: int, constraints: Iterable[Constraint] = ()) -> Polyhedron:
        rows = []
        for c in constraints:
            if len(c.coeffs) != dimension:
                raise PolyhedronError(
                    f"constraint over {len(c.coeffs)} dimensions in a {dimension}-dimensional space"
                )
            rows.append(c.row)
        return cls._from_rows(dimension, rows)

    @classmethod
    def _from_rows(cls, dimension: int, rows: list) -> Polyhedron:
        try:
            rows = fm.simplify(r for r in rows if any(r[0]) or _ground_false(r))
            if any(not any(r[0]) for r in rows):
                raise Infeasible
        except Infeasible:
            return cls.empty(dimension)
        return cls(dimension, rows)

    @classmethod
    def universe(cls, dimension: int) -> Polyhedron:
        return cls(dimension, (), empty=False)

    @classmethod
    def empty(cls, dimension: int) -> Polyhedron:
        p = cls(dimension, ((tuple([0] * dimension), -1, fm.GEQ),), empty=True)
        p.__dict__["_minimal"] = p._rows
        return p

    # -- queries ---------------------------------------------------------

    @cached_property
    def is_empty(self) -> bool:
        return not _sat(list(self._rows), self.dimension)

    def is_universe(self) -> bool:
        return not self.is_empty and not self._minimal

    @cached_property
    def _minimal(self) -> tuple:
        if self.is_empty:
            return Polyhedron.empty(self.dimension)._rows
        return _minimize(self.dimension, list(self._rows))

    @property
    def constraints(self) -> tuple[Constraint, ...]:
        """The minimised system in canonical order."""
        return tuple(Constraint._from_row(r) for r in self._minimal)

    @property
    def raw_constraints(self) -> tuple[Constraint, ...]:
        return tuple(Constraint._from_row(r) for r in self._rows)

    def constraint_count(self) -> int:
        return 0 if self.is_empty else len(self._minimal)

    def entails(self, c: Constraint) -> bool:
        self._check_dim(c.dimension)
        if self.is_empty:
            return True
        rows = self._test_rows
        for neg in c.negations():
            if _sat(rows + [neg.row], self.dimension):
                return False
        return True

    @property
    def _test_rows(self) -> list:
        # Prefer the minimised system when it is already known.
        return list(self.__dict__.get("_minimal", self._rows))

    def includes(self, inner: Polyhedron) -> bool:
        """``inner`` is a subset of ``self``."""
        self._check_same(inner)
        if inner.is_empty:
            return True
        if self.is_empty:
            return False
        return all(inner.entails(Constraint._from_row(r)) for r in self._test_rows)

    def contains_point(self, point: Sequence) -> bool:
        return not self.is_empty and all(Constraint._from_row(r).holds_at(point) for r in self._rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polyhedron):
            return NotImplemented
        return self.dimension == other.dimension and self.includes(other) and other.includes(self)

    def __hash__(self) -> int:
        return hash((self.dimension, self.is_empty))

    # -- lattice operations ----------------------------------------------

    def intersect(self, other: Polyhedron) -> Polyhedron:
        self._check_same(other)
        if self.is_known_empty() or other.is_known_empty():
            return Polyhedron.empty(self.dimension)
        return Polyhedron._from_rows(self.dimension, list(self._rows) + list(other._rows))

    def add_constraints(self, constraints: Iterable[Constraint]) -> Polyhedron:
        return self.intersect(Polyhedron.make(self.dimension, constraints))

    def is_known_empty(self) -> bool:
        return self.__dict__.get("is_empty", False)

    def hull(self, other: Polyhedron) -> Polyhedron:
        self._check_same(other)
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        if self.includes(other):
            return self
        if other.includes(self):
            return other
        return _hull(self, other)

    def project_out(self, dims: Iterable[int]) -> Polyhedron:
        """Eliminate ``dims`` and compact the remaining indices."""
        dims = sorted(set(dims))
        for d in dims:
            self._check_dim_index(d)
        keep = [i for i in range(self.dimension) if i not in set(dims)]
        n = len(keep)
        if self.is_known_empty():
            return Polyhedron.empty(n)
        try:
            rows = fm.project(list(self._rows), dims)
        except Infeasible:
            return Polyhedron.empty(n)
        out = []
        for coeffs, const, rel in rows:
            out.append((tuple(coeffs[i] for i in keep), const, rel))
        p = Polyhedron._from_rows(n, out)
        if not dims:
            return p
        if not p.is_known_empty() and not out:
            # Full elimination of a satisfiable system leaves no rows.
            p.__dict__["is_empty"] = False
        return p

    def project_onto(self, dims: Sequence[int]) -> Polyhedron:
        """Keep ``dims`` (in the given order) and eliminate the rest."""
        dims = list(dims)
        rest = [i for i in range(self.dimension) if i not in set(dims)]
        p = self.project_out(rest)
        kept = [i for i in range(self.dimension) if i in set(dims)]
        return p.remap({kept.index(d): k for k, d in enumerate(dims)}, len(dims))

    def remap(self, mapping: Mapping[int, int], new_dimension: int) -> Polyhedron:
        """Rename dimensions under an injective partial map.

        Unmapped dimensions must be unconstrained.
        """
        targets = list(mapping.values())
        if len(set(targets)) != len(targets):
            raise PolyhedronError("remap mapping is not injective")
        for src, dst in mapping.items():
            self._check_dim_index(src)
            if not 0 <= dst < new_dimension:
                raise PolyhedronError(f"remap target {dst} out of range for dimension {new_dimension}")
        if self.is_empty:
            return Polyhedron.empty(new_dimension)
        rows = self._rows
        if any(r[0][i] for r in rows for i in range(self.dimension) if i not in mapping):
            rows = self._minimal
            if any(r[0][i] for r in rows for i in range(self.dimension) if i not in mapping):
                raise PolyhedronError("remap would drop a constrained dimension")
        out = []
        for coeffs, const, rel in rows:
            nc = [0] * new_dimension
            for src, dst in mapping.items():
                nc[dst] = coeffs[src]
            out.append((tuple(nc), const, rel))
        return Polyhedron(new_dimension, out, empty=False)

    # -- widening --------------------------------------------------------

    def widen(self, other: Polyhedron) -> Polyhedron:
        return widen_standard(self, other)

    # -- helpers ---------------------------------------------------------

    def _check_same(self, other: Polyhedron):
        if self.dimension != other.dimension:
            raise PolyhedronError(f"dimension mismatch: {self.dimension} vs {other.dimension}")

    def _check_dim(self, n: int):
        if n != self.dimension:
            raise PolyhedronError(f"dimension mismatch: {self.dimension} vs {n}")

    def _check_dim_index(self, i: int):
        if not 0 <= i < self.dimension:
            raise PolyhedronError(f"dimension index {i} out of range for dimension {self.dimension}")

    def to_text(self, names: Sequence[str] | None = None) -> str:
        if self.is_empty:
            return "false"
        cs = self.constraints
        if not cs:
            return "true"
        return ", ".join(format_constraint(c, names) for c in cs)

    def __repr__(self) -> str:
        return f"Polyhedron({self.dimension}, {self.to_text()})"


def _ground_false(row) -> bool:
    try:
        fm.normalize(row[0], row[1], row[2])
    except Infeasible:
        return True
    return False


# Fourier-Motzkin is fastest on small systems; larger ones go to the simplex.
_FM_MAX_ROWS = 12


def _sat(rows, dim) -> bool:
    if len(rows) <= _FM_MAX_ROWS and dim <= 4:
        return fm.satisfiable(rows, dim)
    return lp.satisfiable(rows, dim)


def _minimize(dim: int, rows: list) -> tuple:
    """Irredundant system: RREF equalities, reduced non-redundant inequalities."""
    eqs = [r for r in rows if r[2] == fm.EQ]
    ineqs = [r for r in rows if r[2] != fm.EQ]
    # Implicit equalities: a non-strict inequality e >= 0 with e > 0 infeasible.
    kept = []
    for r in ineqs:
        if r[2] == fm.GEQ and not _sat(rows + [(r[0], r[1], fm.GT)], dim):
            eqs.append((r[0], r[1], fm.EQ))
        else:
            kept.append(r)
    eqs, pivots = _rref(eqs, dim)
    reduced = []
    for r in kept:
        r = _reduce(r, eqs, pivots)
        if r is not None:
            reduced.append(r)
    reduced = fm.simplify(reduced)
    if any(r[2] == fm.EQ for r in reduced):
        # A pinched pair surfaced after reduction; fold it in and start again.
        return _minimize(dim, eqs + reduced)
    ineqs = sorted(reduced, key=_row_key)
    i = len(ineqs) - 1
    while i >= 0:
        rest = ineqs[:i] + ineqs[i + 1:]
        r = ineqs[i]
        if _entailed(rest, r, dim):
            ineqs = rest
        i -= 1
    return tuple(sorted(eqs + ineqs, key=_row_key))


def _entailed(rows: list, r, dim: int) -> bool:
    for neg in Constraint._from_row(r).negations():
        if _sat(rows + [neg.row], dim):
            return False
    return True


def _row_key(r):
    return Constraint._from_row(r).sort_key()


def _rref(eqs: list, dim: int):
    """Reduced row echelon form; pivots on the lowest-index columns."""
    mat = [[Fraction(a) for a in r[0]] + [Fraction(r[1])] for r in eqs]
    pivots = []
    row = 0
    for col in range(dim):
        piv = next((k for k in range(row, len(mat)) if mat[k][col] != 0), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        lead = mat[row][col]
        mat[row] = [v / lead for v in mat[row]]
        for k in range(len(mat)):
            if k != row and mat[k][col] != 0:
                f = mat[k][col]
                mat[k] = [a - f * b for a, b in zip(mat[k], mat[row])]
        pivots.append(col)
        row += 1
    out = []
    for vals in mat[:row]:
        m = reduce(lcm, (v.denominator for v in vals), 1)
        ints = [int(v * m) for v in vals]
        out.append(fm.normalize(tuple(ints[:-1]), ints[-1], fm.EQ))
    return out, pivots


def _reduce(r, eqs, pivots):
    """Eliminate pivot columns from inequality ``r`` using the RREF equalities."""
    for e, col in zip(eqs, pivots):
        if r[0][col]:
            r = fm._substitute(e, r, col)
            if r is None:
                return None
    return r


def _hull(p1: Polyhedron, p2: Polyhedron) -> Polyhedron:
    """Smallest NNC polyhedron containing both (both non-empty).

    Lifting construction: x = y1 + y2 where y_i lies in the homogenised copy of
    P_i scaled by lambda_i, lambda_1 + lambda_2 = 1.  Strict constraints use an
    epsilon coordinate (a.x + c > 0 becomes a.x + c - eps >= 0 with
    0 <= eps <= 1); the hull is taken in (x, eps) space and eps > 0 is
    imposed before eliminating it.  This yields the exact NNC hull.
    """
    n = p1.dimension
    r1 = list(p1._minimal)
    r2 = list(p2._minimal)
    strict = any(r[2] == fm.GT for r in r1 + r2)
    # layout: x[0:n], y[n:2n], lam at 2n, eps at 2n+1, f (eps part of y1) at 2n+2
    lam = 2 * n
    eps, f = 2 * n + 1, 2 * n + 2
    dim = 2 * n + (3 if strict else 1)
    rows = []

    def row(coeffs, const, rel):
        r = fm.normalize(tuple(coeffs), const, rel)
        if r is not None:
            rows.append(r)

    for coeffs, const, rel in r1:
        v = [0] * dim
        for i, a in enumerate(coeffs):
            v[n + i] = a
        v[lam] = const
        if rel == fm.GT:
            v[f] = -1
            rel = fm.GEQ
        row(v, 0, rel)
    for coeffs, const, rel in r2:
        # a.(x - y) + c (1 - lam) [- (eps - f)] rel 0
        v = [0] * dim
        for i, a in enumerate(coeffs):
            v[i] = a
            v[n + i] = -a
        v[lam] = -const
        if rel == fm.GT:
            v[eps] = -1
            v[f] = 1
            rel = fm.GEQ
        row(v, const, rel)
    v = [0] * dim
    v[lam] = 1
    row(v, 0, fm.GEQ)
    v = [0] * dim
    v[lam] = -1
    row(v, 1, fm.GEQ)
    if strict:
        # 0 <= f <= lam ; 0 <= eps - f <= 1 - lam ; eps > 0
        for pairs, const in (({f: 1}, 0), ({lam: 1, f: -1}, 0), ({eps: 1, f: -1}, 0),
                             ({eps: -1, f: 1, lam: -1}, 1)):
            v = [0] * dim
            for k, a in pairs.items():
                v[k] = a
            row(v, const, fm.GEQ)
        v = [0] * dim
        v[eps] = 1
        row(v, 0, fm.GT)
    try:
        out = fm.project(rows, range(n, dim))
    except Infeasible:  # pragma: no cover - both arguments are non-empty
        raise AssertionError("hull of non-empty polyhedra is empty")
    out = [(tuple(c[:n]), k, rel) for c, k, rel in out]
    return Polyhedron(n, fm.simplify(out), empty=False)


# -- module-level operation surface --------------------------------------


def make(dimension: int, constraints: Iterable[Constraint] = ()) -> Polyhedron:
    return Polyhedron.make(dimension, constraints)


def is_empty(p: Polyhedron) -> bool:
    return p.is_empty


def intersect(p1: Polyhedron, p2: Polyhedron) -> Polyhedron:
    return p1.intersect(p2)


def convex_hull(p1: Polyhedron, p2: Polyhedron) -> Polyhedron:
    return p1.hull(p2)


def entails(p: Polyhedron, c: Constraint) -> bool:
    return p.entails(c)


def includes(outer: Polyhedron, inner: Polyhedron) -> bool:
    return outer.includes(inner)


def project_out(p: Polyhedron, dims: Iterable[int]) -> Polyhedron:
    return p.project_out(dims)


def remap(p: Polyhedron, mapping: Mapping[int, int], new_dimension: int) -> Polyhedron:
    return p.remap(mapping, new_dimension)


def constraint_count(p: Polyhedron) -> int:
    return p.constraint_count()


def _split_all(cs: Iterable[Constraint]) -> list[Constraint]:
    out = []
    for c in cs:
        out.extend(c.split())
    return out


def widen_standard(p1: Polyhedron, p2: Polyhedron) -> Polyhedron:
    """Standard widening with the Halbwachs refinement.

    Keeps the constraints of ``p1`` still satisfied by ``p2``, plus every
    constraint of ``p2`` that can replace some constraint of ``p1`` without
    changing ``p1``.  Equalities are split into inequality pairs first.
    Callers must pass ``p1`` included in ``p2``.
    """
    p1._check_same(p2)
    if p1.is_empty:
        return p2
    c1 = _split_all(p1.constraints)
    c2 = _split_all(p2.constraints)
    kept = [c for c in c1 if p2.entails(c)]
    n = p1.dimension
    rows1 = [c.row for c in c1]
    for c in c2:
        if c in kept:
            continue
        for k, old in enumerate(c1):
            rest = rows1[:k] + rows1[k + 1:] + [c.row]
            if _entailed(rest, old.row, n):
                kept.append(c)
                break
    return Polyhedron.make(n, kept)


def widen_up_to(p1: Polyhedron, p2: Polyhedron, bound: Polyhedron) -> Polyhedron:
    """Standard widening, then re-add the bound's constraints that ``p2`` satisfies."""
    p1._check_same(bound)
    w = widen_standard(p1, p2)
    if bound.is_empty:
        return w
    thresholds = [c for c in _split_all(bound.constraints) if p2.entails(c)]
    if not thresholds:
        return w
    return w.add_constraints(thresholds)
