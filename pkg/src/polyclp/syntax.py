"""Terms, clauses and the parser/printer for the supported CLP subset.

The accepted language is Prolog-like Horn clauses with integer arithmetic:

    Head :- Lit, ..., Lit.
    Head.

Body literals are predicate calls or arithmetic builtins (``is``, ``=``,
``=:=``, ``<``, ``>``, ``=<``, ``>=``, ``\\==``, ``=\\=``).  Cuts, negation,
if-then-else and disjunction are rejected with a named-feature error.

Parsed clauses are head-standardised: every head argument is a distinct
variable, and the original argument is moved into an ``=`` literal at the
front of the body.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence, Union

PredKey = tuple  # (name, arity)


# -- terms --------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Int:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Struct:
    """Compound term or atom (no arguments).  Arithmetic nodes are Structs too."""

    functor: str
    args: tuple = ()

    def __str__(self) -> str:
        return term_to_str(self)


Term = Union[Var, Int, Struct]

NIL = Struct("[]")
CONS = "[|]"


def make_list(items: Sequence[Term], tail: Term = NIL) -> Term:
    out = tail
    for t in reversed(items):
        out = Struct(CONS, (t, out))
    return out


def term_vars(t: Term, acc: list | None = None) -> list[str]:
    """Variable names in first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(t, Var):
        if t.name not in acc:
            acc.append(t.name)
    elif isinstance(t, Struct):
        for a in t.args:
            term_vars(a, acc)
    return acc


# -- clauses ------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    name: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def key(self) -> PredKey:
        return (self.name, len(self.args))

    def __str__(self) -> str:
        if not self.args:
            return _atom_name(self.name)
        return f"{_atom_name(self.name)}({','.join(term_to_str(a, 999) for a in self.args)})"


BUILTIN_OPS = ("is", "=", "==", "=:=", "<", ">", "=<", ">=", "\\==", "=\\=", "\\=")


@dataclass(frozen=True)
class Call:
    atom: Atom

    def __str__(self) -> str:
        return str(self.atom)


@dataclass(frozen=True)
class Builtin:
    op: str
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{term_to_str(self.lhs, 699)} {self.op} {term_to_str(self.rhs, 699)}"


BodyLiteral = Union[Call, Builtin]


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple = ()

    def variables(self) -> list[str]:
        acc: list[str] = []
        for a in self.head.args:
            term_vars(a, acc)
        for lit in self.body:
            if isinstance(lit, Call):
                for a in lit.atom.args:
                    term_vars(a, acc)
            else:
                term_vars(lit.lhs, acc)
                term_vars(lit.rhs, acc)
        return acc

    def calls(self) -> list[Atom]:
        return [lit.atom for lit in self.body if isinstance(lit, Call)]

    def builtins(self) -> list[Builtin]:
        return [lit for lit in self.body if isinstance(lit, Builtin)]

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(b) for b in self.body)}."


@dataclass(frozen=True)
class Program:
    clauses: tuple = ()

    @cached_property
    def index(self) -> dict:
        """(name, arity) -> clause indices, in first-definition order."""
        idx: dict = {}
        for i, c in enumerate(self.clauses):
            idx.setdefault(c.head.key, []).append(i)
        return idx

    def predicates(self) -> list[PredKey]:
        return list(self.index)

    def is_defined(self, key: PredKey) -> bool:
        return key in self.index

    def clauses_of(self, key: PredKey) -> list[Clause]:
        return [self.clauses[i] for i in self.index.get(key, ())]

    def externs(self) -> list[PredKey]:
        """Called but undefined predicates; analysed as unconstrained."""
        out = []
        for c in self.clauses:
            for a in c.calls():
                if a.key not in self.index and a.key not in out:
                    out.append(a.key)
        return out

    def __str__(self) -> str:
        return "".join(f"{c}\n" for c in self.clauses)


def pred_str(key: PredKey) -> str:
    return f"{key[0]}/{key[1]}"


# -- errors -------------------------------------------------------------------


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, column {col}: {message}" if line else message)
        self.line = line
        self.col = col


class UnsupportedFeature(ParseError):
    """A construct outside the supported subset (cut, negation, ...)."""


# -- tokenizer ----------------------------------------------------------------

_SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")
_OPERATORS = {
    ":-", "-->", "->", ";", "\\+", "=", "\\=", "==", "\\==", "is", "=:=", "=\\=",
    "<", ">", "=<", ">=", "+", "-", "\\/", "/\\", "*", "/", "//", ">>", "<<", "^", "**",
}


@dataclass
class Token:
    kind: str  # var | int | name | sym | punct | end | eof
    text: str
    line: int
    col: int
    glued: bool = False  # immediately follows the previous token


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<comment>%[^\n]*)|(?P<block>/\*.*?\*/)"
    r"|(?P<int>\d+)|(?P<var>[A-Z_][A-Za-z0-9_]*)|(?P<name>[a-z][A-Za-z0-9_]*)"
    r"|(?P<quoted>'(?:[^'\\]|\\.)*')|(?P<punct>[(),\[\]|!{}])",
    re.S,
)


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    pos, line, line_start = 0, 1, 0
    prev_end = -1
    n = len(text)
    while pos < n:
        col = pos - line_start + 1
        ch = text[pos]
        if ch == "." and (pos + 1 == n or text[pos + 1].isspace() or text[pos + 1] == "%"):
            toks.append(Token("end", ".", line, col))
            pos += 1
            prev_end = pos
            continue
        if ch in _SYMBOL_CHARS:
            j = pos
            while j < n and text[j] in _SYMBOL_CHARS:
                j += 1
            sym = text[pos:j]
            if sym.startswith("/*"):
                m = _TOKEN_RE.match(text, pos)
                if not m or m.lastgroup != "block":
                    raise ParseError("unterminated block comment", line, col)
                line += text.count("\n", pos, m.end())
                if "\n" in text[pos:m.end()]:
                    line_start = text.rfind("\n", pos, m.end()) + 1
                pos = m.end()
                continue
            while sym not in _OPERATORS and len(sym) > 1:
                sym = sym[:-1]
            if sym not in _OPERATORS:
                raise ParseError(f"unknown operator {text[pos:j]!r}", line, col)
            toks.append(Token("sym", sym, line, col, glued=prev_end == pos))
            pos += len(sym)
            prev_end = pos
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {ch!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind in ("ws", "comment", "block"):
            nl = s.count("\n")
            if nl:
                line += nl
                line_start = pos + s.rfind("\n") + 1
        elif kind == "quoted":
            toks.append(Token("name", s[1:-1].replace("\\'", "'"), line, col, glued=prev_end == pos))
        else:
            toks.append(Token(kind, s, line, col, glued=prev_end == pos))
        pos = m.end()
        if kind not in ("ws", "comment", "block"):
            prev_end = pos
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


# -- parser -------------------------------------------------------------------

# name -> (precedence, type)
_INFIX = {
    ":-": (1200, "xfx"), "-->": (1200, "xfx"),
    ";": (1100, "xfy"), "->": (1050, "xfy"), ",": (1000, "xfy"),
    "=": (700, "xfx"), "\\=": (700, "xfx"), "==": (700, "xfx"), "\\==": (700, "xfx"),
    "is": (700, "xfx"), "=:=": (700, "xfx"), "=\\=": (700, "xfx"), "<": (700, "xfx"),
    ">": (700, "xfx"), "=<": (700, "xfx"), ">=": (700, "xfx"),
    "+": (500, "yfx"), "-": (500, "yfx"), "\\/": (500, "yfx"), "/\\": (500, "yfx"),
    "*": (400, "yfx"), "/": (400, "yfx"), "//": (400, "yfx"), ">>": (400, "yfx"),
    "<<": (400, "yfx"), "mod": (400, "yfx"), "rem": (400, "yfx"),
    "**": (200, "xfx"), "^": (200, "xfy"),
}
_FEATURES = {";": "disjunction", "->": "if-then-else", "!": "cut", "\\+": "negation",
             "-->": "DCG rules"}


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.anon = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            got = t.text or t.kind
            raise ParseError(f"expected {want!r}, found {got!r}", t.line, t.col)
        return self.advance()

    def _infix_op(self) -> str | None:
        t = self.tok
        if t.kind == "sym" and t.text in _INFIX:
            return t.text
        if t.kind == "name" and t.text in ("is", "mod", "rem"):
            return t.text
        if t.kind == "punct" and t.text == ",":
            return ","
        return None

    def term(self, max_prec: int) -> Term:
        left, left_prec = self.primary(max_prec)
        while True:
            op = self._infix_op()
            if op is None:
                break
            prec, typ = _INFIX[op]
            if prec > max_prec:
                break
            la = prec if typ[0] == "y" else prec - 1
            if left_prec > la:
                break
            t = self.advance()
            if op in _FEATURES:
                raise UnsupportedFeature(f"{_FEATURES[op]} is not supported", t.line, t.col)
            ra = prec if typ[2] == "y" else prec - 1
            right = self.term(ra)
            left, left_prec = Struct(op, (left, right)), prec
        return left

    def primary(self, max_prec: int) -> tuple[Term, int]:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return Int(int(t.text)), 0
        if t.kind == "var":
            self.advance()
            if t.text == "_":
                self.anon += 1
                return Var(f"_{self.anon}"), 0
            return Var(t.text), 0
        if t.kind == "punct":
            if t.text == "(":
                self.advance()
                inner = self.term(1200)
                self.expect("punct", ")")
                return inner, 0
            if t.text == "[":
                return self.list_term(), 0
            if t.text == "!":
                raise UnsupportedFeature("cut is not supported", t.line, t.col)
            raise ParseError(f"unexpected {t.text!r}", t.line, t.col)
        if t.kind == "sym":
            if t.text == "\\+":
                raise UnsupportedFeature("negation is not supported", t.line, t.col)
            if t.text in ("-", "+"):
                self.advance()
                nxt = self.tok
                if nxt.kind == "int" and nxt.glued:
                    self.advance()
                    v = int(nxt.text)
                    return Int(-v if t.text == "-" else v), 0
                if nxt.kind == "punct" and nxt.text == "(" and nxt.glued:
                    self.advance()
                    inner = self.term(1200)
                    self.expect("punct", ")")
                    arg = inner
                else:
                    arg = self.term(200)
                return Struct(t.text, (arg,)), 200
            if t.text == ":-":
                raise UnsupportedFeature("directives are not supported", t.line, t.col)
            raise ParseError(f"unexpected operator {t.text!r}", t.line, t.col)
        if t.kind == "name":
            self.advance()
            nxt = self.tok
            if nxt.kind == "punct" and nxt.text == "(" and nxt.glued:
                self.advance()
                args = [self.term(999)]
                while self.tok.kind == "punct" and self.tok.text == ",":
                    self.advance()
                    args.append(self.term(999))
                self.expect("punct", ")")
                return Struct(t.text, tuple(args)), 0
            if t.text in ("is", "mod", "rem") and max_prec < 1200:
                raise ParseError(f"unexpected operator {t.text!r}", t.line, t.col)
            return Struct(t.text), 0
        if t.kind == "end":
            raise ParseError("unexpected end of clause", t.line, t.col)
        raise ParseError("unexpected end of input", t.line, t.col)

    def list_term(self) -> Term:
        self.expect("punct", "[")
        if self.tok.kind == "punct" and self.tok.text == "]":
            self.advance()
            return NIL
        items = [self.term(999)]
        while self.tok.kind == "punct" and self.tok.text == ",":
            self.advance()
            items.append(self.term(999))
        tail: Term = NIL
        if self.tok.kind == "punct" and self.tok.text == "|":
            self.advance()
            tail = self.term(999)
        self.expect("punct", "]")
        return make_list(items, tail)

    def clause_terms(self) -> Iterator[tuple[Term, Token]]:
        while self.tok.kind != "eof":
            start = self.tok
            t = self.term(1200)
            self.expect("end")
            yield t, start


def _conj(t: Term) -> list[Term]:
    if isinstance(t, Struct) and t.functor == "," and len(t.args) == 2:
        return _conj(t.args[0]) + _conj(t.args[1])
    return [t]


def _to_atom(t: Term, where: Token, what: str) -> Atom:
    if isinstance(t, Struct) and t.functor not in BUILTIN_OPS:
        return Atom(t.functor, t.args)
    raise ParseError(f"{what} must be a predicate atom, found {term_to_str(t)!r}", where.line, where.col)


def _to_literal(t: Term, where: Token) -> BodyLiteral | None:
    if isinstance(t, Struct) and t.functor in BUILTIN_OPS and len(t.args) == 2:
        return Builtin(t.functor, t.args[0], t.args[1])
    if isinstance(t, Struct) and t.functor == "true" and not t.args:
        return None
    if isinstance(t, Struct) and t.functor in ("fail", "false") and not t.args:
        return Builtin("=", Int(0), Int(1))
    return Call(_to_atom(t, where, "body literal"))


def _fresh(used: set, counter: list) -> Var:
    while True:
        name = f"_V{counter[0]}"
        counter[0] += 1
        if name not in used:
            used.add(name)
            return Var(name)


def standardise(clause: Clause) -> Clause:
    """Make head arguments pairwise-distinct variables."""
    used = set(clause.variables())
    counter = [0]
    seen: set = set()
    args, pre = [], []
    for a in clause.head.args:
        if isinstance(a, Var) and a.name not in seen:
            seen.add(a.name)
            args.append(a)
            continue
        v = _fresh(used, counter)
        seen.add(v.name)
        args.append(v)
        pre.append(Builtin("=", v, a))
    if not pre:
        return clause
    return Clause(Atom(clause.head.name, tuple(args)), tuple(pre) + tuple(clause.body))


def flatten_calls(program: Program) -> Program:
    """Rewrite call arguments that are not fresh variables into ``=`` literals.

    ``mc91l(N+11, X)`` becomes ``_V0 = N+11, mc91l(_V0, X)``; a variable
    repeated inside one call is split the same way.  The result has
    injective call-argument frames, which the engine relies on.
    """
    out = []
    for c in program.clauses:
        used = set(c.variables())
        counter = [0]
        body = []
        changed = False
        for lit in c.body:
            if isinstance(lit, Builtin):
                body.append(lit)
                continue
            seen: set = set()
            args = []
            for a in lit.atom.args:
                if isinstance(a, Var) and a.name not in seen:
                    seen.add(a.name)
                    args.append(a)
                    continue
                v = _fresh(used, counter)
                body.append(Builtin("=", v, a))
                args.append(v)
                changed = True
            body.append(Call(Atom(lit.atom.name, tuple(args))))
        out.append(Clause(c.head, tuple(body)) if changed else c)
    return Program(tuple(out))


def parse_clauses(text: str, standardise_heads: bool = True) -> list[Clause]:
    p = _Parser(text)
    out = []
    for t, start in p.clause_terms():
        if isinstance(t, Struct) and t.functor == ":-" and len(t.args) == 2:
            head = _to_atom(t.args[0], start, "clause head")
            body = [lit for lit in (_to_literal(b, start) for b in _conj(t.args[1])) if lit is not None]
        else:
            head = _to_atom(t, start, "clause head")
            body = []
        c = Clause(head, tuple(body))
        out.append(standardise(c) if standardise_heads else c)
    return out


def parse_program(text: str) -> Program:
    """Parse and head-standardise a program."""
    return Program(tuple(parse_clauses(text)))


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term(1200)
    if p.tok.kind == "end":
        p.advance()
    if p.tok.kind != "eof":
        raise ParseError(f"trailing input {p.tok.text!r}", p.tok.line, p.tok.col)
    return t


def parse_literal(text: str) -> BodyLiteral:
    t = parse_term(text)
    lit = _to_literal(t, Token("name", "", 1, 1))
    if lit is None:
        raise ParseError("empty literal")
    return lit


# -- printing -----------------------------------------------------------------


def _atom_name(name: str) -> str:
    if re.fullmatch(r"[a-z][A-Za-z0-9_]*", name) or name == "[]":
        return name
    return "'" + name.replace("'", "\\'") + "'"


def term_to_str(t: Term, max_prec: int = 1200) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Int):
        return str(t.value)
    if t.functor == CONS and len(t.args) == 2:
        items = []
        while isinstance(t, Struct) and t.functor == CONS and len(t.args) == 2:
            items.append(term_to_str(t.args[0], 999))
            t = t.args[1]
        tail = "" if t == NIL else "|" + term_to_str(t, 999)
        return "[" + ",".join(items) + tail + "]"
    if len(t.args) == 2 and t.functor in _INFIX:
        prec, typ = _INFIX[t.functor]
        la = prec if typ[0] == "y" else prec - 1
        ra = prec if typ[2] == "y" else prec - 1
        left = term_to_str(t.args[0], la)
        right = term_to_str(t.args[1], ra)
        if prec >= 700 or t.functor.isalpha():
            s = f"{left} {t.functor} {right}"
        else:
            if right.startswith("-") or right.startswith("+"):
                right = " " + right
            if t.functor in ("-", "+") and left[-1:] in _SYMBOL_CHARS:
                left = left + " "
            s = f"{left}{t.functor}{right}"
        return f"({s})" if prec > max_prec else s
    if len(t.args) == 1 and t.functor in ("-", "+"):
        a = t.args[0]
        inner = term_to_str(a, 200)
        if isinstance(a, Int) or inner[:1] in _SYMBOL_CHARS or inner[:1].isdigit():
            inner = f"({term_to_str(a, 1200)})"
        s = f"{t.functor}{inner}"
        return f"({s})" if 200 > max_prec else s
    if not t.args:
        return _atom_name(t.functor)
    return f"{_atom_name(t.functor)}({','.join(term_to_str(a, 999) for a in t.args)})"
