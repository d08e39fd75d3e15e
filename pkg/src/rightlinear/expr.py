"""Right-linear mu/nu-expressions.

Bound variables are stored as de Bruijn indices (``Bound``) and free
variables by name (``Var``), so plain structural equality is alpha-equality.
Use :func:`mu` / :func:`nu` to build binders from a named body.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator

__all__ = [
    "Expr", "Zero", "One", "Var", "Bound", "Sum", "Prefix", "Mu", "Nu",
    "ParseError", "mu", "nu", "total_sum", "parse", "to_text",
    "free_vars", "substitute", "unfold", "open_body", "size", "order_key",
    "letters", "is_closed", "is_mu_only", "is_guarded", "is_m_shaped",
    "FlIndex", "fl_closure", "fl_leq",
]


class Expr:
    """Base class. Hash is cached; equality is structural."""

    def _fields(self) -> tuple:
        return tuple(getattr(self, name) for name in self.__match_args__)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Expr) else False
        return hash(self) == hash(other) and self._fields() == other._fields()

    def __hash__(self) -> int:
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((type(self).__name__,) + self._fields())
            self.__dict__["_hash"] = h
            return h

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"<{to_text(self)}>"

    def __add__(self, other: Expr) -> Expr:
        return Sum(self, other)

    @cached_property
    def size(self) -> int:
        return 1 + sum(c.size for c in self._fields() if isinstance(c, Expr))


@dataclass(frozen=True, eq=False, repr=False)
class Zero(Expr):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class One(Expr):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=False, repr=False)
class Bound(Expr):
    index: int


@dataclass(frozen=True, eq=False, repr=False)
class Sum(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=False, repr=False)
class Prefix(Expr):
    letter: str
    body: Expr


@dataclass(frozen=True, eq=False, repr=False)
class Mu(Expr):
    body: Expr


@dataclass(frozen=True, eq=False, repr=False)
class Nu(Expr):
    body: Expr


FixedPoint = (Mu, Nu)


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)
        self.position = position


# --------------------------------------------------------------------------
# Binding

def _abstract(e: Expr, name: str, depth: int) -> Expr:
    if isinstance(e, Var):
        return Bound(depth) if e.name == name else e
    if isinstance(e, Sum):
        return Sum(_abstract(e.left, name, depth), _abstract(e.right, name, depth))
    if isinstance(e, Prefix):
        return Prefix(e.letter, _abstract(e.body, name, depth))
    if isinstance(e, FixedPoint):
        return type(e)(_abstract(e.body, name, depth + 1))
    return e


@lru_cache(maxsize=1 << 16)
def _instantiate(e: Expr, f: Expr, depth: int) -> Expr:
    # f has no dangling indices, so no shifting is needed
    if isinstance(e, Bound):
        return f if e.index == depth else e
    if isinstance(e, Sum):
        return Sum(_instantiate(e.left, f, depth), _instantiate(e.right, f, depth))
    if isinstance(e, Prefix):
        return Prefix(e.letter, _instantiate(e.body, f, depth))
    if isinstance(e, FixedPoint):
        return type(e)(_instantiate(e.body, f, depth + 1))
    return e


def mu(name: str, body: Expr) -> Mu:
    """``mu name. body`` where ``body`` mentions ``Var(name)``."""
    return Mu(_abstract(body, name, 0))


def nu(name: str, body: Expr) -> Nu:
    return Nu(_abstract(body, name, 0))


def unfold(e: Mu | Nu) -> Expr:
    """f(sigma X f(X)) for e = sigma X f(X)."""
    return _instantiate(e.body, e, 0)


def open_body(e: Mu | Nu, name: str) -> Expr:
    return _instantiate(e.body, Var(name), 0)


def total_sum(es: Iterable[Expr]) -> Expr:
    """Left-nested sum of ``es``; the empty sum is 0."""
    result = None
    for e in es:
        result = e if result is None else Sum(result, e)
    return Zero() if result is None else result


@lru_cache(maxsize=1 << 14)
def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Sum):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, (Prefix, Mu, Nu)):
        return free_vars(e.body)
    return frozenset()


@lru_cache(maxsize=1 << 16)
def substitute(e: Expr, x: str, f: Expr) -> Expr:
    """Capture-avoiding e[f/x]."""
    if x not in free_vars(e):
        return e
    if isinstance(e, Var):
        return f
    if isinstance(e, Sum):
        return Sum(substitute(e.left, x, f), substitute(e.right, x, f))
    if isinstance(e, Prefix):
        return Prefix(e.letter, substitute(e.body, x, f))
    return type(e)(substitute(e.body, x, f))


def size(e: Expr) -> int:
    return e.size


def is_closed(e: Expr) -> bool:
    return not free_vars(e)


def _walk(e: Expr) -> Iterator[Expr]:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(c for c in node._fields() if isinstance(c, Expr))


def letters(e: Expr) -> set[str]:
    return {n.letter for n in _walk(e) if isinstance(n, Prefix)}


def is_mu_only(e: Expr) -> bool:
    return not any(isinstance(n, Nu) for n in _walk(e))


def is_m_shaped(e: Expr) -> bool:
    """1 or a letter-prefixed expression."""
    return isinstance(e, (One, Prefix))


def is_guarded(e: Expr) -> bool:
    """Every variable occurrence lies under a prefix within its binder's scope."""

    def go(e: Expr, since_binder: tuple[bool, ...], free_ok: bool) -> bool:
        if isinstance(e, Bound):
            return since_binder[len(since_binder) - 1 - e.index]
        if isinstance(e, Var):
            return free_ok
        if isinstance(e, Sum):
            return go(e.left, since_binder, free_ok) and go(e.right, since_binder, free_ok)
        if isinstance(e, Prefix):
            return go(e.body, tuple(True for _ in since_binder), True)
        if isinstance(e, FixedPoint):
            return go(e.body, since_binder + (False,), free_ok)
        return True

    return go(e, (), False)


# --------------------------------------------------------------------------
# Printing

def _binder_names(taken: frozenset[str]) -> Iterator[str]:
    i = 0
    while True:
        name = f"X{i}"
        if name not in taken:
            yield name
        i += 1


def to_text(e: Expr) -> str:
    """Concrete syntax; binders are named X0, X1, ... in traversal order."""
    names = _binder_names(free_vars(e))
    out: list[str] = []

    def atom(e: Expr, scope: list[str]) -> None:
        if isinstance(e, (Sum, Mu, Nu)):
            out.append("(")
            expr(e, scope)
            out.append(")")
        else:
            expr(e, scope)

    def expr(e: Expr, scope: list[str]) -> None:
        if isinstance(e, Zero):
            out.append("0")
        elif isinstance(e, One):
            out.append("1")
        elif isinstance(e, Var):
            out.append(e.name)
        elif isinstance(e, Bound):
            if e.index >= len(scope):
                out.append(f"#{e.index}")
            else:
                out.append(scope[len(scope) - 1 - e.index])
        elif isinstance(e, Sum):
            if isinstance(e.left, (Mu, Nu)):
                atom(e.left, scope)
            else:
                expr(e.left, scope)
            out.append(" + ")
            atom(e.right, scope)
        elif isinstance(e, Prefix):
            out.append(e.letter + ".")
            atom(e.body, scope)
        else:
            name = next(names)
            out.append(("mu " if isinstance(e, Mu) else "nu ") + name + ". ")
            expr(e.body, scope + [name])

    expr(e, [])
    return "".join(out)


# --------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(r"\s*(?:(?P<kw>mu|nu)(?![a-z])|(?P<var>[A-Z][A-Za-z0-9_']*)|(?P<letter>[a-z])|(?P<sym>[01+.()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet: set[str] | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.alphabet = alphabet

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, value: str | None = None, kind: str | None = None) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = repr(value) if value is not None else kind
            found = repr(tok[1]) if tok[0] != "end" else "end of input"
            raise ParseError(f"expected {want}, found {found}", tok[2])
        self.i += 1
        return tok

    def expr(self) -> Expr:
        e = self.item()
        while self.peek()[1] == "+":
            self.take("+")
            e = Sum(e, self.item())
        return e

    def item(self) -> Expr:
        kind, value, pos = self.peek()
        if kind == "letter" and self.tokens[self.i + 1][1] == ".":
            if self.alphabet is not None and value not in self.alphabet:
                raise ParseError(f"undeclared letter {value!r}", pos)
            self.i += 2
            return Prefix(value, self.item())
        return self.atom()

    def atom(self) -> Expr:
        kind, value, pos = self.peek()
        if value == "0":
            self.i += 1
            return Zero()
        if value == "1":
            self.i += 1
            return One()
        if kind == "var":
            self.i += 1
            return Var(value)
        if value == "(":
            self.i += 1
            e = self.expr()
            self.take(")")
            return e
        if kind == "kw":
            self.i += 1
            name = self.take(kind="var")[1]
            self.take(".")
            body = self.expr()
            return mu(name, body) if value == "mu" else nu(name, body)
        if kind == "letter":
            raise ParseError(f"letter {value!r} must be followed by '.'", pos)
        raise ParseError(f"unexpected {value!r}" if kind != "end" else "unexpected end of input", pos)


def parse(text: str, alphabet: Iterable[str] | None = None, closed: bool = False) -> Expr:
    """Parse the concrete grammar.

    ``alphabet`` restricts the permitted letters (None accepts any lowercase
    letter). With ``closed=True`` free variables are an error.
    """
    p = _Parser(text, set(alphabet) if alphabet is not None else None)
    e = p.expr()
    p.take(kind="end")
    if closed and free_vars(e):
        raise ParseError(f"unbound variable {sorted(free_vars(e))[0]}")
    return e


# --------------------------------------------------------------------------
# Orders and Fischer-Ladner closure

@lru_cache(maxsize=1 << 16)
def order_key(e: Expr) -> tuple[int, str]:
    """Fixed total order on expressions: size, then printed form."""
    return (e.size, to_text(e))


def _fl_successors(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, Sum):
        return (e.left, e.right)
    if isinstance(e, Prefix):
        return (e.body,)
    if isinstance(e, FixedPoint):
        return (unfold(e),)
    return ()


@dataclass(frozen=True)
class FlIndex:
    """FL closure with stable insertion-order positions and parity priorities.

    ``rank`` orders members by :func:`order_key`. The priority of 1 is 0;
    every other member gets ``2 * (rank + 1)`` plus one unless it is a nu.
    """

    members: tuple[Expr, ...]
    position: dict[Expr, int] = field(repr=False)
    rank: dict[Expr, int] = field(repr=False)
    priority: dict[Expr, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, e: object) -> bool:
        return e in self.position

    def __iter__(self) -> Iterator[Expr]:
        return iter(self.members)


def _closure(roots: Iterable[Expr]) -> list[Expr]:
    members: list[Expr] = []
    seen: set[Expr] = set()
    work = list(roots)
    work.reverse()
    while work:
        e = work.pop()
        if e in seen:
            continue
        seen.add(e)
        members.append(e)
        work.extend(reversed(_fl_successors(e)))
    return members


def fl_closure(e: Expr | Iterable[Expr]) -> FlIndex:
    """FL closure of an expression (or of a collection of expressions)."""
    roots = [e] if isinstance(e, Expr) else list(e)
    members = _closure(roots)
    ranked = sorted(members, key=order_key)
    rank = {m: i for i, m in enumerate(ranked)}
    priority = {}
    for m in members:
        if isinstance(m, One):
            priority[m] = 0
        else:
            priority[m] = 2 * (rank[m] + 1) + (0 if isinstance(m, Nu) else 1)
    return FlIndex(
        members=tuple(members),
        position={m: i for i, m in enumerate(members)},
        rank=rank,
        priority=priority,
    )


@lru_cache(maxsize=1 << 12)
def _fl_set(f: Expr) -> frozenset[Expr]:
    return frozenset(_closure([f]))


def fl_leq(e: Expr, f: Expr) -> bool:
    """e <=_FL f, i.e. e is in FL(f)."""
    return e in _fl_set(f)
