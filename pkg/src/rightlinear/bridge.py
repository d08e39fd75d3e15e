"""Translations between regular expressions and right-linear expressions.

* ``regex_bullet(e, g)`` is the right-linear product e . g; ``e . 1`` reads a
  regular expression as a μ-expression.
* ``idfree_bullet`` does the same for identity-free expressions and always
  yields guarded output; ``omega_to_expr`` extends it to sums of e f^w.
* ``expr_to_coeffs`` goes back: e = sum_X e^X X + e^1.
* ``bekic_solve`` resolves a two-variable system with nested fixed points.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import count
from typing import Iterable

from .automata import EquationSystem
from .expr import (
    Expr, Mu, One, ParseError, Prefix, Sum, Var, Zero, free_vars,
    mu, nu, open_body, substitute,
)


class Regex:
    def __str__(self) -> str:
        return regex_text(self)


@dataclass(frozen=True, repr=False)
class REmpty(Regex):
    pass


@dataclass(frozen=True, repr=False)
class REps(Regex):
    pass


@dataclass(frozen=True, repr=False)
class RSym(Regex):
    letter: str


@dataclass(frozen=True, repr=False)
class RAlt(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True, repr=False)
class RCat(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True, repr=False)
class RStar(Regex):
    body: Regex


@dataclass(frozen=True, repr=False)
class RPlus(Regex):
    body: Regex


@dataclass(frozen=True, repr=False)
class ROmega(Regex):
    """Only meaningful at the top of an omega form."""

    body: Regex


for _cls in (REmpty, REps, RSym, RAlt, RCat, RStar, RPlus, ROmega):
    _cls.__repr__ = lambda self: f"<{regex_text(self)}>"


def alt(x: Regex, y: Regex) -> Regex:
    if isinstance(x, REmpty):
        return y
    if isinstance(y, REmpty):
        return x
    return RAlt(x, y)


def cat(x: Regex, y: Regex) -> Regex:
    if isinstance(x, REmpty) or isinstance(y, REmpty):
        return REmpty()
    if isinstance(x, REps):
        return y
    if isinstance(y, REps):
        return x
    return RCat(x, y)


def star(x: Regex) -> Regex:
    return REps() if isinstance(x, (REmpty, REps)) else RStar(x)


def plus(x: Regex) -> Regex:
    return x if isinstance(x, (REmpty, REps)) else RPlus(x)


def regex_text(r: Regex) -> str:
    def go(r: Regex, prec: int) -> str:
        # prec: 0 sum, 1 concat, 2 postfix operand
        if isinstance(r, REmpty):
            return "0"
        if isinstance(r, REps):
            return "1"
        if isinstance(r, RSym):
            return r.letter
        if isinstance(r, RAlt):
            s = f"{go(r.left, 0)} + {go(r.right, 1)}"
            return f"({s})" if prec > 0 else s
        if isinstance(r, RCat):
            s = f"{go(r.left, 1)} {go(r.right, 2)}"
            return f"({s})" if prec > 1 else s
        op = {RStar: "*", RPlus: "^+", ROmega: "^w"}[type(r)]
        return go(r.body, 2) + op
    return go(r, 0)


_RTOKEN = re.compile(r"\s*(\^\+|\^w|[01a-z+*&()])")


def parse_regex(text: str, alphabet: Iterable[str] | None = None) -> Regex:
    """``0 1 a``, ``+`` for sums, juxtaposition or ``&`` for concatenation,
    postfix ``*``, ``^+`` and ``^w``."""
    alpha = set(alphabet) if alphabet is not None else None
    tokens, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _RTOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].strip()[:1]!r}", pos)
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    tokens.append(("", len(text)))
    i = 0

    def peek() -> str:
        return tokens[i][0]

    def take(want: str | None = None) -> str:
        nonlocal i
        tok, at = tokens[i]
        if want is not None and tok != want:
            raise ParseError(f"expected {want!r}", at)
        i += 1
        return tok

    def sum_() -> Regex:
        r = cat_()
        while peek() == "+":
            take()
            r = RAlt(r, cat_())
        return r

    def cat_() -> Regex:
        r = post()
        while peek() in ("&", "0", "1", "(") or (len(peek()) == 1 and peek().isalpha()):
            if peek() == "&":
                take()
            r = RCat(r, post())
        return r

    def post() -> Regex:
        r = atom()
        while peek() in ("*", "^+", "^w"):
            op = take()
            r = {"*": RStar, "^+": RPlus, "^w": ROmega}[op](r)
        return r

    def atom() -> Regex:
        tok, at = tokens[i]
        if tok == "(":
            take()
            r = sum_()
            take(")")
            return r
        if tok == "0":
            take()
            return REmpty()
        if tok == "1":
            take()
            return REps()
        if len(tok) == 1 and tok.isalpha():
            if alpha is not None and tok not in alpha:
                raise ParseError(f"letter {tok!r} not in the alphabet", at)
            take()
            return RSym(tok)
        raise ParseError(f"unexpected {tok or 'end of input'!r}", at)

    r = sum_()
    if peek():
        raise ParseError(f"unexpected {peek()!r}", tokens[i][1])
    return r


def nullable(r: Regex) -> bool:
    if isinstance(r, (REps, RStar)):
        return True
    if isinstance(r, RAlt):
        return nullable(r.left) or nullable(r.right)
    if isinstance(r, RCat):
        return nullable(r.left) and nullable(r.right)
    if isinstance(r, RPlus):
        return nullable(r.body)
    return False


def is_identity_free(r: Regex) -> bool:
    if isinstance(r, (REmpty, RSym)):
        return True
    if isinstance(r, (RAlt, RCat)):
        return is_identity_free(r.left) and is_identity_free(r.right)
    if isinstance(r, RPlus):
        return is_identity_free(r.body)
    return False


def regex_words(r: Regex, n: int) -> frozenset[str]:
    """Words of length <= n in the language of r (reference semantics)."""
    if isinstance(r, REmpty):
        return frozenset()
    if isinstance(r, REps):
        return frozenset([""])
    if isinstance(r, RSym):
        return frozenset([r.letter]) if n >= 1 else frozenset()
    if isinstance(r, RAlt):
        return regex_words(r.left, n) | regex_words(r.right, n)
    if isinstance(r, RCat):
        right = regex_words(r.right, n)
        return frozenset(u + v for u in regex_words(r.left, n) for v in right if len(u + v) <= n)
    if isinstance(r, (RStar, RPlus)):
        base = regex_words(r.body, n) - {""}
        reached = set(base)
        frontier = set(base)
        while frontier:
            frontier = {u + v for u in frontier for v in base if len(u + v) <= n} - reached
            reached |= frontier
        if isinstance(r, RStar) or nullable(r.body):
            reached.add("")
        return frozenset(reached)
    raise ValueError("omega powers have no finite words")


# --------------------------------------------------------------------------
# regular expressions into right-linear expressions

def _fresh(taken: Iterable[str]) -> str:
    taken = set(taken)
    for k in count():
        name = "X" if k == 0 else f"X{k}"
        if name not in taken:
            return name


def regex_bullet(e: Regex, g: Expr) -> Expr:
    """The product e . g, by the six defining clauses."""
    if isinstance(e, REmpty):
        return Zero()
    if isinstance(e, REps):
        return g
    if isinstance(e, RSym):
        return Prefix(e.letter, g)
    if isinstance(e, RAlt):
        return Sum(regex_bullet(e.left, g), regex_bullet(e.right, g))
    if isinstance(e, RCat):
        return regex_bullet(e.left, regex_bullet(e.right, g))
    if isinstance(e, RStar):
        x = _fresh(free_vars(g))
        return mu(x, Sum(g, regex_bullet(e.body, Var(x))))
    if isinstance(e, RPlus):
        return idfree_bullet(e, g) if is_identity_free(e) else regex_bullet(
            RCat(e.body, RStar(e.body)), g)
    raise ValueError(f"no finite-word reading of {regex_text(e)}")


def idfree_bullet(e: Regex, g: Expr) -> Expr:
    """Product for identity-free e; the result is guarded whatever g is."""
    if isinstance(e, REmpty):
        return Zero()
    if isinstance(e, RSym):
        return Prefix(e.letter, g)
    if isinstance(e, RAlt):
        return Sum(idfree_bullet(e.left, g), idfree_bullet(e.right, g))
    if isinstance(e, RCat):
        return idfree_bullet(e.left, idfree_bullet(e.right, g))
    if isinstance(e, RPlus):
        x = _fresh(free_vars(g))
        return mu(x, Sum(idfree_bullet(e.body, g), idfree_bullet(e.body, Var(x))))
    raise ValueError(f"{regex_text(e)} is not identity-free")


def factor_identity(e: Regex) -> tuple[bool, Regex]:
    """(b, d) with [e] = [b + d], d identity-free."""
    if isinstance(e, REmpty):
        return False, REmpty()
    if isinstance(e, REps):
        return True, REmpty()
    if isinstance(e, RSym):
        return False, e
    if isinstance(e, RAlt):
        b0, d0 = factor_identity(e.left)
        b1, d1 = factor_identity(e.right)
        return b0 or b1, alt(d0, d1)
    if isinstance(e, RCat):
        b0, d0 = factor_identity(e.left)
        b1, d1 = factor_identity(e.right)
        d = cat(d0, d1)
        if b1:
            d = alt(d0, d)
        if b0:
            d = alt(d1, d)
        return b0 and b1, d
    if isinstance(e, RStar):
        return True, plus(factor_identity(e.body)[1])
    if isinstance(e, RPlus):
        b, d = factor_identity(e.body)
        return b, plus(d)
    raise ValueError(f"cannot factor {regex_text(e)}")


@dataclass(frozen=True)
class OmegaForm:
    """Sum of e f^w (e may be None, meaning just f^w), e and f identity-free."""

    summands: tuple[tuple[Regex | None, Regex], ...]

    def __post_init__(self):
        for e, f in self.summands:
            if (e is not None and not is_identity_free(e)) or not is_identity_free(f):
                raise ValueError("omega form components must be identity-free")

    def __str__(self) -> str:
        parts = []
        for e, f in self.summands:
            head = "" if e is None else regex_text(cat(e, REps())) + " "
            parts.append(f"{head}({regex_text(f)})^w")
        return " + ".join(parts)


def parse_omega(text: str, alphabet: Iterable[str] | None = None) -> OmegaForm:
    """Summands ``e (f)^w`` or ``(f)^w`` joined by ``+``. Components that are
    not identity-free are factored first: (b + d) f^w = b f^w + d f^w, and a
    nullable f is read as its identity-free part."""
    r = parse_regex(text, alphabet)
    summands = []

    def terms(r: Regex):
        if isinstance(r, RAlt):
            yield from terms(r.left)
            yield from terms(r.right)
        else:
            yield r

    for t in terms(r):
        if isinstance(t, ROmega):
            head, loop = REps(), t.body
        elif isinstance(t, RCat) and isinstance(t.right, ROmega):
            head, loop = t.left, t.right.body
        else:
            raise ParseError(f"summand {regex_text(t)} is not of the form e (f)^w")
        _, d_loop = factor_identity(loop)
        if isinstance(d_loop, REmpty):
            continue
        b_head, d_head = factor_identity(head)
        if b_head:
            summands.append((None, d_loop))
        if not isinstance(d_head, REmpty):
            summands.append((d_head, d_loop))
    return OmegaForm(tuple(summands))


def omega_to_expr(w: OmegaForm) -> Expr:
    """f^w is nu X (f . X); e f^w is e . nu X (f . X)."""
    parts = []
    for e, f in w.summands:
        x = "X"
        loop = nu(x, idfree_bullet(f, Var(x)))
        parts.append(loop if e is None else idfree_bullet(e, loop))
    if not parts:
        return Zero()
    out = parts[0]
    for p in parts[1:]:
        out = Sum(out, p)
    return out


# --------------------------------------------------------------------------
# right-linear expressions back to regular expressions

@dataclass(frozen=True)
class CoeffMap:
    """e = sum_X coeffs[X] X + const."""

    coeffs: dict[str, Regex]
    const: Regex

    def __str__(self) -> str:
        parts = [f"({regex_text(r)}) {x}" for x, r in sorted(self.coeffs.items())]
        return " + ".join(parts + [f"({regex_text(self.const)})"])


def expr_to_coeffs(e: Expr) -> CoeffMap:
    names = free_vars(e)

    def go(e: Expr, names: frozenset[str]) -> CoeffMap:
        zero = {x: REmpty() for x in names}
        if isinstance(e, Zero):
            return CoeffMap(zero, REmpty())
        if isinstance(e, One):
            return CoeffMap(zero, REps())
        if isinstance(e, Var):
            return CoeffMap({**zero, e.name: REps()}, REmpty())
        if isinstance(e, Sum):
            l, r = go(e.left, names), go(e.right, names)
            return CoeffMap({x: alt(l.coeffs[x], r.coeffs[x]) for x in names},
                            alt(l.const, r.const))
        if isinstance(e, Prefix):
            b = go(e.body, names)
            a = RSym(e.letter)
            return CoeffMap({x: cat(a, b.coeffs[x]) for x in names}, cat(a, b.const))
        if isinstance(e, Mu):
            y = _fresh(names)
            inner = go(open_body(e, y), names | {y})
            loop = star(inner.coeffs[y])
            return CoeffMap({x: cat(loop, inner.coeffs[x]) for x in names},
                            cat(loop, inner.const))
        raise ValueError("greatest fixed points have no coefficient form")

    return go(e, names)


# --------------------------------------------------------------------------
# Bekic

def bekic_solve(e: Expr, f: Expr, x: str = "X", y: str = "Y") -> tuple[Expr, Expr]:
    """Least solutions of X = e(X, Y), Y = f(X, Y):
    E = mu X. e(X, f'(X)), F = f'(E) with f'(X) = mu Y. f(X, Y)."""
    extra = (free_vars(e) | free_vars(f)) - {x, y}
    if extra:
        raise ValueError(f"unexpected free variables {sorted(extra)}")
    f_prime = mu(y, f)
    E = mu(x, substitute(e, y, f_prime))
    F = substitute(f_prime, x, E)
    return E, F


def bekic_solve_system(sys: EquationSystem) -> dict[str, Expr]:
    if len(sys.variables) != 2:
        raise ValueError("Bekic resolution here takes exactly two equations")
    x, y = sys.variables
    E, F = bekic_solve(sys.clauses[x], sys.clauses[y], x, y)
    return {x: E, y: F}


def solve_by_elimination(sys: EquationSystem) -> dict[str, Expr]:
    """Closed μ-expressions for every variable, eliminating the last
    variable first and substituting back (Bekic applied repeatedly)."""
    return _eliminate(list(sys.variables), dict(sys.clauses))


def _eliminate(variables: list[str], clauses: dict[str, Expr]) -> dict[str, Expr]:
    if not variables:
        return {}
    *rest, y = variables
    f_prime = mu(y, clauses[y])
    out = _eliminate(rest, {x: substitute(clauses[x], y, f_prime) for x in rest})
    closed = f_prime
    for x in rest:
        closed = substitute(closed, x, out[x])
    out[y] = closed
    return out
