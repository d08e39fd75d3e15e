"""Sequents e -> Gamma, the inference rules, and cyclic proof graphs.

A cedent is a set, kept as a tuple sorted by :func:`order_key`; the left-hand
side is always a single expression.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .expr import (
    Expr, Mu, Nu, One, ParseError, Prefix, Sum, Zero, letters, order_key,
    parse, to_text, unfold,
)

ID = "id"
K = "k"
WEAK = "w-r"
ZERO_L, SUM_L, MU_L, NU_L = "0-l", "+-l", "mu-l", "nu-l"
ZERO_R, SUM_R, MU_R, NU_R = "0-r", "+-r", "mu-r", "nu-r"

LEFT_RULES = (ZERO_L, SUM_L, MU_L, NU_L)
RIGHT_RULES = (ZERO_R, SUM_R, MU_R, NU_R)
ARITY = {ID: 0, ZERO_L: 0, SUM_L: 2}

LEFT = "lhs"
RIGHT = "rhs"


def cedent(formulas: Iterable[Expr]) -> tuple[Expr, ...]:
    return tuple(sorted(set(formulas), key=order_key))


@dataclass(frozen=True)
class Sequent:
    lhs: Expr
    rhs: tuple[Expr, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rhs", cedent(self.rhs))

    def __str__(self) -> str:
        return f"{to_text(self.lhs)} |- " + ", ".join(to_text(f) for f in self.rhs)

    def formulas(self) -> tuple[Expr, ...]:
        return (self.lhs,) + self.rhs


@dataclass(frozen=True)
class Rule:
    """A rule instance; ``letter`` for k, ``formula`` for right rules and w-r."""

    kind: str
    letter: str | None = None
    formula: Expr | None = None

    def __str__(self) -> str:
        if self.kind == K:
            return f"k:{self.letter}"
        if self.formula is not None:
            return f"{self.kind}:{to_text(self.formula)}"
        return self.kind

    @property
    def arity(self) -> int:
        return ARITY.get(self.kind, 1)

    @property
    def is_left(self) -> bool:
        return self.kind in LEFT_RULES


def parse_rule(text: str) -> Rule:
    text = text.strip()
    kind, _, arg = text.partition(":")
    if kind == K:
        if len(arg) != 1 or not arg.islower():
            raise ParseError(f"bad letter in rule {text!r}")
        return Rule(K, letter=arg)
    if kind in (WEAK,) + RIGHT_RULES:
        return Rule(kind, formula=parse(arg, closed=True))
    if kind in (ID,) + LEFT_RULES and not arg:
        return Rule(kind)
    raise ParseError(f"unknown rule {text!r}")


class NotApplicable(ValueError):
    pass


_FIXED = {MU_L: Mu, NU_L: Nu, MU_R: Mu, NU_R: Nu}


def apply_rule(s: Sequent, r: Rule) -> list[Sequent]:
    """Premisses of ``r`` applied bottom-up to ``s``."""
    e, gamma = s.lhs, s.rhs
    kind = r.kind
    if kind == ID:
        if e not in gamma:
            raise NotApplicable(f"id needs {to_text(e)} on the right")
        return []
    if kind == K:
        if not (isinstance(e, Prefix) and e.letter == r.letter):
            raise NotApplicable(f"k:{r.letter} needs a {r.letter}-prefixed left side")
        if not all(isinstance(f, Prefix) and f.letter == r.letter for f in gamma):
            raise NotApplicable(f"k:{r.letter} needs every right formula {r.letter}-prefixed")
        return [Sequent(e.body, [f.body for f in gamma])]
    if kind in LEFT_RULES:
        if kind == ZERO_L and isinstance(e, Zero):
            return []
        if kind == SUM_L and isinstance(e, Sum):
            return [Sequent(e.left, gamma), Sequent(e.right, gamma)]
        if kind in (MU_L, NU_L) and isinstance(e, _FIXED[kind]):
            return [Sequent(unfold(e), gamma)]
        raise NotApplicable(f"{kind} does not match {to_text(e)}")
    f = r.formula
    if f is None or f not in gamma:
        raise NotApplicable(f"{kind} principal formula missing from the right side")
    rest = [g for g in gamma if g != f]
    if kind == WEAK:
        return [Sequent(e, rest)]
    if kind == ZERO_R and isinstance(f, Zero):
        return [Sequent(e, rest)]
    if kind == SUM_R and isinstance(f, Sum):
        return [Sequent(e, rest + [f.left, f.right])]
    if kind in (MU_R, NU_R) and isinstance(f, _FIXED[kind]):
        return [Sequent(e, rest + [unfold(f)])]
    raise NotApplicable(f"{kind} does not match {to_text(f)}")


def left_rule_for(e: Expr) -> Rule | None:
    if isinstance(e, Zero):
        return Rule(ZERO_L)
    if isinstance(e, Sum):
        return Rule(SUM_L)
    if isinstance(e, Mu):
        return Rule(MU_L)
    if isinstance(e, Nu):
        return Rule(NU_L)
    return None


def right_rule_for(f: Expr) -> Rule | None:
    if isinstance(f, Zero):
        return Rule(ZERO_R, formula=f)
    if isinstance(f, Sum):
        return Rule(SUM_R, formula=f)
    if isinstance(f, Mu):
        return Rule(MU_R, formula=f)
    if isinstance(f, Nu):
        return Rule(NU_R, formula=f)
    return None


def applicable_rules(s: Sequent) -> list[Rule]:
    """Left rules, right rules in cedent order, weakenings, k, then id."""
    rules = []
    left = left_rule_for(s.lhs)
    if left:
        rules.append(left)
    rules.extend(r for r in map(right_rule_for, s.rhs) if r)
    rules.extend(Rule(WEAK, formula=f) for f in s.rhs)
    if isinstance(s.lhs, Prefix):
        a = s.lhs.letter
        if all(isinstance(f, Prefix) and f.letter == a for f in s.rhs):
            rules.append(Rule(K, letter=a))
    if s.lhs in s.rhs:
        rules.append(Rule(ID))
    return rules


def trace_successors(s: Sequent, r: Rule, f: Expr, side: str) -> list[frozenset[Expr]]:
    """Where formula ``f`` on ``side`` of ``s`` continues, one set per premiss.

    An empty set means the trace stops (f weakened or a 0 removed)."""
    premisses = apply_rule(s, r)
    if r.kind == K:
        return [frozenset([f.body])]
    if side == LEFT:
        if r.kind == SUM_L:
            return [frozenset([s.lhs.left]), frozenset([s.lhs.right])]
        if r.kind in (MU_L, NU_L):
            return [frozenset([unfold(s.lhs)])]
        return [frozenset([f]) for _ in premisses]
    if r.formula != f or r.kind not in (WEAK,) + RIGHT_RULES:
        return [frozenset([f]) for _ in premisses]
    if r.kind == SUM_R:
        return [frozenset([f.left, f.right])]
    if r.kind in (MU_R, NU_R):
        return [frozenset([unfold(f)])]
    return [frozenset()]


# --------------------------------------------------------------------------
# Proof graphs

@dataclass(frozen=True)
class ProofNode:
    sequent: Sequent
    rule: Rule
    premisses: tuple[int, ...] = ()


@dataclass(frozen=True)
class ProofGraph:
    """Finite cyclic preproof. Node 0 is the root; premiss indices may point
    anywhere, so back-edges encode cycles."""

    nodes: tuple[ProofNode, ...]

    @property
    def root(self) -> ProofNode:
        return self.nodes[0]

    def __len__(self) -> int:
        return len(self.nodes)

    def edges(self) -> Iterable[tuple[int, int]]:
        for i, node in enumerate(self.nodes):
            for j in node.premisses:
                yield i, j

    def letters(self) -> set[str]:
        out: set[str] = set()
        for node in self.nodes:
            for f in node.sequent.formulas():
                out |= letters(f)
        return out


class ProofFormatError(ValueError):
    def __init__(self, message: str, node: int | None = None):
        if node is not None:
            message = f"node {node}: {message}"
        super().__init__(message)
        self.node = node


def serialize(p: ProofGraph, alphabet: Iterable[str] | None = None) -> str:
    alpha = "".join(sorted(set(alphabet) if alphabet is not None else p.letters()))
    lines = [f"alphabet: {alpha}"]
    for i, node in enumerate(p.nodes):
        lines.append(f"node {i}")
        lines.append(f"seq {node.sequent}".rstrip())
        lines.append(f"rule {node.rule}")
        lines.append(" ".join(["prem"] + [str(j) for j in node.premisses]))
    return "\n".join(lines) + "\n"


def parse_sequent(text: str, alphabet: Iterable[str] | None = None) -> Sequent:
    """``lhs |- f1, f2, ...`` with closed expressions."""
    lhs, sep, rhs = text.partition("|-")
    if not sep:
        raise ParseError("sequent needs '|-'")
    right = [parse(part, alphabet, closed=True) for part in rhs.split(",") if part.strip()]
    return Sequent(parse(lhs, alphabet, closed=True), right)


def deserialize(text: str, validate: bool = True) -> ProofGraph:
    """Read the line-oriented proof format; with ``validate`` every node must
    match its rule."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("alphabet:"):
        raise ProofFormatError("missing 'alphabet:' header")
    alphabet = set(lines[0][len("alphabet:"):].strip()) or None
    body = lines[1:]
    if len(body) % 4:
        raise ProofFormatError("each node needs node/seq/rule/prem lines")
    nodes = []
    for k in range(0, len(body), 4):
        index = k // 4
        head, seq, rule, prem = body[k:k + 4]
        if head != f"node {index}":
            raise ProofFormatError(f"expected 'node {index}', found {head!r}", index)
        if not seq.startswith("seq ") or not rule.startswith("rule ") or prem.split()[0] != "prem":
            raise ProofFormatError("malformed block", index)
        try:
            sequent = parse_sequent(seq[4:], alphabet)
            r = parse_rule(rule[5:])
            premisses = tuple(int(x) for x in prem.split()[1:])
        except ValueError as exc:
            raise ProofFormatError(str(exc), index) from None
        nodes.append(ProofNode(sequent, r, premisses))
    p = ProofGraph(tuple(nodes))
    if validate:
        problem = validate_node_list(p)
        if problem:
            raise ProofFormatError(problem[1], problem[0])
    return p


def validate_node_list(p: ProofGraph) -> tuple[int, str] | None:
    """First node whose premisses disagree with its rule, with a reason."""
    if not p.nodes:
        return 0, "empty proof"
    for i, node in enumerate(p.nodes):
        if len(node.premisses) != node.rule.arity:
            return i, f"rule {node.rule} takes {node.rule.arity} premisses, got {len(node.premisses)}"
        for j in node.premisses:
            if not 0 <= j < len(p.nodes):
                return i, f"premiss index {j} out of range"
        try:
            expected = apply_rule(node.sequent, node.rule)
        except NotApplicable as exc:
            return i, str(exc)
        for j, want in zip(node.premisses, expected):
            if p.nodes[j].sequent != want:
                return i, f"premiss {j} is {p.nodes[j].sequent}, rule gives {want}"
    return None


def is_identity_on_one(node: ProofNode) -> bool:
    s = node.sequent
    return node.rule.kind != ID or (isinstance(s.lhs, One) and s.rhs == (One(),))
