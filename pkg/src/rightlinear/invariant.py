"""Big-meet invariants read off μ-only cyclic proofs.

For a proof of e0 |- G0, collect for every left-hand expression e the sums of
the right-hand sides it occurs with (G_e). The meets of these sets, solved in
the meet system over the closure of all right-hand sums, must satisfy the
canonical inequations of e0 and sit between [e0] and the sum of G0. Each
inequation is checked as an NFA inclusion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .automata import (
    EquationSystem, LanguageHandle, Nfa, counterexample, prefixed, solve_system,
    to_nfa,
)
from .calculus import ID, ProofGraph, cedent, left_rule_for
from .checker import check_wellformed
from .expr import (
    Expr, FixedPoint, Mu, One, Prefix, Sum, Var, Zero, fl_closure, order_key,
    to_text, total_sum, unfold,
)
from .words import FiniteWord

GeMap = dict[Expr, set[tuple[Expr, ...]]]


class DisciplineError(ValueError):
    """The proof does not apply left rules first or uses a non-atomic id."""


def collect_G(p: ProofGraph) -> GeMap:
    out: GeMap = {}
    for i, node in enumerate(p.nodes):
        s = node.sequent
        if node.rule.kind == ID and not (isinstance(s.lhs, One) and s.rhs == (One(),)):
            raise DisciplineError(f"node {i}: id on {s}")
        if left_rule_for(s.lhs) is not None and not node.rule.is_left:
            raise DisciplineError(f"node {i}: left rule postponed at {s}")
        out.setdefault(s.lhs, set()).add(s.rhs)
    return out


def _down(f: Expr) -> set[Expr]:
    """Everything below f in the generating clauses of the cedent preorder:
    sum components and the unfolding of a μ, transitively."""
    seen = {f}
    work = [f]
    while work:
        g = work.pop()
        nxt = (g.left, g.right) if isinstance(g, Sum) else (
            (unfold(g),) if isinstance(g, Mu) else ())
        for h in nxt:
            if h not in seen:
                seen.add(h)
                work.append(h)
    return seen


def rleq_check(g: Iterable[Expr], g2: Iterable[Expr]) -> bool:
    """g <~ g2: every formula of g lies below some formula of g2 (adding
    formulas, including 0, only moves a cedent up)."""
    below = set()
    for f in g2:
        below |= _down(f)
    return all(f in below for f in g)


# --------------------------------------------------------------------------
# meet systems

@dataclass
class MeetSystem:
    """The meet equations over subsets of an FL-closed set; variables are
    introduced on demand as subsets are reached."""

    universe: tuple[Expr, ...]
    names: dict[tuple[Expr, ...], str] = field(default_factory=dict)
    clauses: dict[str, Expr] = field(default_factory=dict)
    _cached: EquationSystem | None = field(default=None, repr=False)

    @classmethod
    def over(cls, sums: Iterable[Expr]) -> MeetSystem:
        return cls(fl_closure(list(sums)).members)

    @cached_property
    def _members(self) -> frozenset[Expr]:
        return frozenset(self.universe)

    def variable(self, F: Iterable[Expr]) -> str:
        key = cedent(F)
        if not set(key) <= self._members:
            raise ValueError("meet index outside the universe")
        if key not in self.names:
            self.names[key] = f"M{len(self.names)}"
            self._add_clauses(key)
        return self.names[key]

    def _add_clauses(self, start: tuple[Expr, ...]) -> None:
        work = [start]
        while work:
            key = work.pop()
            name = self.names[key]
            rhs, targets = self._clause(key)
            for t in targets:
                if t not in self.names:
                    self.names[t] = f"M{len(self.names)}"
                    work.append(t)
            self.clauses[name] = rhs(self.names)

    @staticmethod
    def _clause(key: tuple[Expr, ...]):
        # expand the last non-modal component
        for i in range(len(key) - 1, -1, -1):
            f = key[i]
            rest = key[:i] + key[i + 1:]
            if isinstance(f, Zero):
                return (lambda names: Zero()), ()
            if isinstance(f, Sum):
                t0, t1 = cedent(rest + (f.left,)), cedent(rest + (f.right,))
                return (lambda names: Sum(Var(names[t0]), Var(names[t1]))), (t0, t1)
            if isinstance(f, FixedPoint):
                t = cedent(rest + (unfold(f),))
                return (lambda names: Var(names[t])), (t,)
        if all(isinstance(f, One) for f in key):
            return (lambda names: One()), ()
        heads = {f.letter for f in key if isinstance(f, Prefix)}
        if len(heads) == 1 and all(isinstance(f, Prefix) for f in key):
            t = cedent(f.body for f in key)
            (a,) = heads
            return (lambda names: Prefix(a, Var(names[t]))), (t,)
        # mixed 1 / a. / b. components have no clause: least solution 0
        return (lambda names: Zero()), ()

    def system(self) -> EquationSystem:
        if self._cached is None or len(self._cached.variables) != len(self.clauses):
            self._cached = EquationSystem(tuple(self.clauses), dict(self.clauses))
        return self._cached


def meet_language(F: Iterable[Expr], sys: MeetSystem) -> LanguageHandle:
    """Least solution of X_F, obtained by solving the meet equations."""
    F = cedent(F)
    if not F:
        raise ValueError("meet of an empty set")
    name = sys.variable(F)
    handle = solve_system(sys.system(), only=[name])[name]
    return LanguageHandle(handle.automaton.pruned(), "meet " + ", ".join(map(to_text, F)))


# --------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class ClauseVerdict:
    clause: str
    holds: bool
    witness: FiniteWord | None = None

    def to_dict(self) -> dict:
        out = {"clause": self.clause, "holds": self.holds}
        if self.witness is not None:
            out["witness"] = str(self.witness)
        return out


@dataclass(frozen=True)
class InvariantCertificate:
    verdicts: tuple[ClauseVerdict, ...]

    @property
    def accepted(self) -> bool:
        return all(v.holds for v in self.verdicts)

    @property
    def failures(self) -> list[ClauseVerdict]:
        return [v for v in self.verdicts if not v.holds]

    def to_dict(self) -> dict:
        return {"verdict": "accepted" if self.accepted else "rejected",
                "clauses": [v.to_dict() for v in self.verdicts]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_text(self) -> str:
        lines = []
        for v in self.verdicts:
            mark = "ok  " if v.holds else "FAIL"
            extra = "" if v.witness is None else f"  (witness {v.witness})"
            lines.append(f"{mark} {v.clause}{extra}")
        lines.append("accepted" if self.accepted else "rejected")
        return "\n".join(lines)


def _meet_name(sums: Iterable[Expr]) -> str:
    return "meet{" + ", ".join(to_text(f) for f in sorted(sums, key=order_key)) + "}"


def verify_invariant(p: ProofGraph) -> InvariantCertificate:
    bad = check_wellformed(p)
    if bad:
        return InvariantCertificate((ClauseVerdict(f"well-formed (node {bad.node}: {bad.reason})", False),))
    G = collect_G(p)
    sums = {e: {total_sum(g) for g in gs} for e, gs in G.items()}
    system = MeetSystem.over(s for ss in sums.values() for s in ss)
    lang: dict[Expr, Nfa] = {}

    def meet(e: Expr) -> Nfa | None:
        if e not in sums:
            return None
        if e not in lang:
            lang[e] = meet_language(sums[e], system).automaton
        return lang[e]

    verdicts = []

    def check(name: str, small: Nfa | None, big: Nfa | None) -> None:
        if big is None:
            # an empty meet is the whole language
            verdicts.append(ClauseVerdict(name, True))
            return
        if small is None:
            verdicts.append(ClauseVerdict(name + " (no sequents for the smaller side)", False))
            return
        w = counterexample(small, [big])
        verdicts.append(ClauseVerdict(name, w is None, w))

    root = p.root.sequent
    for e in fl_closure(root.lhs).members:
        if e not in sums:
            continue
        here = meet(e)
        label = f"G[{to_text(e)}]"
        if isinstance(e, One):
            check(f"{label} contains the empty word", to_nfa(One()), here)
        elif isinstance(e, FixedPoint):
            check(f"{label} contains G[{to_text(unfold(e))}]", meet(unfold(e)), here)
        elif isinstance(e, Sum):
            for part in (e.left, e.right):
                check(f"{label} contains G[{to_text(part)}]", meet(part), here)
        elif isinstance(e, Prefix):
            body = meet(e.body)
            check(f"{label} contains {e.letter}.G[{to_text(e.body)}]",
                  None if body is None else prefixed(e.letter, body), here)
    check(f"[{to_text(root.lhs)}] within {_meet_name(sums[root.lhs])}",
          to_nfa(root.lhs), meet(root.lhs))
    goal = total_sum(root.rhs)
    check(f"{_meet_name(sums[root.lhs])} within [{to_text(goal)}]",
          meet(root.lhs), to_nfa(goal))
    return InvariantCertificate(tuple(verdicts))
