"""Automata semantics of right-linear expressions.

An expression's Fischer-Ladner closure, read as a right-linear grammar, is an
NFA with epsilon moves (μ-only expressions) or a parity automaton (μν).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

import networkx as nx

from .expr import (
    Expr, Mu, Nu, One, ParseError, Prefix, Sum, Var, Zero, fl_closure,
    free_vars, is_mu_only, order_key, parse, unfold,
)
from .words import FiniteWord, LassoWord

# A step function maps a state label to (final?, epsilon targets, letter edges).
Step = Callable[[Hashable], tuple[bool, Sequence[Hashable], Sequence[tuple[str, Hashable]]]]


@dataclass(frozen=True)
class Nfa:
    labels: tuple[Hashable, ...]
    initial: int
    finals: frozenset[int]
    eps: tuple[tuple[int, ...], ...]
    delta: tuple[dict[str, tuple[int, ...]], ...]

    @property
    def states(self) -> range:
        return range(len(self.labels))

    def closure(self, states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        work = list(seen)
        while work:
            for t in self.eps[work.pop()]:
                if t not in seen:
                    seen.add(t)
                    work.append(t)
        return frozenset(seen)

    def step(self, states: Iterable[int], letter: str) -> frozenset[int]:
        return self.closure(t for s in states for t in self.delta[s].get(letter, ()))

    def accepts(self, word: Iterable[str] | FiniteWord) -> bool:
        if isinstance(word, FiniteWord):
            word = word.letters
        current = self.closure([self.initial])
        for letter in word:
            current = self.step(current, letter)
        return bool(current & self.finals)

    def alphabet(self) -> set[str]:
        return {a for d in self.delta for a in d}

    def words_upto(self, n: int) -> set[str]:
        """All accepted words of length at most n."""
        result = set()
        level = {"": self.closure([self.initial])}
        letters = sorted(self.alphabet())
        for length in range(n + 1):
            nxt = {}
            for w, states in level.items():
                if states & self.finals:
                    result.add(w)
                if length < n:
                    for a in letters:
                        moved = self.step(states, a)
                        if moved:
                            nxt[w + a] = moved
            level = nxt
        return result

    def is_empty(self) -> bool:
        return not (self.reachable() & self.finals)

    def reachable(self) -> set[int]:
        seen = {self.initial}
        work = [self.initial]
        while work:
            s = work.pop()
            for t in list(self.eps[s]) + [t for ts in self.delta[s].values() for t in ts]:
                if t not in seen:
                    seen.add(t)
                    work.append(t)
        return seen

    def pruned(self) -> Nfa:
        """Drop states that are unreachable or cannot reach a final state."""
        live = self.reachable()
        back: dict[int, set[int]] = {s: set() for s in self.states}
        for s in self.states:
            for t in list(self.eps[s]) + [t for ts in self.delta[s].values() for t in ts]:
                back[t].add(s)
        useful = set(self.finals & live)
        work = list(useful)
        while work:
            for s in back[work.pop()]:
                if s in live and s not in useful:
                    useful.add(s)
                    work.append(s)
        keep = sorted(useful | {self.initial})
        renum = {s: i for i, s in enumerate(keep)}
        return Nfa(
            labels=tuple(self.labels[s] for s in keep),
            initial=renum[self.initial],
            finals=frozenset(renum[s] for s in self.finals if s in renum),
            eps=tuple(tuple(renum[t] for t in self.eps[s] if t in renum) for s in keep),
            delta=tuple(
                {a: tuple(renum[t] for t in ts if t in renum) for a, ts in self.delta[s].items()
                 if any(t in renum for t in ts)}
                for s in keep
            ),
        )

    def to_edge_list(self) -> str:
        lines = [f"init: {self.initial}", "final: " + " ".join(map(str, sorted(self.finals)))]
        for s in self.states:
            lines.extend(f"{s} -eps-> {t}" for t in self.eps[s])
            for a in sorted(self.delta[s]):
                lines.extend(f"{s} -{a}-> {t}" for t in self.delta[s][a])
        return "\n".join(lines)


def explore(start: Hashable, step: Step) -> Nfa:
    """Build the NFA reachable from ``start`` under ``step``."""
    index = {start: 0}
    labels = [start]
    finals, eps, delta = set(), [], []
    i = 0
    while i < len(labels):
        final, eps_targets, letter_edges = step(labels[i])
        if final:
            finals.add(i)
        row_eps, row_delta = [], {}
        for t in eps_targets:
            if t not in index:
                index[t] = len(labels)
                labels.append(t)
            row_eps.append(index[t])
        for a, t in letter_edges:
            if t not in index:
                index[t] = len(labels)
                labels.append(t)
            row_delta.setdefault(a, []).append(index[t])
        eps.append(tuple(dict.fromkeys(row_eps)))
        delta.append({a: tuple(dict.fromkeys(ts)) for a, ts in row_delta.items()})
        i += 1
    return Nfa(tuple(labels), 0, frozenset(finals), tuple(eps), tuple(delta))


def union(nfas: Sequence[Nfa]) -> Nfa:
    """Fresh initial state with epsilon moves into each operand."""
    labels: list = [("union",)]
    eps: list = [()]
    delta: list = [{}]
    finals: set[int] = set()
    starts = []
    for k, n in enumerate(nfas):
        off = len(labels)
        starts.append(n.initial + off)
        labels.extend((k, lab) for lab in n.labels)
        eps.extend(tuple(t + off for t in row) for row in n.eps)
        delta.extend({a: tuple(t + off for t in ts) for a, ts in row.items()} for row in n.delta)
        finals.update(f + off for f in n.finals)
    eps[0] = tuple(starts)
    return Nfa(tuple(labels), 0, frozenset(finals), tuple(eps), tuple(delta))


def prefixed(letter: str, n: Nfa) -> Nfa:
    """NFA for letter . L(n)."""
    labels = (("prefix", letter),) + tuple(n.labels)
    eps = ((),) + tuple(tuple(t + 1 for t in row) for row in n.eps)
    delta = ({letter: (n.initial + 1,)},) + tuple(
        {a: tuple(t + 1 for t in ts) for a, ts in row.items()} for row in n.delta)
    return Nfa(labels, 0, frozenset(f + 1 for f in n.finals), eps, delta)


def counterexample(lhs: Nfa, rhs: Sequence[Nfa] | Nfa) -> FiniteWord | None:
    """Shortest word accepted by ``lhs`` and by none of ``rhs``.

    Subset construction on the right, single states on the left; epsilon
    moves cost nothing so a 0-1 BFS yields a shortest witness.
    """
    right = union(rhs) if isinstance(rhs, (list, tuple)) else rhs
    start = (lhs.initial, right.closure([right.initial]))
    dist = {start: 0}
    parent: dict = {start: None}
    done = set()
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node in done:
            continue
        done.add(node)
        q, subset = node
        if q in lhs.finals and not (subset & right.finals):
            word = []
            while parent[node] is not None:
                node, letter = parent[node]
                if letter:
                    word.append(letter)
            return FiniteWord(tuple(reversed(word)))
        d = dist[node]
        for t in lhs.eps[q]:
            nxt = (t, subset)
            if dist.get(nxt, d + 1) > d:
                dist[nxt], parent[nxt] = d, (node, "")
                queue.appendleft(nxt)
        for a, targets in lhs.delta[q].items():
            moved = right.step(subset, a)
            for t in targets:
                nxt = (t, moved)
                if nxt not in dist:
                    dist[nxt], parent[nxt] = d + 1, (node, a)
                    queue.append(nxt)
    return None


def equivalent(n1: Nfa, n2: Nfa) -> bool:
    return counterexample(n1, n2) is None and counterexample(n2, n1) is None


# --------------------------------------------------------------------------
# Expressions as automata

def _grammar_step(e: Expr):
    if isinstance(e, One):
        return True, (), ()
    if isinstance(e, Sum):
        return False, (e.left, e.right), ()
    if isinstance(e, (Mu, Nu)):
        return False, (unfold(e),), ()
    if isinstance(e, Prefix):
        return False, (), ((e.letter, e.body),)
    return False, (), ()


def to_nfa(e: Expr) -> Nfa:
    """Canonical-system NFA: states are FL(e), initial state e."""
    if not is_mu_only(e):
        raise ValueError("to_nfa needs a μ-only expression; use to_parity")
    if free_vars(e):
        raise ValueError("to_nfa needs a closed expression")
    return explore(e, _grammar_step)


@dataclass(frozen=True)
class ParityAutomaton:
    """States FL(e), epsilon moves for puzzle moves, priorities from FL ranks.
    Minimum priority seen infinitely often must be even. State 1 carries an
    epsilon self-loop, taken only once a finite input is exhausted."""

    nfa: Nfa
    priority: tuple[int, ...]

    def _product(self, word: FiniteWord | LassoWord):
        n = self.nfa
        start = (n.initial, 0)
        graph: dict[tuple[int, int], list[tuple[int, int]]] = {}
        work = [start]
        graph[start] = []
        while work:
            node = work.pop()
            q, i = node
            succs = [(t, i) for t in n.eps[q]]
            if isinstance(word, LassoWord):
                succs += [(t, word.next_pos(i)) for t in n.delta[q].get(word.letter_at(i), ())]
            elif i < len(word):
                succs += [(t, i + 1) for t in n.delta[q].get(word.letters[i], ())]
            if isinstance(n.labels[q], One):
                # the 1-loop only accepts the end of a finite word
                succs = [] if isinstance(word, LassoWord) or i < len(word) else [node]
            graph[node] = succs
            for s in succs:
                if s not in graph:
                    graph[s] = []
                    work.append(s)
        return start, graph

    def accepts(self, word: FiniteWord | LassoWord) -> bool:
        start, graph = self._product(word)
        colours = sorted({self.priority[q] for q, _ in graph})
        for p in colours:
            if p % 2:
                continue
            sub = nx.DiGraph()
            keep = [v for v in graph if self.priority[v[0]] >= p]
            sub.add_nodes_from(keep)
            sub.add_edges_from((u, v) for u in keep for v in graph[u] if self.priority[v[0]] >= p)
            for scc in nx.strongly_connected_components(sub):
                if not any(self.priority[v[0]] == p for v in scc):
                    continue
                if len(scc) == 1 and not sub.has_edge(next(iter(scc)), next(iter(scc))):
                    continue
                return True
        return False


def to_parity(e: Expr) -> ParityAutomaton:
    if free_vars(e):
        raise ValueError("to_parity needs a closed expression")
    fl = fl_closure(e)

    def step(f):
        final, eps, letters = _grammar_step(f)
        if isinstance(f, One):
            eps = (f,)
        return final, eps, letters

    nfa = explore(e, step)
    return ParityAutomaton(nfa, tuple(fl.priority[lab] for lab in nfa.labels))


def member_finite(w: FiniteWord, e: Expr) -> bool:
    """Finite-word membership: NFA run for μ-only e, parity run otherwise."""
    if is_mu_only(e):
        return to_nfa(e).accepts(w)
    return to_parity(e).accepts(w)


def member_lasso(w: LassoWord, e: Expr) -> bool:
    return to_parity(e).accepts(w)


def find_counterexample(e: Expr, gamma: Iterable[Expr]) -> FiniteWord | None:
    """Shortest word in [e] outside the union of [gamma], if any."""
    return counterexample(to_nfa(e), [to_nfa(g) for g in gamma])


def include_finite(e: Expr, gamma: Iterable[Expr]) -> bool:
    return find_counterexample(e, gamma) is None


def meet_key(es: Iterable[Expr]) -> tuple[Expr, ...]:
    return tuple(sorted(set(es), key=order_key))


def meet_step(state: tuple[Expr, ...]):
    """Product clauses: expand the first non-(1 / a.e) component; otherwise
    accept when all are 1, or move on a letter shared by all components."""
    for i, f in enumerate(state):
        if isinstance(f, Zero):
            return False, (), ()
        rest = state[:i] + state[i + 1:]
        if isinstance(f, Sum):
            return False, (meet_key(rest + (f.left,)), meet_key(rest + (f.right,))), ()
        if isinstance(f, (Mu, Nu)):
            return False, (meet_key(rest + (unfold(f),)),), ()
    if all(isinstance(f, One) for f in state):
        return True, (), ()
    if all(isinstance(f, Prefix) for f in state) and len({f.letter for f in state}) == 1:
        return False, (), ((state[0].letter, meet_key(f.body for f in state)),)
    return False, (), ()


def meet_product(es: Sequence[Expr]) -> Nfa:
    """NFA for the intersection of the languages of ``es``."""
    if not es:
        raise ValueError("meet of an empty list")
    return explore(meet_key(es), meet_step).pruned()


# --------------------------------------------------------------------------
# Right-linear systems of equations

@dataclass(frozen=True)
class EquationSystem:
    variables: tuple[str, ...]
    clauses: dict[str, Expr]

    def __post_init__(self):
        declared = set(self.variables)
        if declared != set(self.clauses):
            raise ValueError("every variable needs exactly one clause")
        for x, rhs in self.clauses.items():
            if _has_binder(rhs):
                raise ValueError(f"clause for {x} must be fixed-point free")
            extra = free_vars(rhs) - declared
            if extra:
                raise ValueError(f"clause for {x} uses undeclared {sorted(extra)}")


def _has_binder(e: Expr) -> bool:
    if isinstance(e, (Mu, Nu)):
        return True
    if isinstance(e, Sum):
        return _has_binder(e.left) or _has_binder(e.right)
    if isinstance(e, Prefix):
        return _has_binder(e.body)
    return False


_CLAUSE = re.compile(r"\s*([A-Z][A-Za-z0-9_']*)\s*=(.*)")


def parse_system(text: str) -> EquationSystem:
    """One clause ``X = <expr>`` per line; blank lines and ``#`` comments ignored."""
    variables, clauses = [], {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        if not line.strip():
            continue
        m = _CLAUSE.fullmatch(line)
        if not m:
            raise ParseError(f"line {lineno}: expected 'X = expr'")
        x = m.group(1)
        if x in clauses:
            raise ParseError(f"line {lineno}: second clause for {x}")
        try:
            clauses[x] = parse(m.group(2))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        variables.append(x)
    return EquationSystem(tuple(variables), clauses)


@dataclass(frozen=True)
class LanguageHandle:
    automaton: Nfa | ParityAutomaton
    source: Expr | str


def solve_system(sys: EquationSystem, only: Iterable[str] | None = None) -> dict[str, LanguageHandle]:
    """Least solutions: variables are states, clauses are transitions.
    ``only`` restricts which variables get an automaton."""

    def step(e: Expr):
        if isinstance(e, Var):
            return False, (sys.clauses[e.name],), ()
        return _grammar_step(e)

    wanted = sys.variables if only is None else tuple(only)
    return {x: LanguageHandle(explore(Var(x), step), x) for x in wanted}


def approximants(e: Expr, n: int) -> tuple[int, frozenset[str]]:
    """Kleene iteration of the canonical system of e from the empty
    assignment, keeping words of length <= n. Returns the number of rounds
    until nothing changes and the value reached at e."""
    fl = fl_closure(e).members
    value = {f: frozenset() for f in fl}
    rounds = 0
    while True:
        new = {}
        for f in fl:
            if isinstance(f, One):
                new[f] = frozenset([""])
            elif isinstance(f, Sum):
                new[f] = value[f.left] | value[f.right]
            elif isinstance(f, (Mu, Nu)):
                new[f] = value[unfold(f)]
            elif isinstance(f, Prefix):
                new[f] = frozenset(f.letter + w for w in value[f.body] if len(w) < n)
            else:
                new[f] = frozenset()
        if new == value:
            return rounds, value[e]
        value = new
        rounds += 1
