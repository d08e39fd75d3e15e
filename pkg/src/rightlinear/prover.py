"""Proof search.

``prove_mu`` follows the four-phase strategy for μ-only sequents: left rules
as long as possible, then right rules chosen oldest-first until the sequent
repeats with every non-modal formula principal in between, then weaken those
formulas away, then close with id at 1 |- 1 or weaken and apply k.

``prove_munu_guarded`` builds the unique saturation candidate of a guarded
sequent and lets the trace checker judge it; a bad branch spells out a lasso
countermodel.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .automata import find_counterexample
from .calculus import (
    ID, K, WEAK, ProofGraph, ProofNode, Rule, Sequent, apply_rule,
    left_rule_for, right_rule_for,
)
from .checker import (
    DEFAULT_STATE_CAP, NOT_PROGRESSING, PROGRESSING, check_progress,
    check_progress_munu,
)
from .expr import (
    Expr, One, Prefix, Sum, Var, Zero, free_vars, is_closed,
    is_guarded, is_m_shaped, is_mu_only, open_body, order_key, substitute,
)
from .puzzle import solve
from .words import FiniteWord, LassoWord

UNGUARDED = "unguarded"
UNSUPPORTED = "unsupported-shape"

PHASE2_LIMIT = 100_000


class ProverError(RuntimeError):
    """An internal inconsistency; never a verdict."""


@dataclass(frozen=True)
class Proved:
    proof: ProofGraph


@dataclass(frozen=True)
class Refuted:
    word: FiniteWord | LassoWord


@dataclass(frozen=True)
class Rejected:
    reason: str


ProveOutcome = Proved | Refuted | Rejected


class _Builder:
    """Growable node table; premisses are filled in once known."""

    def __init__(self):
        self.seqs: list[Sequent] = []
        self.rules: list[Rule | None] = []
        self.prems: list[tuple[int, ...]] = []

    def new(self, s: Sequent) -> int:
        self.seqs.append(s)
        self.rules.append(None)
        self.prems.append(())
        return len(self.seqs) - 1

    def set(self, i: int, rule: Rule, prems: Sequence[int] = ()) -> None:
        self.rules[i] = rule
        self.prems[i] = tuple(prems)

    def graph(self) -> ProofGraph:
        return ProofGraph(tuple(
            ProofNode(s, r, p) for s, r, p in zip(self.seqs, self.rules, self.prems)))


def _verify_refutation(w, s: Sequent) -> None:
    if solve(w, s.lhs) is None or any(solve(w, f) is not None for f in s.rhs):
        raise ProverError(f"countermodel {w} does not separate {s}")


# --------------------------------------------------------------------------
# μ-only: the four-phase strategy

def _phase2(s: Sequent) -> tuple[list[tuple[Sequent, Rule]], Sequent]:
    """Fair right rules from s; returns the steps taken and the sequent at
    which every non-modal formula has been principal since its last visit."""
    steps: list[tuple[Sequent, Rule]] = []
    history = [s]
    principal: list[Expr] = []
    age = {f: 0 for f in s.rhs}
    cur = s
    for clock in range(1, PHASE2_LIMIT):
        pending = [f for f in cur.rhs if not is_m_shaped(f)]
        if not pending:
            return steps, cur
        for i in range(len(history) - 1):
            if history[i] == cur and set(pending) <= set(principal[i:]):
                return steps, cur
        f = min(pending, key=lambda g: (age[g], order_key(g)))
        rule = right_rule_for(f)
        (nxt,) = apply_rule(cur, rule)
        age = {g: clock if g == f or g not in age else age[g] for g in nxt.rhs}
        steps.append((cur, rule))
        principal.append(f)
        history.append(nxt)
        cur = nxt
    raise ProverError("right-rule phase did not repeat")


def _weakenings(s: Sequent, drop: Sequence[Expr]) -> tuple[list[tuple[Sequent, Rule]], Sequent]:
    steps = []
    for f in drop:
        rule = Rule(WEAK, formula=f)
        steps.append((s, rule))
        (s,) = apply_rule(s, rule)
    return steps, s


def build_mu_proof(root: Sequent) -> ProofGraph:
    """Run the four phases on a valid μ-only sequent.

    Left-phase nodes are shared by sequent, so back-edges always land on a
    node that starts with a left rule or the right phase after a k step."""
    b = _Builder()
    memo: dict[Sequent, int] = {}
    todo: deque[int] = deque()

    def node_for(s: Sequent) -> int:
        if s not in memo:
            memo[s] = b.new(s)
            todo.append(memo[s])
        return memo[s]

    node_for(root)
    while todo:
        i = todo.popleft()
        s = b.seqs[i]
        left = left_rule_for(s.lhs)
        if left is not None:
            b.set(i, left, [node_for(p) for p in apply_rule(s, left)])
            continue
        chain, s = _phase2(s)
        more, s = _weakenings(s, [f for f in s.rhs if not is_m_shaped(f)])
        chain += more
        if isinstance(s.lhs, One):
            if One() not in s.rhs:
                raise ProverError(f"stuck at {s}")
            more, s = _weakenings(s, [f for f in s.rhs if f != One()])
            chain += more
            last = (s, Rule(ID), ())
        else:
            a = s.lhs.letter
            more, s = _weakenings(
                s, [f for f in s.rhs if not (isinstance(f, Prefix) and f.letter == a)])
            chain += more
            rule = Rule(K, letter=a)
            last = (s, rule, (node_for(apply_rule(s, rule)[0]),))
        # lay the chain out starting at node i
        here = i
        for seq, rule in chain:
            nxt = b.new(apply_rule(seq, rule)[0])
            b.set(here, rule, [nxt])
            here = nxt
        b.set(here, last[1], last[2])
    return b.graph()


def prove_mu(s: Sequent) -> ProveOutcome:
    formulas = s.formulas()
    if not all(is_closed(f) and is_mu_only(f) for f in formulas):
        return Rejected(UNSUPPORTED)
    w = find_counterexample(s.lhs, s.rhs)
    if w is not None:
        _verify_refutation(w, s)
        return Refuted(w)
    proof = build_mu_proof(s)
    report = check_progress(proof)
    if report.verdict != PROGRESSING:
        raise ProverError(f"emitted proof fails the checker: {report.to_text()}")
    return Proved(proof)


# --------------------------------------------------------------------------
# guarded μν: the saturation candidate

@dataclass(frozen=True)
class Saturation:
    graph: ProofGraph
    open_leaves: frozenset[int]


def _saturation_rule(s: Sequent) -> Rule | None:
    left = left_rule_for(s.lhs)
    if left is not None:
        return left
    for f in s.rhs:
        if not is_m_shaped(f):
            return right_rule_for(f)
    if isinstance(s.lhs, One):
        if One() not in s.rhs:
            return None
        if s.rhs == (One(),):
            return Rule(ID)
        return Rule(WEAK, formula=next(f for f in s.rhs if f != One()))
    a = s.lhs.letter
    for f in s.rhs:
        if not (isinstance(f, Prefix) and f.letter == a):
            return Rule(WEAK, formula=f)
    return Rule(K, letter=a)


def saturate(root: Sequent) -> Saturation:
    """One deterministic rule per sequent, sequents shared. Sequents 1 |- D
    with 1 not in D cannot be closed; they are left as leaves with rule id
    and reported in ``open_leaves``."""
    b = _Builder()
    memo: dict[Sequent, int] = {root: b.new(root)}
    todo = deque([0])
    stuck = set()
    while todo:
        i = todo.popleft()
        s = b.seqs[i]
        rule = _saturation_rule(s)
        if rule is None:
            stuck.add(i)
            b.set(i, Rule(ID))
            continue
        prems = []
        for p in apply_rule(s, rule):
            if p not in memo:
                memo[p] = b.new(p)
                todo.append(memo[p])
            prems.append(memo[p])
        b.set(i, rule, prems)
    return Saturation(b.graph(), frozenset(stuck))


def _letters(p: ProofGraph, path: Sequence[int]) -> tuple[str, ...]:
    return tuple(p.nodes[i].rule.letter for i in path if p.nodes[i].rule.kind == K)


def _path_to(p: ProofGraph, targets: frozenset[int]) -> list[int]:
    parent = {0: None}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        if u in targets:
            path = []
            while u is not None:
                path.append(u)
                u = parent[u]
            return path[::-1]
        for v in p.nodes[u].premisses:
            if v not in parent:
                parent[v] = u
                queue.append(v)
    raise ProverError("open leaf unreachable")


def prove_munu_guarded(s: Sequent, cap: int = DEFAULT_STATE_CAP) -> ProveOutcome:
    if not all(is_closed(f) for f in s.formulas()):
        return Rejected(UNSUPPORTED)
    if not all(is_guarded(f) for f in s.formulas()):
        return Rejected(UNGUARDED)
    sat = saturate(s)
    p = sat.graph
    if sat.open_leaves:
        w = FiniteWord(_letters(p, _path_to(p, sat.open_leaves)))
        _verify_refutation(w, s)
        return Refuted(w)
    report = check_progress_munu(p, cap)
    if report.verdict == PROGRESSING:
        return Proved(p)
    if report.verdict != NOT_PROGRESSING:
        raise ProverError(report.to_text())
    branch = report.witness
    period = _letters(p, branch.cycle)
    if not period:
        raise ProverError("bad cycle without k steps")
    w = LassoWord(_letters(p, branch.stem), period).normalized()
    _verify_refutation(w, s)
    return Refuted(w)


def prove(s: Sequent, cap: int = DEFAULT_STATE_CAP) -> ProveOutcome:
    """μ-only sequents go to the four-phase prover, the rest to the guarded one."""
    if all(is_mu_only(f) for f in s.formulas()):
        return prove_mu(s)
    return prove_munu_guarded(s, cap)


# --------------------------------------------------------------------------
# functoriality

def functor_proof(ctx: Expr, pairs: Sequence[tuple[Expr, Expr]],
                  proofs: Sequence[ProofGraph | None] | Mapping[int, ProofGraph] = ()) -> ProofGraph:
    """A cyclic proof of ctx(f..) |- ctx(g..).

    The free variables of ``ctx``, in sorted order, are matched with
    ``pairs``; ``proofs[i]`` proves f_i |- g_i (omit it when f_i = g_i)."""
    names = sorted(free_vars(ctx))
    if len(names) != len(pairs):
        raise ValueError(f"context has {len(names)} variables, got {len(pairs)} pairs")
    given = dict(proofs) if isinstance(proofs, Mapping) else dict(enumerate(proofs))
    b = _Builder()
    grafted: dict[int, int] = {}

    def close(c: Expr, env: dict[str, tuple[Expr, Expr, int | None]], side: int) -> Expr:
        for x in free_vars(c):
            c = substitute(c, x, env[x][side])
        return c

    def graft(k: int) -> int:
        if k not in grafted:
            q = given[k]
            f, g = pairs[k]
            if q.root.sequent != Sequent(f, [g]):
                raise ValueError(f"proof {k} does not conclude {f} |- {g}")
            base = len(b.seqs)
            for node in q.nodes:
                b.new(node.sequent)
            for j, node in enumerate(q.nodes):
                b.set(base + j, node.rule, [base + t for t in node.premisses])
            grafted[k] = base
        return grafted[k]

    fresh = (f"Y{n}" for n in range(10**9))

    def build(c: Expr, env) -> int:
        lhs, rhs = close(c, env, 0), close(c, env, 1)
        if isinstance(c, Var):
            f, g, target = env[c.name]
            if target is not None:
                return target
            k = names.index(c.name)
            if k in given and given[k] is not None:
                return graft(k)
            if f != g:
                raise ValueError(f"no proof supplied for pair {k}")
            i = b.new(Sequent(f, [f]))
            b.set(i, Rule(ID))
            return i
        i = b.new(Sequent(lhs, [rhs]))
        if isinstance(c, Zero):
            b.set(i, left_rule_for(lhs))
        elif isinstance(c, One):
            b.set(i, Rule(ID))
        elif isinstance(c, Prefix):
            b.set(i, Rule(K, letter=c.letter), [build(c.body, env)])
        elif isinstance(c, Sum):
            sr = b.new(apply_rule(b.seqs[i], right_rule_for(rhs))[0])
            b.set(i, right_rule_for(rhs), [sr])
            s = b.seqs[sr]
            branches = []
            for part, prem in zip((c.left, c.right), apply_rule(s, left_rule_for(lhs))):
                want = close(part, env, 1)
                drop = [f for f in prem.rhs if f != want]
                here = b.new(prem)
                branches.append(here)
                for f in drop:
                    rule = Rule(WEAK, formula=f)
                    nxt = b.new(apply_rule(b.seqs[here], rule)[0])
                    b.set(here, rule, [nxt])
                    here = nxt
                # the node reached after weakening stands for the subproof
                _redirect(b, here, build(part, env))
            b.set(sr, left_rule_for(lhs), branches)
        else:
            y = next(fresh)
            while y in names:
                y = next(fresh)
            body = open_body(c, y)
            left, right = left_rule_for(lhs), right_rule_for(rhs)
            l1 = b.new(apply_rule(b.seqs[i], left)[0])
            b.set(i, left, [l1])
            r1 = b.new(apply_rule(b.seqs[l1], right)[0])
            b.set(l1, right, [r1])
            sub = build(body, {**env, y: (lhs, rhs, i)})
            _redirect(b, r1, sub)
        return i

    env = {x: (f, g, None) for x, (f, g) in zip(names, pairs)}
    root = build(ctx, env)
    return _compact(b, root)


def _redirect(b: _Builder, placeholder: int, target: int) -> None:
    """Make ``placeholder`` (a node with no rule yet) stand for ``target``."""
    if b.seqs[placeholder] != b.seqs[target]:
        raise ProverError("functor proof sequents out of step")
    b.rules[placeholder] = ("alias", target)


def _compact(b: _Builder, root: int) -> ProofGraph:
    def resolve(i: int) -> int:
        while isinstance(b.rules[i], tuple):
            i = b.rules[i][1]
        return i

    order, index = [], {}
    queue = deque([resolve(root)])
    index[queue[0]] = 0
    while queue:
        i = queue.popleft()
        order.append(i)
        for j in b.prems[i]:
            j = resolve(j)
            if j not in index:
                index[j] = len(index)
                queue.append(j)
    return ProofGraph(tuple(
        ProofNode(b.seqs[i], b.rules[i], tuple(index[resolve(j)] for j in b.prems[i]))
        for i in order))
