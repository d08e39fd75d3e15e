"""Progress checking for cyclic proof graphs.

μ-only proofs: every cycle needs a left rule or a k step.

μν proofs: every infinite branch needs a trace whose smallest infinitely
often principal formula is a μ (left) or a ν (right). Decided by closing the
set of trace summaries of paths under composition (a size-change style
argument): a summary records, for each pair of trace positions, the best
colours achievable between them. The proof progresses iff every idempotent
loop summary at a reachable node has a self-trace with an even colour.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from .calculus import (
    K, LEFT, RIGHT, RIGHT_RULES, ProofGraph, apply_rule, trace_successors,
    validate_node_list,
)
from .expr import Mu, Nu, fl_closure, is_mu_only

PROGRESSING = "progressing"
NOT_PROGRESSING = "not-progressing"
MALFORMED = "malformed"

DEFAULT_STATE_CAP = 10**6
# colour of a step where the trace formula is not principal
NEUTRAL = 1 << 30 | 1


class CapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Malformed:
    node: int
    reason: str


@dataclass(frozen=True)
class Branch:
    """The infinite branch stem . cycle^omega, as node indices. The stem ends
    just before ``cycle[0]``; the last cycle node leads back to ``cycle[0]``."""

    stem: tuple[int, ...]
    cycle: tuple[int, ...]


@dataclass(frozen=True)
class CheckReport:
    verdict: str
    witness: Branch | None = None
    malformed: Malformed | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return self.verdict == PROGRESSING

    def to_dict(self) -> dict:
        out: dict = {"verdict": self.verdict}
        if self.witness:
            out["witness"] = {"stem": list(self.witness.stem), "cycle": list(self.witness.cycle)}
        if self.malformed:
            out["node"] = self.malformed.node
            out["reason"] = self.malformed.reason
        return out

    def to_text(self) -> str:
        if self.verdict == MALFORMED:
            return f"malformed at node {self.malformed.node}: {self.malformed.reason}"
        if self.witness:
            return (f"{self.verdict}: stem {list(self.witness.stem)} "
                    f"cycle {list(self.witness.cycle)}")
        return self.verdict

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def check_wellformed(p: ProofGraph) -> Malformed | None:
    problem = validate_node_list(p)
    return Malformed(*problem) if problem else None


def _reachable(p: ProofGraph) -> set[int]:
    seen = {0}
    work = [0]
    while work:
        for j in p.nodes[work.pop()].premisses:
            if j not in seen:
                seen.add(j)
                work.append(j)
    return seen


def _shortest_path(p: ProofGraph, start: int, goal: int, allowed=None) -> list[int] | None:
    parent = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if u == goal:
            path = []
            while u is not None:
                path.append(u)
                u = parent[u]
            return path[::-1]
        for v in p.nodes[u].premisses:
            if v not in parent and (allowed is None or v in allowed):
                parent[v] = u
                queue.append(v)
    return None


def _shortest_cycle(p: ProofGraph, v: int, allowed) -> list[int]:
    best = None
    for w in set(p.nodes[v].premisses):
        if allowed is not None and w not in allowed:
            continue
        back = [v] if w == v else _shortest_path(p, w, v, allowed)
        if back is not None:
            cyc = [v] + back[:-1] if w != v else [v]
            if best is None or len(cyc) < len(best):
                best = cyc
    return best


def _lasso(p: ProofGraph, cycle: list[int]) -> Branch:
    stem = _shortest_path(p, 0, cycle[0])
    return Branch(tuple(stem[:-1]), tuple(cycle))


def check_progress_mu(p: ProofGraph) -> CheckReport:
    """Every cycle must contain a left logical rule or a k step."""
    bad = nx.DiGraph()
    live = _reachable(p)
    for i in live:
        node = p.nodes[i]
        if node.rule.is_left or node.rule.kind == K:
            continue
        bad.add_node(i)
        bad.add_edges_from((i, j) for j in node.premisses)
    bad.remove_nodes_from([n for n in list(bad) if n not in live or not (
        p.nodes[n].rule.kind != K and not p.nodes[n].rule.is_left)])
    best = None
    for scc in nx.strongly_connected_components(bad):
        for v in sorted(scc):
            cyc = _shortest_cycle(p, v, scc)
            if cyc and (best is None or len(cyc) < len(best)):
                best = cyc
    if best is None:
        return CheckReport(PROGRESSING)
    return CheckReport(NOT_PROGRESSING, _lasso(p, best))


# --------------------------------------------------------------------------
# Traces and colours

class _TraceSpace:
    """Trace positions (side, formula) numbered, plus per-edge summaries."""

    def __init__(self, p: ProofGraph):
        root = p.root.sequent
        self.fl = fl_closure(root.formulas())
        self.p = p
        self.ids: dict[tuple[str, object], int] = {}

    def pos(self, side, f) -> int:
        key = (side, f)
        if key not in self.ids:
            self.ids[key] = len(self.ids)
        return self.ids[key]

    def colour(self, node_index: int, side: str, f) -> int:
        node = self.p.nodes[node_index]
        rule = node.rule
        principal = (side == LEFT and rule.is_left) or (
            side == RIGHT and rule.kind in RIGHT_RULES and rule.formula == f)
        if not principal:
            return NEUTRAL
        good = isinstance(f, Mu) if side == LEFT else isinstance(f, Nu)
        return 2 * (self.fl.rank[f] + 1) + (0 if good else 1)

    def steps(self, node_index: int, premiss: int) -> list[tuple[int, int, int]]:
        """(from, to, colour) for the edge to premiss slot ``premiss``."""
        node = self.p.nodes[node_index]
        s = node.sequent
        out = []
        for side, forms in ((LEFT, (s.lhs,)), (RIGHT, s.rhs)):
            for f in forms:
                c = self.colour(node_index, side, f)
                src = self.pos(side, f)
                for g in trace_successors(s, node.rule, f, side)[premiss]:
                    out.append((src, self.pos(side, g), c))
        return out

    def check_formulas(self) -> Malformed | None:
        for i, node in enumerate(self.p.nodes):
            for f in node.sequent.formulas():
                if f not in self.fl:
                    return Malformed(i, f"{f} lies outside the closure of the root sequent")
        return None


def _compose(s1: frozenset, s2: frozenset) -> frozenset:
    by_src: dict[int, list[tuple[int, int]]] = {}
    for b, c, q in s2:
        by_src.setdefault(b, []).append((c, q))
    return frozenset(
        (a, c, min(p, q)) for a, b, p in s1 for c, q in by_src.get(b, ()))


def _good_self_trace(s: frozenset) -> bool:
    return any(a == c and q % 2 == 0 for a, c, q in s)


def check_progress_munu(p: ProofGraph, cap: int = DEFAULT_STATE_CAP) -> CheckReport:
    """Trace-based progress for μν proofs (see module docstring)."""
    space = _TraceSpace(p)
    bad_formula = space.check_formulas()
    if bad_formula:
        return CheckReport(MALFORMED, malformed=bad_formula)
    live = _reachable(p)
    edge: dict[tuple[int, int], frozenset] = {}
    for i in sorted(live):
        node = p.nodes[i]
        for slot, j in enumerate(node.premisses):
            steps = frozenset(space.steps(i, slot))
            edge[i, j] = edge.get((i, j), frozenset()) | steps
    out_edges: dict[int, list[int]] = {}
    for i, j in edge:
        out_edges.setdefault(i, []).append(j)

    # (u, v, summary) -> path u..v, explored breadth first so paths are short
    seen: dict[tuple[int, int, frozenset], tuple[int, ...]] = {}
    queue = deque()
    for (i, j), s in edge.items():
        key = (i, j, s)
        if key not in seen:
            seen[key] = (i, j)
            queue.append(key)
    while queue:
        u, v, s = key = queue.popleft()
        path = seen[key]
        if u == v and _compose(s, s) == s and not _good_self_trace(s):
            cycle = list(path[:-1])
            return CheckReport(NOT_PROGRESSING, _lasso(p, cycle))
        for w in out_edges.get(v, ()):
            nxt = (u, w, _compose(s, edge[v, w]))
            if nxt not in seen:
                seen[nxt] = path + (w,)
                queue.append(nxt)
                if len(seen) > cap:
                    raise CapExceeded(f"more than {cap} trace summaries")
    return CheckReport(PROGRESSING)


def check_progress(p: ProofGraph, cap: int = DEFAULT_STATE_CAP) -> CheckReport:
    """Well-formedness, then the progress check matching the proof's syntax."""
    bad = check_wellformed(p)
    if bad:
        return CheckReport(MALFORMED, malformed=bad)
    mu_only = all(is_mu_only(f) for n in p.nodes for f in n.sequent.formulas())
    return check_progress_mu(p) if mu_only else check_progress_munu(p, cap)


def find_bad_branch(p: ProofGraph, cap: int = DEFAULT_STATE_CAP) -> Branch | None:
    return check_progress_munu(p, cap).witness


def branch_has_progressing_trace(p: ProofGraph, branch: Branch) -> bool:
    """Independent check of one lasso branch: search the finite graph of
    (cycle position, trace formula) for a cycle whose least colour is even.
    Traces through the stem are irrelevant since every formula on the cycle
    descends from the root."""
    cyc = branch.cycle
    space = _TraceSpace(p)
    graph: dict[tuple[int, int], list[tuple[int, int]]] = {}
    colour: dict[tuple[int, int], int] = {}
    for k, i in enumerate(cyc):
        j = cyc[(k + 1) % len(cyc)]
        node = p.nodes[i]
        slots = [slot for slot, t in enumerate(node.premisses) if t == j]
        if not slots:
            raise ValueError(f"branch uses missing edge {i} -> {j}")
        for src, dst, c in space.steps(i, slots[0]):
            graph.setdefault((k, src), []).append(((k + 1) % len(cyc), dst))
            colour[k, src] = c
    for succs in list(graph.values()):
        for t in succs:
            graph.setdefault(t, [])
    work = [set(graph)]
    while work:
        nodes = work.pop()
        sub = nx.DiGraph()
        sub.add_nodes_from(nodes)
        sub.add_edges_from((u, v) for u in nodes for v in graph[u] if v in nodes)
        for scc in nx.strongly_connected_components(sub):
            if len(scc) == 1:
                (only,) = scc
                if not sub.has_edge(only, only):
                    continue
            least = min(colour.get(n, NEUTRAL) for n in scc)
            if least % 2 == 0:
                return True
            rest = {n for n in scc if colour.get(n, NEUTRAL) != least}
            if rest:
                work.append(rest)
    return False


def premisses_match(p: ProofGraph, i: int) -> bool:
    node = p.nodes[i]
    return [p.nodes[j].sequent for j in node.premisses] == apply_rule(node.sequent, node.rule)
