"""The evaluation puzzle: a one-player game deciding word membership.

States pair a position in the word with an expression. The player resolves
sums; every other state has at most one move. A play wins if it stops at
(end of a finite word, 1), or if it is infinite and the smallest expression
seen infinitely often is a nu. Plays over finite and lasso words live in a
finite product graph, so the search below is exhaustive.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable

import networkx as nx

from .expr import Expr, Mu, Nu, One, Prefix, Sum, order_key, unfold
from .words import FiniteWord, LassoWord

Position = tuple[int, Expr]


@dataclass(frozen=True)
class PuzzlePlay:
    """A winning play: ``positions`` is the whole finite play, or stem plus
    cycle when ``loop_start`` is set (the last position moves back to
    ``positions[loop_start]``)."""

    positions: tuple[Position, ...]
    loop_start: int | None = None

    @property
    def is_infinite(self) -> bool:
        return self.loop_start is not None


def moves(word: FiniteWord | LassoWord, pos: Position) -> list[Position]:
    i, e = pos
    if isinstance(e, Sum):
        return [(i, e.left), (i, e.right)]
    if isinstance(e, (Mu, Nu)):
        return [(i, unfold(e))]
    if isinstance(e, Prefix):
        if isinstance(word, LassoWord):
            return [(word.next_pos(i), e.body)] if word.letter_at(i) == e.letter else []
        if i < len(word) and word.letters[i] == e.letter:
            return [(i + 1, e.body)]
    return []


def is_winning_terminal(word: FiniteWord | LassoWord, pos: Position) -> bool:
    return isinstance(word, FiniteWord) and pos[0] == len(word) and isinstance(pos[1], One)


def _reachable(word, start: Position) -> dict[Position, list[Position]]:
    graph = {start: moves(word, start)}
    work = [start]
    while work:
        for nxt in graph[work.pop()]:
            if nxt not in graph:
                graph[nxt] = moves(word, nxt)
                work.append(nxt)
    return graph


def _bfs_path(graph, sources: Iterable[Hashable], targets, allowed=None) -> list | None:
    """Shortest path from any source to a node satisfying ``targets``."""
    parent = {}
    queue = deque()
    for s in sources:
        parent[s] = None
        queue.append(s)
    while queue:
        node = queue.popleft()
        if targets(node):
            path = []
            while node is not None:
                path.append(node)
                node = parent[node]
            return path[::-1]
        for nxt in graph[node]:
            if nxt not in parent and (allowed is None or nxt in allowed):
                parent[nxt] = node
                queue.append(nxt)
    return None


def _cycle_through(graph, node, component: set) -> list:
    """Shortest cycle node -> ... -> node inside ``component``."""
    succs = [n for n in graph[node] if n in component]
    if node in succs:
        return [node]
    path = _bfs_path(graph, succs, lambda n: node in graph[n], allowed=component)
    return [node] + path


def accepting_cycle(graph: dict, expr_of) -> list | None:
    """A cycle whose smallest expression is a nu, found by repeatedly
    splitting SCCs and discarding the smallest non-nu expression class."""
    work = [set(graph)]
    while work:
        nodes = work.pop()
        sub = nx.DiGraph()
        sub.add_nodes_from(nodes)
        sub.add_edges_from((u, v) for u in nodes for v in graph[u] if v in nodes)
        for scc in nx.strongly_connected_components(sub):
            if len(scc) == 1:
                (only,) = scc
                if only not in graph[only]:
                    continue
            smallest = min(scc, key=lambda n: order_key(expr_of(n)))
            if isinstance(expr_of(smallest), Nu):
                return _cycle_through(graph, smallest, scc)
            worst = expr_of(smallest)
            rest = {n for n in scc if expr_of(n) != worst}
            if rest:
                work.append(rest)
    return None


def _solve(word, e: Expr) -> PuzzlePlay | None:
    start = (0, e)
    graph = _reachable(word, start)
    finish = _bfs_path(graph, [start], lambda p: is_winning_terminal(word, p))
    if finish is not None:
        return PuzzlePlay(tuple(finish))
    cycle = accepting_cycle(graph, lambda p: p[1])
    if cycle is None:
        return None
    on_cycle = set(cycle)
    stem = _bfs_path(graph, [start], lambda p: p in on_cycle)
    entry = cycle.index(stem[-1])
    cycle = cycle[entry:] + cycle[:entry]
    return PuzzlePlay(tuple(stem[:-1] + cycle), loop_start=len(stem) - 1)


def solve_finite(w: FiniteWord, e: Expr) -> PuzzlePlay | None:
    """A winning play from (w, e), or None when w is not in the language."""
    return _solve(w, e)


def solve_lasso(w: LassoWord, e: Expr) -> PuzzlePlay | None:
    return _solve(w, e)


def solve(w: FiniteWord | LassoWord, e: Expr) -> PuzzlePlay | None:
    return _solve(w, e)


def verify_play(play: PuzzlePlay, w: FiniteWord | LassoWord, e: Expr) -> bool:
    """Check every move and the winning condition."""
    ps = play.positions
    if not ps or ps[0] != (0, e):
        return False
    for here, there in zip(ps, ps[1:]):
        if there not in moves(w, here):
            return False
    if play.loop_start is None:
        return is_winning_terminal(w, ps[-1])
    if not 0 <= play.loop_start < len(ps):
        return False
    if ps[play.loop_start] not in moves(w, ps[-1]):
        return False
    smallest = min((p[1] for p in ps[play.loop_start:]), key=order_key)
    return isinstance(smallest, Nu)


def member(w: FiniteWord | LassoWord, e: Expr) -> bool:
    return _solve(w, e) is not None
