"""Reference semantics used as test oracles.

Membership is model checking on the positions of a word: position i stands
for the suffix starting there. Fixed points are computed by plain
Knaster-Tarski iteration over sets of positions, with no automata, puzzles or
closures involved.
"""

from itertools import product

from rightlinear.expr import Bound, Mu, One, Prefix, Sum, Var, Zero
from rightlinear.words import FiniteWord, LassoWord


def _structure(w):
    if isinstance(w, FiniteWord):
        n = len(w)
        letter = {i: w.letters[i] for i in range(n)}
        succ = {i: i + 1 for i in range(n)}
        return frozenset(range(n + 1)), letter, succ, frozenset([n])
    letters = w.prefix + w.period
    letter = dict(enumerate(letters))
    succ = {i: w.next_pos(i) for i in range(len(letters))}
    return frozenset(range(len(letters))), letter, succ, frozenset()


def sat(e, w):
    """Positions of w whose suffix belongs to [e]."""
    universe, letter, succ, ends = _structure(w)

    def go(e, bound, free):
        if isinstance(e, Zero):
            return frozenset()
        if isinstance(e, One):
            return ends
        if isinstance(e, Var):
            return free[e.name]
        if isinstance(e, Bound):
            return bound[-1 - e.index]
        if isinstance(e, Sum):
            return go(e.left, bound, free) | go(e.right, bound, free)
        if isinstance(e, Prefix):
            inner = go(e.body, bound, free)
            return frozenset(i for i in letter if letter[i] == e.letter and succ[i] in inner)
        current = frozenset() if isinstance(e, Mu) else universe
        while True:
            nxt = go(e.body, bound + [current], free)
            if nxt == current:
                return current
            current = nxt

    return go(e, [], {})


def member(w, e):
    return 0 in sat(e, w)


def all_words(alphabet, n):
    for k in range(n + 1):
        for t in product(alphabet, repeat=k):
            yield FiniteWord(t)


def all_lassos(alphabet, n):
    for k in range(n + 1):
        for pre in product(alphabet, repeat=k):
            for m in range(1, n + 1):
                for per in product(alphabet, repeat=m):
                    yield LassoWord(pre, per)


def language(e, alphabet, n):
    return {"".join(w.letters) for w in all_words(alphabet, n) if member(w, e)}


def included(lhs, rhs, words):
    """First word of ``words`` in lhs and in none of rhs, if any."""
    for w in words:
        if member(w, lhs) and not any(member(w, f) for f in rhs):
            return w
    return None
