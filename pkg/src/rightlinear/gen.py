"""Seeded random expressions, sequents and systems for corpus testing."""

from __future__ import annotations

import random
from typing import Sequence

from .automata import EquationSystem
from .calculus import Sequent
from .expr import Expr, One, Prefix, Sum, Var, Zero, mu, nu

_NAMES = ("X", "Y", "Z", "W", "V", "U")


def random_expr(rng: random.Random, depth: int, alphabet: Sequence[str] = "ab",
                mu_only: bool = True, guarded: bool = False) -> Expr:
    """A closed expression of height at most ``depth``.

    With ``guarded`` every variable occurrence sits under a prefix inside
    its binder's scope."""

    def go(d: int, scope: tuple[str, ...], usable: tuple[str, ...]) -> Expr:
        leaves: list = [Zero(), One()]
        leaves += [Var(x) for x in usable] * 2
        if d <= 0:
            return rng.choice(leaves)
        roll = rng.random()
        if roll < 0.15:
            return rng.choice(leaves)
        if roll < 0.45:
            return Prefix(rng.choice(alphabet), go(d - 1, scope, scope))
        if roll < 0.7:
            return Sum(go(d - 1, scope, usable), go(d - 1, scope, usable))
        if len(scope) >= len(_NAMES):
            return Prefix(rng.choice(alphabet), go(d - 1, scope, scope))
        x = _NAMES[len(scope)]
        binder = mu if mu_only or rng.random() < 0.5 else nu
        inner_usable = usable if guarded else usable + (x,)
        return binder(x, go(d - 1, scope + (x,), inner_usable))

    return go(depth, (), ())


def random_sequent(rng: random.Random, depth: int, alphabet: Sequence[str] = "ab",
                   mu_only: bool = True, guarded: bool = False,
                   max_rhs: int = 2) -> Sequent:
    lhs = random_expr(rng, depth, alphabet, mu_only, guarded)
    rhs = [random_expr(rng, depth, alphabet, mu_only, guarded)
           for _ in range(rng.randint(0, max_rhs))]
    return Sequent(lhs, rhs)


def random_system(rng: random.Random, variables: Sequence[str] = ("X", "Y"),
                  depth: int = 2, alphabet: Sequence[str] = "ab") -> EquationSystem:
    """Binder-free clauses over the given variables."""

    def go(d: int) -> Expr:
        roll = rng.random()
        if d <= 0 or roll < 0.25:
            return rng.choice([Zero(), One()] + [Var(x) for x in variables] * 2)
        if roll < 0.6:
            return Prefix(rng.choice(alphabet), go(d - 1))
        return Sum(go(d - 1), go(d - 1))

    return EquationSystem(tuple(variables), {x: go(depth) for x in variables})
