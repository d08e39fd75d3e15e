import random

import pytest

from rightlinear.automata import (
    EquationSystem, approximants, equivalent, find_counterexample,
    include_finite, meet_product, member_finite, member_lasso, parse_system,
    solve_system, to_nfa, to_parity,
)
from rightlinear.expr import One, ParseError, Prefix, Sum, Var, Zero, fl_closure, parse
from rightlinear.gen import random_expr, random_system
from rightlinear.words import FiniteWord, LassoWord

import oracles

TOP = parse("mu X. 1 + a.X")
E = parse("mu X. 1 + a.a.X")
O = Prefix("a", E)
W = FiniteWord.of
L = LassoWord.of
EVEN = {"a" * k for k in range(0, 7, 2)}
ODD = {"a" * k for k in range(1, 7, 2)}


def test_to_nfa_examples():
    n = to_nfa(parse("mu X. a.X"))
    assert len(n.labels) == 2 and not n.finals and n.is_empty()
    one = to_nfa(One())
    assert one.finals == {one.initial} and one.words_upto(4) == {""}
    assert to_nfa(E).words_upto(6) == EVEN


def test_to_nfa_rejects_nu_and_open():
    with pytest.raises(ValueError):
        to_nfa(parse("nu X. a.X"))
    with pytest.raises(ValueError):
        to_nfa(parse("a.X"))


def test_edge_list_golden():
    assert to_nfa(parse("mu X. a.X")).to_edge_list() == "init: 0\nfinal: \n0 -eps-> 1\n1 -a-> 0"
    assert to_nfa(One()).to_edge_list() == "init: 0\nfinal: 0"


def test_to_parity_examples():
    p = to_parity(parse("nu X. a.X"))
    assert len(p.nfa.labels) == 2
    assert p.priority[0] % 2 == 0 and p.priority[1] % 2 == 1
    accepted = {str(w) for w in oracles.all_lassos("ab", 3) if p.accepts(w)}
    assert {str(LassoWord(w.prefix, w.period).normalized()) for w in map(L, accepted)} == {":a"}
    m = to_parity(parse("mu X. a.X"))
    assert not any(m.accepts(w) for w in oracles.all_lassos("ab", 3))
    one = to_parity(One())
    assert one.accepts(W(""))
    assert not one.accepts(W("a")) and not one.accepts(L(":a"))
    assert min(one.priority) == 0


def test_member_examples():
    assert member_finite(W(""), TOP)
    assert not member_finite(W("a"), E)
    assert member_finite(W("ab"), parse("a.b.1"))
    assert member_lasso(L(":a"), parse("nu X. 1 + a.X"))
    assert not member_lasso(L(":a"), TOP)
    assert not member_lasso(L(":b"), parse("nu X. a.X"))


def test_member_finite_handles_nu():
    # finite words of nu X. 1 + a.X are exactly a*
    n = parse("nu X. 1 + a.X")
    for w in oracles.all_words("ab", 4):
        assert member_finite(w, n) == (set(w.letters) <= {"a"})


def test_include_finite_examples():
    assert include_finite(TOP, [Sum(E, O)])
    assert find_counterexample(E, [O]) == W("")
    assert find_counterexample(parse("a.1"), [parse("b.1")]) == W("a")
    assert find_counterexample(TOP, []) == W("")
    assert include_finite(Zero(), [])


def test_counterexample_is_shortest():
    rng = random.Random(4)
    words = list(oracles.all_words("ab", 5))
    for _ in range(150):
        e = random_expr(rng, 3)
        gamma = [random_expr(rng, 3) for _ in range(rng.randint(0, 2))]
        w = find_counterexample(e, gamma)
        first = oracles.included(e, gamma, words)
        if w is None:
            assert first is None
        elif len(w) <= 5:
            assert first is not None and len(first) == len(w)
            assert oracles.member(w, e) and not any(oracles.member(w, g) for g in gamma)


def test_meet_product_examples():
    assert meet_product([E, O]).is_empty()
    assert meet_product([TOP, E]).words_upto(6) == EVEN
    assert equivalent(meet_product([E]), to_nfa(E))
    with pytest.raises(ValueError):
        meet_product([])


def test_meet_product_is_intersection():
    rng = random.Random(8)
    for _ in range(100):
        es = [random_expr(rng, 3) for _ in range(rng.randint(1, 3))]
        want = set.intersection(*(oracles.language(e, "ab", 6) for e in es))
        assert meet_product(es).words_upto(6) == want


def test_solve_system_examples():
    sols = solve_system(parse_system("X = 1 + a.Y\nY = a.X"))
    assert sols["X"].automaton.words_upto(6) == EVEN
    assert sols["Y"].automaton.words_upto(6) == ODD
    assert equivalent(sols["X"].automaton, to_nfa(E))
    assert solve_system(parse_system("X = X"))["X"].automaton.is_empty()
    both = solve_system(parse_system("X = a.Y\nY = b.X"))
    assert both["X"].automaton.is_empty() and both["Y"].automaton.is_empty()


def test_parse_system_errors():
    with pytest.raises(ParseError):
        parse_system("X == 1")
    with pytest.raises(ParseError):
        parse_system("X = 1\nX = 0")
    with pytest.raises(ValueError):
        parse_system("X = mu Y. a.Y")
    with pytest.raises(ValueError):
        parse_system("X = a.Z")
    with pytest.raises(ValueError):
        EquationSystem(("X", "Y"), {"X": One()})


def _eval(e, env, n):
    """A binder-free clause evaluated on length-bounded languages."""
    if isinstance(e, Zero):
        return set()
    if isinstance(e, One):
        return {""}
    if isinstance(e, Var):
        return set(env[e.name])
    if isinstance(e, Sum):
        return _eval(e.left, env, n) | _eval(e.right, env, n)
    return {e.letter + w for w in _eval(e.body, env, n) if len(w) < n}


def test_solve_system_is_least_solution():
    n = 5
    rng = random.Random(12)
    for _ in range(40):
        sys = random_system(rng, ("X", "Y", "Z"), depth=3)
        sols = solve_system(sys)
        env = {x: sols[x].automaton.words_upto(n) for x in sys.variables}
        # a solution: every clause holds as a language identity
        for x in sys.variables:
            assert _eval(sys.clauses[x], env, n) == env[x]
        # least: dropping any word breaks some clause
        for x in sys.variables:
            for w in sorted(env[x])[:4]:
                smaller = dict(env, **{x: env[x] - {w}})
                assert any(not _eval(sys.clauses[y], smaller, n) <= smaller[y]
                           for y in sys.variables)


def test_solve_system_clauses_hold_by_nfa_equivalence():
    rng = random.Random(5)
    for _ in range(30):
        sys = random_system(rng, ("X", "Y"), depth=2)
        sols = solve_system(sys)
        for x in sys.variables:
            # substitute the closed solutions into the clause via a new system
            extended = EquationSystem(
                sys.variables + ("Q",), dict(sys.clauses, Q=sys.clauses[x]))
            q = solve_system(extended, only=["Q"])["Q"].automaton
            assert equivalent(q, sols[x].automaton)


def test_approximants_stabilize():
    rng = random.Random(31)
    for _ in range(60):
        e = random_expr(rng, 3)
        rounds, words = approximants(e, 5)
        assert rounds <= 7 * len(fl_closure(e))
        assert words == oracles.language(e, "ab", 5)
