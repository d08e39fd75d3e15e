import random

from rightlinear.automata import member_finite, member_lasso
from rightlinear.expr import One, Zero, parse
from rightlinear.gen import random_expr
from rightlinear.puzzle import (
    PuzzlePlay, solve, solve_finite, solve_lasso, verify_play,
)
from rightlinear.words import FiniteWord, LassoWord

import oracles

E = parse("mu X. 1 + a.a.X")
W = FiniteWord.of


def test_solve_finite_examples():
    play = solve_finite(W("aa"), E)
    assert play is not None and not play.is_infinite
    assert play.positions[-1] == (2, One())
    assert verify_play(play, W("aa"), E)
    assert solve_finite(W("a"), Zero()) is None
    play = solve_finite(W(""), One())
    assert play.positions == ((0, One()),)
    assert verify_play(play, W(""), One())


def test_solve_lasso_examples():
    assert solve_lasso(LassoWord.of(":a"), parse("nu X. a.X")) is not None
    assert solve_lasso(LassoWord.of(":a"), parse("mu X. 1 + a.X")) is None
    play = solve_lasso(LassoWord.of("a:b"), parse("a.(nu X. b.X)"))
    assert play.is_infinite
    assert verify_play(play, LassoWord.of("a:b"), parse("a.(nu X. b.X)"))


def test_verify_play_rejects_truncation():
    play = solve_finite(W("aa"), E)
    cut = PuzzlePlay(play.positions[:-1])
    assert not verify_play(cut, W("aa"), E)


def test_verify_play_rejects_mu_cycle():
    m = parse("mu X. a.X")
    w = LassoWord.of(":a")
    fake = PuzzlePlay(((0, m), (0, parse("a.(mu X. a.X)"))), loop_start=0)
    assert not verify_play(fake, w, m)
    n = parse("nu X. a.X")
    good = PuzzlePlay(((0, n), (0, parse("a.(nu X. a.X)"))), loop_start=0)
    assert verify_play(good, w, n)


def test_verify_play_rejects_wrong_start_and_bad_move():
    play = solve_finite(W("aa"), E)
    assert not verify_play(play, W("aa"), parse("a.a.1"))
    bogus = PuzzlePlay(((0, parse("a.1")), (1, Zero())))
    assert not verify_play(bogus, W("a"), parse("a.1"))


def test_nested_parity_condition():
    # infinitely many b's is a nu over a mu; the smallest recurring formula decides
    inf_b = parse("nu X. mu Y. a.Y + b.X")
    fin_b = parse("mu X. nu Y. a.Y + b.X")
    for text, many_b in [(":ab", True), (":a", False), ("bbb:a", False), ("a:b", True)]:
        w = LassoWord.of(text)
        assert (solve(w, inf_b) is not None) == many_b
        assert (solve(w, fin_b) is not None) == (not many_b)


CORPUS = [random_expr(random.Random(s), 3, mu_only=False) for s in range(60)]


def test_solve_agrees_with_reference_semantics():
    words = list(oracles.all_words("ab", 4))
    lassos = list(oracles.all_lassos("ab", 2))
    for e in CORPUS:
        for w in words + lassos:
            play = solve(w, e)
            assert (play is not None) == oracles.member(w, e), (str(w), e)
            if play is not None:
                assert verify_play(play, w, e)


def test_solve_finite_agrees_with_nfa():
    rng = random.Random(17)
    corpus = [random_expr(rng, 4) for _ in range(200)]
    words = list(oracles.all_words("ab", 6))
    for e in corpus:
        for w in words:
            assert (solve_finite(w, e) is not None) == member_finite(w, e)


def test_solve_lasso_agrees_with_parity_automaton():
    rng = random.Random(23)
    corpus = [random_expr(rng, 3, mu_only=False) for _ in range(40)]
    lassos = list(oracles.all_lassos("ab", 4))
    for e in corpus:
        for w in lassos:
            assert (solve_lasso(w, e) is not None) == member_lasso(w, e)
