import pytest
from hypothesis import given, strategies as st

from rightlinear.words import FiniteWord, LassoWord, parse_word


def test_parse_word_forms():
    assert parse_word("~") == FiniteWord(())
    assert parse_word("ab") == FiniteWord(("a", "b"))
    assert parse_word("ab:ba") == LassoWord(("a", "b"), ("b", "a"))
    assert parse_word(":a") == LassoWord((), ("a",))


def test_lasso_needs_period():
    with pytest.raises(ValueError):
        parse_word("ab:")


def test_printing():
    assert str(FiniteWord(())) == "~"
    assert str(LassoWord(("a",), ("b",))) == "a:b"


def test_lasso_positions():
    w = LassoWord.of("ab:cd")
    assert [w.letter_at(i) for i in range(4)] == list("abcd")
    assert [w.next_pos(i) for i in range(4)] == [1, 2, 3, 2]


def test_normalized_examples():
    assert str(LassoWord.of("a:a").normalized()) == ":a"
    assert str(LassoWord.of("ab:abab").normalized()) == ":ab"
    assert str(LassoWord.of("b:aa").normalized()) == "b:a"


def _unroll(w, n):
    out, i = [], 0
    for _ in range(n):
        out.append(w.letter_at(i))
        i = w.next_pos(i)
    return "".join(out)


lassos = st.builds(
    LassoWord,
    st.lists(st.sampled_from("ab"), max_size=4).map(tuple),
    st.lists(st.sampled_from("ab"), min_size=1, max_size=4).map(tuple),
)


@given(lassos)
def test_normalized_is_same_word_and_minimal(w):
    n = w.normalized()
    assert _unroll(n, 40) == _unroll(w, 40)
    assert len(n.prefix) <= len(w.prefix) and len(n.period) <= len(w.period)
    assert n.normalized() == n
