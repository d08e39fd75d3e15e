"""Finite words and ultimately periodic (lasso) words."""

from __future__ import annotations

from dataclasses import dataclass

EMPTY_WORD = "~"


@dataclass(frozen=True)
class FiniteWord:
    letters: tuple[str, ...] = ()

    @classmethod
    def of(cls, text: str) -> FiniteWord:
        return cls(tuple("" if text == EMPTY_WORD else text))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return "".join(self.letters) or EMPTY_WORD


@dataclass(frozen=True)
class LassoWord:
    """prefix . period^omega"""

    prefix: tuple[str, ...]
    period: tuple[str, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("lasso period must be nonempty")

    @classmethod
    def of(cls, text: str) -> LassoWord:
        prefix, sep, period = text.partition(":")
        if not sep:
            raise ValueError(f"lasso word needs ':' separator: {text!r}")
        return cls(tuple(prefix), tuple(period))

    def letter_at(self, pos: int) -> str:
        return (self.prefix + self.period)[pos]

    def next_pos(self, pos: int) -> int:
        pos += 1
        return len(self.prefix) if pos == len(self.prefix) + len(self.period) else pos

    @property
    def positions(self) -> int:
        return len(self.prefix) + len(self.period)

    def __str__(self) -> str:
        return "".join(self.prefix) + ":" + "".join(self.period)

    def normalized(self) -> LassoWord:
        """Same omega-word with the shortest prefix and a primitive period."""
        prefix, period = list(self.prefix), list(self.period)
        while prefix and prefix[-1] == period[-1]:
            prefix.pop()
            period.insert(0, period.pop())
        n = len(period)
        for d in range(1, n + 1):
            if n % d == 0 and period == period[:d] * (n // d):
                period = period[:d]
                break
        return LassoWord(tuple(prefix), tuple(period))


def parse_word(text: str) -> FiniteWord | LassoWord:
    """``~`` is the empty word, ``u:v`` is the lasso u v^omega."""
    if ":" in text:
        return LassoWord.of(text)
    return FiniteWord.of(text)
