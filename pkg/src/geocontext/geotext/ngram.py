"""Overlapping word n-gram tokenization."""

from __future__ import annotations

from ..errors import InvalidN
from .tokens import Token, split_words


def ngram_tokenize(text: str, n: int) -> list[Token]:
    """Group whitespace-split words into overlapping windows of n words.

    Returns max(0, W - n + 1) tokens for W words; token text is the exact
    source substring from the first to the last word of the window.
    """
    if n < 1:
        raise InvalidN(f"n must be >= 1, got {n}")
    words = split_words(text)
    tokens = []
    for i in range(len(words) - n + 1):
        first, last = words[i], words[i + n - 1]
        tokens.append(
            Token(
                text=text[first.char_start : last.char_end],
                kind="plain",
                span=(first.byte_start, last.byte_end),
            )
        )
    return tokens
