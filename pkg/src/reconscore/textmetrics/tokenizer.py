"""Shared caption tokenizer used by every reference-based metric."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

# Word runs: letters and digits, underscore treated as punctuation.
_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class TokenSequence:
    """Lowercased word tokens plus the text they came from."""

    tokens: tuple[str, ...]
    source_text: str = ""

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def tokenize(text: str) -> TokenSequence:
    """Lowercase, split on whitespace/punctuation, drop punctuation tokens.

    Digits survive as tokens. Empty input yields an empty sequence.
    Deterministic: the token list is a pure function of ``text``.
    """
    tokens = tuple(_WORD_RE.findall(text.lower()))
    return TokenSequence(tokens=tokens, source_text=text)
