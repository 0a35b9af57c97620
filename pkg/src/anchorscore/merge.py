"""Merge WordPiece continuations into whole words with mean-pooled vectors.

A run [head, cont_1 .. cont_k], where the continuations carry the "##"
prefix, becomes a single word whose text is the marker-stripped
concatenation and whose vector is the plain arithmetic mean of the k+1
piece vectors. Tokens outside runs map through unchanged, so punctuation
stays standalone. No lemmatization, casing changes, or detokenization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from anchorscore.corpus import TokenSequence

log = logging.getLogger(__name__)

CONTINUATION_MARKER = "##"


@dataclass(frozen=True)
class WordUnit:
    """A merged word; piece_span is the half-open [start, end) token range."""

    text: str
    vector: np.ndarray
    piece_span: tuple[int, int]


@dataclass(frozen=True)
class WordSequence:
    sentence_id: str
    lang: str
    system_id: str
    text: str
    words: list[WordUnit]

    @property
    def dimension(self) -> int:
        return int(self.words[0].vector.shape[0])


def is_continuation(token_text: str, marker: str = CONTINUATION_MARKER) -> bool:
    """True iff the token text begins with the continuation marker."""
    return token_text.startswith(marker)


def merge_wordpieces(seq: TokenSequence, marker: str = CONTINUATION_MARKER) -> WordSequence:
    """Collapse maximal continuation runs of `seq` into WordUnits.

    A sequence that opens with a continuation token has no head to attach
    to; the orphan run still becomes one word (stripped concatenation of
    the pieces) and a warning is logged.
    """
    words: list[WordUnit] = []
    starts = [
        i
        for i, token in enumerate(seq.tokens)
        if i == 0 or not is_continuation(token.text, marker)
    ]
    if is_continuation(seq.tokens[0].text, marker):
        log.warning(
            "sequence %r/%r starts with continuation token %r; merging the "
            "orphan run without a head",
            seq.sentence_id,
            seq.system_id,
            seq.tokens[0].text,
        )
    for start, end in zip(starts, starts[1:] + [len(seq.tokens)]):
        pieces = seq.tokens[start:end]
        text = "".join(
            p.text[len(marker):] if is_continuation(p.text, marker) else p.text
            for p in pieces
        )
        vector = np.mean([p.vector for p in pieces], axis=0)
        words.append(WordUnit(text=text, vector=vector, piece_span=(start, end)))
    return WordSequence(
        sentence_id=seq.sentence_id,
        lang=seq.lang,
        system_id=seq.system_id,
        text=seq.text,
        words=words,
    )
