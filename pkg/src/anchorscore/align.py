"""Anchor pair extraction and orthogonal alignment of the two embedding spaces.

Anchors are (source word, translation word) occurrences whose texts match
exactly, after NFC + lowercase, through a bilingual lexicon keyed by
translation-side words. The pooled anchor vectors define an orthogonal
Procrustes problem: find orthogonal omega minimizing ||omega A - B||_F,
where the columns of A are translation-side vectors and the columns of B
the matching source-side vectors. The exact minimizer is U V^T from the
SVD of B A^T. Orthogonality keeps within-language angles intact, so the
map can be applied to every translation word, anchor or not.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from anchorscore.errors import (
    DimensionMismatchError,
    InsufficientAnchorsError,
    NumericInputError,
    ParseError,
    ValidationError,
)
from anchorscore.merge import WordSequence, WordUnit
from anchorscore.textnorm import casefold_text

log = logging.getLogger(__name__)

DEFAULT_MIN_ANCHORS = 3

# Frobenius tolerance for ||omega^T omega - I||, scaled by dimension.
ORTHOGONALITY_TOL = 1e-8


@dataclass(frozen=True)
class Lexicon:
    """Translation-side word -> ordered source-language alternatives.

    Keys and values are stored casefolded when `casefolded` is set (the
    default); lookup casefolds the query the same way, so matching is
    exact-match after normalization.
    """

    entries: dict[str, list[str]] = field(default_factory=dict)
    casefolded: bool = True

    def _key(self, word: str) -> str:
        return casefold_text(word) if self.casefolded else word

    def translations_of(self, word: str) -> list[str]:
        return self.entries.get(self._key(word), [])

    def __len__(self) -> int:
        return len(self.entries)


def load_lexicon(path, casefold: bool = True) -> Lexicon:
    """Read a UTF-8 TSV of `translation_side_word<TAB>source_word` pairs.

    Repeated keys accumulate as ordered alternatives. Rows must have
    exactly two non-empty columns; blank lines are skipped.
    """
    entries: dict[str, list[str]] = {}
    normalize = casefold_text if casefold else (lambda s: s)
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            columns = line.split("\t")
            if len(columns) != 2 or not columns[0].strip() or not columns[1].strip():
                raise ParseError(
                    "expected exactly two tab-separated non-empty columns",
                    line_number,
                )
            key, value = normalize(columns[0].strip()), normalize(columns[1].strip())
            entries.setdefault(key, []).append(value)
    return Lexicon(entries=entries, casefolded=casefold)


@dataclass(frozen=True)
class AnchorPair:
    """Matched word occurrences; source_word feeds B, target_word feeds A."""

    source_word: WordUnit
    target_word: WordUnit
    sentence_id: str


@dataclass(frozen=True)
class OrthogonalMap:
    """A fitted d x d orthogonal matrix taking translation vectors to source space."""

    omega: np.ndarray
    dimension: int
    anchor_count: int
    residual: float

    def __post_init__(self):
        if self.omega.shape != (self.dimension, self.dimension):
            raise DimensionMismatchError(
                f"omega has shape {self.omega.shape}, expected "
                f"({self.dimension}, {self.dimension})"
            )
        deviation = np.linalg.norm(self.omega.T @ self.omega - np.eye(self.dimension))
        if deviation > ORTHOGONALITY_TOL * self.dimension:
            raise NumericInputError(
                f"map is not orthogonal: ||omega^T omega - I||_F = {deviation:.3e}"
            )

    @classmethod
    def identity(cls, dimension: int) -> OrthogonalMap:
        return cls(
            omega=np.eye(dimension),
            dimension=dimension,
            anchor_count=0,
            residual=0.0,
        )


def extract_anchors(
    source: WordSequence,
    translation: WordSequence,
    lexicon: Lexicon,
) -> list[AnchorPair]:
    """Pair translation words with source words by exact lexicon match.

    Translation words are scanned left to right; each one pairs with the
    earliest source occurrence, not yet taken, whose casefolded text
    equals one of the word's lexicon alternatives. Repeated words thus
    pair in order of occurrence, and every word occurrence participates
    in at most one pair. Zero pairs is a legal result.
    """
    source_keys = [casefold_text(w.text) for w in source.words]
    taken = [False] * len(source.words)
    pairs: list[AnchorPair] = []
    for target_word in translation.words:
        alternatives = set(lexicon.translations_of(target_word.text))
        if not alternatives:
            continue
        for i, key in enumerate(source_keys):
            if not taken[i] and key in alternatives:
                taken[i] = True
                pairs.append(
                    AnchorPair(
                        source_word=source.words[i],
                        target_word=target_word,
                        sentence_id=source.sentence_id,
                    )
                )
                break
    return pairs


def fit_procrustes(
    pairs: list[AnchorPair],
    dimension: int,
    min_anchors: int = DEFAULT_MIN_ANCHORS,
) -> OrthogonalMap:
    """Solve the orthogonal Procrustes problem over the pooled anchor pairs.

    Builds A from target (translation-side) vectors and B from source
    vectors, column per pair, and returns omega = U V^T from the SVD of
    B A^T, the exact Frobenius-norm minimizer over orthogonal matrices.
    No determinant correction is applied, so reflections are allowed.
    """
    if len(pairs) < min_anchors:
        raise InsufficientAnchorsError(
            f"{len(pairs)} anchor pair(s) found, need at least {min_anchors}"
        )
    for pair in pairs:
        for word in (pair.source_word, pair.target_word):
            if word.vector.shape != (dimension,):
                raise DimensionMismatchError(
                    f"anchor word {word.text!r} in sentence_id "
                    f"{pair.sentence_id!r} has dimension {word.vector.shape[0]}, "
                    f"expected {dimension}"
                )
    a_cols = np.column_stack([p.target_word.vector for p in pairs])
    b_cols = np.column_stack([p.source_word.vector for p in pairs])
    if not (np.isfinite(a_cols).all() and np.isfinite(b_cols).all()):
        raise NumericInputError("anchor vectors contain non-finite entries")
    u, _, vt = np.linalg.svd(b_cols @ a_cols.T)
    omega = u @ vt
    residual = float(np.linalg.norm(omega @ a_cols - b_cols))
    return OrthogonalMap(
        omega=omega,
        dimension=dimension,
        anchor_count=len(pairs),
        residual=residual,
    )


def apply_map(mapping: OrthogonalMap, seq: WordSequence) -> WordSequence:
    """Return `seq` with every word vector replaced by omega @ vector.

    Texts, order, and piece spans are untouched; pairwise angles are
    preserved because the map is orthogonal.
    """
    if seq.dimension != mapping.dimension:
        raise DimensionMismatchError(
            f"sequence dimension {seq.dimension} does not match map "
            f"dimension {mapping.dimension}"
        )
    words = [
        WordUnit(text=w.text, vector=mapping.omega @ w.vector, piece_span=w.piece_span)
        for w in seq.words
    ]
    return WordSequence(
        sentence_id=seq.sentence_id,
        lang=seq.lang,
        system_id=seq.system_id,
        text=seq.text,
        words=words,
    )
