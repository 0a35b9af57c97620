"""Greedy-matching Precision / Recall / F1 over word vectors.

Every candidate word is matched to its maximum-cosine reference word and
vice versa:

    Recall    = sum_r w(r) * max_c cos(r, c) / sum_r w(r)
    Precision = sum_c w(c) * max_r cos(c, r) / sum_c w(c)
    F1        = 2 P R / (P + R)   (0 when P + R <= 0)

Unweighted scoring uses w = 1. With idf weighting on, the reference-side
table weights Recall and the candidate-side table weights Precision.
Cosines are computed on normalized copies; stored vectors stay
unnormalized, and rescaling any word by a positive factor cannot change
a score. In the cross-lingual setting the source sentence plays the
reference and the mapped translation the candidate (swappable by flag).

All functions here are pure; sentence pairs can be scored in parallel
with no shared state.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from anchorscore.align import AnchorPair, OrthogonalMap, apply_map
from anchorscore.corpus import SOURCE_SYSTEM_ID, Corpus
from anchorscore.errors import DimensionMismatchError, EmptyInputError
from anchorscore.merge import WordSequence, merge_wordpieces
from anchorscore.textnorm import casefold_text

log = logging.getLogger(__name__)


class ScoreMode(enum.Enum):
    ALL_TOKENS = "all"
    ANCHORS_ONLY = "anchors"


class CorpusSide(enum.Enum):
    """Which corpus side a table is computed over, named by its default role."""

    REFERENCE = "reference"  # source sentences
    CANDIDATE = "candidate"  # translation sentences


@dataclass(frozen=True)
class ScoreTriple:
    precision: float
    recall: float
    f1: float
    mode: ScoreMode
    candidate_id: str
    reference_id: str


@dataclass(frozen=True)
class IdfTable:
    """Word text -> non-negative weight; unseen words get default_weight."""

    weights: dict[str, float] = field(default_factory=dict)
    default_weight: float = 1.0

    def weight_of(self, word_text: str) -> float:
        return self.weights.get(casefold_text(word_text), self.default_weight)


def _f1(precision: float, recall: float) -> float:
    if precision + recall > 0:
        return 2.0 * precision * recall / (precision + recall)
    return 0.0


def _cosine_matrix(cand: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Pairwise cosines, rows = candidate words, columns = reference words.

    Zero vectors contribute cosine 0 by convention (with a warning), and
    bitwise-equal nonzero vectors score exactly 1.0 so that self-scores
    are exact.
    """
    cand_norms = np.linalg.norm(cand, axis=1)
    ref_norms = np.linalg.norm(ref, axis=1)
    if not (cand_norms.all() and ref_norms.all()):
        log.warning("zero-vector word encountered; it contributes cosine 0")
    cand_unit = np.divide(
        cand, cand_norms[:, None], out=np.zeros_like(cand), where=cand_norms[:, None] > 0
    )
    ref_unit = np.divide(
        ref, ref_norms[:, None], out=np.zeros_like(ref), where=ref_norms[:, None] > 0
    )
    matrix = np.clip(cand_unit @ ref_unit.T, -1.0, 1.0)
    equal = (cand[:, None, :] == ref[None, :, :]).all(axis=2)
    equal &= (cand_norms > 0)[:, None] & (ref_norms > 0)[None, :]
    matrix[equal] = 1.0
    return matrix


def _weighted_mean(values: np.ndarray, weights: np.ndarray | None) -> float:
    if weights is None:
        return float(np.mean(values))
    total = float(np.sum(weights))
    if total <= 0.0:
        # Every word can legitimately carry idf 0; fall back to the
        # unweighted mean rather than produce 0/0.
        log.warning("idf weights sum to zero; falling back to unweighted mean")
        return float(np.mean(values))
    return float(np.sum(weights * values) / total)


def greedy_match_score(
    candidate: WordSequence,
    reference: WordSequence,
    weights: IdfTable | None = None,
    *,
    candidate_weights: IdfTable | None = None,
    mode: ScoreMode = ScoreMode.ALL_TOKENS,
) -> ScoreTriple:
    """Score one candidate sequence against one reference sequence.

    `weights` weights the reference side (Recall); the candidate side
    (Precision) uses `candidate_weights` when given, otherwise the same
    table. The candidate must already live in the reference space when
    the pair is cross-lingual.
    """
    if not candidate.words or not reference.words:
        raise EmptyInputError("cannot score an empty word sequence")
    if candidate.dimension != reference.dimension:
        raise DimensionMismatchError(
            f"candidate dimension {candidate.dimension} does not match "
            f"reference dimension {reference.dimension}"
        )
    cand = np.stack([w.vector for w in candidate.words])
    ref = np.stack([w.vector for w in reference.words])
    matrix = _cosine_matrix(cand, ref)

    ref_table = weights
    cand_table = candidate_weights if candidate_weights is not None else weights
    ref_weights = (
        np.array([ref_table.weight_of(w.text) for w in reference.words])
        if ref_table is not None
        else None
    )
    cand_weights = (
        np.array([cand_table.weight_of(w.text) for w in candidate.words])
        if cand_table is not None
        else None
    )
    recall = _weighted_mean(matrix.max(axis=0), ref_weights)
    precision = _weighted_mean(matrix.max(axis=1), cand_weights)
    return ScoreTriple(
        precision=precision,
        recall=recall,
        f1=_f1(precision, recall),
        mode=mode,
        candidate_id=candidate.system_id,
        reference_id=reference.system_id,
    )


def _restrict_to_anchors(
    source: WordSequence,
    translation: WordSequence,
    anchors: list[AnchorPair],
) -> tuple[WordSequence, WordSequence]:
    """Keep only the word occurrences participating in anchor pairs.

    Duplicate anchor words stay separate entries: each occurrence carries
    its own contextual vector. Selection is by piece_span, so it survives
    apply_map (which preserves spans but replaces vectors).
    """
    source_spans = {p.source_word.piece_span for p in anchors}
    target_spans = {p.target_word.piece_span for p in anchors}

    def restrict(seq: WordSequence, spans) -> WordSequence:
        return WordSequence(
            sentence_id=seq.sentence_id,
            lang=seq.lang,
            system_id=seq.system_id,
            text=seq.text,
            words=[w for w in seq.words if w.piece_span in spans],
        )

    return restrict(source, source_spans), restrict(translation, target_spans)


def score_pair(
    source: WordSequence,
    translation: WordSequence,
    mapping: OrthogonalMap | None,
    mode: ScoreMode,
    anchors: list[AnchorPair] | None = None,
    weights: IdfTable | None = None,
    *,
    candidate_weights: IdfTable | None = None,
    swap_roles: bool = False,
) -> ScoreTriple | None:
    """Score one translation against its source sentence.

    The map (identity when None) is applied to the translation-side
    vectors first. ALL_TOKENS scores the full sequences; ANCHORS_ONLY
    restricts both sides to the anchor-pair occurrences for this
    (sentence, translation) and returns None when that list is empty,
    the explicit no-anchors outcome: callers exclude the sample and
    report the count.

    By default the source is the reference and the translation the
    candidate; `swap_roles` flips the orientation (the map still applies
    to the translation side).
    """
    if mapping is not None:
        translation = apply_map(mapping, translation)
    if mode is ScoreMode.ANCHORS_ONLY:
        if not anchors:
            log.warning(
                "no anchors for sentence_id %r, system %r; pair not scored",
                translation.sentence_id,
                translation.system_id,
            )
            return None
        source, translation = _restrict_to_anchors(source, translation, anchors)
    candidate, reference = translation, source
    if swap_roles:
        candidate, reference = reference, candidate
    return greedy_match_score(
        candidate,
        reference,
        weights,
        candidate_weights=candidate_weights,
        mode=mode,
    )


def idf_weights(corpus: Corpus, side: CorpusSide) -> IdfTable:
    """Inverse document frequencies over one side of the corpus.

    weight(w) = ln((N + 1) / (df(w) + 1)), with N the number of sentences
    on the chosen side and df(w) how many of them contain the casefolded
    merged word w; out-of-vocabulary words default to ln(N + 1).
    """
    document_count = 0
    frequencies: dict[str, int] = {}
    for sample in corpus.samples.values():
        if side is CorpusSide.REFERENCE:
            sequences = [sample.source]
        else:
            sequences = sample.translations
        for seq in sequences:
            document_count += 1
            for text in {casefold_text(w.text) for w in merge_wordpieces(seq).words}:
                frequencies[text] = frequencies.get(text, 0) + 1
    weights = {
        text: math.log((document_count + 1) / (df + 1))
        for text, df in frequencies.items()
    }
    return IdfTable(weights=weights, default_weight=math.log(document_count + 1))
