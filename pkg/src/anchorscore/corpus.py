"""Line-JSON embedding corpus: schema, validation, load and aligned export.

File layout, one JSON object per line:

    {"dimension": 768, "format_version": 1}
    {"sentence_id": "s1", "lang": "en", "system_id": "source",
     "text": "...", "tokens": [{"text": "Suddenly", "vector": [...]}, ...]}
    {"sentence_id": "s1", "lang": "ru", "system_id": "google", ...}

The header line comes first and fixes the vector dimension for every
record. Unknown keys in the header or in records are ignored, so
producers may attach provenance. The record with system_id "source" is
the sentence's original; all other system_ids are translation variants.

Embeddings are stored unnormalized; cosine normalization happens at
scoring time only. "[UNK]" tokens are dropped here, at load, with a
warning: their vectors carry no surface form usable for anchor matching.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

import numpy as np

from anchorscore.errors import (
    DimensionMismatchError,
    ParseError,
    ValidationError,
)

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
SOURCE_SYSTEM_ID = "source"

# Markers that must never survive into a TokenSequence. [UNK] is dropped
# with a warning; the bracketing specials indicate a broken extraction.
UNK_MARKER = "[UNK]"
FORBIDDEN_MARKERS = ("[CLS]", "[SEP]")


@dataclass(frozen=True)
class EmbeddedToken:
    """One subword piece and its contextual vector (continuations keep '##')."""

    text: str
    vector: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, EmbeddedToken):
            return NotImplemented
        return self.text == other.text and np.array_equal(self.vector, other.vector)


@dataclass(frozen=True)
class TokenSequence:
    """An embedded sentence from one system ('source' or a translation engine)."""

    sentence_id: str
    lang: str
    system_id: str
    text: str
    tokens: list[EmbeddedToken]

    @property
    def dimension(self) -> int:
        return int(self.tokens[0].vector.shape[0])


@dataclass(frozen=True)
class Sample:
    """One sentence: its source sequence plus all translation variants."""

    source: TokenSequence
    translations: list[TokenSequence]


@dataclass(frozen=True)
class Corpus:
    """Validated, immutable collection of samples sharing one dimension."""

    dimension: int
    samples: dict[str, Sample] = field(default_factory=dict)

    def sequences(self) -> Iterator[TokenSequence]:
        for sample in self.samples.values():
            yield sample.source
            yield from sample.translations


def _validate_token(raw, line_number: int, dimension: int, sentence_id: str):
    if not isinstance(raw, dict):
        raise ParseError("token entry is not an object", line_number)
    text = raw.get("text")
    vector = raw.get("vector")
    if not isinstance(text, str) or not text:
        raise ParseError("token text must be a non-empty string", line_number)
    if not isinstance(vector, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in vector
    ):
        raise ParseError("token vector must be a list of numbers", line_number)
    if len(vector) != dimension:
        raise ValidationError(
            f"dimension mismatch in sentence_id {sentence_id!r}: token {text!r} "
            f"has length {len(vector)}, corpus header declares {dimension}"
        )
    if not all(math.isfinite(v) for v in vector):
        raise ValidationError(
            f"non-finite vector entry for token {text!r} in sentence_id {sentence_id!r}"
        )
    return EmbeddedToken(text=text, vector=np.asarray(vector, dtype=np.float64))


def _parse_record(raw, line_number: int, dimension: int) -> TokenSequence:
    if not isinstance(raw, dict):
        raise ParseError("record is not a JSON object", line_number)
    for key, kind in (
        ("sentence_id", str),
        ("lang", str),
        ("system_id", str),
        ("text", str),
    ):
        if not isinstance(raw.get(key), kind):
            raise ParseError(f"missing or non-string field {key!r}", line_number)
    sentence_id = raw["sentence_id"]
    if not sentence_id or not raw["system_id"]:
        raise ParseError("sentence_id and system_id must be non-empty", line_number)
    raw_tokens = raw.get("tokens")
    if not isinstance(raw_tokens, list) or not raw_tokens:
        raise ParseError("tokens must be a non-empty list", line_number)

    tokens = []
    for raw_token in raw_tokens:
        token = _validate_token(raw_token, line_number, dimension, sentence_id)
        if token.text == UNK_MARKER:
            log.warning(
                "dropping [UNK] token in sentence_id %r (system %r)",
                sentence_id,
                raw["system_id"],
            )
            continue
        if token.text in FORBIDDEN_MARKERS:
            raise ValidationError(
                f"special marker {token.text!r} present in sentence_id "
                f"{sentence_id!r}; it should have been stripped at extraction"
            )
        tokens.append(token)
    if not tokens:
        raise ValidationError(
            f"sentence_id {sentence_id!r} (system {raw['system_id']!r}) has no "
            "tokens left after dropping [UNK]"
        )
    return TokenSequence(
        sentence_id=sentence_id,
        lang=raw["lang"],
        system_id=raw["system_id"],
        text=raw["text"],
        tokens=tokens,
    )


def _parse_header(line: str) -> int:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in header: {exc}", 1) from exc
    if not isinstance(raw, dict) or "dimension" not in raw:
        raise ParseError("first line must be a header object with 'dimension'", 1)
    dimension = raw["dimension"]
    if not isinstance(dimension, int) or isinstance(dimension, bool) or dimension <= 0:
        raise ParseError("header dimension must be a positive integer", 1)
    if raw.get("format_version") != FORMAT_VERSION:
        raise ParseError(
            f"unsupported format_version {raw.get('format_version')!r}, "
            f"expected {FORMAT_VERSION}",
            1,
        )
    return dimension


def load_corpus(path) -> Corpus:
    """Load and validate a line-JSON embedding corpus.

    Raises ParseError (with line number) for malformed lines, and
    ValidationError for schema-level violations: dimension mismatches,
    duplicate (sentence_id, system_id) pairs, translations without a
    source record, or leftover special markers.
    """
    sequences: list[TokenSequence] = []
    dimension = None
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                if line_number == 1:
                    raise ParseError("missing corpus header", 1)
                raise ParseError("blank line inside corpus", line_number)
            if dimension is None:
                dimension = _parse_header(line)
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc}", line_number) from exc
            sequences.append(_parse_record(raw, line_number, dimension))
    if dimension is None:
        raise ParseError("missing corpus header", 1)
    return build_corpus(dimension, sequences)


def build_corpus(dimension: int, sequences: list[TokenSequence]) -> Corpus:
    """Group validated sequences into samples, enforcing corpus invariants."""
    seen: set[tuple[str, str]] = set()
    sources: dict[str, TokenSequence] = {}
    translations: dict[str, list[TokenSequence]] = {}
    for seq in sequences:
        key = (seq.sentence_id, seq.system_id)
        if key in seen:
            raise ValidationError(
                f"duplicate record for sentence_id {key[0]!r}, system_id {key[1]!r}"
            )
        seen.add(key)
        for token in seq.tokens:
            if token.vector.shape != (dimension,):
                raise ValidationError(
                    f"dimension mismatch in sentence_id {seq.sentence_id!r}: "
                    f"token {token.text!r} has length {token.vector.shape[0]}, "
                    f"corpus dimension is {dimension}"
                )
        if seq.system_id == SOURCE_SYSTEM_ID:
            sources[seq.sentence_id] = seq
        else:
            translations.setdefault(seq.sentence_id, []).append(seq)

    orphans = set(translations) - set(sources)
    if orphans:
        raise ValidationError(
            "translations without a source record for sentence_id(s): "
            + ", ".join(repr(s) for s in sorted(orphans))
        )
    samples = {
        sid: Sample(source=src, translations=translations.get(sid, []))
        for sid, src in sources.items()
    }
    return Corpus(dimension=dimension, samples=samples)


def _record_dict(seq: TokenSequence) -> dict:
    return {
        "sentence_id": seq.sentence_id,
        "lang": seq.lang,
        "system_id": seq.system_id,
        "text": seq.text,
        "tokens": [
            {"text": t.text, "vector": [float(v) for v in t.vector]}
            for t in seq.tokens
        ],
    }


def save_corpus(corpus: Corpus, path) -> None:
    """Write a corpus back to the line-JSON schema, source record first per sample.

    Floats are serialized with Python's shortest round-trip repr, which
    preserves every significant digit of the double.
    """
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(
            json.dumps({"dimension": corpus.dimension, "format_version": FORMAT_VERSION})
            + "\n"
        )
        for sample in corpus.samples.values():
            handle.write(json.dumps(_record_dict(sample.source), ensure_ascii=False) + "\n")
            for seq in sample.translations:
                handle.write(json.dumps(_record_dict(seq), ensure_ascii=False) + "\n")


MapLike = Union["OrthogonalMap", Mapping[str, "OrthogonalMap"]]


def export_aligned(corpus: Corpus, mapping: MapLike, path) -> None:
    """Write the corpus with every non-source vector passed through the map.

    Source vectors are untouched. `mapping` is either one fitted map for
    the whole corpus or a dict keyed by sentence_id (per-sentence fits);
    the dict must cover every sentence in the corpus.
    """
    per_sentence = isinstance(mapping, Mapping)
    if per_sentence:
        missing = set(corpus.samples) - set(mapping)
        if missing:
            raise ValidationError(
                "no map provided for sentence_id(s): "
                + ", ".join(repr(s) for s in sorted(missing))
            )
        for sid, m in mapping.items():
            if m.dimension != corpus.dimension:
                raise DimensionMismatchError(
                    f"map for sentence_id {sid!r} has dimension {m.dimension}, "
                    f"corpus has {corpus.dimension}"
                )
    elif mapping.dimension != corpus.dimension:
        raise DimensionMismatchError(
            f"map dimension {mapping.dimension} does not match corpus "
            f"dimension {corpus.dimension}"
        )

    aligned_samples: dict[str, Sample] = {}
    for sid, sample in corpus.samples.items():
        omega = (mapping[sid] if per_sentence else mapping).omega
        aligned = [
            TokenSequence(
                sentence_id=seq.sentence_id,
                lang=seq.lang,
                system_id=seq.system_id,
                text=seq.text,
                tokens=[
                    EmbeddedToken(text=t.text, vector=omega @ t.vector)
                    for t in seq.tokens
                ],
            )
            for seq in sample.translations
        ]
        aligned_samples[sid] = Sample(source=sample.source, translations=aligned)
    save_corpus(Corpus(dimension=corpus.dimension, samples=aligned_samples), path)
