"""Synthetic bilingual corpus generator with planted ground truth.

Source sentences are bags of random unit vectors with opaque word labels.
Each translation system reproduces the translated words by applying one
hidden orthogonal rotation (the language gap, shared by all systems) and
adding Gaussian noise of the system's magnitude; the lexicon maps every
translated word back to its source word, so the anchor bijection is known
exactly. Human ranks follow the inverse noise order: less noise, higher
rank. A fixed fraction of words is emitted as two WordPiece-style pieces
sharing the word vector, so downstream merging is exercised without
disturbing the geometry.

Realism extras: each source sentence carries a few words with no
translation, and each translation a few filler words unknown to the
lexicon with random vectors drawn per system. These distract full-
sequence matching but never anchor extraction, which is what separates
the anchors-only and all-tokens configurations on this data.

Noise magnitude is the expected norm of the perturbation vector (the
per-coordinate standard deviation is level / sqrt(dimension)).
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from anchorscore.corpus import (
    EmbeddedToken,
    TokenSequence,
    build_corpus,
    save_corpus,
)
from anchorscore.errors import ValidationError
from anchorscore.ranking import RANKINGS_HEADER

log = logging.getLogger(__name__)

# Fraction of a sentence's core word count emitted as source-only words /
# per-system filler words, and the probability of splitting a word into
# two pieces.
SOURCE_EXTRA_FRACTION = 0.25
FILLER_FRACTION = 0.4
SPLIT_PROBABILITY = 0.25


@dataclass(frozen=True)
class SyntheticSpec:
    sentence_count: int
    words_per_sentence: tuple[int, int]
    dimension: int
    systems_count: int
    noise_levels: tuple[float, ...]
    rotation_seed: int = 0
    rng_seed: int = 0

    def __post_init__(self):
        if min(self.sentence_count, self.dimension, self.systems_count) < 1:
            raise ValidationError("all counts must be positive")
        low, high = self.words_per_sentence
        if low < 1 or high < low:
            raise ValidationError(
                f"invalid words_per_sentence range ({low}, {high})"
            )
        if len(self.noise_levels) != self.systems_count:
            raise ValidationError(
                f"{len(self.noise_levels)} noise levels for "
                f"{self.systems_count} systems"
            )
        if any(b <= a for a, b in zip(self.noise_levels, self.noise_levels[1:])):
            raise ValidationError("noise_levels must be strictly increasing")
        if any(level < 0 or not np.isfinite(level) for level in self.noise_levels):
            raise ValidationError("noise_levels must be finite and non-negative")

    @property
    def system_ids(self) -> list[str]:
        return [f"sys{i}" for i in range(self.systems_count)]


@dataclass(frozen=True)
class SyntheticPaths:
    corpus_path: Path
    lexicon_path: Path
    rankings_path: Path


def hidden_rotation(spec: SyntheticSpec) -> np.ndarray:
    """The language-gap rotation, reproducible from rotation_seed alone."""
    rng = np.random.default_rng(spec.rotation_seed)
    q, r = np.linalg.qr(rng.normal(size=(spec.dimension, spec.dimension)))
    return q * np.sign(np.diag(r))


def _unit_rows(rng: np.random.Generator, count: int, dimension: int) -> np.ndarray:
    vectors = rng.normal(size=(count, dimension))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def _to_tokens(
    words: list[tuple[str, np.ndarray]], rng: np.random.Generator
) -> list[EmbeddedToken]:
    """Emit each word as one piece, or two pieces sharing its vector."""
    tokens = []
    for text, vector in words:
        if len(text) >= 2 and rng.random() < SPLIT_PROBABILITY:
            cut = len(text) // 2
            tokens.append(EmbeddedToken(text=text[:cut], vector=vector))
            tokens.append(EmbeddedToken(text="##" + text[cut:], vector=vector))
        else:
            tokens.append(EmbeddedToken(text=text, vector=vector))
    return tokens


def generate_synthetic(spec: SyntheticSpec, out_dir) -> SyntheticPaths:
    """Write corpus.jsonl, lexicon.tsv and rankings.csv under out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.rng_seed)
    rotation = hidden_rotation(spec)
    d = spec.dimension
    low, high = spec.words_per_sentence

    sequences: list[TokenSequence] = []
    lexicon_rows: list[tuple[str, str]] = []
    ranking_rows: list[tuple[str, str, int]] = []
    for i in range(spec.sentence_count):
        sentence_id = f"s{i:04d}"
        n_core = int(rng.integers(low, high + 1))
        n_extra = max(1, round(n_core * SOURCE_EXTRA_FRACTION))
        core_vectors = _unit_rows(rng, n_core, d)
        extra_vectors = _unit_rows(rng, n_extra, d)

        source_words = [(f"en{i}_{j}", core_vectors[j]) for j in range(n_core)]
        source_words += [(f"ex{i}_{j}", extra_vectors[j]) for j in range(n_extra)]
        order = rng.permutation(len(source_words))
        source_words = [source_words[k] for k in order]
        sequences.append(
            TokenSequence(
                sentence_id=sentence_id,
                lang="en",
                system_id="source",
                text=" ".join(text for text, _ in source_words),
                tokens=_to_tokens(source_words, rng),
            )
        )
        lexicon_rows += [(f"ru{i}_{j}", f"en{i}_{j}") for j in range(n_core)]

        rotated = core_vectors @ rotation.T
        n_fill = max(1, round(n_core * FILLER_FRACTION))
        for s, (system_id, level) in enumerate(zip(spec.system_ids, spec.noise_levels)):
            noisy = rotated + rng.normal(size=(n_core, d)) * (level / np.sqrt(d))
            words = [(f"ru{i}_{j}", noisy[j]) for j in range(n_core)]
            words += [
                (f"xx{i}_{s}_{m}", v)
                for m, v in enumerate(_unit_rows(rng, n_fill, d))
            ]
            order = rng.permutation(len(words))
            words = [words[k] for k in order]
            sequences.append(
                TokenSequence(
                    sentence_id=sentence_id,
                    lang="ru",
                    system_id=system_id,
                    text=" ".join(text for text, _ in words),
                    tokens=_to_tokens(words, rng),
                )
            )
            ranking_rows.append((sentence_id, system_id, spec.systems_count - s))

    corpus = build_corpus(d, sequences)
    paths = SyntheticPaths(
        corpus_path=out_dir / "corpus.jsonl",
        lexicon_path=out_dir / "lexicon.tsv",
        rankings_path=out_dir / "rankings.csv",
    )
    save_corpus(corpus, paths.corpus_path)
    with open(paths.lexicon_path, "w", encoding="utf-8") as handle:
        for key, value in lexicon_rows:
            handle.write(f"{key}\t{value}\n")
    with open(paths.rankings_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(RANKINGS_HEADER)
        writer.writerows(ranking_rows)
    log.info(
        "synthetic corpus: %d sentences, %d systems, dimension %d -> %s",
        spec.sentence_count,
        spec.systems_count,
        d,
        out_dir,
    )
    return paths
