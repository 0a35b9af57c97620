"""Extraction job description and input TSV parsing.

The input is UTF-8 TSV with a required header row:

    sentence_id	system_id	lang	text

One row per sequence to embed. The row with system_id "source" is the
sentence's original; every other system_id is a translation of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from embed_extract.errors import JobError

HEADER = ("sentence_id", "system_id", "lang", "text")
SOURCE_SYSTEM_ID = "source"


@dataclass(frozen=True)
class InputRow:
    sentence_id: str
    system_id: str
    lang: str
    text: str


@dataclass(frozen=True)
class ExtractionJob:
    """What to embed, with which models, and where to write it.

    Exactly one of `models` (language -> model identifier) or
    `multi_model` (one identifier for every language) must be set.
    `layer` indexes the encoder's hidden-state stack python-style:
    -1 is the last layer, 0 the embedding output.
    """

    input_path: Path
    output_path: Path
    models: Mapping[str, str] | None = None
    multi_model: str | None = None
    layer: int = -1
    batch_size: int = 16

    def __post_init__(self):
        if bool(self.models) == bool(self.multi_model):
            raise JobError(
                "exactly one of per-language models or a multilingual model "
                "must be configured"
            )
        if self.batch_size < 1:
            raise JobError(f"batch_size must be positive, got {self.batch_size}")

    def model_for(self, lang: str) -> str:
        if self.multi_model:
            return self.multi_model
        try:
            return self.models[lang]
        except KeyError:
            raise JobError(f"language {lang!r} has no configured model") from None


def read_rows(path) -> list[InputRow]:
    """Parse the input TSV.

    A completely blank file yields zero rows. Otherwise the first
    non-blank line must be the header. Duplicate (sentence_id,
    system_id) pairs and translations without a source row are
    rejected here, before any model work.
    """
    rows: list[InputRow] = []
    header_seen = False
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if not header_seen:
                if tuple(fields) != HEADER:
                    raise JobError(
                        f"line {line_number}: expected header "
                        f"{chr(9).join(HEADER)!r}, got {line!r}"
                    )
                header_seen = True
                continue
            if len(fields) != len(HEADER):
                raise JobError(
                    f"line {line_number}: expected {len(HEADER)} tab-separated "
                    f"fields, got {len(fields)}"
                )
            row = InputRow(*fields)
            if not row.sentence_id or not row.system_id or not row.lang:
                raise JobError(
                    f"line {line_number}: sentence_id, system_id and lang "
                    "must be non-empty"
                )
            rows.append(row)

    seen: set[tuple[str, str]] = set()
    sources: set[str] = set()
    for row in rows:
        key = (row.sentence_id, row.system_id)
        if key in seen:
            raise JobError(
                f"duplicate row for sentence_id {key[0]!r}, system_id {key[1]!r}"
            )
        seen.add(key)
        if row.system_id == SOURCE_SYSTEM_ID:
            sources.add(row.sentence_id)
    orphans = {r.sentence_id for r in rows if r.system_id != SOURCE_SYSTEM_ID}
    orphans -= sources
    if orphans:
        raise JobError(
            "translation rows without a source row for sentence_id(s): "
            + ", ".join(repr(s) for s in sorted(orphans))
        )
    return rows
