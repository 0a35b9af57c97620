"""Batch extraction: input rows -> line-JSON embedding corpus.

Records are written in input order regardless of how batches are formed.
A record is skipped (with a warning and a sidecar log entry) when the
sentence produces no usable pieces or exceeds the model's position
limit; skipping a source record cascades to its translations so the
output never contains an orphan.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from embed_extract.errors import JobError
from embed_extract.job import SOURCE_SYSTEM_ID, ExtractionJob, InputRow, read_rows
from embed_extract.models import LoadedModel, resolve_model

log = logging.getLogger(__name__)

UNK = "[UNK]"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class SkippedRecord:
    sentence_id: str
    system_id: str
    reason: str


@dataclass(frozen=True)
class ExtractionReport:
    output_path: Path
    written: int
    skipped: list[SkippedRecord]
    sidecar_path: Path | None
    models: dict[str, str]
    dimension: int


def _resolve_configured(job: ExtractionJob) -> dict[str, LoadedModel]:
    """Load every configured checkpoint, each identifier once.

    All configured models are resolved even when the input only uses
    some of them, so a broken configuration fails fast. They must agree
    on hidden size (one corpus carries one dimension) and support the
    requested layer.
    """
    identifiers = (
        [job.multi_model]
        if job.multi_model
        else list(dict.fromkeys(job.models.values()))
    )
    loaded = {identifier: resolve_model(identifier) for identifier in identifiers}
    dimensions = {m.dimension for m in loaded.values()}
    if len(dimensions) > 1:
        raise JobError(
            f"configured models disagree on hidden size: {sorted(dimensions)}; "
            "one corpus holds one dimension"
        )
    for model in loaded.values():
        depth = model.layer_count + 1  # embeddings plus encoder layers
        if not -depth <= job.layer < depth:
            raise JobError(
                f"layer {job.layer} out of range for model "
                f"{model.identifier!r} with {model.layer_count} layers"
            )
    return loaded


def _plan_skips(
    rows: list[InputRow],
    pieces: list[list[str]],
    limits: list[int],
) -> dict[int, str]:
    """Decide which row indexes are skipped, and why."""
    reasons: dict[int, str] = {}
    for i, row in enumerate(rows):
        if not pieces[i]:
            reasons[i] = "text produced no pieces"
        elif len(pieces[i]) > limits[i]:
            reasons[i] = f"too long: {len(pieces[i])} pieces, model limit {limits[i]}"
        elif all(p == UNK for p in pieces[i]):
            reasons[i] = "every piece is [UNK]"
    dropped_sources = {
        rows[i].sentence_id
        for i in reasons
        if rows[i].system_id == SOURCE_SYSTEM_ID
    }
    for i, row in enumerate(rows):
        if (
            i not in reasons
            and row.system_id != SOURCE_SYSTEM_ID
            and row.sentence_id in dropped_sources
        ):
            reasons[i] = "source record was skipped"
    return reasons


def _embed_batch(model: LoadedModel, texts: list[str], layer: int) -> list:
    """Hidden states for each text, specials stripped, as float lists."""
    import torch

    encoded = model.tokenizer(
        texts, padding=True, truncation=False, return_tensors="pt"
    )
    with torch.no_grad():
        output = model.model(**encoded, output_hidden_states=True)
    states = output.hidden_states[layer]
    lengths = encoded["attention_mask"].sum(dim=1).tolist()
    vectors = []
    for i, n in enumerate(lengths):
        # Positions 0 and n-1 hold [CLS] and [SEP]; the pieces sit between.
        vectors.append(states[i, 1 : n - 1].tolist())
    return vectors


def extract(job: ExtractionJob) -> ExtractionReport:
    rows = read_rows(job.input_path)
    configured = _resolve_configured(job)
    dimension = next(iter(configured.values())).dimension
    row_models = [configured[job.model_for(row.lang)] for row in rows]

    pieces = [
        model.tokenizer.tokenize(row.text)
        for row, model in zip(rows, row_models)
    ]
    skip_reasons = _plan_skips(rows, pieces, [m.max_pieces for m in row_models])
    for i, reason in sorted(skip_reasons.items()):
        log.warning(
            "skipping sentence_id %r (system %r): %s",
            rows[i].sentence_id,
            rows[i].system_id,
            reason,
        )

    # Batch per checkpoint, in input order, then reassemble by row index.
    vectors: dict[int, list] = {}
    for identifier, model in configured.items():
        indexes = [
            i
            for i in range(len(rows))
            if row_models[i] is model and i not in skip_reasons
        ]
        for start in range(0, len(indexes), job.batch_size):
            chunk = indexes[start : start + job.batch_size]
            embedded = _embed_batch(model, [rows[i].text for i in chunk], job.layer)
            for i, vecs in zip(chunk, embedded):
                if len(vecs) != len(pieces[i]):
                    raise RuntimeError(
                        f"piece/state count mismatch for sentence_id "
                        f"{rows[i].sentence_id!r}: {len(pieces[i])} pieces, "
                        f"{len(vecs)} states"
                    )
                vectors[i] = vecs

    if job.multi_model:
        model_ids = {"*": configured[job.multi_model].resolved_id}
    else:
        model_ids = {
            lang: configured[identifier].resolved_id
            for lang, identifier in sorted(job.models.items())
        }

    header = {
        "dimension": dimension,
        "format_version": FORMAT_VERSION,
        "models": model_ids,
        "layer": job.layer,
    }
    written = 0
    with open(job.output_path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(header, ensure_ascii=False) + "\n")
        for i, row in enumerate(rows):
            if i in skip_reasons:
                continue
            record = {
                "sentence_id": row.sentence_id,
                "lang": row.lang,
                "system_id": row.system_id,
                "text": row.text,
                "tokens": [
                    {"text": text, "vector": vector}
                    for text, vector in zip(pieces[i], vectors[i])
                ],
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            written += 1

    skipped = [
        SkippedRecord(rows[i].sentence_id, rows[i].system_id, reason)
        for i, reason in sorted(skip_reasons.items())
    ]
    sidecar_path = None
    if skipped:
        sidecar_path = job.output_path.with_name(job.output_path.name + ".skipped")
        with open(sidecar_path, "w", encoding="utf-8") as handle:
            for rec in skipped:
                handle.write(f"{rec.sentence_id}\t{rec.system_id}\t{rec.reason}\n")

    return ExtractionReport(
        output_path=job.output_path,
        written=written,
        skipped=skipped,
        sidecar_path=sidecar_path,
        models=model_ids,
        dimension=dimension,
    )
