"""End-to-end run: load, merge, anchor, fit, score, evaluate, write artifacts.

A run is described by one declarative PipelineConfig (JSON file plus flag
overrides in the CLI). Outputs land in output_dir:

    scores.jsonl   one line per scored (sentence_id, system_id)
    aligned.jsonl  the corpus with translation vectors mapped (identity
                   when alignment is off), for external plotting
    map.json       the fitted orthogonal map(s), when alignment is on
    report.json    CorrelationReport fields
    report.txt     rendered one-row table

Stages run sequentially and deterministically; re-running an identical
config reproduces the artifacts byte for byte. Each intermediate file can
be fed back through the matching CLI subcommand to resume the pipeline
with identical results.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from anchorscore.align import (
    AnchorPair,
    Lexicon,
    OrthogonalMap,
    extract_anchors,
    fit_procrustes,
    load_lexicon,
)
from anchorscore.corpus import Corpus, export_aligned, load_corpus
from anchorscore.errors import AnchorScoreError, ValidationError
from anchorscore.merge import WordSequence, merge_wordpieces
from anchorscore.ranking import (
    CorrelationReport,
    RankedSample,
    evaluate,
    load_rankings,
    render_table,
)
from anchorscore.scoring import (
    CorpusSide,
    IdfTable,
    ScoreMode,
    ScoreTriple,
    idf_weights,
    score_pair,
)

log = logging.getLogger(__name__)

DEFAULT_MIN_ANCHORS = 3

MODE_PHRASE = {ScoreMode.ALL_TOKENS: "all tokens", ScoreMode.ANCHORS_ONLY: "anchors only"}


@dataclass(frozen=True)
class PipelineConfig:
    corpus_path: Path
    rankings_path: Path
    output_dir: Path
    lexicon_path: Path | None = None
    mode: ScoreMode = ScoreMode.ALL_TOKENS
    embedding_label: str | None = None
    alignment_enabled: bool = False
    min_anchors: int = DEFAULT_MIN_ANCHORS
    per_sentence: bool = False
    idf: bool = False
    swap_roles: bool = False

    @property
    def config_label(self) -> str:
        label = self.embedding_label or (
            "aligned" if self.alignment_enabled else "unaligned"
        )
        return f"{label} ({MODE_PHRASE[self.mode]})"

    @property
    def needs_anchors(self) -> bool:
        return self.alignment_enabled or self.mode is ScoreMode.ANCHORS_ONLY

    @classmethod
    def from_file(cls, path) -> PipelineConfig:
        """Read a JSON config; relative paths resolve against the file's directory."""
        path = Path(path)
        with open(path, encoding="utf-8") as handle:
            try:
                raw = json.load(handle)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"config {path}: invalid JSON: {exc}") from exc
        base = path.parent

        def resolve(key, required=True):
            value = raw.get(key)
            if value is None:
                if required:
                    raise ValidationError(f"config {path}: missing key {key!r}")
                return None
            return base / value

        mode_text = raw.get("mode", "all")
        try:
            mode = ScoreMode(mode_text)
        except ValueError:
            raise ValidationError(
                f"config {path}: mode must be 'all' or 'anchors', got {mode_text!r}"
            ) from None
        alignment = raw.get("alignment", {})
        if not isinstance(alignment, dict):
            raise ValidationError(f"config {path}: 'alignment' must be an object")
        return cls(
            corpus_path=resolve("corpus"),
            rankings_path=resolve("rankings"),
            output_dir=resolve("output_dir"),
            lexicon_path=resolve("lexicon", required=False),
            mode=mode,
            embedding_label=raw.get("label"),
            alignment_enabled=bool(alignment.get("enabled", False)),
            min_anchors=int(alignment.get("min_anchors", DEFAULT_MIN_ANCHORS)),
            per_sentence=bool(alignment.get("per_sentence", False)),
            idf=bool(raw.get("idf", False)),
            swap_roles=bool(raw.get("swap_roles", False)),
        )


@dataclass
class PipelineResult:
    report: CorrelationReport
    scores: list[dict]
    global_map: OrthogonalMap | None
    per_sentence_maps: dict[str, OrthogonalMap] | None
    paths: dict[str, Path] = field(default_factory=dict)


def _stage(name: str, sentence_id: str | None = None):
    """Decorator-free stage wrapper: re-raise with stage context, same type."""

    class _StageContext:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, AnchorScoreError):
                where = f"stage {name!r}"
                if sentence_id is not None:
                    where += f", sentence_id {sentence_id!r}"
                raise type(exc)(f"{where}: {exc}") from exc
            return False

    return _StageContext()


def _check_inputs(config: PipelineConfig) -> None:
    required = {"corpus": config.corpus_path, "rankings": config.rankings_path}
    if config.needs_anchors:
        if config.lexicon_path is None:
            raise ValidationError(
                "this configuration needs anchors, but no lexicon path is set"
            )
        required["lexicon"] = config.lexicon_path
    for name, p in required.items():
        if not Path(p).is_file():
            raise ValidationError(f"{name} file does not exist: {p}")


def _merge_all(corpus: Corpus) -> dict[tuple[str, str], WordSequence]:
    return {
        (seq.sentence_id, seq.system_id): merge_wordpieces(seq)
        for seq in corpus.sequences()
    }


def _extract_all(
    corpus: Corpus,
    words: dict[tuple[str, str], WordSequence],
    lexicon: Lexicon,
) -> dict[tuple[str, str], list[AnchorPair]]:
    anchors = {}
    for sid, sample in corpus.samples.items():
        source_words = words[(sid, sample.source.system_id)]
        for seq in sample.translations:
            with _stage("anchors", sid):
                anchors[(sid, seq.system_id)] = extract_anchors(
                    source_words, words[(sid, seq.system_id)], lexicon
                )
    return anchors


def fit_maps(
    corpus: Corpus,
    anchors: dict[tuple[str, str], list[AnchorPair]],
    min_anchors: int = DEFAULT_MIN_ANCHORS,
    per_sentence: bool = False,
) -> tuple[OrthogonalMap, dict[str, OrthogonalMap] | None]:
    """Fit the global map, and optionally one map per sentence.

    Per-sentence fitting pools each sentence's pairs across all of its
    translations; a sentence with fewer than min_anchors pairs falls back
    to the global map rather than failing the run.
    """
    pooled = [pair for pairs in anchors.values() for pair in pairs]
    with _stage("fit"):
        global_map = fit_procrustes(pooled, corpus.dimension, min_anchors)
    log.info(
        "fitted global map from %d anchors, residual %.6g",
        global_map.anchor_count,
        global_map.residual,
    )
    if not per_sentence:
        return global_map, None
    by_sentence: dict[str, OrthogonalMap] = {}
    fallbacks = 0
    for sid in corpus.samples:
        pairs = [
            pair
            for (pair_sid, _), pair_list in anchors.items()
            if pair_sid == sid
            for pair in pair_list
        ]
        if len(pairs) >= min_anchors:
            with _stage("fit", sid):
                by_sentence[sid] = fit_procrustes(pairs, corpus.dimension, min_anchors)
        else:
            by_sentence[sid] = global_map
            fallbacks += 1
    if fallbacks:
        log.warning(
            "%d sentence(s) had fewer than %d anchors; using the global map there",
            fallbacks,
            min_anchors,
        )
    return global_map, by_sentence


def _triple_record(sentence_id: str, triple: ScoreTriple) -> dict:
    return {
        "sentence_id": sentence_id,
        "system_id": triple.candidate_id,
        "reference_id": triple.reference_id,
        "mode": triple.mode.value,
        "precision": triple.precision,
        "recall": triple.recall,
        "f1": triple.f1,
    }


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    """Execute every stage and write the artifacts; returns the in-memory result."""
    _check_inputs(config)
    with _stage("load"):
        corpus = load_corpus(config.corpus_path)
        rankings = load_rankings(config.rankings_path)
        lexicon = (
            load_lexicon(config.lexicon_path) if config.needs_anchors else None
        )
    with _stage("merge"):
        words = _merge_all(corpus)

    anchors: dict[tuple[str, str], list[AnchorPair]] = {}
    global_map = None
    per_sentence_maps = None
    if config.needs_anchors:
        anchors = _extract_all(corpus, words, lexicon)
    if config.alignment_enabled:
        global_map, per_sentence_maps = fit_maps(
            corpus, anchors, config.min_anchors, config.per_sentence
        )

    ref_table = cand_table = None
    if config.idf:
        with _stage("idf"):
            source_table = idf_weights(corpus, CorpusSide.REFERENCE)
            translation_table = idf_weights(corpus, CorpusSide.CANDIDATE)
        ref_table, cand_table = (
            (translation_table, source_table)
            if config.swap_roles
            else (source_table, translation_table)
        )

    scores: list[dict] = []
    f1_by_sentence: dict[str, dict[str, float]] = {}
    no_anchor_sentences: set[str] = set()
    for sid, sample in corpus.samples.items():
        source_words = words[(sid, sample.source.system_id)]
        mapping = None
        if config.alignment_enabled:
            mapping = (
                per_sentence_maps[sid] if per_sentence_maps is not None else global_map
            )
        for seq in sample.translations:
            with _stage("score", sid):
                triple = score_pair(
                    source_words,
                    words[(sid, seq.system_id)],
                    mapping,
                    config.mode,
                    anchors=anchors.get((sid, seq.system_id)),
                    weights=ref_table,
                    candidate_weights=cand_table,
                    swap_roles=config.swap_roles,
                )
            if triple is None:
                no_anchor_sentences.add(sid)
                continue
            scores.append(_triple_record(sid, triple))
            f1_by_sentence.setdefault(sid, {})[seq.system_id] = triple.f1

    if no_anchor_sentences:
        log.warning(
            "no anchors for some translation in %d sentence(s)",
            len(no_anchor_sentences),
        )
    samples, pre_excluded = collect_ranked_samples(f1_by_sentence, rankings)
    with _stage("evaluate"):
        report = evaluate(samples, config.config_label, pre_excluded=pre_excluded)

    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "scores": output_dir / "scores.jsonl",
        "aligned": output_dir / "aligned.jsonl",
        "report_json": output_dir / "report.json",
        "report_table": output_dir / "report.txt",
    }
    with _stage("write"):
        with open(paths["scores"], "w", encoding="utf-8") as handle:
            for record in scores:
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")
        export_mapping = (
            per_sentence_maps
            if per_sentence_maps is not None
            else (global_map or OrthogonalMap.identity(corpus.dimension))
        )
        export_aligned(corpus, export_mapping, paths["aligned"])
        if global_map is not None:
            paths["map"] = output_dir / "map.json"
            save_map(paths["map"], global_map, per_sentence_maps)
        with open(paths["report_json"], "w", encoding="utf-8") as handle:
            json.dump(report.to_dict(), handle, indent=2, ensure_ascii=False)
            handle.write("\n")
        with open(paths["report_table"], "w", encoding="utf-8") as handle:
            handle.write(render_table([report]))
    log.info(
        "%s: mean rho %.4f, mean tau %.4f over %d samples (%d excluded)",
        report.config_label,
        report.mean_rho,
        report.mean_tau,
        len(report.per_sample),
        report.excluded_count,
    )
    return PipelineResult(
        report=report,
        scores=scores,
        global_map=global_map,
        per_sentence_maps=per_sentence_maps,
        paths=paths,
    )


def collect_ranked_samples(
    f1_by_sentence: dict[str, dict[str, float]],
    rankings: dict[str, dict[str, int]],
) -> tuple[list[RankedSample], int]:
    """Join scores with human rankings, excluding incomplete sentences.

    A sentence whose scored system set does not equal its ranked system
    set (typically because some translation had no anchors) is excluded
    and counted. Sentences present only in the rankings file are counted
    the same way; sentences scored but absent from the rankings are
    skipped with a warning, since there is nothing to correlate against.
    """
    samples: list[RankedSample] = []
    excluded = 0
    for sid, ranked in rankings.items():
        scored = f1_by_sentence.get(sid)
        if scored is None:
            log.warning("sentence_id %r is ranked but has no scores; excluded", sid)
            excluded += 1
            continue
        if set(scored) != set(ranked):
            log.warning(
                "sentence_id %r: scored systems %s do not match ranked systems "
                "%s; excluded",
                sid,
                sorted(scored),
                sorted(ranked),
            )
            excluded += 1
            continue
        samples.append(
            RankedSample(sentence_id=sid, human_ranks=ranked, metric_scores=scored)
        )
    unranked = set(f1_by_sentence) - set(rankings)
    if unranked:
        log.warning(
            "%d scored sentence(s) missing from the rankings file; skipped",
            len(unranked),
        )
    return samples, excluded


def load_scores(path) -> list[dict]:
    """Read a scores.jsonl artifact back into records."""
    records = []
    required = {"sentence_id", "system_id", "f1"}
    with open(path, encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(
                    f"scores file {path} line {number}: invalid JSON: {exc}"
                ) from exc
            if not isinstance(record, dict) or not required.issubset(record):
                raise ValidationError(
                    f"scores file {path} line {number}: expected keys {sorted(required)}"
                )
            records.append(record)
    return records


def save_map(
    path,
    global_map: OrthogonalMap,
    per_sentence: dict[str, OrthogonalMap] | None = None,
) -> None:
    """Serialize fitted map(s) to JSON for the score subcommand."""

    def encode(m: OrthogonalMap) -> dict:
        return {
            "dimension": m.dimension,
            "anchor_count": m.anchor_count,
            "residual": m.residual,
            "omega": [[float(v) for v in row] for row in m.omega],
        }

    payload = {"format_version": 1, "global": encode(global_map)}
    if per_sentence is not None:
        payload["per_sentence"] = {sid: encode(m) for sid, m in per_sentence.items()}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle)
        handle.write("\n")


def load_map(path) -> tuple[OrthogonalMap, dict[str, OrthogonalMap] | None]:
    """Inverse of save_map."""
    import numpy as np

    with open(path, encoding="utf-8") as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"map file {path}: invalid JSON: {exc}") from exc

    def decode(raw) -> OrthogonalMap:
        try:
            return OrthogonalMap(
                omega=np.asarray(raw["omega"], dtype=np.float64),
                dimension=int(raw["dimension"]),
                anchor_count=int(raw["anchor_count"]),
                residual=float(raw["residual"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"map file {path}: malformed map entry: {exc}") from exc

    if not isinstance(payload, dict) or "global" not in payload:
        raise ValidationError(f"map file {path}: missing 'global' entry")
    global_map = decode(payload["global"])
    per_sentence = None
    if "per_sentence" in payload:
        per_sentence = {sid: decode(raw) for sid, raw in payload["per_sentence"].items()}
    return global_map, per_sentence
