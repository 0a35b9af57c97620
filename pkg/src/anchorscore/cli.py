"""Command line front end.

Exit codes: 0 on success, 1 when an input fails validation, 2 when a
stage fails at runtime (numeric trouble, unreadable files, and so on).

Subcommands mirror the pipeline stages so any intermediate artifact can
be regenerated or inspected on its own:

    validate  parse a corpus file and report what it contains
    merge     collapse piece tokens into words, optionally writing a
              corpus whose tokens are the merged words
    align     fit orthogonal map(s) from lexicon anchors, write map.json
    score     score translations against sources, write scores.jsonl
    evaluate  correlate scores with human rankings, print the table
    pipeline  run everything from a JSON config
    synth     generate a synthetic benchmark corpus with known structure
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from anchorscore.align import load_lexicon
from anchorscore.corpus import (
    EmbeddedToken,
    TokenSequence,
    build_corpus,
    load_corpus,
    save_corpus,
)
from anchorscore.errors import AnchorScoreError, ValidationError
from anchorscore.merge import merge_wordpieces
from anchorscore.pipeline import (
    DEFAULT_MIN_ANCHORS,
    PipelineConfig,
    _extract_all,
    _merge_all,
    _triple_record,
    collect_ranked_samples,
    fit_maps,
    load_map,
    load_scores,
    run_pipeline,
    save_map,
)
from anchorscore.ranking import evaluate, load_rankings, render_table
from anchorscore.scoring import (
    CorpusSide,
    ScoreMode,
    idf_weights,
    score_pair,
)
from anchorscore.synthetic import SyntheticSpec, generate_synthetic

log = logging.getLogger(__name__)


def cmd_validate(args) -> int:
    corpus = load_corpus(args.corpus)
    sequence_count = sum(1 for _ in corpus.sequences())
    systems = sorted(
        {
            seq.system_id
            for sample in corpus.samples.values()
            for seq in sample.translations
        }
    )
    print(f"ok: {args.corpus}")
    print(f"  dimension:  {corpus.dimension}")
    print(f"  sentences:  {len(corpus.samples)}")
    print(f"  sequences:  {sequence_count}")
    print(f"  systems:    {', '.join(systems) if systems else '(none)'}")
    return 0


def cmd_merge(args) -> int:
    corpus = load_corpus(args.corpus)
    sequences = []
    for seq in corpus.sequences():
        words = merge_wordpieces(seq, marker=args.marker)
        sequences.append(
            TokenSequence(
                sentence_id=seq.sentence_id,
                system_id=seq.system_id,
                lang=seq.lang,
                text=seq.text,
                tokens=tuple(
                    EmbeddedToken(text=w.text, vector=w.vector) for w in words.words
                ),
            )
        )
        if args.dump:
            print(
                json.dumps(
                    {
                        "sentence_id": seq.sentence_id,
                        "system_id": seq.system_id,
                        "words": [w.text for w in words.words],
                    },
                    ensure_ascii=False,
                )
            )
        else:
            print(
                f"{seq.sentence_id}\t{seq.system_id}\t"
                f"{len(seq.tokens)} pieces -> {len(words.words)} words"
            )
    if args.out:
        save_corpus(build_corpus(corpus.dimension, sequences), args.out)
        print(f"wrote merged corpus to {args.out}")
    return 0


def cmd_align(args) -> int:
    corpus = load_corpus(args.corpus)
    lexicon = load_lexicon(args.lexicon)
    words = _merge_all(corpus)
    anchors = _extract_all(corpus, words, lexicon)
    global_map, per_sentence = fit_maps(
        corpus, anchors, args.min_anchors, args.per_sentence
    )
    save_map(args.out, global_map, per_sentence)
    print(f"wrote map to {args.out}")
    print(f"  anchors:   {global_map.anchor_count}")
    print(f"  residual:  {global_map.residual:.6g}")
    if per_sentence is not None:
        own = sum(1 for m in per_sentence.values() if m is not global_map)
        print(f"  per-sentence maps: {own} fitted, {len(per_sentence) - own} fallback")
    return 0


def cmd_score(args) -> int:
    corpus = load_corpus(args.corpus)
    mode = ScoreMode(args.mode)
    global_map = None
    per_sentence = None
    if args.map and args.map != "identity":
        global_map, per_sentence = load_map(args.map)
        if global_map.dimension != corpus.dimension:
            raise ValidationError(
                f"map dimension {global_map.dimension} does not match corpus "
                f"dimension {corpus.dimension}"
            )
    words = _merge_all(corpus)
    anchors = {}
    if mode is ScoreMode.ANCHORS_ONLY:
        if not args.lexicon:
            raise ValidationError("--mode anchors requires --lexicon")
        anchors = _extract_all(corpus, words, load_lexicon(args.lexicon))
    ref_table = cand_table = None
    if args.idf:
        source_table = idf_weights(corpus, CorpusSide.REFERENCE)
        translation_table = idf_weights(corpus, CorpusSide.CANDIDATE)
        ref_table, cand_table = (
            (translation_table, source_table)
            if args.swap_roles
            else (source_table, translation_table)
        )
    scored = 0
    skipped = 0
    with open(args.out, "w", encoding="utf-8") as handle:
        for sid, sample in corpus.samples.items():
            mapping = global_map
            if per_sentence is not None:
                mapping = per_sentence.get(sid, global_map)
            for seq in sample.translations:
                triple = score_pair(
                    words[(sid, sample.source.system_id)],
                    words[(sid, seq.system_id)],
                    mapping,
                    mode,
                    anchors=anchors.get((sid, seq.system_id)),
                    weights=ref_table,
                    candidate_weights=cand_table,
                    swap_roles=args.swap_roles,
                )
                if triple is None:
                    skipped += 1
                    continue
                handle.write(
                    json.dumps(_triple_record(sid, triple), ensure_ascii=False) + "\n"
                )
                scored += 1
    print(f"wrote {scored} score(s) to {args.out}")
    if skipped:
        print(f"skipped {skipped} translation(s) with no anchors")
    return 0


def cmd_evaluate(args) -> int:
    records = load_scores(args.scores)
    rankings = load_rankings(args.rankings)
    f1_by_sentence: dict[str, dict[str, float]] = {}
    for record in records:
        f1_by_sentence.setdefault(record["sentence_id"], {})[record["system_id"]] = (
            float(record["f1"])
        )
    samples, pre_excluded = collect_ranked_samples(f1_by_sentence, rankings)
    report = evaluate(samples, args.label, pre_excluded=pre_excluded)
    print(render_table([report]), end="")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(report.to_dict(), handle, indent=2, ensure_ascii=False)
            handle.write("\n")
        print(f"wrote report to {args.out}")
    return 0


def cmd_pipeline(args) -> int:
    config = PipelineConfig.from_file(args.config)
    result = run_pipeline(config)
    print(render_table([result.report]), end="")
    for name, path in sorted(result.paths.items()):
        print(f"  {name}: {path}")
    return 0


def cmd_synth(args) -> int:
    spec = SyntheticSpec(
        sentence_count=args.sentences,
        words_per_sentence=(args.min_words, args.max_words),
        dimension=args.dimension,
        systems_count=len(args.noise),
        noise_levels=tuple(args.noise),
        rotation_seed=args.rotation_seed,
        rng_seed=args.seed,
    )
    paths = generate_synthetic(spec, args.out)
    print(f"wrote synthetic benchmark to {args.out}")
    print(f"  corpus:    {paths.corpus_path}")
    print(f"  lexicon:   {paths.lexicon_path}")
    print(f"  rankings:  {paths.rankings_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anchorscore",
        description="Score translation quality with aligned contextual embeddings.",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log progress details"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a corpus file")
    p.add_argument("corpus", type=Path)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("merge", help="collapse piece tokens into words")
    p.add_argument("corpus", type=Path)
    p.add_argument("--marker", default="##", help="continuation prefix (default ##)")
    p.add_argument(
        "--dump", action="store_true", help="print merged words as JSON lines"
    )
    p.add_argument("--out", type=Path, help="write a corpus of merged words")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("align", help="fit orthogonal map(s) from lexicon anchors")
    p.add_argument("corpus", type=Path)
    p.add_argument("--lexicon", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--min-anchors", type=int, default=DEFAULT_MIN_ANCHORS)
    p.add_argument(
        "--per-sentence",
        action="store_true",
        help="also fit one map per sentence, falling back to the global map",
    )
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("score", help="score translations against their sources")
    p.add_argument("corpus", type=Path)
    p.add_argument(
        "--map",
        default="identity",
        help="map.json from the align step, or 'identity' (default)",
    )
    p.add_argument("--mode", choices=[m.value for m in ScoreMode], default="all")
    p.add_argument("--lexicon", type=Path, help="needed for --mode anchors")
    p.add_argument("--idf", action="store_true", help="weight tokens by corpus idf")
    p.add_argument(
        "--swap-roles",
        action="store_true",
        help="treat the source as candidate and the translation as reference",
    )
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("evaluate", help="correlate scores with human rankings")
    p.add_argument("scores", type=Path)
    p.add_argument("--rankings", type=Path, required=True)
    p.add_argument("--label", default="", help="configuration label for the table")
    p.add_argument("--out", type=Path, help="also write report JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline", help="run every stage from a JSON config")
    p.add_argument("config", type=Path)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("synth", help="generate a synthetic benchmark")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--sentences", type=int, default=100)
    p.add_argument("--dimension", type=int, default=32)
    p.add_argument("--min-words", type=int, default=6)
    p.add_argument("--max-words", type=int, default=12)
    p.add_argument(
        "--noise",
        type=float,
        nargs="+",
        default=[0.05, 0.15, 0.3, 0.6],
        help="one noise level per simulated system",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rotation-seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AnchorScoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
