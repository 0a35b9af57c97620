"""Command line entry point.

    extract --input sentences.tsv --model-multi <checkpoint> --out corpus.jsonl
    extract --input sentences.tsv --model-en <ckpt> --model-ru <ckpt> \
        --layer -1 --out corpus.jsonl

Model identifiers are checkpoint directory paths (or hub ids where the
environment can reach a hub). Exit codes: 0 success, 1 invalid job or
input, 2 model or runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from embed_extract.errors import ExtractorError, JobError
from embed_extract.job import ExtractionJob
from embed_extract.runner import extract


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extract",
        description="dump contextual WordPiece embeddings to a line-JSON corpus",
    )
    parser.add_argument("--input", type=Path, required=True,
                        help="TSV of sentence_id, system_id, lang, text")
    parser.add_argument("--model-en", help="checkpoint for lang 'en'")
    parser.add_argument("--model-ru", help="checkpoint for lang 'ru'")
    parser.add_argument("--model-multi",
                        help="one checkpoint for every language")
    parser.add_argument("--layer", type=int, default=-1,
                        help="hidden layer to export; -1 last, 0 embeddings")
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    per_language = {
        lang: identifier
        for lang, identifier in (("en", args.model_en), ("ru", args.model_ru))
        if identifier
    }
    try:
        if args.model_multi and per_language:
            raise JobError(
                "--model-multi cannot be combined with per-language models"
            )
        job = ExtractionJob(
            input_path=args.input,
            output_path=args.out,
            models=per_language or None,
            multi_model=args.model_multi,
            layer=args.layer,
            batch_size=args.batch_size,
        )
        report = extract(job)
    except JobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ExtractorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {report.written} record(s) to {report.output_path}")
    if report.skipped:
        print(
            f"skipped {len(report.skipped)} record(s), "
            f"listed in {report.sidecar_path}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
