#!/usr/bin/env python3
"""Compare the four scoring configurations on one benchmark.

Runs aligned/unaligned x anchors-only/all-tokens over the same corpus
and prints a single table. By default a synthetic benchmark with a
planted rotation is generated first; point --corpus/--lexicon/--rankings
at real files to grid those instead.

    python3 scripts/run_config_grid.py --out /tmp/grid
    python3 scripts/run_config_grid.py --out /tmp/grid \
        --corpus corpus.jsonl --lexicon lexicon.tsv --rankings rankings.csv
"""

import argparse
import sys
import time
from pathlib import Path

from anchorscore.pipeline import PipelineConfig, run_pipeline
from anchorscore.ranking import render_table
from anchorscore.scoring import ScoreMode
from anchorscore.synthetic import SyntheticSpec, generate_synthetic

GRID = [
    (ScoreMode.ANCHORS_ONLY, True),
    (ScoreMode.ALL_TOKENS, True),
    (ScoreMode.ANCHORS_ONLY, False),
    (ScoreMode.ALL_TOKENS, False),
]


def parse_args(argv):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, required=True,
                        help="directory for benchmark data and per-config artifacts")
    parser.add_argument("--corpus", type=Path)
    parser.add_argument("--lexicon", type=Path)
    parser.add_argument("--rankings", type=Path)
    parser.add_argument("--sentences", type=int, default=100)
    parser.add_argument("--dimension", type=int, default=32)
    parser.add_argument("--noise", type=float, nargs="+",
                        default=[0.05, 0.15, 0.3, 0.6])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--idf", action="store_true",
                        help="idf-weight every configuration")
    args = parser.parse_args(argv)
    real = [args.corpus, args.lexicon, args.rankings]
    if any(real) and not all(real):
        parser.error("--corpus, --lexicon and --rankings must be given together")
    return args


def main(argv=None) -> int:
    args = parse_args(argv)
    if args.corpus:
        corpus, lexicon, rankings = args.corpus, args.lexicon, args.rankings
    else:
        spec = SyntheticSpec(
            sentence_count=args.sentences,
            words_per_sentence=(6, 12),
            dimension=args.dimension,
            systems_count=len(args.noise),
            noise_levels=tuple(args.noise),
            rotation_seed=args.seed,
            rng_seed=args.seed,
        )
        paths = generate_synthetic(spec, args.out / "data")
        corpus, lexicon, rankings = (
            paths.corpus_path, paths.lexicon_path, paths.rankings_path,
        )
        print(f"generated benchmark under {args.out / 'data'}")

    reports = []
    for mode, aligned in GRID:
        config = PipelineConfig(
            corpus_path=corpus,
            rankings_path=rankings,
            lexicon_path=lexicon,
            output_dir=args.out / f"{'aligned' if aligned else 'unaligned'}_{mode.value}",
            mode=mode,
            alignment_enabled=aligned,
            idf=args.idf,
        )
        start = time.perf_counter()
        result = run_pipeline(config)
        print(f"{config.config_label}: {time.perf_counter() - start:.2f}s")
        reports.append(result.report)

    print()
    print(render_table(reports), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
