"""Release checklist for the extractor.

One visible PASS/FAIL line, same convention as the scoring toolkit's
acceptance suite: a bilingual sample must flow through the consumer
package untouched, and the pinned reference tokenizations must hold.
"""

import pytest

from anchorscore.corpus import load_corpus
from anchorscore.merge import merge_wordpieces
from anchorscore.scoring import ScoreMode, score_pair

from extract_helpers import SENTENCE_PAIRS, read_jsonl


@pytest.fixture()
def announce(capsys):
    def _announce(name, ok):
        with capsys.disabled():
            print(f"ACCEPTANCE {'PASS' if ok else 'FAIL'}: {name}", flush=True)

    return _announce


def test_extraction_feeds_the_scoring_toolkit(announce, multi_run, pinned):
    loaded_cleanly = True
    scored = 0
    try:
        corpus = load_corpus(multi_run.output_path)
        for sample in corpus.samples.values():
            source_words = merge_wordpieces(sample.source)
            for seq in sample.translations:
                score_pair(
                    source_words,
                    merge_wordpieces(seq),
                    None,
                    ScoreMode.ALL_TOKENS,
                )
                scored += 1
    except Exception:
        loaded_cleanly = False

    fixture_record = next(
        r
        for r in read_jsonl(multi_run.output_path)[1:]
        if r["text"] == pinned["sentence"]
    )
    pieces_match = [
        t["text"] for t in fixture_record["tokens"]
    ] == pinned["pieces"]["multilingual-tiny"]

    ok = (
        loaded_cleanly
        and scored == len(SENTENCE_PAIRS) * 2
        and pieces_match
    )
    announce(
        "10-sentence bilingual extraction loads, merges and scores; "
        "pinned pieces match",
        ok,
    )
    assert ok, (
        f"loaded={loaded_cleanly} scored={scored} pieces_match={pieces_match}"
    )
