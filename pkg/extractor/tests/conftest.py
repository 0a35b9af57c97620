import json

import pytest

from embed_extract.job import ExtractionJob
from embed_extract.runner import extract
from extract_helpers import EN, FIXTURES, MULTI, RU, bilingual_rows, write_tsv


@pytest.fixture(scope="session")
def pinned():
    with open(FIXTURES / "pinned_pieces.json", encoding="utf-8") as handle:
        return json.load(handle)


@pytest.fixture(scope="session")
def sample_tsv(tmp_path_factory):
    path = tmp_path_factory.mktemp("sample") / "sentences.tsv"
    return write_tsv(path, bilingual_rows())


@pytest.fixture(scope="session")
def multi_run(sample_tsv, tmp_path_factory):
    """The bilingual sample through the multilingual checkpoint, once."""
    out = tmp_path_factory.mktemp("multi") / "corpus.jsonl"
    report = extract(
        ExtractionJob(
            input_path=sample_tsv, output_path=out, multi_model=str(MULTI)
        )
    )
    return report


@pytest.fixture(scope="session")
def mono_run(sample_tsv, tmp_path_factory):
    """The bilingual sample through the two monolingual checkpoints, once."""
    out = tmp_path_factory.mktemp("mono") / "corpus.jsonl"
    report = extract(
        ExtractionJob(
            input_path=sample_tsv,
            output_path=out,
            models={"en": str(EN), "ru": str(RU)},
        )
    )
    return report
