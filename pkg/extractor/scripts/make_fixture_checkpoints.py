#!/usr/bin/env python3
"""Build the tiny pinned checkpoints under extractor/fixtures/.

Three BERT-style encoders small enough to commit: a multilingual one
whose WordPiece vocabulary shatters Russian words into short pieces,
and one monolingual model per language with wordier vocabularies. Each
vocabulary also carries every single Cyrillic/ASCII character in head
and continuation form, so any ordinary sentence tokenizes without
collapsing to [UNK]. Weights are randomly initialized from fixed seeds;
these checkpoints pin tokenizer behaviour and give real hidden states,
they do not pretend to be trained.

Also writes pinned_pieces.json recording the reference tokenization of
one Russian sentence per checkpoint; tests compare live output against
that file, so regenerating checkpoints with a changed vocabulary will
show up as a fixture diff.

    python3 extractor/scripts/make_fixture_checkpoints.py
"""

import json
import sys
from pathlib import Path

import torch
from transformers import BertConfig, BertModel, BertTokenizer
from transformers.utils import logging as hf_logging

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

REFERENCE_SENTENCE = (
    "Вдруг что-то выпало оттуда — большой, неровно сложенный "
    "кусок коричневой бумаги."
)

REFERENCE_PIECES = {
    "multilingual-tiny": [
        "В", "##дру", "##г", "что", "-", "то", "вы", "##пал", "##о",
        "от", "##ту", "##да", "[UNK]", "большой", ",", "не", "##ров",
        "##но", "сл", "##ожен", "##ный", "к", "##ус", "##ок", "кор",
        "##ичне", "##вой", "бу", "##ма", "##ги", ".",
    ],
    "ru-tiny": [
        "Вдруг", "что", "-", "то", "выпало", "оттуда", "—", "большой",
        ",", "неров", "##но", "сложен", "##ный", "кусок", "коричневой",
        "бумаги", ".",
    ],
}

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]

CYRILLIC = "абвгдеёжзийклмнопрстуфхцчшщъыьэюя"
ASCII = "abcdefghijklmnopqrstuvwxyz"
DIGITS = "0123456789"
PUNCT = list(".,;:!?-'\"()«»")


def char_coverage(alphabets):
    """Every character as its own head piece and continuation piece."""
    out = []
    for alphabet in alphabets:
        for ch in alphabet:
            out.append(ch)
            out.append("##" + ch)
    return out


MULTILINGUAL_WORD_PIECES = [
    # The pieces behind REFERENCE_PIECES["multilingual-tiny"]; the em
    # dash is left out deliberately so it maps to [UNK].
    "В", "##дру", "##г", "что", "-", "то", "вы", "##пал", "##о",
    "от", "##ту", "##да", "большой", ",", "не", "##ров", "##но",
    "сл", "##ожен", "##ный", "к", "##ус", "##ок", "кор", "##ичне",
    "##вой", "бу", "##ма", "##ги", ".",
    "Sudden", "##ly", "some", "##thing", "drop", "##ped", "paper",
    "piece", "brown", "fold", "##ed", "out", "of", "it", "big",
    "un", "##even",
]

RU_WORD_PIECES = [
    "Вдруг", "что", "-", "то", "выпало", "оттуда", "—", "большой",
    ",", "неров", "##но", "сложен", "##ный", "кусок", "коричневой",
    "бумаги", ".",
    "из", "на", "него", "это", "был", "##а", "она", "он", "и", "не",
]

EN_WORD_PIECES = [
    "Sudden", "##ly", "sudden", "some", "##thing", "thing", "drop",
    "##ped", "##s", "out", "of", "it", "a", "the", "big", "un",
    "##even", "fold", "##ed", "piece", "brown", "paper", "and", "was",
    "in", "to", "old", "torn", "letter", "hand", "##writing", "—",
]

CHECKPOINTS = {
    "multilingual-tiny": {
        "seed": 20260701,
        "vocab": (
            MULTILINGUAL_WORD_PIECES
            + char_coverage(
                [CYRILLIC, CYRILLIC.upper(), ASCII, ASCII.upper(), DIGITS]
            )
            + PUNCT
        ),
    },
    "ru-tiny": {
        "seed": 20260702,
        "vocab": (
            RU_WORD_PIECES
            + char_coverage(
                [CYRILLIC, CYRILLIC.upper(), ASCII, ASCII.upper(), DIGITS]
            )
            + PUNCT
            + ["—"]
        ),
    },
    "en-tiny": {
        "seed": 20260703,
        "vocab": (
            EN_WORD_PIECES
            + char_coverage([ASCII, ASCII.upper(), DIGITS])
            + PUNCT
        ),
    },
}


def dedupe(entries):
    return list(dict.fromkeys(entries))


def build_checkpoint(name, spec):
    directory = FIXTURES / "checkpoints" / name
    directory.mkdir(parents=True, exist_ok=True)
    vocab = dedupe(SPECIALS + spec["vocab"])
    (directory / "vocab.txt").write_text("\n".join(vocab) + "\n", encoding="utf-8")

    tokenizer = BertTokenizer(str(directory / "vocab.txt"), do_lower_case=False)
    torch.manual_seed(spec["seed"])
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    model = BertModel(config)
    model.eval()
    tokenizer.save_pretrained(str(directory))
    model.save_pretrained(str(directory))
    print(f"{name}: vocab {len(vocab)}, dim {config.hidden_size}")
    return tokenizer


def main() -> int:
    hf_logging.disable_progress_bar()
    tokenizers = {
        name: build_checkpoint(name, spec) for name, spec in CHECKPOINTS.items()
    }
    for name, expected in REFERENCE_PIECES.items():
        got = tokenizers[name].tokenize(REFERENCE_SENTENCE)
        if got != expected:
            print(f"{name}: tokenization drifted from the reference:", file=sys.stderr)
            print(f"  expected {expected}", file=sys.stderr)
            print(f"  got      {got}", file=sys.stderr)
            return 1
    pinned = {"sentence": REFERENCE_SENTENCE, "pieces": REFERENCE_PIECES}
    with open(FIXTURES / "pinned_pieces.json", "w", encoding="utf-8") as handle:
        json.dump(pinned, handle, ensure_ascii=False, indent=2)
        handle.write("\n")
    print(f"pinned reference tokenizations -> {FIXTURES / 'pinned_pieces.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
