import json
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
CHECKPOINTS = FIXTURES / "checkpoints"
MULTI = CHECKPOINTS / "multilingual-tiny"
RU = CHECKPOINTS / "ru-tiny"
EN = CHECKPOINTS / "en-tiny"

HEADER = "sentence_id\tsystem_id\tlang\ttext"

SENTENCE_PAIRS = [
    (
        "Suddenly something dropped out of it, a big unevenly folded "
        "piece of brown paper.",
        "Вдруг что-то выпало оттуда — большой, неровно сложенный кусок "
        "коричневой бумаги.",
        "Вдруг из него выпало что-то большое, это был неровно сложенный "
        "кусок коричневой бумаги.",
    ),
    (
        "The old letter was torn in two.",
        "Старое письмо было разорвано надвое.",
        "Это старое письмо разорвали на две части.",
    ),
    (
        "It was brown paper, folded unevenly.",
        "Это была коричневая бумага, сложенная неровно.",
        "Бумага была коричневой и неровно сложенной.",
    ),
    (
        "Suddenly the handwriting looked old.",
        "Вдруг почерк показался старым.",
        "Почерк вдруг показался очень старым.",
    ),
    (
        "A big piece dropped to the floor.",
        "Большой кусок упал на пол.",
        "На пол упал большой кусок.",
    ),
    (
        "Something was folded inside it.",
        "Внутри него было что-то сложено.",
        "Что-то было сложено внутри.",
    ),
    (
        "The paper smelled of dust.",
        "Бумага пахла пылью.",
        "От бумаги пахло пылью.",
    ),
    (
        "It was unevenly torn at the edge.",
        "Край был неровно оборван.",
        "Она была неровно оборвана по краю.",
    ),
    (
        "Out of the big envelope dropped a letter.",
        "Из большого конверта выпало письмо.",
        "Письмо выпало из большого конверта.",
    ),
    (
        "The letter was 3 pages long.",
        "Письмо было длиной 3 страницы.",
        "В письме было 3 страницы.",
    ),
]


def write_tsv(path, rows, header=HEADER):
    lines = [header] if header is not None else []
    lines += ["\t".join(row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def bilingual_rows():
    rows = []
    for i, (en, ru_a, ru_b) in enumerate(SENTENCE_PAIRS):
        sid = f"s{i:02d}"
        rows.append((sid, "source", "en", en))
        rows.append((sid, "mt1", "ru", ru_a))
        rows.append((sid, "mt2", "ru", ru_b))
    return rows


def read_jsonl(path):
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle]
