"""Model resolution: identifier -> loaded tokenizer and encoder."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from embed_extract.errors import ModelError


@dataclass(frozen=True)
class LoadedModel:
    identifier: str
    resolved_id: str
    tokenizer: Any = field(repr=False)
    model: Any = field(repr=False)
    dimension: int
    layer_count: int
    max_pieces: int


def resolve_model(identifier: str) -> LoadedModel:
    """Load a BERT-style checkpoint by directory path or hub id.

    A local directory wins; anything else is handed to the inference
    library, which needs network access for hub identifiers. The
    resolved_id recorded for provenance is the absolute path for local
    checkpoints and the identifier as given otherwise.
    """
    import torch  # deferred: heavy import, CLI --help should stay fast
    from transformers import BertModel, BertTokenizer
    from transformers.utils import logging as hf_logging

    hf_logging.disable_progress_bar()

    path = Path(identifier)
    source = str(path.resolve()) if path.is_dir() else identifier
    try:
        tokenizer = BertTokenizer.from_pretrained(source)
        model = BertModel.from_pretrained(source)
    except Exception as exc:
        raise ModelError(f"could not resolve model {identifier!r}: {exc}") from exc
    model.eval()
    torch.set_grad_enabled(False)
    config = model.config
    return LoadedModel(
        identifier=identifier,
        resolved_id=source,
        tokenizer=tokenizer,
        model=model,
        dimension=config.hidden_size,
        layer_count=config.num_hidden_layers,
        # Positions must also fit [CLS] and [SEP].
        max_pieces=config.max_position_embeddings - 2,
    )
