"""Contextual WordPiece embedding extraction into a line-JSON corpus.

Runs BERT-style encoders over a TSV of sentences and writes one record
per (sentence_id, system_id) with the model's piece tokens and the
selected hidden layer's vectors, ready for downstream merging, cross-
lingual alignment and scoring.
"""

from embed_extract.errors import ExtractorError, JobError, ModelError
from embed_extract.job import ExtractionJob, InputRow, read_rows
from embed_extract.models import LoadedModel, resolve_model
from embed_extract.runner import ExtractionReport, SkippedRecord, extract

__version__ = "0.1.0"
