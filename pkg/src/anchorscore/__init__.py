"""Translation quality scoring over anchor-aligned contextual word embeddings.

The pipeline: load a token-level embedding corpus, merge WordPiece
continuations into words, find anchor word pairs through a bilingual
lexicon, fit an orthogonal map between the two embedding spaces, score
each translation against its source with greedy cosine matching, and
compare the resulting per-sentence rankings against human ranks.
"""

from anchorscore.corpus import (
    Corpus,
    EmbeddedToken,
    Sample,
    TokenSequence,
    load_corpus,
    export_aligned,
)
from anchorscore.merge import WordUnit, WordSequence, is_continuation, merge_wordpieces
from anchorscore.align import (
    AnchorPair,
    Lexicon,
    OrthogonalMap,
    apply_map,
    extract_anchors,
    fit_procrustes,
    load_lexicon,
)
from anchorscore.scoring import (
    IdfTable,
    ScoreMode,
    ScoreTriple,
    greedy_match_score,
    idf_weights,
    score_pair,
)
from anchorscore.ranking import (
    CorrelationReport,
    RankedSample,
    SampleCorrelation,
    evaluate,
    kendall,
    load_rankings,
    scores_to_ranks,
    spearman,
)
from anchorscore.synthetic import SyntheticSpec, generate_synthetic, hidden_rotation
from anchorscore.pipeline import PipelineConfig, PipelineResult, run_pipeline

__version__ = "0.1.0"
