"""Rank conversion, rank correlations, and aggregation against human ranks.

Metric scores are converted to within-sentence ranks (1 = worst, higher
rank = better, average ranks on exact ties, mirroring the human ranking
convention) and compared with the assessor's ranks by Spearman rho
(Pearson correlation of rank vectors) and Kendall tau-b (tie-corrected).
Both are invariant under strictly increasing rescaling of the scores,
which is the point of ranking first. Per-sample coefficients are then
averaged; samples whose correlation is undefined (constant metric
scores) are excluded and counted rather than contributing zero, which
would drag the means toward the random-guess level.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

from anchorscore.errors import (
    EmptyEvaluationError,
    ParseError,
    ValidationError,
)

log = logging.getLogger(__name__)

RANKINGS_HEADER = ["sentence_id", "system_id", "rank"]


@dataclass(frozen=True)
class RankedSample:
    """One sentence's human ranks and metric scores over the same systems.

    Human ranks must be a permutation of 1..k (uncertain ranks are
    removed upstream, so ties never appear on the human side); the two
    maps must cover identical system_id sets. Typical k is 3 or 4, one
    rank per translation variant.
    """

    sentence_id: str
    human_ranks: dict[str, int]
    metric_scores: dict[str, float]

    def __post_init__(self):
        if set(self.human_ranks) != set(self.metric_scores):
            raise ValidationError(
                f"sample {self.sentence_id!r}: human ranks and metric scores "
                "cover different system_id sets"
            )
        k = len(self.human_ranks)
        if k < 2:
            raise ValidationError(
                f"sample {self.sentence_id!r}: need at least 2 systems, got {k}"
            )
        if sorted(self.human_ranks.values()) != list(range(1, k + 1)):
            raise ValidationError(
                f"sample {self.sentence_id!r}: human ranks must be a "
                f"permutation of 1..{k}, got {sorted(self.human_ranks.values())}"
            )
        if not all(math.isfinite(v) for v in self.metric_scores.values()):
            raise ValidationError(
                f"sample {self.sentence_id!r}: non-finite metric score"
            )


@dataclass(frozen=True)
class SampleCorrelation:
    sentence_id: str
    rho: float
    tau: float


@dataclass(frozen=True)
class CorrelationReport:
    per_sample: list[SampleCorrelation]
    mean_rho: float
    mean_tau: float
    excluded_count: int
    config_label: str

    def to_dict(self) -> dict:
        return {
            "config_label": self.config_label,
            "mean_rho": self.mean_rho,
            "mean_tau": self.mean_tau,
            "excluded_count": self.excluded_count,
            "per_sample": [
                {"sentence_id": s.sentence_id, "rho": s.rho, "tau": s.tau}
                for s in self.per_sample
            ],
        }


def scores_to_ranks(scores: dict[str, float]) -> dict[str, float]:
    """Ascending ranks 1..k; higher score, higher rank; ties get average ranks."""
    if not scores:
        raise ValidationError("cannot rank an empty score map")
    if not all(math.isfinite(v) for v in scores.values()):
        raise ValidationError("cannot rank non-finite scores")
    ordered = sorted(scores, key=scores.__getitem__)
    ranks: dict[str, float] = {}
    i = 0
    while i < len(ordered):
        j = i
        while j + 1 < len(ordered) and scores[ordered[j + 1]] == scores[ordered[i]]:
            j += 1
        # positions i..j (0-based) share the average of ranks i+1..j+1
        average = (i + j) / 2 + 1
        for key in ordered[i : j + 1]:
            ranks[key] = average
        i = j + 1
    return ranks


def spearman(r1: list[float], r2: list[float]) -> float | None:
    """Pearson correlation of two rank vectors; None when either is constant."""
    if len(r1) != len(r2):
        raise ValidationError(f"rank lists differ in length: {len(r1)} vs {len(r2)}")
    if len(r1) < 2:
        raise ValidationError("need at least 2 ranks")
    n = len(r1)
    mean1 = sum(r1) / n
    mean2 = sum(r2) / n
    d1 = [x - mean1 for x in r1]
    d2 = [y - mean2 for y in r2]
    var1 = sum(x * x for x in d1)
    var2 = sum(y * y for y in d2)
    if var1 == 0.0 or var2 == 0.0:
        return None
    return sum(x * y for x, y in zip(d1, d2)) / math.sqrt(var1 * var2)


def kendall(r1: list[float], r2: list[float]) -> float | None:
    """Kendall tau-b over two rank vectors; None when a tie term degenerates.

    tau-b = (C - D) / sqrt((P - T1) (P - T2)) with P = n(n-1)/2 pairs,
    C/D the concordant/discordant counts, and T1/T2 the within-list
    tied-pair counts.
    """
    if len(r1) != len(r2):
        raise ValidationError(f"rank lists differ in length: {len(r1)} vs {len(r2)}")
    if len(r1) < 2:
        raise ValidationError("need at least 2 ranks")
    n = len(r1)
    concordant = discordant = ties1 = ties2 = 0
    for i in range(n):
        for j in range(i + 1, n):
            a = r1[i] - r1[j]
            b = r2[i] - r2[j]
            if a == 0.0:
                ties1 += 1
            if b == 0.0:
                ties2 += 1
            if a == 0.0 or b == 0.0:
                continue
            if (a > 0) == (b > 0):
                concordant += 1
            else:
                discordant += 1
    total_pairs = n * (n - 1) // 2
    denom1 = total_pairs - ties1
    denom2 = total_pairs - ties2
    if denom1 == 0 or denom2 == 0:
        return None
    return (concordant - discordant) / math.sqrt(denom1 * denom2)


def evaluate(
    samples: list[RankedSample],
    config_label: str = "",
    pre_excluded: int = 0,
) -> CorrelationReport:
    """Correlate metric-derived ranks with human ranks, sample by sample.

    Samples with undefined correlation are excluded and counted on top of
    `pre_excluded` (samples dropped before evaluation, e.g. for having no
    anchors). Raises when nothing remains to average.
    """
    if not samples and pre_excluded == 0:
        raise EmptyEvaluationError("no samples to evaluate")
    per_sample: list[SampleCorrelation] = []
    excluded = pre_excluded
    for sample in samples:
        systems = sorted(sample.human_ranks)
        metric_ranks = scores_to_ranks(sample.metric_scores)
        metric_vector = [metric_ranks[s] for s in systems]
        human_vector = [float(sample.human_ranks[s]) for s in systems]
        rho = spearman(metric_vector, human_vector)
        tau = kendall(metric_vector, human_vector)
        if rho is None or tau is None:
            log.warning(
                "sample %r has undefined correlation (constant metric scores); "
                "excluded",
                sample.sentence_id,
            )
            excluded += 1
            continue
        per_sample.append(
            SampleCorrelation(sentence_id=sample.sentence_id, rho=rho, tau=tau)
        )
    if not per_sample:
        raise EmptyEvaluationError(
            f"all {excluded} sample(s) were excluded; nothing to average"
        )
    mean_rho = sum(s.rho for s in per_sample) / len(per_sample)
    mean_tau = sum(s.tau for s in per_sample) / len(per_sample)
    return CorrelationReport(
        per_sample=per_sample,
        mean_rho=mean_rho,
        mean_tau=mean_tau,
        excluded_count=excluded,
        config_label=config_label,
    )


def load_rankings(path) -> dict[str, dict[str, int]]:
    """Read the human rankings CSV (header: sentence_id,system_id,rank).

    Returns sentence_id -> {system_id -> rank} and checks that each
    sentence's ranks form a permutation of 1..k.
    """
    rankings: dict[str, dict[str, int]] = {}
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty rankings file", 1) from None
        if [h.strip() for h in header] != RANKINGS_HEADER:
            raise ParseError(
                f"expected header {','.join(RANKINGS_HEADER)!r}, got {header!r}", 1
            )
        for line_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 columns, got {len(row)}", line_number)
            sentence_id, system_id, rank_text = (c.strip() for c in row)
            try:
                rank = int(rank_text)
            except ValueError:
                raise ParseError(f"rank {rank_text!r} is not an integer", line_number) from None
            if not sentence_id or not system_id:
                raise ParseError("sentence_id and system_id must be non-empty", line_number)
            by_system = rankings.setdefault(sentence_id, {})
            if system_id in by_system:
                raise ValidationError(
                    f"duplicate ranking for sentence_id {sentence_id!r}, "
                    f"system_id {system_id!r}"
                )
            by_system[system_id] = rank
    for sentence_id, by_system in rankings.items():
        k = len(by_system)
        if sorted(by_system.values()) != list(range(1, k + 1)):
            raise ValidationError(
                f"ranks for sentence_id {sentence_id!r} are not a permutation "
                f"of 1..{k}: {sorted(by_system.values())}"
            )
    return rankings


def render_table(reports: list[CorrelationReport]) -> str:
    """Fixed-width comparison table: one row per configuration."""
    label_width = max([len(r.config_label) for r in reports] + [len("Configuration")])
    lines = [
        f"{'Configuration':<{label_width}}  {'Spearman':>9}  {'Kendall':>9}  {'Excluded':>8}",
        "-" * (label_width + 32),
    ]
    for report in reports:
        lines.append(
            f"{report.config_label:<{label_width}}  {report.mean_rho:>9.4f}  "
            f"{report.mean_tau:>9.4f}  {report.excluded_count:>8d}"
        )
    return "\n".join(lines) + "\n"
