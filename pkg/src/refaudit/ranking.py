"""System-level aggregation, pairwise ranking accuracy, and the
abstractive-faithful subgroup analysis."""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import Dataset
from .errors import InsufficientSystemsError, MissingFieldError

AF_FAITH_THRESHOLD = 4.5
AF_DENSITY_THRESHOLD = 30.0


@dataclass(frozen=True)
class SystemAggregate:
    """Per-system means of human, metric, and correlate scores."""

    system_id: str
    n: int
    mean_human: dict[str, float] = field(default_factory=dict)
    mean_metric: dict[str, float] = field(default_factory=dict)
    mean_correlate: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class PairwiseResult:
    scorer_name: str
    n_pairs: int
    n_correct: float
    accuracy: float
    skipped_ties: int


def aggregate_systems(dataset: Dataset) -> list[SystemAggregate]:
    """One aggregate per distinct system id, ordered lexicographically.

    Each mean is taken over the records of that system carrying the score.
    """
    by_system: dict[str, list] = {}
    for rec in dataset.records:
        by_system.setdefault(rec.system_id, []).append(rec)

    def means(records, attr) -> dict[str, float]:
        sums: dict[str, float] = {}
        counts: dict[str, int] = {}
        for rec in records:
            for key, value in getattr(rec, attr).items():
                sums[key] = sums.get(key, 0.0) + value
                counts[key] = counts.get(key, 0) + 1
        return {key: sums[key] / counts[key] for key in sums}

    aggregates = []
    for system_id in sorted(by_system):
        records = by_system[system_id]
        aggregates.append(
            SystemAggregate(
                system_id=system_id,
                n=len(records),
                mean_human=means(records, "human_scores"),
                mean_metric=means(records, "metric_scores"),
                mean_correlate=means(records, "correlate_scores"),
            )
        )
    return aggregates


def _scorer_value(agg: SystemAggregate, scorer: str) -> float:
    if scorer in agg.mean_metric:
        return agg.mean_metric[scorer]
    if scorer in agg.mean_correlate:
        return agg.mean_correlate[scorer]
    raise MissingFieldError(f"system {agg.system_id!r} has no scorer {scorer!r}")


def _aspect_value(agg: SystemAggregate, aspect: str) -> float:
    if aspect not in agg.mean_human:
        raise MissingFieldError(f"system {agg.system_id!r} has no human aspect {aspect!r}")
    return agg.mean_human[aspect]


def pairwise_accuracy(
    aggs: list[SystemAggregate], scorer: str, aspect: str
) -> PairwiseResult:
    """Accuracy of the scorer's system ordering against the human ordering.

    All unordered pairs with distinct human means count; matching order scores
    1, a scorer tie scores 0.5, and human-tied pairs are excluded entirely.
    """
    if len(aggs) < 2:
        raise InsufficientSystemsError("pairwise ranking requires at least 2 systems")
    scores = [_scorer_value(a, scorer) for a in aggs]
    humans = [_aspect_value(a, aspect) for a in aggs]

    n_pairs = 0
    n_correct = 0.0
    skipped = 0
    for i in range(len(aggs)):
        for j in range(i + 1, len(aggs)):
            dh = humans[i] - humans[j]
            if dh == 0.0:
                skipped += 1
                continue
            n_pairs += 1
            ds = scores[i] - scores[j]
            if ds == 0.0:
                n_correct += 0.5
            elif (ds > 0.0) == (dh > 0.0):
                n_correct += 1.0
    if n_pairs == 0:
        raise InsufficientSystemsError(
            f"no usable system pairs for scorer {scorer!r} (all human means tied)"
        )
    return PairwiseResult(
        scorer_name=scorer,
        n_pairs=n_pairs,
        n_correct=n_correct,
        accuracy=n_correct / n_pairs,
        skipped_ties=skipped,
    )


def filter_af(
    aggs: list[SystemAggregate],
    faith_threshold: float = AF_FAITH_THRESHOLD,
    density_threshold: float = AF_DENSITY_THRESHOLD,
    aspect: str = "faithfulness",
) -> list[SystemAggregate]:
    """Abstractive-faithful subgroup: mean faithfulness strictly above the
    threshold and mean density strictly below it."""
    selected = []
    for agg in aggs:
        faith = _aspect_value(agg, aspect)
        if "density" not in agg.mean_correlate:
            raise MissingFieldError(f"system {agg.system_id!r} has no density correlate")
        dens = agg.mean_correlate["density"]
        if faith > faith_threshold and dens < density_threshold:
            selected.append(agg)
    return selected


@dataclass(frozen=True)
class RankingRow:
    scorer_name: str
    all_pairs: PairwiseResult
    within_af: PairwiseResult | None  # None when the AF subgroup is too small


@dataclass(frozen=True)
class RankingReport:
    dataset_name: str
    aspect: str
    rows: list[RankingRow]
    n_systems: int
    n_af_systems: int
    af_faith_threshold: float
    af_density_threshold: float


def ranking_report(
    dataset: Dataset,
    scorers: list[str],
    aspect: str,
    faith_threshold: float = AF_FAITH_THRESHOLD,
    density_threshold: float = AF_DENSITY_THRESHOLD,
) -> RankingReport:
    """All-pairs and within-AF pairwise accuracy per scorer.

    The within-AF column is marked absent (None) when the AF subgroup has
    fewer than 2 systems or no usable pairs.
    """
    aggs = aggregate_systems(dataset)
    af = filter_af(aggs, faith_threshold, density_threshold, aspect)
    rows = []
    for scorer in scorers:
        all_pairs = pairwise_accuracy(aggs, scorer, aspect)
        within: PairwiseResult | None = None
        if len(af) >= 2:
            try:
                within = pairwise_accuracy(af, scorer, aspect)
            except InsufficientSystemsError:
                within = None
        rows.append(RankingRow(scorer_name=scorer, all_pairs=all_pairs, within_af=within))
    return RankingReport(
        dataset_name=dataset.name,
        aspect=aspect,
        rows=rows,
        n_systems=len(aggs),
        n_af_systems=len(af),
        af_faith_threshold=faith_threshold,
        af_density_threshold=density_threshold,
    )
