"""The spurious-correlation audit: example-level correlation matrices,
spurious flags, and the two-distribution spuriousness check."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import Dataset
from .errors import DegenerateSampleError, DistributionLabelError, MissingFieldError
from .stats import (
    BootstrapResult,
    PairedSample,
    bootstrap_mean,
    bootstrap_one_tailed_test,
    spearman,
)


@dataclass(frozen=True)
class SpuriousFlag:
    """Raised when a metric tracks a correlate more strongly than humans.

    ``corr_FH`` / ``corr_FS`` are the point estimates compared; ``p`` is the
    one-tailed bootstrap p-value for |corr(F,S)| > |corr(F,H)|.
    """

    metric_name: str
    correlate_name: str
    corr_FH: float
    corr_FS: float
    significant: bool
    p: float


@dataclass(frozen=True)
class AuditRow:
    scorer_name: str
    kind: str  # "metric" or "correlate"
    corr_with_human: BootstrapResult
    corr_with: dict[str, BootstrapResult] = field(default_factory=dict)


@dataclass(frozen=True)
class AuditReport:
    dataset_name: str
    aspect: str
    rows: list[AuditRow]
    flags: list[SpuriousFlag]
    B: int
    alpha: float
    seed: int
    complete_n: int
    dropped_n: int
    warnings: list[str] = field(default_factory=list)


def _complete_case_columns(
    dataset: Dataset, metrics: list[str], correlates: list[str], aspect: str
) -> tuple[dict[str, np.ndarray], np.ndarray, int]:
    """Score columns over the records complete for every requested scorer."""
    rows = []
    for rec in dataset.records:
        if aspect not in rec.human_scores:
            continue
        if any(m not in rec.metric_scores for m in metrics):
            continue
        if any(c not in rec.correlate_scores for c in correlates):
            continue
        rows.append(rec)
    dropped = len(dataset.records) - len(rows)
    human = np.array([r.human_scores[aspect] for r in rows], dtype=np.float64)
    columns: dict[str, np.ndarray] = {}
    for m in metrics:
        columns[m] = np.array([r.metric_scores[m] for r in rows], dtype=np.float64)
    for c in correlates:
        columns[c] = np.array([r.correlate_scores[c] for r in rows], dtype=np.float64)
    return columns, human, dropped


def _spearman_stat(x: np.ndarray, y: np.ndarray):
    def stat(idx: np.ndarray) -> float:
        return spearman(PairedSample(x[idx], y[idx]))

    return stat


def _abs_spearman_stat(x: np.ndarray, y: np.ndarray):
    def stat(idx: np.ndarray) -> float:
        return abs(spearman(PairedSample(x[idx], y[idx])))

    return stat


def example_level_audit(
    dataset: Dataset,
    metrics: list[str],
    correlates: list[str],
    aspect: str,
    B: int = 1000,
    seed: int = 0,
    alpha: float = 0.05,
    workers: int = 1,
) -> AuditReport:
    """Example-level Spearman audit of metrics against humans and correlates.

    Every correlation is computed on the identical complete-case record
    subset and bootstrapped with the shared (seed, replicate) RNG streams.
    A flag is emitted for each (metric, correlate) pair whose correlate
    correlation exceeds its human correlation in absolute value, together
    with the one-tailed bootstrap significance of that comparison.
    Degenerate (constant) columns are reported as warnings and skipped;
    the audit proceeds for the remaining scorers.
    """
    columns, human, dropped = _complete_case_columns(dataset, metrics, correlates, aspect)
    n = len(human)
    if n < 2:
        raise MissingFieldError(
            f"only {n} complete-case records for aspect {aspect!r}, "
            f"metrics {metrics}, correlates {correlates}"
        )

    warnings: list[str] = []
    usable: dict[str, np.ndarray] = {}
    for name, col in columns.items():
        try:
            spearman(PairedSample(col, human))
            usable[name] = col
        except DegenerateSampleError:
            warnings.append(f"degenerate column {name!r}: constant scores, row skipped")

    rows: list[AuditRow] = []
    flags: list[SpuriousFlag] = []
    for kind, names in (("metric", metrics), ("correlate", correlates)):
        for name in names:
            if name not in usable:
                continue
            col = usable[name]
            with_human = bootstrap_mean(
                _spearman_stat(col, human), n, B=B, seed=seed, alpha=alpha, workers=workers
            )
            corr_with: dict[str, BootstrapResult] = {}
            if kind == "metric":
                for corr_name in correlates:
                    if corr_name not in usable:
                        continue
                    corr_col = usable[corr_name]
                    with_corr = bootstrap_mean(
                        _spearman_stat(col, corr_col),
                        n,
                        B=B,
                        seed=seed,
                        alpha=alpha,
                        workers=workers,
                    )
                    corr_with[corr_name] = with_corr
                    if abs(with_corr.point) > abs(with_human.point):
                        p, significant = bootstrap_one_tailed_test(
                            _abs_spearman_stat(col, corr_col),
                            _abs_spearman_stat(col, human),
                            n,
                            B=B,
                            seed=seed,
                            alpha=alpha,
                            workers=workers,
                        )
                        flags.append(
                            SpuriousFlag(
                                metric_name=name,
                                correlate_name=corr_name,
                                corr_FH=with_human.point,
                                corr_FS=with_corr.point,
                                significant=significant,
                                p=p,
                            )
                        )
            rows.append(
                AuditRow(scorer_name=name, kind=kind, corr_with_human=with_human, corr_with=corr_with)
            )
    return AuditReport(
        dataset_name=dataset.name,
        aspect=aspect,
        rows=rows,
        flags=flags,
        B=B,
        alpha=alpha,
        seed=seed,
        complete_n=n,
        dropped_n=dropped,
        warnings=warnings,
    )


@dataclass(frozen=True)
class SpuriousVerdict:
    """Outcome of the two-distribution spuriousness test for one (F, S) pair."""

    metric_name: str
    correlate_name: str
    aspect: str
    condition1: bool  # |corr(F,H)| high on eval but low on test
    condition2: bool  # |corr(F,S)| stays high on test
    is_spurious: bool
    evidence: dict[str, BootstrapResult]  # FH_eval, FH_test, FS_eval, FS_test
    high_threshold: float
    low_threshold: float


def spurious_correlate_check(
    d_eval: Dataset,
    d_test: Dataset,
    metric: str,
    correlate: str,
    aspect: str,
    high: float = 0.3,
    low: float = 0.1,
    B: int = 1000,
    seed: int = 0,
    workers: int = 1,
) -> SpuriousVerdict:
    """Two-condition spuriousness test across an eval and a test distribution.

    Condition 1: the metric correlates with humans on the eval distribution
    (|corr| >= high) but not on the test distribution (|corr| < low).
    Condition 2: the metric still correlates with the correlate on the test
    distribution (|corr| >= high). Conditions use point estimates; the
    bootstrap results are carried as evidence.
    """
    if d_eval.distribution_label != "eval":
        raise DistributionLabelError(
            f"d_eval has label {d_eval.distribution_label!r}, expected 'eval'"
        )
    if d_test.distribution_label != "test":
        raise DistributionLabelError(
            f"d_test has label {d_test.distribution_label!r}, expected 'test'"
        )

    def corr(dataset: Dataset, a_kind: str, b_kind: str) -> BootstrapResult:
        cols, human, _ = _complete_case_columns(dataset, [metric], [correlate], aspect)
        vectors = {"metric": cols[metric], "correlate": cols[correlate], "human": human}
        x, y = vectors[a_kind], vectors[b_kind]
        return bootstrap_mean(_spearman_stat(x, y), len(x), B=B, seed=seed, workers=workers)

    evidence = {
        "FH_eval": corr(d_eval, "metric", "human"),
        "FH_test": corr(d_test, "metric", "human"),
        "FS_eval": corr(d_eval, "metric", "correlate"),
        "FS_test": corr(d_test, "metric", "correlate"),
    }
    condition1 = (
        abs(evidence["FH_eval"].point) >= high and abs(evidence["FH_test"].point) < low
    )
    condition2 = abs(evidence["FS_test"].point) >= high
    return SpuriousVerdict(
        metric_name=metric,
        correlate_name=correlate,
        aspect=aspect,
        condition1=condition1,
        condition2=condition2,
        is_spurious=condition1 and condition2,
        evidence=evidence,
        high_threshold=high,
        low_threshold=low,
    )
