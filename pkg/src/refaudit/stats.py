"""Correlation statistics and percentile-bootstrap procedures.

Randomness contract
-------------------
All resampling is driven by numpy's Philox counter-based generator, keyed by
``(seed, replicate_index)``. Replicate r therefore draws the same indices no
matter how replicates are batched or distributed across workers, which makes
every bootstrap result a pure function of (seed, B, n).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateFitError, DegenerateSampleError, UnstableStatisticError

Statistic = Callable[[np.ndarray], float]  # maps an index multiset to a value


@dataclass(frozen=True)
class PairedSample:
    """Two aligned score vectors, e.g. (metric, human) over the same records."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.ndim != 1 or b.ndim != 1 or len(a) != len(b):
            raise ValueError("paired sample requires two equal-length vectors")
        if len(a) < 2:
            raise ValueError("paired sample requires length >= 2")
        if not (np.isfinite(a).all() and np.isfinite(b).all()):
            raise ValueError("paired sample contains non-finite values")

    def __len__(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class BootstrapResult:
    point: float
    boot_mean: float
    ci_low: float
    ci_high: float
    replicates: int
    seed: int


def pearson(sample: PairedSample) -> float:
    """Sample Pearson correlation; raises on zero-variance input."""
    a = sample.a - sample.a.mean()
    b = sample.b - sample.b.mean()
    denom = math.sqrt(float(a @ a) * float(b @ b))
    if denom == 0.0:
        raise DegenerateSampleError("pearson undefined: zero variance")
    return float(a @ b) / denom


def rank_average(values: np.ndarray) -> np.ndarray:
    """Fractional ranks (1-based); tied values share the average of their ranks."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(sample: PairedSample) -> float:
    """Spearman correlation: Pearson over fractional ranks with ties averaged."""
    return pearson(PairedSample(rank_average(sample.a), rank_average(sample.b)))


def resample_indices(seed: int, replicate: int, n: int) -> np.ndarray:
    """Indices for one bootstrap replicate; a pure function of its arguments."""
    gen = np.random.Generator(np.random.Philox(key=np.uint64([seed, replicate])))
    return gen.integers(0, n, size=n)


def _replicate_values(
    stats: Sequence[Statistic], n: int, B: int, seed: int, workers: int
) -> np.ndarray:
    """(len(stats), B) array of replicate statistics; NaN marks degenerate replicates."""

    def run(r: int) -> list[float]:
        idx = resample_indices(seed, r, n)
        out = []
        for stat in stats:
            try:
                out.append(float(stat(idx)))
            except DegenerateSampleError:
                out.append(math.nan)
        return out

    if workers <= 1:
        rows = [run(r) for r in range(B)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, range(B)))
    return np.asarray(rows, dtype=np.float64).T


def bootstrap_mean(
    stat: Statistic,
    n: int,
    B: int = 1000,
    seed: int = 0,
    alpha: float = 0.05,
    workers: int = 1,
) -> BootstrapResult:
    """Percentile bootstrap of ``stat`` over B resamples of size n.

    Parameters
    ----------
    stat : callable mapping an index array (a resample of 0..n-1) to a value.
    n : size of the underlying sample; resamples draw n indices with replacement.
    B, seed, alpha : replicate count, RNG seed, and two-sided CI level.
    workers : thread count; results are identical for any value.

    Returns the point estimate (stat on the identity indices), the mean of the
    replicate statistics, and the [alpha/2, 1-alpha/2] percentile interval.
    Replicates on which ``stat`` is degenerate are skipped; more than B/2 of
    them raises :class:`UnstableStatisticError`.
    """
    if B < 1:
        raise ValueError("B must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    point = float(stat(np.arange(n)))
    values = _replicate_values([stat], n, B, seed, workers)[0]
    kept = values[np.isfinite(values)]
    skipped = B - len(kept)
    if skipped > B / 2:
        raise UnstableStatisticError(
            f"statistic degenerate on {skipped}/{B} replicates", degenerate_count=skipped
        )
    ci_low, ci_high = np.quantile(kept, [alpha / 2.0, 1.0 - alpha / 2.0])
    return BootstrapResult(
        point=point,
        boot_mean=float(kept.mean()),
        ci_low=float(ci_low),
        ci_high=float(ci_high),
        replicates=B,
        seed=seed,
    )


def bootstrap_one_tailed_test(
    stat_a: Statistic,
    stat_b: Statistic,
    n: int,
    B: int = 1000,
    seed: int = 0,
    alpha: float = 0.05,
    workers: int = 1,
) -> tuple[float, bool]:
    """One-tailed percentile bootstrap test of the hypothesis stat_a > stat_b.

    Both statistics are evaluated on shared resamples; the p-value is the
    fraction of the B replicates whose difference stat_a - stat_b is <= 0.
    Replicates where either statistic is degenerate count against the
    hypothesis (conservative); more than B/2 of them is an error.
    """
    if B < 1:
        raise ValueError("B must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    values = _replicate_values([stat_a, stat_b], n, B, seed, workers)
    deltas = values[0] - values[1]
    finite = np.isfinite(deltas)
    skipped = B - int(finite.sum())
    if skipped > B / 2:
        raise UnstableStatisticError(
            f"statistic degenerate on {skipped}/{B} replicates", degenerate_count=skipped
        )
    non_positive = int((deltas[finite] <= 0.0).sum()) + skipped
    p = non_positive / B
    return p, p < alpha


def combine_ppl_len(
    ppl: Sequence[float], length: Sequence[float], human: Sequence[float]
) -> list[float]:
    """Fitted values of an OLS of human scores on standardized (-log ppl, length).

    The perplexity feature enters as -log(ppl) so that lower perplexity maps
    to a higher feature value; the sign does not change the fit quality.
    """
    ppl = np.asarray(ppl, dtype=np.float64)
    length = np.asarray(length, dtype=np.float64)
    human = np.asarray(human, dtype=np.float64)
    if not (len(ppl) == len(length) == len(human)):
        raise ValueError("ppl, length, and human must have equal lengths")
    if len(ppl) < 3:
        raise ValueError("combiner requires at least 3 examples")
    if (ppl <= 0).any():
        raise ValueError("perplexities must be positive")

    feats = np.column_stack([-np.log(ppl), length])
    stds = feats.std(axis=0)
    if (stds == 0.0).any():
        raise DegenerateFitError("zero-variance feature in PPL+Len combiner")
    feats = (feats - feats.mean(axis=0)) / stds
    design = np.column_stack([np.ones(len(ppl)), feats])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise DegenerateFitError("collinear features in PPL+Len combiner")
    beta, *_ = np.linalg.lstsq(design, human, rcond=None)
    return list(design @ beta)
