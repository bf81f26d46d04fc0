"""Extractive-fragment analysis: the word-overlap spurious correlates.

Coverage is the fraction of summary tokens that sit inside fragments copied
verbatim from the article. Density is the summary-length-normalized sum of
squared fragment lengths, so a fully extractive summary of n tokens has
density n while a heavily paraphrased one stays near zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Dataset, TokenSequence, tokenize, with_correlates
from .errors import AnnotationError, UndefinedMeasureError

COVERAGE = "coverage"
DENSITY = "density"
LENGTH = "length"
ALL_CORRELATES = (COVERAGE, DENSITY, LENGTH)


@dataclass(frozen=True)
class Fragment:
    """One token span shared verbatim between article and summary."""

    article_start: int
    summary_start: int
    length: int


@dataclass(frozen=True)
class FragmentSet:
    """Greedily extracted fragments of one summary, sorted by summary position."""

    fragments: tuple[Fragment, ...]
    summary_length: int

    def __post_init__(self):
        if self.summary_length < 0:
            raise ValueError("summary_length must be non-negative")
        prev_end = 0
        for frag in self.fragments:
            if frag.length < 1:
                raise ValueError("fragment length must be >= 1")
            if frag.summary_start < prev_end:
                raise ValueError("fragments must be disjoint and sorted by summary_start")
            prev_end = frag.summary_start + frag.length
        if prev_end > self.summary_length:
            raise ValueError("fragments extend past the summary")

    def lengths(self) -> tuple[int, ...]:
        return tuple(f.length for f in self.fragments)


def extract_fragments(article: TokenSequence, summary: TokenSequence) -> FragmentSet:
    """Greedy left-to-right extraction of shared fragments.

    At each summary position, take the longest token match starting there and
    anywhere in the article (ties broken by the smallest article position),
    emit it, and continue after it; positions with no match are skipped.
    """
    if len(summary) == 0:
        raise UndefinedMeasureError("overlap measures are undefined for an empty summary")
    art = article.tokens
    summ = summary.tokens
    positions: dict[str, list[int]] = {}
    for j, token in enumerate(art):
        positions.setdefault(token, []).append(j)

    fragments: list[Fragment] = []
    i = 0
    while i < len(summ):
        best_len = 0
        best_start = -1
        for j in positions.get(summ[i], ()):
            length = 1
            while (
                i + length < len(summ)
                and j + length < len(art)
                and summ[i + length] == art[j + length]
            ):
                length += 1
            if length > best_len:  # strict: first (smallest) article start wins ties
                best_len = length
                best_start = j
        if best_len >= 1:
            fragments.append(Fragment(article_start=best_start, summary_start=i, length=best_len))
            i += best_len
        else:
            i += 1
    return FragmentSet(fragments=tuple(fragments), summary_length=len(summ))


def coverage(fs: FragmentSet) -> float:
    """Fraction of summary tokens covered by extracted fragments, in [0, 1]."""
    if fs.summary_length == 0:
        raise UndefinedMeasureError("coverage is undefined for an empty summary")
    return sum(fs.lengths()) / fs.summary_length


def density(fs: FragmentSet) -> float:
    """Sum of squared fragment lengths divided by summary length."""
    if fs.summary_length == 0:
        raise UndefinedMeasureError("density is undefined for an empty summary")
    return sum(l * l for l in fs.lengths()) / fs.summary_length


def length_correlate(output: TokenSequence) -> int:
    """Token count of the output."""
    return len(output)


def annotate_correlates(dataset: Dataset, which=ALL_CORRELATES) -> Dataset:
    """Return a dataset copy with the requested correlate scores filled in.

    Existing values are overwritten. Records with empty outputs break the
    overlap measures; their ids are collected and reported in one error.
    """
    which = tuple(which)
    unknown = [w for w in which if w not in ALL_CORRELATES]
    if unknown:
        raise ValueError(f"unknown correlates {unknown}; expected subset of {ALL_CORRELATES}")
    needs_overlap = COVERAGE in which or DENSITY in which

    empty_ids: list[str] = []
    new_records = []
    for rec in dataset.records:
        out_tokens = tokenize(rec.output_text, origin="output")
        updates: dict[str, float] = {}
        if LENGTH in which:
            updates[LENGTH] = float(length_correlate(out_tokens))
        if needs_overlap:
            if len(out_tokens) == 0:
                empty_ids.append(rec.id)
            else:
                src_tokens = tokenize(rec.source_text, origin="source")
                fs = extract_fragments(src_tokens, out_tokens)
                if COVERAGE in which:
                    updates[COVERAGE] = coverage(fs)
                if DENSITY in which:
                    updates[DENSITY] = density(fs)
        new_records.append(with_correlates(rec, updates))
    if empty_ids:
        raise AnnotationError(
            f"overlap correlates undefined for records with empty output: {empty_ids}",
            record_ids=empty_ids,
        )
    return Dataset(
        records=tuple(new_records),
        name=dataset.name,
        distribution_label=dataset.distribution_label,
    )
