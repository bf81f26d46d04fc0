"""Data model, tokenization, and ingestion of annotated evaluation datasets.

A dataset file is newline-delimited JSON, one record per line:

    {"id": "...", "system": "...", "source": "...", "output": "...",
     "human": {"faithfulness": 4.0}, "metrics": {"factcc": 0.7},
     "correlates": {"density": 2.1}}

``correlates`` is optional. Unknown keys are rejected in strict mode and
warned about in lenient mode. All scores must be finite numbers.
"""

from __future__ import annotations

import json
import math
import re
import sys
from dataclasses import dataclass, field, replace

from .errors import DatasetError

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

_RECORD_KEYS = ("id", "system", "source", "output", "human", "metrics", "correlates")
_REQUIRED_KEYS = ("id", "system", "source", "output", "human", "metrics")


@dataclass(frozen=True)
class TokenSequence:
    """Normalized token stream for one text, tagged with its origin."""

    tokens: tuple[str, ...]
    origin: str = "output"  # "source" or "output"

    def __len__(self) -> int:
        return len(self.tokens)


def tokenize(text: str, origin: str = "output") -> TokenSequence:
    """Casefold and split on maximal runs of non-alphanumeric characters.

    Deterministic and case-insensitive; empty input yields an empty sequence.
    casefold rather than lower so that caseless equality survives characters
    whose upper/lower round trip is lossy (micro sign, sharp s).
    """
    return TokenSequence(tokens=tuple(_TOKEN_RE.findall(text.casefold())), origin=origin)


@dataclass(frozen=True)
class ExampleRecord:
    """One (source, output) pair with its human, metric, and correlate scores."""

    id: str
    system_id: str
    source_text: str
    output_text: str
    human_scores: dict[str, float] = field(default_factory=dict)
    metric_scores: dict[str, float] = field(default_factory=dict)
    correlate_scores: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Dataset:
    """Immutable, ordered collection of records from one distribution."""

    records: tuple[ExampleRecord, ...]
    name: str
    distribution_label: str  # "eval", "test", or any other explicit label

    def __post_init__(self):
        if not self.records:
            raise DatasetError(f"dataset {self.name!r} is empty")
        if not self.distribution_label:
            raise DatasetError(f"dataset {self.name!r} has no distribution label")

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class Issue:
    """One missing-score problem found by :func:`validate`."""

    record_id: str
    field: str
    message: str


def _check_scores(scores: dict, key: str, line: int) -> dict[str, float]:
    if not isinstance(scores, dict):
        raise DatasetError(f"{key!r} must be an object of numbers", line)
    out: dict[str, float] = {}
    for name, value in scores.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DatasetError(f"{key}.{name} is not a number", line)
        value = float(value)
        if not math.isfinite(value):
            raise DatasetError(f"{key}.{name} is not finite", line)
        out[str(name)] = value
    return out


def _parse_record(raw: dict, line: int, strict: bool, warn) -> ExampleRecord:
    unknown = [k for k in raw if k not in _RECORD_KEYS]
    if unknown:
        if strict:
            raise DatasetError(f"unknown keys {unknown}", line)
        warn(f"line {line}: ignoring unknown keys {unknown}")
    missing = [k for k in _REQUIRED_KEYS if k not in raw]
    if missing:
        raise DatasetError(f"missing required fields {missing}", line)
    for key in ("id", "system", "source", "output"):
        if not isinstance(raw[key], str):
            raise DatasetError(f"{key!r} must be a string", line)
    human = _check_scores(raw["human"], "human", line)
    faith = human.get("faithfulness")
    if faith is not None and not (1.0 <= faith <= 5.0):
        raise DatasetError(f"human.faithfulness {faith} outside [1, 5]", line)
    return ExampleRecord(
        id=raw["id"],
        system_id=raw["system"],
        source_text=raw["source"],
        output_text=raw["output"],
        human_scores=human,
        metric_scores=_check_scores(raw["metrics"], "metrics", line),
        correlate_scores=_check_scores(raw.get("correlates", {}), "correlates", line),
    )


def load_dataset(
    path,
    *,
    name: str | None = None,
    distribution_label: str = "eval",
    strict: bool = True,
    warn=None,
) -> Dataset:
    """Load and validate a JSONL dataset file, preserving record order.

    Raises :class:`DatasetError` naming the offending line on parse errors,
    duplicate ids, missing fields, or non-finite scores.
    """
    path = str(path)
    if warn is None:
        warn = lambda msg: print(f"warning: {msg}", file=sys.stderr)
    records: list[ExampleRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"invalid JSON: {exc.msg}", line_no) from exc
            if not isinstance(raw, dict):
                raise DatasetError("record is not an object", line_no)
            record = _parse_record(raw, line_no, strict, warn)
            if record.id in seen:
                raise DatasetError(f"duplicate id {record.id!r}", line_no)
            seen.add(record.id)
            records.append(record)
    if name is None:
        name = re.sub(r"\.jsonl?$", "", path.rsplit("/", 1)[-1])
    return Dataset(records=tuple(records), name=name, distribution_label=distribution_label)


def save_dataset(dataset: Dataset, path) -> None:
    """Write a dataset back out in the documented schema.

    Score maps are emitted with sorted keys so identical datasets always
    produce identical bytes; finite score values round-trip exactly.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for rec in dataset.records:
            obj = {
                "id": rec.id,
                "system": rec.system_id,
                "source": rec.source_text,
                "output": rec.output_text,
                "human": dict(sorted(rec.human_scores.items())),
                "metrics": dict(sorted(rec.metric_scores.items())),
            }
            if rec.correlate_scores:
                obj["correlates"] = dict(sorted(rec.correlate_scores.items()))
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def validate(
    dataset: Dataset,
    required_aspects: list[str] | tuple[str, ...] = (),
    required_metrics: list[str] | tuple[str, ...] = (),
    required_correlates: list[str] | tuple[str, ...] = (),
) -> list[Issue]:
    """Report every record missing a required score. Issues are data, not failures."""
    issues: list[Issue] = []
    for rec in dataset.records:
        for aspect in required_aspects:
            if aspect not in rec.human_scores:
                issues.append(Issue(rec.id, f"human.{aspect}", "missing human aspect"))
        for metric in required_metrics:
            if metric not in rec.metric_scores:
                issues.append(Issue(rec.id, f"metrics.{metric}", "missing metric score"))
        for correlate in required_correlates:
            if correlate not in rec.correlate_scores:
                issues.append(Issue(rec.id, f"correlates.{correlate}", "missing correlate score"))
    return issues


def with_correlates(record: ExampleRecord, updates: dict[str, float]) -> ExampleRecord:
    """Copy of ``record`` with correlate scores merged in (existing keys overwritten)."""
    merged = dict(record.correlate_scores)
    merged.update(updates)
    return replace(record, correlate_scores=merged)
