"""Perplexity scoring and score-file merging for workbench dataset files.

Score files are newline-delimited JSON with a single header line:

    {"kind": "score-file", "version": 1, "model": "...", "model_version": "...",
     "n": 3, "skipped": []}
    {"id": "r0", "correlates": {"perplexity": 41.3}}
    ...

Datasets are consumed and produced in the workbench JSONL schema; this
package never imports the workbench itself.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .models import load_model

SCORE_FILE_VERSION = 1


@dataclass
class ScoreFile:
    model: str
    model_version: str
    rows: list[dict] = field(default_factory=list)  # {"id": ..., "correlates": {"perplexity": ...}}
    skipped: list[str] = field(default_factory=list)

    def perplexities(self) -> dict[str, float]:
        return {row["id"]: row["correlates"]["perplexity"] for row in self.rows}


def _read_dataset_rows(path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {line_no}: invalid JSON: {exc.msg}") from exc
            if "id" not in row:
                raise ValueError(f"{path}: line {line_no}: record has no id")
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: dataset is empty")
    return rows


def score_perplexity(dataset_path, model_id: str, warn=None) -> ScoreFile:
    """Perplexity of every record's output text: exp(mean token NLL).

    Records with empty output text are skipped with a warning and listed in
    the score file header. Scores are deterministic for a fixed model
    version; leading and trailing whitespace never changes a score.
    """
    if warn is None:
        warn = lambda msg: print(f"warning: {msg}", file=sys.stderr)
    model = load_model(model_id)
    result = ScoreFile(model=model_id, model_version=model.version)
    for row in _read_dataset_rows(dataset_path):
        text = str(row.get("output", "")).strip()
        if not text:
            warn(f"record {row['id']!r} has empty output, skipped")
            result.skipped.append(row["id"])
            continue
        ppl = math.exp(model.mean_nll(text))
        result.rows.append({"id": row["id"], "correlates": {"perplexity": ppl}})
    return result


def save_score_file(score_file: ScoreFile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "kind": "score-file",
            "version": SCORE_FILE_VERSION,
            "model": score_file.model,
            "model_version": score_file.model_version,
            "n": len(score_file.rows),
            "skipped": score_file.skipped,
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for row in score_file.rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def load_score_file(path) -> ScoreFile:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("kind") != "score-file":
            raise ValueError(f"{path} is not a score file")
        result = ScoreFile(
            model=header["model"],
            model_version=header["model_version"],
            skipped=list(header.get("skipped", [])),
        )
        for line in fh:
            line = line.strip()
            if line:
                result.rows.append(json.loads(line))
    return result


def merge_scores(dataset_path, score_path, out_path=None) -> Path:
    """Write the dataset with correlates.perplexity filled from a score file.

    Every score-file id must exist in the dataset; re-merging the same file
    is idempotent. Returns the output path (the dataset path by default).
    """
    score_file = load_score_file(score_path)
    rows = _read_dataset_rows(dataset_path)
    by_id = {row["id"]: row for row in rows}
    unknown = [rid for rid in score_file.perplexities() if rid not in by_id]
    if unknown:
        raise ValueError(f"score file names ids missing from the dataset: {unknown}")
    for rid, ppl in score_file.perplexities().items():
        row = by_id[rid]
        correlates = dict(row.get("correlates", {}))
        correlates["perplexity"] = ppl
        row["correlates"] = dict(sorted(correlates.items()))
    out_path = Path(out_path if out_path is not None else dataset_path)
    with open(out_path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return out_path
