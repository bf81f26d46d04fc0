import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


def write_jsonl(path: Path, rows: list[dict]) -> Path:
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    return path


def make_record(
    id: str = "r1",
    system: str = "m0",
    source: str = "the cat sat on the mat",
    output: str = "the cat sat",
    human: dict | None = None,
    metrics: dict | None = None,
    correlates: dict | None = None,
) -> dict:
    row = {
        "id": id,
        "system": system,
        "source": source,
        "output": output,
        "human": human if human is not None else {"faithfulness": 4.0},
        "metrics": metrics if metrics is not None else {"factcc": 0.5},
    }
    if correlates is not None:
        row["correlates"] = correlates
    return row


@pytest.fixture
def dataset_file(tmp_path):
    def build(rows: list[dict], name: str = "data.jsonl") -> Path:
        return write_jsonl(tmp_path / name, rows)

    return build
