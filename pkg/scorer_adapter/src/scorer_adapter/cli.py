"""score-ppl: compute perplexity correlates and merge them into dataset files."""

from __future__ import annotations

import argparse
import sys

from .models import BUILTIN_MODEL_ID, ModelUnavailableError
from .scoring import merge_scores, save_score_file, score_perplexity


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="score-ppl",
        description="Score output-text perplexity and emit a score file.",
    )
    parser.add_argument("--data", required=True, help="workbench dataset (JSONL)")
    parser.add_argument(
        "--model",
        default=BUILTIN_MODEL_ID,
        help=f"model id: a causal LM name like gpt2, or {BUILTIN_MODEL_ID}",
    )
    parser.add_argument("--out", required=True, help="score file to write")
    parser.add_argument(
        "--merge-into",
        help="optionally merge the scores into this dataset file after writing",
    )
    args = parser.parse_args(argv)

    try:
        score_file = score_perplexity(args.data, args.model)
        save_score_file(score_file, args.out)
        print(
            f"score-ppl: {len(score_file.rows)} records scored with {args.model} "
            f"({score_file.model_version}), {len(score_file.skipped)} skipped -> {args.out}"
        )
        if args.merge_into:
            merged = merge_scores(args.merge_into, args.out)
            print(f"score-ppl: merged into {merged}")
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ModelUnavailableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
