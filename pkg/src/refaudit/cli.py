"""Command-line entry point.

Subcommands: correlates, audit, rank, adversary {train,eval,check,synth}.
Option resolution order: command-line flag, then REFAUDIT_<NAME> environment
variable, then the --config JSON file, then the built-in default. Every
command echoes its fully resolved configuration to stdout and writes it next
to its outputs, so runs are reproducible from the artifacts alone.

Exit codes: 0 success, 1 I/O error, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import adversary, audit, overlap, ranking, render
from .corpus import load_dataset, save_dataset
from .errors import NumericalError, ValidationError

ENV_PREFIX = "REFAUDIT_"

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _resolve(args: argparse.Namespace, config_file: dict, defaults: dict) -> dict:
    """Merge flag/env/config-file/default values for every known option."""
    resolved = {}
    for key, default in defaults.items():
        value = getattr(args, key, None)
        if value is None:
            env = os.environ.get(ENV_PREFIX + key.upper())
            if env is not None:
                value = env
            elif key in config_file:
                value = config_file[key]
            else:
                value = default
        if value is not None and default is not None and not isinstance(value, type(default)):
            if isinstance(default, bool):
                value = str(value).lower() in ("1", "true", "yes")
            elif isinstance(default, int):
                value = int(value)
            elif isinstance(default, float):
                value = float(value)
        resolved[key] = value
    return resolved


def _echo_config(resolved: dict, sidecar: Path | None) -> None:
    line = json.dumps(resolved, sort_keys=True)
    print(f"config: {line}")
    if sidecar is not None:
        sidecar.parent.mkdir(parents=True, exist_ok=True)
        sidecar.write_text(line + "\n", encoding="utf-8")


def _split_csv(value) -> list[str]:
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [part.strip() for part in str(value).split(",") if part.strip()]


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_correlates(args) -> int:
    defaults = {
        "data": None,
        "out": None,
        "which": "coverage,density,length",
        "lenient": False,
        "label": "eval",
        "seed": 0,  # unused by this command; echoed for config uniformity
    }
    cfg = _resolve(args, _load_config_file(args.config), defaults)
    if not cfg["data"] or not cfg["out"]:
        print("error: --data and --out are required", file=sys.stderr)
        return EXIT_VALIDATION
    out_path = Path(cfg["out"])
    _echo_config(cfg, out_path.with_name(out_path.name + ".run.json"))
    dataset = load_dataset(
        cfg["data"], strict=not cfg["lenient"], distribution_label=cfg["label"]
    )
    annotated = overlap.annotate_correlates(dataset, which=_split_csv(cfg["which"]))
    save_dataset(annotated, out_path)
    print(f"correlates: {len(annotated)} records annotated, 0 errors -> {out_path}")
    return EXIT_OK


def cmd_audit(args) -> int:
    defaults = {
        "data": None,
        "out": "out",
        "aspect": "faithfulness",
        "metrics": None,
        "correlates": "coverage,density,length",
        "bootstrap": 1000,
        "seed": 0,
        "alpha": 0.05,
        "format": "md,csv,json",
        "workers": 1,
        "lenient": False,
        "test_data": None,
        "spurious_high": 0.3,
        "spurious_low": 0.1,
    }
    cfg = _resolve(args, _load_config_file(args.config), defaults)
    if not cfg["data"] or not cfg["metrics"]:
        print("error: --data and --metrics are required", file=sys.stderr)
        return EXIT_VALIDATION
    out_dir = Path(cfg["out"])
    _echo_config(cfg, out_dir / "run_config.json")
    dataset = load_dataset(cfg["data"], strict=not cfg["lenient"])
    metrics = _split_csv(cfg["metrics"])
    correlates = _split_csv(cfg["correlates"])
    report = audit.example_level_audit(
        dataset,
        metrics=metrics,
        correlates=correlates,
        aspect=cfg["aspect"],
        B=cfg["bootstrap"],
        seed=cfg["seed"],
        alpha=cfg["alpha"],
        workers=cfg["workers"],
    )
    verdicts = None
    if cfg["test_data"]:
        d_test = load_dataset(
            cfg["test_data"], strict=not cfg["lenient"], distribution_label="test"
        )
        verdicts = [
            audit.spurious_correlate_check(
                dataset,
                d_test,
                metric=m,
                correlate=c,
                aspect=cfg["aspect"],
                high=cfg["spurious_high"],
                low=cfg["spurious_low"],
                B=cfg["bootstrap"],
                seed=cfg["seed"],
                workers=cfg["workers"],
            )
            for m in metrics
            for c in correlates
        ]
    written = render.render_report(report, _split_csv(cfg["format"]), out_dir, verdicts=verdicts)
    for w in report.warnings:
        print(f"warning: {w}")
    print(f"audit: {len(report.rows)} scorers, {len(report.flags)} flags -> {out_dir}")
    for path in written:
        print(f"  wrote {path}")
    return EXIT_OK


def cmd_rank(args) -> int:
    defaults = {
        "data": None,
        "out": "out",
        "aspect": "faithfulness",
        "scorers": None,
        "af_faith": ranking.AF_FAITH_THRESHOLD,
        "af_density": ranking.AF_DENSITY_THRESHOLD,
        "format": "md,csv,json,svg",
        "lenient": False,
        "seed": 0,  # unused by this command; echoed for config uniformity
    }
    cfg = _resolve(args, _load_config_file(args.config), defaults)
    if not cfg["data"] or not cfg["scorers"]:
        print("error: --data and --scorers are required", file=sys.stderr)
        return EXIT_VALIDATION
    out_dir = Path(cfg["out"])
    _echo_config(cfg, out_dir / "run_config.json")
    dataset = load_dataset(cfg["data"], strict=not cfg["lenient"])
    report = ranking.ranking_report(
        dataset,
        scorers=_split_csv(cfg["scorers"]),
        aspect=cfg["aspect"],
        faith_threshold=cfg["af_faith"],
        density_threshold=cfg["af_density"],
    )
    aggs = ranking.aggregate_systems(dataset)
    written = render.render_report(report, _split_csv(cfg["format"]), out_dir, aggregates=aggs)
    af_note = f"{report.n_af_systems} AF systems" if report.n_af_systems >= 2 else "AF column absent"
    print(f"rank: {report.n_systems} systems, {af_note} -> {out_dir}")
    for path in written:
        print(f"  wrote {path}")
    return EXIT_OK


def _load_benchmark_file(path) -> adversary.SyntheticSplit:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("kind") != "synthetic-benchmark":
            raise ValidationError(f"{path} is not a synthetic benchmark file")
        features, labels, dens = [], [], []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            features.append(row["features"])
            labels.append(row["label"])
            dens.append(row["density"])
    return adversary.SyntheticSplit(
        features=np.asarray(features, dtype=np.float64),
        labels=np.asarray(labels, dtype=np.float64),
        density=np.asarray(dens, dtype=np.float64),
        distribution_label=header.get("split", "eval"),
        strength=float(header.get("strength", 0.0)),
        seed=int(header.get("seed", 0)),
    )


def _save_benchmark_file(split: adversary.SyntheticSplit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "kind": "synthetic-benchmark",
            "version": 1,
            "split": split.distribution_label,
            "strength": split.strength,
            "seed": split.seed,
            "n": len(split),
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for i in range(len(split)):
            fh.write(
                json.dumps(
                    {
                        "features": split.features[i].tolist(),
                        "label": float(split.labels[i]),
                        "density": float(split.density[i]),
                    }
                )
                + "\n"
            )


def _load_train_data(path, aspect: str, faith_threshold: float):
    """Synthetic benchmark files carry features inline; dataset files are
    featurized from their texts."""
    with open(path, encoding="utf-8") as fh:
        first = json.loads(fh.readline())
    if isinstance(first, dict) and first.get("kind") == "synthetic-benchmark":
        return _load_benchmark_file(path)
    dataset = load_dataset(path)
    return adversary.features_from_dataset(dataset, aspect=aspect, faith_threshold=faith_threshold)


def cmd_adversary(args) -> int:
    defaults = {
        "data": None,
        "out": None,
        "model": None,
        "test": None,
        "seed": 0,
        "epochs": 30,
        "lr": 0.05,
        "batch_size": 32,
        "gamma": 10.0,
        "lambda_max": 1.0,
        "hidden": "32,16",
        "baseline": False,
        "aspect": "faithfulness",
        "faith_threshold": 4.0,
        "n_train": 2000,
        "n_test": 2000,
        "strength": 0.9,
        "epsilon": 1e-5,
    }
    cfg = _resolve(args, _load_config_file(args.config), defaults)
    action = args.action

    if action == "synth":
        if not cfg["out"]:
            print("error: --out directory is required", file=sys.stderr)
            return EXIT_VALIDATION
        out_dir = Path(cfg["out"])
        out_dir.mkdir(parents=True, exist_ok=True)
        _echo_config(cfg, out_dir / "run_config.json")
        train_split, test_split = adversary.generate_synthetic_benchmark(
            cfg["n_train"], cfg["n_test"], cfg["strength"], seed=cfg["seed"]
        )
        _save_benchmark_file(train_split, out_dir / "train.jsonl")
        _save_benchmark_file(test_split, out_dir / "test.jsonl")
        print(f"synth: wrote {out_dir / 'train.jsonl'} and {out_dir / 'test.jsonl'}")
        return EXIT_OK

    if action == "check":
        _echo_config(cfg, None)
        gen = np.random.Generator(np.random.Philox(key=np.uint64([cfg["seed"], 99])))
        net = adversary.AdversarialNet.init(input_dim=8, hidden=(6, 4), seed=cfg["seed"])
        X = gen.standard_normal((8, 8))
        labels = gen.integers(0, 2, size=8).astype(float)
        dens = gen.standard_normal(8)
        err = adversary.gradient_check(net, list(zip(X, labels, dens)), epsilon=cfg["epsilon"])
        print(f"gradient check: max relative error {err:.3e}")
        return EXIT_OK if err < 1e-4 else EXIT_NUMERICAL

    if action == "train":
        if not cfg["data"] or not cfg["out"]:
            print("error: --data and --out are required", file=sys.stderr)
            return EXIT_VALIDATION
        out_path = Path(cfg["out"])
        _echo_config(cfg, out_path.with_name(out_path.name + ".run.json"))
        data = _load_train_data(cfg["data"], cfg["aspect"], cfg["faith_threshold"])
        config = adversary.TrainConfig(
            learning_rate=cfg["lr"],
            epochs=cfg["epochs"],
            batch_size=cfg["batch_size"],
            seed=cfg["seed"],
            gamma=cfg["gamma"],
            lambda_max=cfg["lambda_max"],
            hidden=tuple(int(w) for w in _split_csv(cfg["hidden"])),
        )
        net = adversary.train(data, config, adversarial=not cfg["baseline"])
        adversary.save_checkpoint(net, out_path)
        print(f"train: model saved to {out_path}")
        if cfg["test"]:
            test_split = _load_benchmark_file(cfg["test"])
            preds = adversary.score_batch(net, test_split.features)
            acc = float(((preds >= 0.5) == (test_split.labels >= 0.5)).mean())
            probe = adversary.probe_density(net, test_split)
            print(
                f"test accuracy: {acc:.4f}, density probe spearman: "
                f"{probe['probe_spearman']:.4f}, r2: {probe['probe_r2']:.4f}"
            )
        return EXIT_OK

    if action == "eval":
        if not cfg["data"] or not cfg["model"] or not cfg["out"]:
            print("error: --data, --model, and --out are required", file=sys.stderr)
            return EXIT_VALIDATION
        out_path = Path(cfg["out"])
        _echo_config(cfg, out_path.with_name(out_path.name + ".run.json"))
        net = adversary.load_checkpoint(cfg["model"])
        dataset = load_dataset(cfg["data"])
        from .corpus import Dataset, tokenize
        from dataclasses import replace as _replace

        new_records = []
        for rec in dataset.records:
            fv = adversary.featurize(
                tokenize(rec.source_text, origin="source"),
                tokenize(rec.output_text, origin="output"),
            )
            merged = dict(rec.metric_scores)
            merged["adversarial"] = adversary.score(net, fv)
            new_records.append(_replace(rec, metric_scores=merged))
        save_dataset(
            Dataset(
                records=tuple(new_records),
                name=dataset.name,
                distribution_label=dataset.distribution_label,
            ),
            out_path,
        )
        print(f"eval: metric column 'adversarial' written for {len(new_records)} records")
        return EXIT_OK

    print(f"error: unknown adversary action {action!r}", file=sys.stderr)
    return EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refaudit",
        description="Audit reference-free NLG metrics against spurious correlates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--data", help="input dataset (JSONL)")
        p.add_argument("--out", help="output file or directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--lenient", action="store_const", const=True,
                       help="warn on unknown dataset keys instead of failing")

    p = sub.add_parser("correlates", help="annotate word-overlap correlates")
    common(p)
    p.add_argument("--which", help="comma list of coverage,density,length")
    p.add_argument("--label", help="distribution label for the dataset")
    p.set_defaults(func=cmd_correlates)

    p = sub.add_parser("audit", help="example-level spurious-correlation audit")
    common(p)
    p.add_argument("--aspect")
    p.add_argument("--metrics", help="comma list of metric score names")
    p.add_argument("--correlates", help="comma list of correlate score names")
    p.add_argument("--bootstrap", type=int, help="bootstrap replicates B")
    p.add_argument("--alpha", type=float)
    p.add_argument("--format", help="comma list of md,csv,json")
    p.add_argument("--workers", type=int)
    p.add_argument("--test-data", dest="test_data",
                   help="test-distribution dataset for the two-condition check")
    p.add_argument("--spurious-high", dest="spurious_high", type=float)
    p.add_argument("--spurious-low", dest="spurious_low", type=float)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("rank", help="system-level pairwise ranking report")
    common(p)
    p.add_argument("--aspect")
    p.add_argument("--scorers", help="comma list of metric/correlate names")
    p.add_argument("--af-faith", dest="af_faith", type=float)
    p.add_argument("--af-density", dest="af_density", type=float)
    p.add_argument("--format", help="comma list of md,csv,json,svg")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("adversary", help="adversarial faithfulness model driver")
    p.add_argument("action", choices=["train", "eval", "check", "synth"])
    common(p)
    p.add_argument("--model", help="model checkpoint path (eval)")
    p.add_argument("--test", help="held-out synthetic benchmark file (train)")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--lambda-max", dest="lambda_max", type=float)
    p.add_argument("--hidden", help="comma list of hidden layer widths")
    p.add_argument("--baseline", action="store_const", const=True,
                   help="train with the reversal strength held at zero")
    p.add_argument("--aspect")
    p.add_argument("--faith-threshold", dest="faith_threshold", type=float)
    p.add_argument("--n-train", dest="n_train", type=int)
    p.add_argument("--n-test", dest="n_test", type=int)
    p.add_argument("--strength", type=float)
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_adversary)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
