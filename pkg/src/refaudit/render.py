"""Deterministic report renderers: markdown, CSV, JSON, and the per-system
SVG scatter. Same report in, same bytes out."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .audit import AuditReport, SpuriousVerdict
from .ranking import RankingReport, SystemAggregate
from .stats import BootstrapResult

AUDIT_CSV_COLUMNS = (
    "scorer",
    "kind",
    "target",
    "point",
    "boot_mean",
    "ci_low",
    "ci_high",
    "p",
    "flagged",
)


def _boot_dict(b: BootstrapResult) -> dict:
    return {
        "point": b.point,
        "boot_mean": b.boot_mean,
        "ci_low": b.ci_low,
        "ci_high": b.ci_high,
        "replicates": b.replicates,
        "seed": b.seed,
    }


def _fmt(b: BootstrapResult) -> str:
    return f"{b.point:.4f} ({b.boot_mean:.4f}) [{b.ci_low:.4f}, {b.ci_high:.4f}]"


def render_audit_markdown(report: AuditReport) -> str:
    lines = [
        f"# Audit: {report.dataset_name} / {report.aspect}",
        "",
        f"Complete-case records: {report.complete_n} ({report.dropped_n} dropped). "
        f"B={report.B}, alpha={report.alpha}, seed={report.seed}. "
        "Cells show point (bootstrap mean) [CI].",
        "",
    ]
    correlate_names = [r.scorer_name for r in report.rows if r.kind == "correlate"]
    header = ["scorer", "kind", "corr w/ human"] + [f"corr w/ {c}" for c in correlate_names]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "|".join("---" for _ in header) + "|")
    for row in report.rows:
        cells = [row.scorer_name, row.kind, _fmt(row.corr_with_human)]
        for c in correlate_names:
            cells.append(_fmt(row.corr_with[c]) if c in row.corr_with else "")
        lines.append("| " + " | ".join(cells) + " |")
    lines.append("")
    if report.flags:
        lines.append("## Spurious flags")
        lines.append("")
        for f in report.flags:
            sig = "significant" if f.significant else "not significant"
            lines.append(
                f"- {f.metric_name} vs {f.correlate_name}: "
                f"|corr(F,S)|={abs(f.corr_FS):.4f} > |corr(F,H)|={abs(f.corr_FH):.4f} "
                f"(p={f.p:.4f}, {sig} at alpha={report.alpha})"
            )
        lines.append("")
    if report.warnings:
        lines.append("## Warnings")
        lines.append("")
        for w in report.warnings:
            lines.append(f"- {w}")
        lines.append("")
    return "\n".join(lines)


def render_audit_csv(report: AuditReport) -> str:
    """One row per (metric, correlate) pair with that pair's flag status."""
    flag_by_pair = {(f.metric_name, f.correlate_name): f for f in report.flags}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AUDIT_CSV_COLUMNS)
    for row in report.rows:
        if row.kind != "metric":
            continue
        for target, boot in row.corr_with.items():
            flag = flag_by_pair.get((row.scorer_name, target))
            writer.writerow(
                [
                    row.scorer_name,
                    row.kind,
                    target,
                    repr(boot.point),
                    repr(boot.boot_mean),
                    repr(boot.ci_low),
                    repr(boot.ci_high),
                    repr(flag.p) if flag is not None else "",
                    "true" if flag is not None else "false",
                ]
            )
    return buf.getvalue()


def audit_report_to_dict(report: AuditReport) -> dict:
    return {
        "dataset_name": report.dataset_name,
        "aspect": report.aspect,
        "config": {"B": report.B, "alpha": report.alpha, "seed": report.seed},
        "complete_n": report.complete_n,
        "dropped_n": report.dropped_n,
        "rows": [
            {
                "scorer": r.scorer_name,
                "kind": r.kind,
                "corr_with_human": _boot_dict(r.corr_with_human),
                "corr_with": {k: _boot_dict(v) for k, v in r.corr_with.items()},
            }
            for r in report.rows
        ],
        "flags": [
            {
                "metric": f.metric_name,
                "correlate": f.correlate_name,
                "corr_FH": f.corr_FH,
                "corr_FS": f.corr_FS,
                "significant": f.significant,
                "p": f.p,
            }
            for f in report.flags
        ],
        "warnings": list(report.warnings),
    }


def render_audit_json(report: AuditReport, verdicts: list[SpuriousVerdict] | None = None) -> str:
    payload = audit_report_to_dict(report)
    if verdicts is not None:
        payload["spurious_checks"] = [
            {
                "metric": v.metric_name,
                "correlate": v.correlate_name,
                "aspect": v.aspect,
                "condition1": v.condition1,
                "condition2": v.condition2,
                "is_spurious": v.is_spurious,
                "high_threshold": v.high_threshold,
                "low_threshold": v.low_threshold,
                "evidence": {k: _boot_dict(b) for k, b in v.evidence.items()},
            }
            for v in verdicts
        ]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def render_ranking_markdown(report: RankingReport) -> str:
    lines = [
        f"# Pairwise ranking: {report.dataset_name} / {report.aspect}",
        "",
        f"{report.n_systems} systems; AF subgroup (faithfulness > "
        f"{report.af_faith_threshold}, density < {report.af_density_threshold}): "
        f"{report.n_af_systems} systems.",
        "",
        "| scorer | all pairs | within AF |",
        "|---|---|---|",
    ]
    for row in report.rows:
        all_acc = f"{row.all_pairs.accuracy * 100:.2f}% ({row.all_pairs.n_pairs} pairs)"
        if row.within_af is None:
            af_acc = "absent"
        else:
            af_acc = f"{row.within_af.accuracy * 100:.2f}% ({row.within_af.n_pairs} pairs)"
        lines.append(f"| {row.scorer_name} | {all_acc} | {af_acc} |")
    lines.append("")
    return "\n".join(lines)


def render_ranking_csv(report: RankingReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "scorer",
            "all_pairs_accuracy",
            "all_pairs_n",
            "all_pairs_skipped_ties",
            "within_af_accuracy",
            "within_af_n",
            "within_af_skipped_ties",
        ]
    )
    for row in report.rows:
        cells = [
            row.scorer_name,
            repr(row.all_pairs.accuracy),
            str(row.all_pairs.n_pairs),
            str(row.all_pairs.skipped_ties),
        ]
        if row.within_af is None:
            cells += ["", "", ""]
        else:
            cells += [
                repr(row.within_af.accuracy),
                str(row.within_af.n_pairs),
                str(row.within_af.skipped_ties),
            ]
        writer.writerow(cells)
    return buf.getvalue()


def render_ranking_json(report: RankingReport) -> str:
    def pairwise(p):
        return {
            "n_pairs": p.n_pairs,
            "n_correct": p.n_correct,
            "accuracy": p.accuracy,
            "skipped_ties": p.skipped_ties,
        }

    payload = {
        "dataset_name": report.dataset_name,
        "aspect": report.aspect,
        "n_systems": report.n_systems,
        "n_af_systems": report.n_af_systems,
        "af_faith_threshold": report.af_faith_threshold,
        "af_density_threshold": report.af_density_threshold,
        "rows": [
            {
                "scorer": r.scorer_name,
                "all_pairs": pairwise(r.all_pairs),
                "within_af": pairwise(r.within_af) if r.within_af is not None else None,
            }
            for r in report.rows
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


_SVG_W, _SVG_H = 640, 480
_MARGIN = 60


def render_systems_svg(
    aggs: list[SystemAggregate],
    aspect: str = "faithfulness",
    faith_threshold: float = 4.5,
    density_threshold: float = 30.0,
) -> str:
    """Scatter of per-system (mean density, mean human score) with the
    abstractive-faithful region outlined and threshold lines drawn."""
    points = [
        (a.system_id, a.mean_correlate.get("density", 0.0), a.mean_human.get(aspect, 0.0))
        for a in aggs
    ]
    xs = [p[1] for p in points] + [density_threshold]
    ys = [p[2] for p in points] + [faith_threshold]
    x_min, x_max = 0.0, max(xs) * 1.1 or 1.0
    y_pad = 0.1 * max(max(ys) - min(ys), 1.0)
    y_min, y_max = min(ys) - y_pad, max(ys) + y_pad

    def sx(x: float) -> float:
        return _MARGIN + (x - x_min) / (x_max - x_min) * (_SVG_W - 2 * _MARGIN)

    def sy(y: float) -> float:
        return _SVG_H - _MARGIN - (y - y_min) / (y_max - y_min) * (_SVG_H - 2 * _MARGIN)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect x="0" y="0" width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
    ]
    # AF region: density below threshold, human score above threshold
    parts.append(
        f'<rect class="af-region" x="{sx(x_min):.2f}" y="{sy(y_max):.2f}" '
        f'width="{sx(density_threshold) - sx(x_min):.2f}" '
        f'height="{sy(faith_threshold) - sy(y_max):.2f}" '
        'fill="#dbe9ff" stroke="#2060c0" stroke-width="1"/>'
    )
    # axes
    parts.append(
        f'<line x1="{_MARGIN}" y1="{_SVG_H - _MARGIN}" x2="{_SVG_W - _MARGIN}" '
        f'y2="{_SVG_H - _MARGIN}" stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_SVG_H - _MARGIN}" stroke="black" stroke-width="1"/>'
    )
    for i in range(5):
        x_val = x_min + (x_max - x_min) * i / 4
        y_val = y_min + (y_max - y_min) * i / 4
        parts.append(
            f'<text x="{sx(x_val):.2f}" y="{_SVG_H - _MARGIN + 18}" font-size="10" '
            f'text-anchor="middle">{x_val:.1f}</text>'
        )
        parts.append(
            f'<text x="{_MARGIN - 8}" y="{sy(y_val):.2f}" font-size="10" '
            f'text-anchor="end">{y_val:.2f}</text>'
        )
    parts.append(
        f'<text x="{_SVG_W / 2:.2f}" y="{_SVG_H - 15}" font-size="12" '
        'text-anchor="middle">mean density</text>'
    )
    parts.append(
        f'<text x="18" y="{_SVG_H / 2:.2f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 18 {_SVG_H / 2:.2f})">mean {aspect}</text>'
    )
    # threshold lines
    parts.append(
        f'<line class="threshold-density" x1="{sx(density_threshold):.2f}" y1="{_MARGIN}" '
        f'x2="{sx(density_threshold):.2f}" y2="{_SVG_H - _MARGIN}" '
        'stroke="#2060c0" stroke-width="1" stroke-dasharray="4 3"/>'
    )
    parts.append(
        f'<line class="threshold-faith" x1="{_MARGIN}" y1="{sy(faith_threshold):.2f}" '
        f'x2="{_SVG_W - _MARGIN}" y2="{sy(faith_threshold):.2f}" '
        'stroke="#2060c0" stroke-width="1" stroke-dasharray="4 3"/>'
    )
    for system_id, x, y in points:
        parts.append(
            f'<circle class="system" cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4" '
            'fill="#c03020" fill-opacity="0.8"/>'
        )
        parts.append(
            f'<text x="{sx(x) + 6:.2f}" y="{sy(y) - 4:.2f}" font-size="9">{system_id}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_report(report, formats, out_dir, aggregates=None, verdicts=None) -> list[Path]:
    """Write the requested formats for an audit or ranking report.

    Audit reports produce audit.{md,csv,json}; ranking reports produce
    rank.{md,csv,json} and, when aggregates are supplied, systems.svg.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, content: str):
        path = out_dir / name
        path.write_text(content, encoding="utf-8")
        written.append(path)

    if isinstance(report, AuditReport):
        if "markdown" in formats or "md" in formats:
            emit("audit.md", render_audit_markdown(report))
        if "csv" in formats:
            emit("audit.csv", render_audit_csv(report))
        if "json" in formats:
            emit("audit.json", render_audit_json(report, verdicts=verdicts))
    elif isinstance(report, RankingReport):
        if "markdown" in formats or "md" in formats:
            emit("rank.md", render_ranking_markdown(report))
        if "csv" in formats:
            emit("rank.csv", render_ranking_csv(report))
        if "json" in formats:
            emit("rank.json", render_ranking_json(report))
        if ("svg" in formats or "svg-scatter" in formats) and aggregates is not None:
            emit(
                "systems.svg",
                render_systems_svg(
                    aggregates,
                    aspect=report.aspect,
                    faith_threshold=report.af_faith_threshold,
                    density_threshold=report.af_density_threshold,
                ),
            )
    else:
        raise TypeError(f"cannot render report of type {type(report).__name__}")
    return written
