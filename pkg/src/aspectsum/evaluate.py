"""Scoring prediction files against corpus references.

Joins predictions to references on instance_id, scores each pair with
ROUGE-1/2/L/Lsum F1, and reports per-method macro means as percentages
rounded to two decimals. Per-instance scores can be emitted as JSONL with
exact fraction strings, so the report means are exactly the means of the
emitted rows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .aspects import AspectInstance, from_record
from .rouge import rouge_l, rouge_lsum, rouge_n
from .segmentation import split_sentences, tokenize

METRIC_NAMES = ("rouge1", "rouge2", "rougeL", "rougeLsum")


@dataclass(frozen=True)
class MethodReport:
    method: str
    rouge1: float  # percent, 2 decimals
    rouge2: float
    rougeL: float
    rougeLsum: float
    instances: int
    missing_references: int  # references this method produced no prediction for
    unmatched_predictions: int  # predictions joining no reference


@dataclass(frozen=True)
class EvalReport:
    methods: tuple[MethodReport, ...]
    reference_count: int
    per_instance_path: str | None


def score_pair(candidate: str, reference: str) -> dict[str, Fraction]:
    """ROUGE-1/2/L/Lsum F1 for one candidate/reference text pair. The
    Lsum variant re-splits both texts into sentences."""
    cand_tokens = tokenize(candidate)
    ref_tokens = tokenize(reference)
    cand_sents = [s.tokens for s in split_sentences(candidate)]
    ref_sents = [s.tokens for s in split_sentences(reference)]
    return {
        "rouge1": rouge_n(cand_tokens, ref_tokens, 1).f1,
        "rouge2": rouge_n(cand_tokens, ref_tokens, 2).f1,
        "rougeL": rouge_l(cand_tokens, ref_tokens).f1,
        "rougeLsum": rouge_lsum(cand_sents, ref_sents).f1,
    }


def reference_text(instance: AspectInstance) -> str:
    return " ".join(instance.summary_sentences)


def evaluate(predictions: Iterable[Mapping],
             references: Iterable[AspectInstance],
             per_instance_path: str | Path | None = None) -> EvalReport:
    """Join predictions to references and produce the per-method report.

    Fatal errors: a duplicate (method, instance_id) in predictions, a
    duplicate instance_id in references, or any method joining zero
    references.
    """
    ref_texts: dict[str, str] = {}
    for instance in references:
        if instance.instance_id in ref_texts:
            raise ValueError(f"duplicate instance_id in references: {instance.instance_id}")
        ref_texts[instance.instance_id] = reference_text(instance)
    if not ref_texts:
        raise ValueError("no references to evaluate against")

    by_method: dict[str, dict[str, str]] = {}
    unmatched: dict[str, int] = {}
    for record in predictions:
        method = record["method"]
        instance_id = record["instance_id"]
        candidates = by_method.setdefault(method, {})
        if instance_id in candidates:
            raise ValueError(
                f"duplicate instance_id in predictions for {method}: {instance_id}")
        candidates[instance_id] = record["candidate"]
        if instance_id not in ref_texts:
            unmatched[method] = unmatched.get(method, 0) + 1
    if not by_method:
        raise ValueError("no predictions to evaluate")

    rows: list[dict] = []
    reports: list[MethodReport] = []
    for method in sorted(by_method):
        candidates = by_method[method]
        joined = sorted(set(candidates) & set(ref_texts))
        if not joined:
            raise ValueError(f"no predictions for {method} match any reference")
        sums = {name: Fraction(0) for name in METRIC_NAMES}
        for instance_id in joined:
            scores = score_pair(candidates[instance_id], ref_texts[instance_id])
            for name in METRIC_NAMES:
                sums[name] += scores[name]
            rows.append({
                "method": method,
                "instance_id": instance_id,
                "scores": {name: str(scores[name]) for name in METRIC_NAMES},
                "percent": {name: float(scores[name] * 100) for name in METRIC_NAMES},
            })
        count = len(joined)
        means = {name: round(float(sums[name] / count * 100), 2)
                 for name in METRIC_NAMES}
        reports.append(MethodReport(
            method=method,
            rouge1=means["rouge1"],
            rouge2=means["rouge2"],
            rougeL=means["rougeL"],
            rougeLsum=means["rougeLsum"],
            instances=count,
            missing_references=len(ref_texts) - count,
            unmatched_predictions=unmatched.get(method, 0),
        ))

    path_str: str | None = None
    if per_instance_path is not None:
        path = Path(per_instance_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            for row in rows:
                handle.write(json.dumps(row, ensure_ascii=False) + "\n")
        path_str = str(path)

    return EvalReport(methods=tuple(reports), reference_count=len(ref_texts),
                      per_instance_path=path_str)


def load_predictions(path: str | Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(json.loads(line))
    return records


def load_references(paths: Sequence[str | Path]) -> list[AspectInstance]:
    instances = []
    for path in paths:
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    instances.append(from_record(json.loads(line)))
    return instances


def report_json(report: EvalReport) -> str:
    payload = {
        "reference_count": report.reference_count,
        "per_instance_file": report.per_instance_path,
        "methods": {
            row.method: {
                "rouge1": row.rouge1,
                "rouge2": row.rouge2,
                "rougeL": row.rougeL,
                "rougeLsum": row.rougeLsum,
                "instances": row.instances,
                "missing_references": row.missing_references,
                "unmatched_predictions": row.unmatched_predictions,
            }
            for row in report.methods
        },
    }
    return json.dumps(payload, ensure_ascii=False, indent=2)


def report_table(report: EvalReport) -> str:
    """Aligned plain-text table of the per-method means."""
    header = ("method", "rouge1", "rouge2", "rougeL", "rougeLsum", "instances")
    rows = [header] + [
        (row.method, f"{row.rouge1:.2f}", f"{row.rouge2:.2f}",
         f"{row.rougeL:.2f}", f"{row.rougeLsum:.2f}", str(row.instances))
        for row in report.methods
    ]
    widths = [max(len(row[col]) for row in rows) for col in range(len(header))]
    lines = []
    for i, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])]
        cells += [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
