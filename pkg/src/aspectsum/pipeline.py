"""End-to-end corpus build: stream, clean, score, threshold, split, write.

Determinism contract: for a fixed (dump, configuration) the emitted corpus
is byte-identical across runs and across worker counts. Workers are pure
functions of a raw page; the parent consumes results in dump order, spools
scored pages to a temporary file, and writes final records sorted by
(page id, aspect ordinal). Nothing environment-dependent (worker count,
timestamps, paths of temporaries) reaches the output.

A sweep over several thresholds reuses each page's scores: scoring runs
once, threshold filtering runs per requested value into per-threshold
subdirectories.
"""

from __future__ import annotations

import json
import multiprocessing
import os
import pickle
import tempfile
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

from .aspects import (
    DEFAULT_SPLIT_RATIOS,
    DEFAULT_SPLIT_SEED,
    DEFAULT_THRESHOLD,
    SPLIT_NAMES,
    assign_splits,
    build_instances,
    dump_record,
    score_page,
)
from .dump_ingest import CleanPage, RawPage, SectionNode, stream_pages, to_clean_page

SPILL_ENV_VAR = "ASPECTSUM_TMPDIR"

MANIFEST_POLICIES = {
    "aspect_level_policy": "every section depth whose subtree has text",
    "heading_policy": "headings excluded from document text",
    "score_format": "exact rational as a fraction string",
    "sentence_splitter": "rule-based, deterministic",
    "tokenizer": "NFC, lowercased, alphanumeric runs",
}


@dataclass(frozen=True)
class PipelineConfig:
    dump_path: str
    output_dir: str
    thresholds: tuple[Fraction, ...] = (DEFAULT_THRESHOLD,)
    split_ratios: tuple[float, float, float] = DEFAULT_SPLIT_RATIOS
    split_seed: int = DEFAULT_SPLIT_SEED
    jobs: int = 0  # 0 means all logical cores
    max_pages: int | None = None
    force: bool = False


@dataclass(frozen=True)
class BuildResult:
    output_dirs: tuple[Path, ...]
    cleaning_counters: Counter
    manifests: dict[str, dict]


def _worker(raw: RawPage) -> tuple[dict, int, bytes | None]:
    """Clean and score one page. Pure; safe on any worker."""
    counters: Counter = Counter()
    page = to_clean_page(raw, counters)
    if page is None:
        return dict(counters), raw.page_id, None
    payload = pickle.dumps(score_page(page), protocol=pickle.HIGHEST_PROTOCOL)
    return dict(counters), raw.page_id, payload


def _batches(items: Iterable, size: int) -> Iterator[list]:
    batch: list = []
    for item in items:
        batch.append(item)
        if len(batch) >= size:
            yield batch
            batch = []
    if batch:
        yield batch


def _result_stream(raws: Iterable[RawPage], jobs: int) -> Iterator[tuple[dict, int, bytes | None]]:
    """Worker results in dump order, independent of worker count."""
    if jobs <= 1:
        for raw in raws:
            yield _worker(raw)
        return
    with multiprocessing.Pool(jobs) as pool:
        for batch in _batches(raws, 64 * jobs):
            yield from pool.map(_worker, batch)


def prepare_output_dir(path: Path, force: bool) -> None:
    if path.exists() and any(path.iterdir()):
        if not force:
            raise FileExistsError(
                f"output directory {path} is not empty (use --force to overwrite)")
    path.mkdir(parents=True, exist_ok=True)


def _threshold_label(threshold: Fraction) -> str:
    return str(float(threshold))


def _spill_dir() -> str | None:
    return os.environ.get(SPILL_ENV_VAR) or None


def build_corpus(config: PipelineConfig) -> BuildResult:
    jobs = config.jobs if config.jobs > 0 else (os.cpu_count() or 1)
    outdir = Path(config.output_dir)
    prepare_output_dir(outdir, config.force)

    counters: Counter = Counter()
    index: dict[int, tuple[int, int]] = {}  # page_id -> (offset, length)
    with tempfile.TemporaryFile(dir=_spill_dir()) as spool:
        results = _result_stream(stream_pages(config.dump_path), jobs)
        try:
            for worker_counters, page_id, payload in results:
                counters.update(worker_counters)
                counters["pages_read"] += 1
                if payload is None:
                    continue
                if page_id in index:
                    counters["pages_kept"] -= 1
                    counters["dropped_duplicate_page_id"] += 1
                    continue
                index[page_id] = (spool.tell(), len(payload))
                spool.write(payload)
                if config.max_pages is not None and len(index) >= config.max_pages:
                    break
        finally:
            results.close()
        return _write_outputs(config, outdir, spool, index, counters)


def _write_outputs(config: PipelineConfig, outdir: Path, spool: IO[bytes],
                   index: dict[int, tuple[int, int]],
                   counters: Counter) -> BuildResult:
    assignment = assign_splits(index, config.split_ratios, config.split_seed)
    multi = len(config.thresholds) > 1
    sinks: list[tuple[Fraction, Path, dict[str, IO[str]], Counter]] = []
    for threshold in config.thresholds:
        tdir = outdir / f"lambda_{_threshold_label(threshold)}" if multi else outdir
        tdir.mkdir(parents=True, exist_ok=True)
        handles = {
            split: open(tdir / f"{split}.jsonl", "w", encoding="utf-8", newline="\n")
            for split in SPLIT_NAMES
        }
        sinks.append((threshold, tdir, handles, Counter()))
    try:
        for page_id in sorted(index):
            offset, length = index[page_id]
            spool.seek(offset)
            scores = pickle.loads(spool.read(length))
            split = assignment[page_id]
            for threshold, _, handles, build_counters in sinks:
                for instance in build_instances(scores, threshold, split, build_counters):
                    handles[split].write(dump_record(instance) + "\n")
                    build_counters[f"instances_{split}"] += 1
    finally:
        for _, _, handles, _ in sinks:
            for handle in handles.values():
                handle.close()

    manifests: dict[str, dict] = {}
    for threshold, tdir, _, build_counters in sinks:
        manifest = _manifest(config, threshold, counters, build_counters)
        path = tdir / "manifest.json"
        path.write_text(json.dumps(manifest, ensure_ascii=False, indent=2,
                                   sort_keys=True) + "\n", encoding="utf-8")
        manifests[_threshold_label(threshold)] = manifest
    return BuildResult(
        output_dirs=tuple(tdir for _, tdir, _, _ in sinks),
        cleaning_counters=counters,
        manifests=manifests,
    )


def _manifest(config: PipelineConfig, threshold: Fraction,
              counters: Counter, build_counters: Counter) -> dict:
    return {
        "lambda": float(threshold),
        "lambda_exact": str(threshold),
        "split_ratios": list(config.split_ratios),
        "split_seed": config.split_seed,
        "input": str(config.dump_path),
        "max_pages": config.max_pages,
        "counts": {
            "pages_read": counters["pages_read"],
            "pages_kept": counters["pages_kept"],
            "instances": build_counters["instances_kept"],
            **{f"instances_{split}": build_counters[f"instances_{split}"]
               for split in SPLIT_NAMES},
        },
        "cleaning_counters": dict(sorted(counters.items())),
        "build_counters": dict(sorted(build_counters.items())),
        **MANIFEST_POLICIES,
    }


def _section_records(nodes: Sequence[SectionNode], path: list[str]) -> list[dict]:
    records = []
    for node in nodes:
        path.append(node.heading)
        records.append({"path": list(path), "text": node.raw_text})
        records.extend(_section_records(node.children, path))
        path.pop()
    return records


def clean_page_record(page: CleanPage) -> dict:
    return {
        "page_id": page.page_id,
        "title": page.title,
        "abstract": page.abstract_text,
        "sections": _section_records(page.sections, []),
    }


def write_clean_pages(dump_path: str | Path, out_path: str | Path,
                      max_pages: int | None = None) -> Counter:
    """The ingest step alone: stream, clean, and serialize pages as JSONL."""
    counters: Counter = Counter()
    kept = 0
    with open(out_path, "w", encoding="utf-8", newline="\n") as handle:
        for raw in stream_pages(dump_path):
            counters["pages_read"] += 1
            page = to_clean_page(raw, counters)
            if page is None:
                continue
            handle.write(json.dumps(clean_page_record(page), ensure_ascii=False) + "\n")
            kept += 1
            if max_pages is not None and kept >= max_pages:
                break
    return counters
