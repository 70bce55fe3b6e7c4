"""Command-line interface: ingest | build | stats | baseline | eval | sample."""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Iterator

from .aspects import (
    DEFAULT_SPLIT_RATIOS,
    DEFAULT_SPLIT_SEED,
    DEFAULT_THRESHOLD,
    from_record,
)
from .baselines import METHOD_NAMES, run_baseline
from .dump_ingest import DumpFormatError
from .evaluate import evaluate, load_predictions, load_references, report_json, report_table
from .pipeline import PipelineConfig, build_corpus, write_clean_pages
from .segmentation import make_sentence, split_sentences
from .stats import aggregate_files, write_stats


def _iter_records(paths: list[str]) -> Iterator[dict]:
    for path in paths:
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    yield json.loads(line)


def cmd_ingest(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if not Path(args.dump).exists():
        parser.error(f"dump not found: {args.dump}")
    counters = write_clean_pages(args.dump, args.output, max_pages=args.max_pages)
    print(f"pages read: {counters['pages_read']}, kept: {counters['pages_kept']}")
    print(f"wrote {args.output}")
    return 0


def cmd_build(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if not Path(args.dump).exists():
        parser.error(f"dump not found: {args.dump}")
    thresholds = tuple(args.thresholds) if args.thresholds else (DEFAULT_THRESHOLD,)
    config = PipelineConfig(
        dump_path=args.dump,
        output_dir=args.output,
        thresholds=thresholds,
        split_ratios=tuple(args.split_ratios),
        split_seed=args.seed,
        jobs=args.jobs,
        max_pages=args.max_pages,
        force=args.force,
    )
    result = build_corpus(config)
    for label, manifest in result.manifests.items():
        counts = manifest["counts"]
        print(f"lambda={label}: {counts['instances']} instances "
              f"({counts['instances_train']} train / {counts['instances_valid']} valid / "
              f"{counts['instances_test']} test) from {counts['pages_kept']} pages")
    for tdir in result.output_dirs:
        print(f"wrote {tdir}")
    return 0


def cmd_stats(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    for path in args.corpus:
        if not Path(path).exists():
            parser.error(f"corpus file not found: {path}")
    stats = aggregate_files(args.corpus).finalize()
    write_stats(stats, args.output)
    print(f"instances: {stats.instances}, pages: {stats.pages}, "
          f"distinct aspects: {len(stats.aspect_frequency)}")
    if stats.skipped_records:
        print(f"skipped unreadable records: {stats.skipped_records}", file=sys.stderr)
    print(f"wrote {args.output}")
    return 0


def cmd_baseline(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    for path in args.corpus:
        if not Path(path).exists():
            parser.error(f"corpus file not found: {path}")
    written = 0
    with open(args.output, "w", encoding="utf-8", newline="\n") as out:
        for record in _iter_records(args.corpus):
            instance = from_record(record)
            doc_sentences = split_sentences(instance.document)
            reference = [make_sentence(text) for text in instance.summary_sentences]
            selection = run_baseline(
                args.method, doc_sentences, reference,
                seed=f"{args.seed}:{instance.instance_id}")
            out.write(json.dumps({
                "instance_id": instance.instance_id,
                "method": selection.method,
                "candidate": selection.text,
                "indices": list(selection.indices),
            }, ensure_ascii=False) + "\n")
            written += 1
    print(f"wrote {written} predictions to {args.output}")
    return 0


def cmd_eval(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if not Path(args.predictions).exists():
        parser.error(f"predictions file not found: {args.predictions}")
    for path in args.references:
        if not Path(path).exists():
            parser.error(f"reference corpus not found: {path}")
    report = evaluate(
        load_predictions(args.predictions),
        load_references(args.references),
        per_instance_path=args.per_instance,
    )
    print(report_table(report))
    print(report_json(report))
    return 0


def cmd_sample(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    for path in args.corpus:
        if not Path(path).exists():
            parser.error(f"corpus file not found: {path}")
    rng = random.Random(args.seed)
    chosen: list[tuple[int, dict]] = []
    for i, record in enumerate(_iter_records(args.corpus)):
        if len(chosen) < args.k:
            chosen.append((i, record))
        else:
            j = rng.randint(0, i)
            if j < args.k:
                chosen[j] = (i, record)
    for _, record in sorted(chosen, key=lambda pair: pair[0]):
        print(json.dumps(record, ensure_ascii=False, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aspectsum",
        description="Build and analyze an aspect-based summarization corpus "
                    "from an encyclopedia XML dump.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="stream and clean a dump to JSONL pages")
    ingest.add_argument("dump", help="pages-articles XML dump (.xml or .xml.bz2)")
    ingest.add_argument("-o", "--output", required=True, help="cleaned-pages JSONL path")
    ingest.add_argument("--max-pages", type=int, default=None,
                        help="stop after this many cleaned pages")
    ingest.set_defaults(func=cmd_ingest)

    build = sub.add_parser("build", help="build the corpus (runs ingest implicitly)")
    build.add_argument("dump", help="pages-articles XML dump (.xml or .xml.bz2)")
    build.add_argument("-o", "--output", required=True, help="output directory")
    build.add_argument("--lambda", dest="thresholds", action="append", type=Fraction,
                       metavar="THRESHOLD",
                       help="matching-score threshold; repeat for a sweep "
                            f"(default {float(DEFAULT_THRESHOLD)})")
    build.add_argument("--split-ratios", nargs=3, type=float,
                       default=list(DEFAULT_SPLIT_RATIOS),
                       metavar=("TRAIN", "VALID", "TEST"))
    build.add_argument("--seed", type=int, default=DEFAULT_SPLIT_SEED,
                       help="split-assignment seed")
    build.add_argument("--jobs", type=int, default=0,
                       help="worker processes (default: all logical cores)")
    build.add_argument("--max-pages", type=int, default=None,
                       help="stop after this many cleaned pages")
    build.add_argument("--force", action="store_true",
                       help="allow writing into a non-empty output directory")
    build.set_defaults(func=cmd_build)

    stats = sub.add_parser("stats", help="aggregate corpus statistics")
    stats.add_argument("corpus", nargs="+", help="corpus JSONL file(s)")
    stats.add_argument("-o", "--output", required=True, help="output directory")
    stats.set_defaults(func=cmd_stats)

    baseline = sub.add_parser("baseline", help="run an extractive baseline")
    baseline.add_argument("corpus", nargs="+", help="corpus JSONL file(s)")
    baseline.add_argument("--method", required=True, choices=METHOD_NAMES)
    baseline.add_argument("-o", "--output", required=True, help="predictions JSONL path")
    baseline.add_argument("--seed", type=int, default=DEFAULT_SPLIT_SEED,
                          help="seed for the random baseline")
    baseline.set_defaults(func=cmd_baseline)

    evaluate_cmd = sub.add_parser("eval", help="score predictions against references")
    evaluate_cmd.add_argument("predictions", help="predictions JSONL file")
    evaluate_cmd.add_argument("--references", nargs="+", required=True,
                              help="corpus JSONL file(s) with the references")
    evaluate_cmd.add_argument("--per-instance", default=None,
                              help="write per-instance scores to this JSONL path")
    evaluate_cmd.set_defaults(func=cmd_eval)

    sample = sub.add_parser("sample", help="print random instances for inspection")
    sample.add_argument("corpus", nargs="+", help="corpus JSONL file(s)")
    sample.add_argument("-k", type=int, default=3, help="number of instances")
    sample.add_argument("--seed", type=int, default=DEFAULT_SPLIT_SEED)
    sample.set_defaults(func=cmd_sample)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (DumpFormatError, FileExistsError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
