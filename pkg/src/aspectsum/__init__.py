"""Aspect-based summarization corpora from encyclopedia XML dumps.

Build pipeline, corpus statistics, extractive baselines, and ROUGE
evaluation. See the README for the CLI; the library surface below mirrors
the subcommands.
"""

from .aspects import (
    Aspect,
    AspectInstance,
    BuildConfig,
    GreedyMapTrace,
    GreedyStep,
    PageScores,
    assign_splits,
    build_instances,
    collect_aspects,
    from_record,
    greedy_map,
    matching_score,
    page_instances,
    score_page,
    to_record,
)
from .baselines import (
    ExtractiveSelection,
    klsum,
    lead_n,
    lexrank,
    oracle_extract,
    pagerank,
    random_n,
    run_baseline,
    sumbasic,
    textrank,
)
from .dump_ingest import (
    CleanPage,
    DumpFormatError,
    RawPage,
    SectionNode,
    clean_pages,
    drop_structural,
    stream_pages,
    strip_markup,
    to_clean_page,
)
from .evaluate import EvalReport, MethodReport, evaluate, score_pair
from .pipeline import BuildResult, PipelineConfig, build_corpus, write_clean_pages
from .rouge import RougeScore, rouge1_recall_against_set, rouge_l, rouge_lsum, rouge_n
from .segmentation import Sentence, make_sentence, split_sentences, tokenize
from .stats import (
    CorpusStats,
    StatsAccumulator,
    aggregate,
    aggregate_files,
    bigram_units,
    compression_ratio,
    coverage_density,
    extractive_fragments,
    novel_ngram_ratio,
    write_stats,
)

__version__ = "0.1.0"

__all__ = [
    "Aspect",
    "AspectInstance",
    "BuildConfig",
    "BuildResult",
    "CleanPage",
    "CorpusStats",
    "DumpFormatError",
    "EvalReport",
    "ExtractiveSelection",
    "GreedyMapTrace",
    "GreedyStep",
    "MethodReport",
    "PageScores",
    "PipelineConfig",
    "RawPage",
    "RougeScore",
    "SectionNode",
    "Sentence",
    "StatsAccumulator",
    "aggregate",
    "aggregate_files",
    "assign_splits",
    "bigram_units",
    "build_corpus",
    "build_instances",
    "clean_pages",
    "collect_aspects",
    "compression_ratio",
    "coverage_density",
    "drop_structural",
    "evaluate",
    "extractive_fragments",
    "from_record",
    "greedy_map",
    "klsum",
    "lead_n",
    "lexrank",
    "make_sentence",
    "matching_score",
    "novel_ngram_ratio",
    "oracle_extract",
    "page_instances",
    "pagerank",
    "random_n",
    "rouge1_recall_against_set",
    "rouge_l",
    "rouge_lsum",
    "rouge_n",
    "run_baseline",
    "score_page",
    "score_pair",
    "split_sentences",
    "stream_pages",
    "strip_markup",
    "sumbasic",
    "textrank",
    "to_clean_page",
    "to_record",
    "tokenize",
    "write_clean_pages",
    "write_stats",
]
