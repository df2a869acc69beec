"""Python bindings for the ActorMind speech role-playing toolkit."""

from ._amb import (
    AmbError,
    ablation_delta,
    ablation_names,
    aggregate_improvement,
    aggregate_mos,
    align,
    build_database,
    corpus_stats,
    fallback_index,
    format_duration,
    format_fixed,
    line_similarity,
    normalize_text,
    parse_duration,
    run_cli,
    summarize,
)

__all__ = [
    "AmbError",
    "ablation_delta",
    "ablation_names",
    "aggregate_improvement",
    "aggregate_mos",
    "align",
    "build_database",
    "corpus_stats",
    "fallback_index",
    "format_duration",
    "format_fixed",
    "line_similarity",
    "normalize_text",
    "parse_duration",
    "run_cli",
    "summarize",
]
