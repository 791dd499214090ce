from stancebench.corpus.models import (
    ConversationThread,
    CorpusStats,
    Instance,
    TargetSpec,
    Utterance,
)
from stancebench.corpus.parsing import parse_thread_file, parse_thread_obj
from stancebench.corpus.filters import DropReason, FilterConfig, FilterDecision, apply_preprocess_filters
from stancebench.corpus.flatten import flatten_to_instances
from stancebench.corpus.stats import compute_corpus_stats
from stancebench.corpus.split import apply_split, split_corpus
from stancebench.corpus.io import read_instances, write_instances, write_threads

__all__ = [
    "ConversationThread",
    "CorpusStats",
    "DropReason",
    "FilterConfig",
    "FilterDecision",
    "Instance",
    "TargetSpec",
    "Utterance",
    "apply_preprocess_filters",
    "apply_split",
    "compute_corpus_stats",
    "flatten_to_instances",
    "parse_thread_file",
    "parse_thread_obj",
    "read_instances",
    "split_corpus",
    "write_instances",
    "write_threads",
]
