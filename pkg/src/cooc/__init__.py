"""Close co-occurrence queries on grammar-compressed texts."""

from .coindex import CoIndex, build_co_index, query_close
from .compress import LevelScheme, build_slp, compute_splits, recompress_text, to_rlslp
from .errors import CoocError
from .grammar import Grammar, Leaf, Pair, Power, validate_and_index
from .indexfile import load_index, read_index, write_index, dump_index
from .occindex import OccIndex, build_occ_index, preprocess_pattern, report_co_occurrences

__all__ = [
    "CoIndex", "CoocError", "Grammar", "LevelScheme", "Leaf", "OccIndex", "Pair", "Power",
    "build_co_index", "build_occ_index", "build_slp", "compute_splits", "dump_index",
    "load_index", "preprocess_pattern", "query_close", "read_index", "recompress_text",
    "report_co_occurrences", "to_rlslp", "validate_and_index", "write_index",
]

__version__ = "0.1.0"
