"""Normalized similarities over strings and element paths.

All three return values in [0, 1], are symmetric and equal 1 exactly on
identical inputs; two empty inputs compare as identical.
"""

from weft.kernels import common_prefix_len, levenshtein, levenshtein_seq
from weft.structure.paths import PathStrategy


def string_similarity(a: str, b: str) -> float:
    """1 - editDistance(a, b) / max(len)."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def path_edit_similarity(p, q, strategy: PathStrategy = PathStrategy.TAG_ONLY) -> float:
    """1 - editDistance over rendered step tokens / max(path length)."""
    a, b = p.tokens(strategy), q.tokens(strategy)
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein_seq(a, b) / longest


def path_prefix_similarity(p, q, strategy: PathStrategy = PathStrategy.TAG_ONLY) -> float:
    """Longest common token prefix / max(path length)."""
    a, b = p.tokens(strategy), q.tokens(strategy)
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return common_prefix_len(a, b) / longest
