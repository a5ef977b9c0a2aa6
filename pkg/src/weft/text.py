"""Shared key-text normalization and id ordering helpers."""

import re

_SECTION_PREFIX = re.compile(r"^\s*(section\s+)?\d+(\.\d+)*[:.)]?\s*", re.IGNORECASE)
_ID_PATTERN = re.compile(r"([A-Za-z]+)(\d+)$")


def normalize_term(text: str) -> str:
    """Canonical form of a key string for matching and frequency counting.

    Collapses whitespace, drops optional leading section numbering
    ("Section 1.2:", "3)") and trailing key/value separators (':', '=').
    """
    text = " ".join(text.split())
    text = _SECTION_PREFIX.sub("", text, count=1)
    return text.rstrip(":= \t")


def id_sort_key(synset_id: str):
    """Natural ordering for ids like K2 < K10; non-conforming ids sort after."""
    match = _ID_PATTERN.fullmatch(synset_id)
    if match:
        return (0, match.group(1), int(match.group(2)))
    return (1, synset_id, 0)
