"""Key/value extraction from path-annotated text nodes.

One linear pass over the document's text nodes: a node whose text fuzzily
matches a dictionary synset becomes the current key; a following node is
that key's value when its element path is similar enough to the key's
path. Rescue rules patch the cases the pass cannot see (wrong document
root, keyless fields such as titles, pathological element markup).
"""

import re
from dataclasses import dataclass, field
from fnmatch import fnmatchcase

from weft.text import id_sort_key, normalize_term
from weft.errors import InputError
from weft.structure.paths import SEPARATOR, PathStrategy, build_paths
from weft.structure.similarity import (
    path_edit_similarity,
    path_prefix_similarity,
    string_similarity,
)


@dataclass(frozen=True)
class KeyValuePair:
    synset_id: str
    key_text: str  # raw matched key string ("" for keyless rescue rules)
    value: str
    key_path: object  # HtmlPath
    value_path: object


@dataclass
class ElementRewrite:
    """Rewrite text of nodes at matching paths (a rescue for messy markup)."""

    path_pattern: str  # glob over the tag-only rendered path
    pattern: str  # regex applied to the node text
    replacement: str = r"\1"


@dataclass
class RescueRules:
    root_selector: str | None = None  # tag-only path prefix, e.g. "html\\body\\div"
    keyless_rules: list = field(default_factory=list)  # (synset_id, path glob)
    element_rewrites: list = field(default_factory=list)

    def __post_init__(self):
        for rewrite in self.element_rewrites:
            re.compile(rewrite.pattern)


@dataclass
class ExtractionConfig:
    strategy: PathStrategy = PathStrategy.TAG_ONLY
    key_threshold: float = 0.8  # default by trial, tune per corpus
    link_threshold: float = 0.6  # default by trial, tune per corpus
    link_similarity: str = "prefix"  # "prefix" | "edit"; prefix linking is the default
    rescue: RescueRules = field(default_factory=RescueRules)

    def __post_init__(self):
        if not 0 <= self.key_threshold <= 1 or not 0 <= self.link_threshold <= 1:
            raise InputError("similarity thresholds must be in [0, 1]")
        if self.link_similarity not in ("prefix", "edit"):
            raise InputError(f"unknown link similarity {self.link_similarity!r}")

    def link(self, p, q):
        if self.link_similarity == "edit":
            return path_edit_similarity(p, q, self.strategy)
        return path_prefix_similarity(p, q, self.strategy)


def match_key(text, dictionary, key_threshold):
    """Best-matching synset id for a candidate key string, or None.

    The text is normalized first; the best variant similarity must reach
    key_threshold, ties go to the lowest synset id.
    """
    term = normalize_term(text)
    if not term:
        return None
    best_id, best_score = None, -1.0
    for synset in sorted(dictionary.synsets.values(), key=lambda s: id_sort_key(s.id)):
        score = max(string_similarity(term, variant) for variant in synset.variants)
        if score > best_score:
            best_id, best_score = synset.id, score
    if best_score >= key_threshold:
        return best_id
    return None


def _tag_path(path):
    return SEPARATOR.join(path.tags())


def extract_pairs(entries, dictionary, config: ExtractionConfig):
    """Run the key/value pass over build_paths output; returns KeyValuePairs."""
    pairs, _trace = extract_with_trace(entries, dictionary, config)
    return pairs


def extract_with_trace(entries, dictionary, config: ExtractionConfig):
    """extract_pairs plus per-node classification for conversion reports.

    The trace maps entry indices (after root filtering) to one of
    "key", "value", "rescued" or "orphan".
    """
    entries = list(entries)
    rescue = config.rescue

    if rescue.root_selector:
        prefix = rescue.root_selector.split(SEPARATOR)
        entries = [
            (path, text)
            for path, text in entries
            if list(path.tags()[: len(prefix)]) == prefix
        ]

    if rescue.element_rewrites:
        rewritten = []
        for path, text in entries:
            for rewrite in rescue.element_rewrites:
                if fnmatchcase(_tag_path(path), rewrite.path_pattern):
                    text = re.sub(rewrite.pattern, rewrite.replacement, text)
                    text = " ".join(text.split())
            if text:
                rewritten.append((path, text))
        entries = rewritten

    pairs = []
    roles = ["orphan"] * len(entries)
    consumed = set()

    # Keyless fields (e.g. document titles) are recovered before the pass
    # and withdrawn from it so they cannot double as values.
    for synset_id, pattern in rescue.keyless_rules:
        dictionary.get(synset_id)
        for index, (path, text) in enumerate(entries):
            if index not in consumed and fnmatchcase(_tag_path(path), pattern):
                pairs.append(KeyValuePair(synset_id, "", text, path, path))
                roles[index] = "rescued"
                consumed.add(index)

    previous_key = None  # (synset_id, raw text, path)
    open_pair = None  # index into pairs still aggregating consecutive values

    for index, (path, text) in enumerate(entries):
        if index in consumed:
            open_pair = None
            continue
        synset_id = match_key(text, dictionary, config.key_threshold)
        if synset_id is not None:
            previous_key = (synset_id, text, path)
            roles[index] = "key"
            open_pair = None
            continue
        if previous_key is not None and config.link(path, previous_key[2]) > config.link_threshold:
            roles[index] = "value"
            if open_pair is not None:
                merged = pairs[open_pair]
                pairs[open_pair] = KeyValuePair(
                    merged.synset_id,
                    merged.key_text,
                    merged.value + " " + text,
                    merged.key_path,
                    merged.value_path,
                )
            else:
                pairs.append(
                    KeyValuePair(previous_key[0], previous_key[1], text, previous_key[2], path)
                )
                open_pair = len(pairs) - 1
        else:
            open_pair = None

    return pairs, roles


def extract_html(source, dictionary, config: ExtractionConfig, declared_charset=None):
    """Convenience wrapper: HTML bytes/text straight to KeyValuePairs."""
    entries = build_paths(source, config.strategy, declared_charset)
    return extract_pairs(entries, dictionary, config)
