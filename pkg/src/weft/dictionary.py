"""Key dictionaries: fuzzy synonym sets driving HTML-to-XML extraction.

A dictionary groups key-string variants into synsets ("Name", "Names" are
one concept). Building one is semi-automatic: term frequencies over a
document sample suggest candidates (template keys repeat across documents,
values rarely do), similar candidates are grouped, and an expert curates
the result with the edit operations below.
"""

import copy
import json
import re
from dataclasses import dataclass, field

from weft.errors import DictionaryError, InputError
from weft.structure.similarity import string_similarity
from weft.text import id_sort_key, normalize_term

_ID_PATTERN = re.compile(r"([A-Za-z]+)(\d+)$")

__all__ = [
    "Dictionary",
    "Synset",
    "TermStats",
    "group_synsets",
    "id_sort_key",
    "normalize_term",
    "propose_keys",
    "term_frequencies",
]


@dataclass
class Synset:
    """One key concept: a canonical display string plus its accepted variants."""

    id: str
    canonical: str
    variants: list
    language: str = "und"
    parent: str | None = None

    def __post_init__(self):
        seen = []
        for variant in self.variants:
            if variant not in seen:
                seen.append(variant)
        self.variants = seen


class Dictionary:
    """A versioned set of synsets for one language.

    Invariants: synset ids unique, every canonical is one of its own
    variants, no variant string is shared by two synsets, parent links
    are acyclic. Every committed edit bumps ``version`` by one.
    """

    def __init__(self, language="und", synsets=None, version=1):
        self.language = language
        self.version = version
        self.synsets = {}
        for synset in synsets or []:
            self.synsets[synset.id] = synset
        self.validate()

    # -- queries ---------------------------------------------------------

    def __len__(self):
        return len(self.synsets)

    def __contains__(self, synset_id):
        return synset_id in self.synsets

    def get(self, synset_id) -> Synset:
        try:
            return self.synsets[synset_id]
        except KeyError:
            raise DictionaryError(f"unknown synset {synset_id!r}") from None

    def ordered(self):
        return sorted(self.synsets.values(), key=lambda s: id_sort_key(s.id))

    def ancestor_chain(self, synset_id):
        """Parents from the root down to (excluding) the synset itself."""
        chain = []
        current = self.get(synset_id).parent
        while current is not None:
            chain.append(current)
            current = self.get(current).parent
        chain.reverse()
        return chain

    def validate(self):
        owners = {}
        for synset in self.synsets.values():
            if synset.canonical not in synset.variants:
                raise DictionaryError(
                    f"synset {synset.id}: canonical {synset.canonical!r} not among variants"
                )
            for variant in synset.variants:
                if variant in owners:
                    raise DictionaryError(
                        f"variant {variant!r} appears in both {owners[variant]} and {synset.id}"
                    )
                owners[variant] = synset.id
        for synset in self.synsets.values():
            seen = {synset.id}
            parent = synset.parent
            while parent is not None:
                if parent not in self.synsets:
                    raise DictionaryError(f"synset {synset.id}: unknown parent {parent!r}")
                if parent in seen:
                    raise DictionaryError(f"parent cycle through {parent!r}")
                seen.add(parent)
                parent = self.synsets[parent].parent

    # -- curation edits ----------------------------------------------------
    # Each edit is transactional: a rejected edit (variant collision,
    # parent cycle, unknown id) leaves the dictionary untouched; a
    # committed one bumps version by exactly one.

    _UNCHANGED = object()

    def _edit(self, mutate):
        snapshot = copy.deepcopy(self.synsets)
        try:
            result = mutate()
            if result is Dictionary._UNCHANGED:
                return None
            self.validate()
        except Exception:
            self.synsets = snapshot
            raise
        self.version += 1
        return result

    def _next_id(self):
        numbers = [
            int(m.group(2))
            for m in (_ID_PATTERN.fullmatch(i) for i in self.synsets)
            if m and m.group(1) == "K"
        ]
        return f"K{max(numbers, default=0) + 1}"

    def add_synset(self, synset: Synset):
        def mutate():
            if synset.id in self.synsets:
                raise DictionaryError(f"synset id {synset.id!r} already exists")
            self.synsets[synset.id] = synset

        self._edit(mutate)

    def add_variant(self, synset_id, variant):
        def mutate():
            synset = self.get(synset_id)
            if variant in synset.variants:
                return Dictionary._UNCHANGED
            synset.variants.append(variant)

        self._edit(mutate)

    def merge_synsets(self, dst_id, src_id):
        """Absorb src's variants into dst and drop src."""

        def mutate():
            if dst_id == src_id:
                raise DictionaryError("cannot merge a synset with itself")
            dst, src = self.get(dst_id), self.get(src_id)
            dst.variants.extend(v for v in src.variants if v not in dst.variants)
            if dst.parent == src_id:
                dst.parent = src.parent
            for synset in self.synsets.values():
                if synset is not dst and synset.parent == src_id:
                    synset.parent = dst_id
            del self.synsets[src_id]

        self._edit(mutate)

    def split_synset(self, source_id, variants, new_id=None, new_canonical=None):
        """Move some variants out of a synset into a new one; returns the new id."""

        def mutate():
            source = self.get(source_id)
            moved = list(dict.fromkeys(variants))
            if not moved:
                raise DictionaryError("split requires at least one variant to move")
            missing = [v for v in moved if v not in source.variants]
            if missing:
                raise DictionaryError(f"variants not in {source_id}: {missing}")
            remaining = [v for v in source.variants if v not in moved]
            if not remaining:
                raise DictionaryError("split would leave the source synset empty")
            target_id = new_id or self._next_id()
            if target_id in self.synsets:
                raise DictionaryError(f"synset id {target_id!r} already exists")
            canonical = new_canonical
            if canonical is None:
                canonical = min(moved, key=lambda v: (len(v), v))
            if canonical not in moved:
                raise DictionaryError(f"canonical {canonical!r} not among moved variants")
            source.variants = remaining
            if source.canonical not in remaining:
                source.canonical = min(remaining, key=lambda v: (len(v), v))
            self.synsets[target_id] = Synset(
                target_id, canonical, moved, language=source.language, parent=source.parent
            )
            return target_id

        return self._edit(mutate)

    def set_parent(self, synset_id, parent_id):
        def mutate():
            synset = self.get(synset_id)
            if parent_id is not None:
                self.get(parent_id)
            synset.parent = parent_id

        self._edit(mutate)

    def remove_synset(self, synset_id):
        def mutate():
            removed = self.get(synset_id)
            for synset in self.synsets.values():
                if synset.parent == synset_id:
                    synset.parent = removed.parent
            del self.synsets[synset_id]

        self._edit(mutate)

    # -- persistence -------------------------------------------------------

    def to_json(self) -> str:
        synsets = []
        for synset in self.ordered():
            entry = {
                "id": synset.id,
                "canonical": synset.canonical,
                "variants": list(synset.variants),
            }
            if synset.parent is not None:
                entry["parent"] = synset.parent
            synsets.append(entry)
        return json.dumps(
            {"language": self.language, "version": self.version, "synsets": synsets},
            ensure_ascii=False,
            indent=2,
        )

    @classmethod
    def from_json(cls, text) -> "Dictionary":
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        raw = json.loads(text)
        synsets = [
            Synset(
                entry["id"],
                entry["canonical"],
                list(entry["variants"]),
                language=raw.get("language", "und"),
                parent=entry.get("parent"),
            )
            for entry in raw.get("synsets", [])
        ]
        return cls(raw.get("language", "und"), synsets, version=raw.get("version", 1))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.to_json())
            handle.write("\n")

    @classmethod
    def load(cls, path) -> "Dictionary":
        with open(path, encoding="utf-8") as handle:
            return cls.from_json(handle.read())


# -- induction over a document sample -------------------------------------


@dataclass
class TermStats:
    """Exact term counts over a sample: total occurrences and document reach."""

    occurrences: dict = field(default_factory=dict)
    doc_counts: dict = field(default_factory=dict)
    sample_size: int = 0

    def terms(self):
        return self.occurrences.keys()


def term_frequencies(sample) -> TermStats:
    """Count normalized text-node terms over a sample of path/text documents.

    ``sample`` is a sequence of documents, each a sequence of
    (path, text) entries as produced by build_paths.
    """
    docs = list(sample)
    if not docs:
        raise InputError("term_frequencies requires a non-empty sample")
    stats = TermStats(sample_size=len(docs))
    for doc in docs:
        seen = set()
        for _path, text in doc:
            term = normalize_term(text)
            if not term:
                continue
            stats.occurrences[term] = stats.occurrences.get(term, 0) + 1
            if term not in seen:
                seen.add(term)
                stats.doc_counts[term] = stats.doc_counts.get(term, 0) + 1
    return stats


def propose_keys(stats: TermStats, min_doc_ratio: float):
    """Candidate key terms present in at least min_doc_ratio of the sample.

    Sorted by document count descending, ties lexicographic: template keys
    surface first, one-off values drop out.
    """
    if not 0 <= min_doc_ratio <= 1:
        raise InputError("min_doc_ratio must be in [0, 1]")
    cutoff = min_doc_ratio * stats.sample_size
    candidates = [t for t, n in stats.doc_counts.items() if n >= cutoff]
    candidates.sort(key=lambda t: (-stats.doc_counts[t], t))
    return candidates


def group_synsets(candidates, threshold, stats: TermStats | None = None, language="und"):
    """Single-link grouping of candidate terms into a Dictionary.

    Terms land in one synset iff connected by a chain of pairs with
    string_similarity >= threshold, so the result is independent of input
    order. Canonical is the highest-doc-count member (ties: shortest,
    then lexicographic); ids are assigned K1.. in canonical order.
    """
    terms = sorted(set(candidates))
    if not terms:
        raise InputError("group_synsets requires at least one candidate")
    parent = list(range(len(terms)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            if string_similarity(terms[i], terms[j]) >= threshold:
                parent[find(i)] = find(j)

    groups = {}
    for i, term in enumerate(terms):
        groups.setdefault(find(i), []).append(term)

    def doc_count(term):
        return stats.doc_counts.get(term, 0) if stats else 0

    synsets = []
    for members in groups.values():
        canonical = min(members, key=lambda t: (-doc_count(t), len(t), t))
        synsets.append((canonical, sorted(members)))
    synsets.sort(key=lambda pair: pair[0])
    return Dictionary(
        language,
        [
            Synset(f"K{n}", canonical, [canonical] + [m for m in members if m != canonical],
                   language=language)
            for n, (canonical, members) in enumerate(synsets, start=1)
        ],
    )
