"""Mapping-coverage and conversion-quality measurement.

Three quantitative views close the expert's iteration loop: XPath
frequency statistics over a corpus (what the data contains), coverage of
those paths by a mapping file (what the mapping captures, S_mapped
versus S_unmapped), and per-document conversion reports for the
HTML-to-XML stage (which dictionary keys never matched). Table
occupation ratios summarize how loaded rows spread over entities.
"""

import json
import multiprocessing
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from weft.errors import InputError
from weft.structure.extract import extract_with_trace
from weft.structure.paths import build_paths
from weft.text import id_sort_key

EXAMPLES_PER_PATH = 2


@dataclass
class XPathStats:
    counts: dict = field(default_factory=dict)  # path -> total occurrences
    examples: dict = field(default_factory=dict)  # path -> up to k file names
    files: int = 0
    skipped: list = field(default_factory=list)  # (file name, error)

    def paths(self):
        return set(self.counts)


def _count_file(data):
    """Occurrences of every non-empty element/attribute path in one document."""
    root = ET.fromstring(data)
    counts = {}

    def visit(element, prefix):
        path = f"{prefix}/{element.tag}"
        direct = [element.text or ""]
        direct.extend(child.tail or "" for child in element)
        if "".join(direct).strip():
            counts[path] = counts.get(path, 0) + 1
        for name, value in element.attrib.items():
            if value.strip():
                attr_path = f"{path}/@{name}"
                counts[attr_path] = counts.get(attr_path, 0) + 1
        for child in element:
            visit(child, path)

    visit(root, "")
    return counts


def _merge_examples(examples, path, name, limit):
    """Keep the lexicographically smallest `limit` file names per path.

    min-k merging is associative and commutative, so sharding files
    across workers cannot change the result.
    """
    bucket = examples.setdefault(path, [])
    if name not in bucket:
        bucket.append(name)
        bucket.sort()
        del bucket[limit:]


def _collect_shard(shard):
    stats = XPathStats()
    for name, data in shard:
        try:
            counts = _count_file(data)
        except ET.ParseError as exc:
            stats.skipped.append((name, str(exc)))
            continue
        stats.files += 1
        for path, count in counts.items():
            stats.counts[path] = stats.counts.get(path, 0) + count
            _merge_examples(stats.examples, path, name, EXAMPLES_PER_PATH)
    return stats


def _merge_stats(target: XPathStats, other: XPathStats):
    target.files += other.files
    target.skipped.extend(other.skipped)
    for path, count in other.counts.items():
        target.counts[path] = target.counts.get(path, 0) + count
    for path, names in other.examples.items():
        for name in names:
            _merge_examples(target.examples, path, name, EXAMPLES_PER_PATH)


def collect_xpaths(corpus, workers=1) -> XPathStats:
    """Frequency-counted XPath set over (name, xml bytes) documents.

    Unparseable files are recorded under ``skipped`` and do not abort the
    collection. With workers > 1 the corpus is sharded and the partial
    statistics merged; the merge is associative so the result equals the
    sequential one.
    """
    corpus = list(corpus)
    if workers <= 1 or len(corpus) < 2:
        return _collect_shard(corpus)
    shard_size = max(1, len(corpus) // workers)
    shards = [corpus[i:i + shard_size] for i in range(0, len(corpus), shard_size)]
    stats = XPathStats()
    with multiprocessing.get_context("fork").Pool(workers) as pool:
        for partial in pool.imap(_collect_shard, shards):
            _merge_stats(stats, partial)
    return stats


def stats_to_json(stats: XPathStats) -> str:
    """The stats file format: {path: [count, [example files]]}."""
    payload = {
        path: [stats.counts[path], list(stats.examples.get(path, []))]
        for path in sorted(stats.counts)
    }
    return json.dumps(payload, ensure_ascii=False, indent=2)


def stats_from_json(text) -> XPathStats:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    raw = json.loads(text)
    stats = XPathStats()
    for path, (count, examples) in raw.items():
        stats.counts[path] = count
        stats.examples[path] = list(examples)
    return stats


# -- coverage ----------------------------------------------------------------


@dataclass
class CoverageReport:
    mapped: set
    unmapped: set
    ratio: float
    dead_bindings: list  # mapping xpaths never seen in the corpus

    def to_json_dict(self):
        return {
            "mapped": sorted(self.mapped),
            "unmapped": sorted(self.unmapped),
            "ratio": self.ratio,
            "deadBindings": list(self.dead_bindings),
        }


def coverage(stats: XPathStats, mapping) -> CoverageReport:
    """Partition the corpus path set by exact membership in the mapping."""
    corpus_paths = stats.paths()
    bound = set(mapping.all_xpaths())
    mapped = corpus_paths & bound
    unmapped = corpus_paths - bound
    ratio = len(mapped) / len(corpus_paths) if corpus_paths else 0.0
    dead = sorted(bound - corpus_paths)
    return CoverageReport(mapped=mapped, unmapped=unmapped, ratio=ratio, dead_bindings=dead)


def sample_unmapped(report: CoverageReport, stats: XPathStats, k) -> list:
    """The k unmapped paths most worth an expert's attention.

    Frequency-prioritized: higher occurrence count first, ties broken
    lexicographically, so the sample is deterministic.
    """
    if k < 0:
        raise InputError("sample size must be >= 0")
    ranked = sorted(report.unmapped, key=lambda p: (-stats.counts.get(p, 0), p))
    return ranked[:k]


# -- HTML conversion quality ---------------------------------------------------


@dataclass
class ConversionReport:
    matched: set
    missing: list  # dictionary key ids expected but absent, sorted
    orphan_texts: list  # document order
    conversion_rate: float  # matched characters / total characters

    def to_json_dict(self):
        return {
            "matched": sorted(self.matched, key=id_sort_key),
            "missing": list(self.missing),
            "orphanText": list(self.orphan_texts),
            "conversionRate": self.conversion_rate,
        }


def conversion_report(entries, pairs, roles, dictionary, expected_keys) -> ConversionReport:
    """Quality of one document's key/value extraction.

    ``pairs`` and ``roles`` come from extract_with_trace over ``entries``.
    Characters in key, value and rescued nodes count as converted; text
    that attached to nothing is reported verbatim for dictionary triage.
    """
    entries = list(entries)
    matched = {pair.synset_id for pair in pairs}
    missing = sorted(set(expected_keys) - matched, key=id_sort_key)
    orphan_texts = [text for (_path, text), role in zip(entries, roles) if role == "orphan"]
    total = sum(len(text) for _path, text in entries)
    converted = sum(
        len(text) for (_path, text), role in zip(entries, roles) if role != "orphan"
    )
    rate = converted / total if total else 1.0
    return ConversionReport(matched, missing, orphan_texts, rate)


def conversion_report_html(source, dictionary, config, expected_keys) -> ConversionReport:
    """conversion_report straight from HTML bytes."""
    entries = build_paths(source, config.strategy)
    pairs, roles = extract_with_trace(entries, dictionary, config)
    return conversion_report(entries, pairs, roles, dictionary, expected_keys)


def render_conversion_report(report: ConversionReport) -> str:
    """Human-readable rendering: one Missing line per absent key, then orphans."""
    lines = [f"<{key}>:  Missing" for key in report.missing]
    if report.orphan_texts:
        lines.append("")
        lines.extend(report.orphan_texts)
    return "\n".join(lines)


# -- table occupation ------------------------------------------------------------


@dataclass
class OccupationReport:
    counts: dict
    ratios: dict
    total: int

    def to_json_dict(self):
        return {"counts": dict(self.counts), "ratios": dict(self.ratios), "total": self.total}


def occupation_ratios(row_counts: dict) -> OccupationReport:
    """Fraction of all stored rows living in each table."""
    if any(count < 0 for count in row_counts.values()):
        raise InputError("row counts must be non-negative")
    total = sum(row_counts.values())
    if total == 0:
        raise InputError("occupation ratios are undefined for an empty database")
    ratios = {table: count / total for table, count in row_counts.items()}
    return OccupationReport(dict(row_counts), ratios, total)
