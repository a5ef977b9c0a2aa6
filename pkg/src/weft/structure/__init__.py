"""Structure analysis: HTML documents to canonical key/value XML."""

from weft.structure.extract import (
    ElementRewrite,
    ExtractionConfig,
    KeyValuePair,
    RescueRules,
    extract_html,
    extract_pairs,
    extract_with_trace,
    match_key,
)
from weft.structure.htmldom import decode_html, parse_html
from weft.structure.paths import HtmlPath, PathStep, PathStrategy, build_paths
from weft.structure.similarity import (
    path_edit_similarity,
    path_prefix_similarity,
    string_similarity,
)
from weft.structure.xmlout import from_xml, sanitize_xml_name, to_xml

__all__ = [
    "ElementRewrite",
    "ExtractionConfig",
    "HtmlPath",
    "KeyValuePair",
    "PathStep",
    "PathStrategy",
    "RescueRules",
    "build_paths",
    "decode_html",
    "extract_html",
    "extract_pairs",
    "extract_with_trace",
    "from_xml",
    "match_key",
    "parse_html",
    "path_edit_similarity",
    "path_prefix_similarity",
    "sanitize_xml_name",
    "string_similarity",
    "to_xml",
]
