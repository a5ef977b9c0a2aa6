"""weft: web knowledge-extraction toolkit.

Crawl archive, dictionary-driven HTML-to-XML conversion, XPath schema
mapping, dependency-ordered relational loading and coverage validation.
"""

__version__ = "0.1.0"
