"""Lenient HTML parsing into a minimal DOM.

Real crawled pages are routinely malformed (stray end tags, unclosed
elements, missing charset headers), so the builder never raises on
structure: unmatched end tags are dropped and open elements are closed
at the end of input. Only undecodable bytes are an error.
"""

import re
from html.parser import HTMLParser

from weft.errors import EncodingError

VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)

# Elements whose text is markup/code, not page content.
NON_CONTENT = frozenset({"script", "style", "noscript", "template"})

# tag -> open tags it implicitly closes when it starts
_IMPLICIT_CLOSE = {
    "li": {"li"},
    "p": {"p"},
    "option": {"option"},
    "tr": {"tr", "td", "th"},
    "td": {"td", "th"},
    "th": {"td", "th"},
}

_META_CHARSET = re.compile(
    rb"""<meta[^>]+?(?:charset\s*=\s*["']?([\w-]+)|content\s*=\s*["'][^"']*charset=([\w-]+))""",
    re.IGNORECASE,
)


class Element:
    """One HTML element: tag, attributes and mixed child list (Element or str)."""

    __slots__ = ("tag", "attrs", "children", "parent")

    def __init__(self, tag, attrs=None, parent=None):
        self.tag = tag
        self.attrs = attrs or {}
        self.children = []
        self.parent = parent

    def iter(self):
        yield self
        for child in self.children:
            if isinstance(child, Element):
                yield from child.iter()

    def __repr__(self):
        return f"<Element {self.tag} children={len(self.children)}>"


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = Element("#document")
        self._stack = [self.root]
        self._text = []

    def handle_starttag(self, tag, attrs):
        self._flush_text()
        closers = _IMPLICIT_CLOSE.get(tag)
        if closers and self._stack[-1].tag in closers:
            self._stack.pop()
        element = Element(tag, dict(attrs), parent=self._stack[-1])
        self._stack[-1].children.append(element)
        if tag not in VOID_ELEMENTS:
            self._stack.append(element)

    def handle_startendtag(self, tag, attrs):
        self._flush_text()
        self._stack[-1].children.append(Element(tag, dict(attrs), parent=self._stack[-1]))

    def handle_endtag(self, tag):
        self._flush_text()
        for i in range(len(self._stack) - 1, 0, -1):
            if self._stack[i].tag == tag:
                del self._stack[i:]
                return
        # stray end tag: ignore

    def handle_data(self, data):
        self._text.append(data)

    def _flush_text(self):
        if self._text:
            text = "".join(self._text)
            self._text = []
            if text:
                self._stack[-1].children.append(text)

    def finish(self):
        self._flush_text()
        return self.root


def sniff_charset(data: bytes):
    """Charset from BOM or a <meta> tag in the first 2 KiB, else None."""
    if data.startswith(b"\xef\xbb\xbf"):
        return "utf-8-sig"
    if data.startswith(b"\xff\xfe") or data.startswith(b"\xfe\xff"):
        return "utf-16"
    match = _META_CHARSET.search(data[:2048])
    if match:
        return (match.group(1) or match.group(2)).decode("ascii").lower()
    return None


def decode_html(data: bytes, declared_charset=None) -> str:
    """Decode page bytes, preferring the caller-declared charset.

    Resolution order: declared charset (e.g. from the HTTP Content-Type),
    BOM / <meta> sniffing, UTF-8. Raises EncodingError naming the charset
    that failed, per the structure-analysis error contract.
    """
    charset = declared_charset or sniff_charset(data) or "utf-8"
    try:
        return data.decode(charset)
    except UnicodeDecodeError as exc:
        raise EncodingError(charset, f"cannot decode input as {charset!r}: {exc}") from None
    except LookupError:
        raise EncodingError(charset, f"unknown charset {charset!r}") from None


def parse_html(source, declared_charset=None) -> Element:
    """Parse HTML bytes or text into a document Element (never fails on markup)."""
    if isinstance(source, bytes):
        source = decode_html(source, declared_charset)
    builder = _TreeBuilder()
    builder.feed(source)
    builder.close()
    return builder.finish()
