"""Element-path generation for text nodes of an HTML document.

A text node is addressed by the chain of its ancestor elements. Three
renderings of that chain are supported, trading uniqueness for speed:

* TAG_ONLY        html\\body\\div\\p
* UNIQUE_TAG      html1\\body1\\div2\\p1   (per-tag document-order counter)
* UNIQUE_TAG_ATTR html1\\body1\\div2.menu\\p1  (first of id/class/name appended)
"""

from dataclasses import dataclass
from enum import Enum

from weft.structure.htmldom import NON_CONTENT, Element, parse_html

SEPARATOR = "\\"


class PathStrategy(Enum):
    TAG_ONLY = "tagonly"
    UNIQUE_TAG = "unique"
    UNIQUE_TAG_ATTR = "attr"

    @classmethod
    def parse(cls, name):
        for strategy in cls:
            if strategy.value == name or strategy.name.lower() == name.lower():
                return strategy
        raise ValueError(f"unknown path strategy {name!r}")


@dataclass(frozen=True)
class PathStep:
    tag: str
    ordinal: int  # position among same-tag elements, document order, 1-based
    attr_hint: str = ""  # first non-empty of id/class/name

    def token(self, strategy: PathStrategy) -> str:
        if strategy is PathStrategy.TAG_ONLY:
            return self.tag
        base = f"{self.tag}{self.ordinal}"
        if strategy is PathStrategy.UNIQUE_TAG_ATTR and self.attr_hint:
            return f"{base}.{self.attr_hint}"
        return base


@dataclass(frozen=True)
class HtmlPath:
    steps: tuple

    def tokens(self, strategy: PathStrategy) -> tuple:
        return tuple(step.token(strategy) for step in self.steps)

    def tags(self) -> tuple:
        return tuple(step.tag for step in self.steps)

    def render(self, strategy: PathStrategy) -> str:
        return SEPARATOR.join(self.tokens(strategy))

    def __len__(self):
        return len(self.steps)


def _attr_hint(element: Element) -> str:
    for name in ("id", "class", "name"):
        value = (element.attrs.get(name) or "").strip()
        if value:
            return value
    return ""


def _collapse(text: str) -> str:
    return " ".join(text.split())


def build_paths(source, strategy: PathStrategy = PathStrategy.TAG_ONLY, declared_charset=None):
    """List of (HtmlPath, text) for every non-whitespace text node, document order.

    ``source`` is HTML bytes, text or an already-parsed document Element.
    Text is whitespace-collapsed; script/style content is skipped. The
    strategy only affects rendering, every step always carries its
    per-tag ordinal and attribute hint.
    """
    if isinstance(source, Element):
        document = source
    else:
        document = parse_html(source, declared_charset)

    entries = []
    tag_counters = {}

    def walk(element, ancestors):
        for child in element.children:
            if isinstance(child, Element):
                if child.tag in NON_CONTENT:
                    continue
                ordinal = tag_counters.get(child.tag, 0) + 1
                tag_counters[child.tag] = ordinal
                step = PathStep(child.tag, ordinal, _attr_hint(child))
                walk(child, ancestors + (step,))
            else:
                text = _collapse(child)
                if text and ancestors:
                    entries.append((HtmlPath(ancestors), text))

    walk(document, ())
    return entries
