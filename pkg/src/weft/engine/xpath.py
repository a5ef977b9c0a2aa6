"""The toolkit's XPath dialect: absolute child steps, optional trailing @attr.

This is exactly the subset mapping files use: no predicates, axes,
wildcards or functions. Evaluation is ElementTree-based and supports two
roots for absolute paths: if the first step names the document root
element the walk starts there, otherwise the steps are resolved against
the root's children (mapping files commonly omit the enclosing root tag).
"""

import re
from dataclasses import dataclass

from weft.errors import MappingError

_STEP = re.compile(r"[^\s/@\[\]()|*]+")


@dataclass(frozen=True)
class XPath:
    steps: tuple
    attr: str | None = None

    def __str__(self):
        text = "/" + "/".join(self.steps)
        if self.attr is not None:
            text += f"/@{self.attr}"
        return text


def parse_xpath(text: str) -> XPath:
    """Parse and validate a dialect path; raises MappingError otherwise."""
    if not isinstance(text, str) or not text.startswith("/"):
        raise MappingError(f"xpath must be absolute: {text!r}")
    parts = text[1:].split("/")
    if parts and parts[-1].startswith("@"):
        attr = parts[-1][1:]
        parts = parts[:-1]
        if not _STEP.fullmatch(attr or ""):
            raise MappingError(f"bad attribute name in xpath {text!r}")
    else:
        attr = None
    if not parts:
        raise MappingError(f"empty xpath {text!r}")
    for part in parts:
        if not _STEP.fullmatch(part):
            raise MappingError(f"unsupported xpath step {part!r} in {text!r} "
                               "(dialect allows plain child steps and a trailing @attr)")
    return XPath(tuple(parts), attr)


def is_step_prefix(prefix: XPath, path: XPath) -> bool:
    """True when path extends prefix on step boundaries (prefix has no @attr)."""
    if prefix.attr is not None:
        return False
    n = len(prefix.steps)
    return len(path.steps) >= n and path.steps[:n] == prefix.steps


def select_absolute(root, xpath: XPath, cache=None):
    """Element nodes for an absolute dialect path evaluated from the document root."""
    key = ("abs", id(root), str(xpath))
    if cache is not None and key in cache:
        return cache[key]
    steps = xpath.steps
    if steps[0] == root.tag:
        nodes = _walk([root], steps[1:])
    else:
        nodes = _walk([root], steps)
    if cache is not None:
        cache[key] = nodes
    return nodes


def select_relative(context, steps, cache=None):
    """Element nodes for relative child steps under one context node."""
    key = ("rel", id(context), steps)
    if cache is not None and key in cache:
        return cache[key]
    nodes = _walk([context], steps)
    if cache is not None:
        cache[key] = nodes
    return nodes


def _walk(nodes, steps):
    for step in steps:
        nodes = [child for node in nodes for child in node if child.tag == step]
    return nodes


def node_string(node) -> str:
    """Whitespace-normalized concatenation of a node's descendant text."""
    return " ".join("".join(node.itertext()).split())


def attribute_string(node, attr) -> str:
    return " ".join((node.get(attr) or "").split())
