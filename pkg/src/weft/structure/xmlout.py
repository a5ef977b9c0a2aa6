"""Serialize extracted key/value pairs as canonical XML."""

import re
import xml.etree.ElementTree as ET

from weft.errors import ConfigError

_NAME_CHARS = re.compile(r"[^\w.\-]", re.UNICODE)


def sanitize_xml_name(text: str) -> str:
    """Turn a display key into a valid XML element name.

    Space-separated words are camel-cased ("Title of doc" -> "TitleOfDoc"),
    characters illegal in XML names are dropped, a leading digit gets a
    '_' prefix. Returns "" when nothing survives.
    """
    words = [_NAME_CHARS.sub("", word) for word in text.split()]
    words = [word for word in words if word]
    name = "".join(words[:1] + [w[:1].upper() + w[1:] for w in words[1:]])
    if name and (name[0].isdigit() or name[0] in ".-"):
        name = "_" + name
    return name


def element_name(dictionary, synset_id) -> str:
    name = sanitize_xml_name(dictionary.get(synset_id).canonical)
    if not name:
        raise ConfigError(f"synset {synset_id} has no XML-representable canonical key")
    return name


def to_xml(pairs, dictionary, hierarchical=False, root_tag="document") -> bytes:
    """UTF-8 XML document with one element per pair, in pair order.

    Flat mode emits repeated sibling elements for repeated synsets. In
    hierarchical mode each pair is nested inside its synset's ancestor
    chain; consecutive pairs sharing a chain share the wrapper elements.
    """
    root = ET.Element(root_tag)
    open_chain = []  # [(synset_id, element)] wrappers currently accepting children

    for pair in pairs:
        leaf_name = element_name(dictionary, pair.synset_id)
        chain = dictionary.ancestor_chain(pair.synset_id) if hierarchical else []

        keep = 0
        while keep < len(chain) and keep < len(open_chain) and open_chain[keep][0] == chain[keep]:
            keep += 1
        del open_chain[keep:]
        for ancestor_id in chain[keep:]:
            parent = open_chain[-1][1] if open_chain else root
            wrapper = ET.SubElement(parent, element_name(dictionary, ancestor_id))
            open_chain.append((ancestor_id, wrapper))

        parent = open_chain[-1][1] if open_chain else root
        ET.SubElement(parent, leaf_name).text = pair.value

    return ET.tostring(root, encoding="UTF-8", xml_declaration=True)


def from_xml(data, dictionary):
    """Inverse view of to_xml: the (synset_id, value) list found in a document.

    Leaf elements whose tag matches a sanitized canonical key are reported
    in document order; unknown tags are skipped.
    """
    names = {}
    for synset in dictionary.ordered():
        names.setdefault(sanitize_xml_name(synset.canonical), synset.id)
    root = ET.fromstring(data)
    found = []
    for element in root.iter():
        if len(element) == 0 and element.tag in names:
            found.append((names[element.tag], element.text or ""))
    return found
