"""Declarative target schema and expert XPath bindings.

The schema is a JSON tree of entities (Model/ForeignKey) and typed
attribute leaves. A mapping session loads sample XML documents, lets the
expert bind XPaths onto schema paths, and exports the mapping file the
engine executes: per node an ordered ``__xpath__`` list (first match
wins) plus an optional ``__conversion__`` value map.
"""

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone

from weft.engine.xpath import parse_xpath
from weft.errors import MappingError, SchemaError

SCHEMA_TYPES = ("Model", "TextField", "NullBooleanField", "DateTimeField", "ForeignKey")
ENTITY_TYPES = ("Model", "ForeignKey")

XPATH_KEY = "__xpath__"
CONVERSION_KEY = "__conversion__"


# -- schema -----------------------------------------------------------------


@dataclass
class SchemaNode:
    db: str
    type: str
    repetitive: bool = False
    text: str = ""
    nodes: list = field(default_factory=list)

    @property
    def is_entity(self):
        return self.type in ENTITY_TYPES

    def child(self, db):
        for node in self.nodes:
            if node.db == db:
                return node
        return None

    def find(self, dotted_path):
        """Resolve 'root.child.leaf' db-name paths; None when absent."""
        parts = dotted_path.split(".")
        if not parts or parts[0] != self.db:
            return None
        node = self
        for part in parts[1:]:
            node = node.child(part)
            if node is None:
                return None
        return node

    def attributes(self):
        return [n for n in self.nodes if not n.is_entity]

    def child_entities(self):
        return [n for n in self.nodes if n.is_entity]

    def to_json_dict(self):
        out = {
            "db": self.db,
            "repetitive": self.repetitive,
            "text": self.text,
            "type": self.type,
        }
        if self.nodes:
            out["nodes"] = [node.to_json_dict() for node in self.nodes]
        return out


def _parse_bool(value, path):
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "false"):
        return value.lower() == "true"
    raise SchemaError(f"repetitive must be a boolean, got {value!r}", path)


def _parse_schema_node(raw, path, is_root):
    if not isinstance(raw, dict):
        raise SchemaError("schema node must be an object", path)
    if "db" not in raw or not isinstance(raw["db"], str) or not raw["db"]:
        raise SchemaError("missing or empty 'db' name", path)
    node_type = raw.get("type")
    if node_type not in SCHEMA_TYPES:
        raise SchemaError(
            f"unknown type {node_type!r} (expected one of {', '.join(SCHEMA_TYPES)})", path
        )
    if is_root and node_type != "Model":
        raise SchemaError("root node must have type Model", path)
    children_raw = raw.get("nodes", [])
    if not isinstance(children_raw, list):
        raise SchemaError("'nodes' must be a list", path)
    if node_type not in ENTITY_TYPES and children_raw:
        raise SchemaError(f"leaf type {node_type} cannot have nodes", path)
    children = []
    seen = set()
    for index, child_raw in enumerate(children_raw):
        child = _parse_schema_node(child_raw, f"{path}.nodes[{index}]", is_root=False)
        if child.db in seen:
            raise SchemaError(f"duplicate sibling db name {child.db!r}", f"{path}.nodes[{index}]")
        seen.add(child.db)
        children.append(child)
    return SchemaNode(
        db=raw["db"],
        type=node_type,
        repetitive=_parse_bool(raw.get("repetitive", False), path),
        text=raw.get("text", ""),
        nodes=children,
    )


def load_schema(data) -> SchemaNode:
    """Parse and validate a schema JSON document."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            raw = json.loads(data)
        except ValueError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    else:
        raw = data
    return _parse_schema_node(raw, "$", is_root=True)


def load_schema_file(path) -> SchemaNode:
    with open(path, "rb") as handle:
        return load_schema(handle.read())


# -- sample inspection --------------------------------------------------------


def _direct_text(element):
    parts = [element.text or ""]
    parts.extend(child.tail or "" for child in element)
    return " ".join("".join(parts).split())


def enumerate_xpaths(data) -> dict:
    """Distinct absolute element/attribute paths with a non-empty sample value.

    Element paths use tag names only (no positions); attributes get a
    '/@name' suffix. A path's value is the element's own text, so pure
    container elements do not appear. Returns {xpath: first sample value}.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MappingError(f"malformed XML: {exc} (line {exc.position[0]})") from exc
    found = {}

    def visit(element, prefix):
        path = f"{prefix}/{element.tag}"
        value = _direct_text(element)
        if value and path not in found:
            found[path] = value
        for name, raw in sorted(element.attrib.items()):
            attr_value = " ".join(raw.split())
            attr_path = f"{path}/@{name}"
            if attr_value and attr_path not in found:
                found[attr_path] = attr_value
        for child in element:
            visit(child, path)

    visit(root, "")
    return found


# -- mapping file -------------------------------------------------------------


@dataclass
class MappingNode:
    xpaths: list = field(default_factory=list)
    conversion: dict | None = None
    children: dict = field(default_factory=dict)

    def is_empty(self):
        return not self.xpaths and not self.conversion and not any(
            not child.is_empty() for child in self.children.values()
        )

    def to_json_dict(self):
        out = {}
        for name, child in self.children.items():
            if not child.is_empty():
                out[name] = child.to_json_dict()
        out[XPATH_KEY] = list(self.xpaths)
        if self.conversion:
            out[CONVERSION_KEY] = dict(self.conversion)
        return out


@dataclass
class MappingFile:
    version: str = ""
    roots: dict = field(default_factory=dict)

    def all_xpaths(self):
        """Every bound xpath string, entity and attribute alike."""
        collected = []

        def visit(node):
            collected.extend(node.xpaths)
            for child in node.children.values():
                visit(child)

        for root in self.roots.values():
            visit(root)
        return collected

    def to_json_dict(self):
        out = {"version": self.version}
        for name, node in self.roots.items():
            out[name] = node.to_json_dict()
        return out


def _parse_mapping_node(raw, path):
    if not isinstance(raw, dict):
        raise MappingError(f"{path}: mapping node must be an object")
    node = MappingNode()
    for xpath in raw.get(XPATH_KEY, []):
        parse_xpath(xpath)
        node.xpaths.append(xpath)
    conversion = raw.get(CONVERSION_KEY)
    if conversion is not None:
        if not isinstance(conversion, dict):
            raise MappingError(f"{path}: {CONVERSION_KEY} must be an object")
        node.conversion = {str(k): str(v) for k, v in conversion.items()}
    for name, child_raw in raw.items():
        if name in (XPATH_KEY, CONVERSION_KEY):
            continue
        node.children[name] = _parse_mapping_node(child_raw, f"{path}.{name}")
    return node


def import_mapping(data, schema: SchemaNode | None = None) -> MappingFile:
    """Parse a mapping JSON document, optionally validating it against a schema.

    With a schema, an accepted mapping is guaranteed to load in the engine
    without further errors: name resolution, entity prefixes and attribute
    xpath extension are all checked here.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            raw = json.loads(data)
        except ValueError as exc:
            raise MappingError(f"not valid JSON: {exc}") from exc
    else:
        raw = data
    if not isinstance(raw, dict):
        raise MappingError("mapping document must be a JSON object")
    mapping = MappingFile(version=str(raw.get("version", "")))
    for name, node_raw in raw.items():
        if name == "version":
            continue
        mapping.roots[name] = _parse_mapping_node(node_raw, name)
    if schema is not None:
        problems = unresolved_names(mapping, schema)
        if problems:
            raise MappingError("mapping names not in schema: " + ", ".join(problems))
        from weft.engine.run import compile_mapping  # deferred: engine imports mapping

        compile_mapping(mapping, schema)
    return mapping


def import_mapping_file(path, schema=None) -> MappingFile:
    with open(path, "rb") as handle:
        return import_mapping(handle.read(), schema)


def unresolved_names(mapping: MappingFile, schema: SchemaNode):
    """Dotted mapping paths that do not resolve to a schema node."""
    problems = []

    def visit(node, schema_node, dotted):
        if schema_node is None:
            problems.append(dotted)
            return
        for name, child in node.children.items():
            visit(child, schema_node.child(name), f"{dotted}.{name}")

    for name, node in mapping.roots.items():
        visit(node, schema if schema.db == name else None, name)
    return problems


def serialize_mapping(mapping: MappingFile) -> bytes:
    return (json.dumps(mapping.to_json_dict(), ensure_ascii=False, indent=4) + "\n").encode(
        "utf-8"
    )


# -- interactive session --------------------------------------------------------


class MappingSession:
    """One expert's mapping workspace: schema, samples, draft and edit log.

    Every committed edit appends to the log and bumps ``version``; the
    draft is a pure function of the log, so replaying it reproduces the
    draft exactly (used for crash recovery and the optimistic-concurrency
    checks in the HTTP facade).
    """

    def __init__(self, schema: SchemaNode):
        self.schema = schema
        self.samples = {}  # sample id -> xml bytes
        self.draft = MappingFile(roots={schema.db: MappingNode()})
        self.edit_log = []
        self.version = 0
        self._stamp_date = None
        self._stamp_counter = 0

    # -- samples ----------------------------------------------------------

    def add_sample(self, sample_id, data) -> dict:
        """Register one sample document; returns its enumerated xpaths."""
        xpaths = enumerate_xpaths(data)
        self.samples[sample_id] = data
        return xpaths

    def enumerate_samples(self) -> dict:
        """Merged {xpath: sample value} over all loaded samples."""
        merged = {}
        for sample_id in sorted(self.samples):
            for xpath, value in enumerate_xpaths(self.samples[sample_id]).items():
                merged.setdefault(xpath, value)
        return merged

    # -- edits --------------------------------------------------------------

    def _resolve(self, schema_path) -> SchemaNode:
        node = self.schema.find(schema_path)
        if node is None:
            raise MappingError(f"unknown schema path {schema_path!r}")
        return node

    def _mapping_node(self, schema_path) -> MappingNode:
        parts = schema_path.split(".")
        node = self.draft.roots[self.schema.db]
        if parts[0] != self.schema.db:
            raise MappingError(f"unknown schema path {schema_path!r}")
        for part in parts[1:]:
            node = node.children.setdefault(part, MappingNode())
        return node

    def _commit(self, op, **args):
        self.edit_log.append({"op": op, **args})
        self.version += 1

    def bind(self, schema_path, xpath):
        """Append an xpath to a schema node's list; duplicates are a no-op."""
        schema_node = self._resolve(schema_path)
        parsed = parse_xpath(xpath)
        if schema_node.is_entity and parsed.attr is not None:
            raise MappingError(
                f"cannot bind attribute xpath {xpath!r} to entity {schema_path!r}"
            )
        node = self._mapping_node(schema_path)
        if xpath in node.xpaths:
            return
        node.xpaths.append(xpath)
        self._commit("bind", schemaPath=schema_path, xpath=xpath)

    def unbind(self, schema_path, xpath):
        """Remove a bound xpath; absent bindings are a no-op."""
        self._resolve(schema_path)
        node = self._mapping_node(schema_path)
        if xpath not in node.xpaths:
            return
        node.xpaths.remove(xpath)
        self._commit("unbind", schemaPath=schema_path, xpath=xpath)

    def set_conversion(self, schema_path, source, target):
        """Declare that extracted value `source` is stored as `target`."""
        schema_node = self._resolve(schema_path)
        if schema_node.is_entity:
            raise MappingError(f"conversions only apply to attribute leaves, not {schema_path!r}")
        node = self._mapping_node(schema_path)
        if node.conversion is None:
            node.conversion = {}
        if node.conversion.get(source) == target:
            return
        node.conversion[source] = target
        self._commit("set_conversion", schemaPath=schema_path, **{"from": source, "to": target})

    # -- export / recovery -----------------------------------------------------

    def _stamp_version(self, now=None) -> str:
        now = now or datetime.now(timezone.utc)
        day = now.strftime("%Y.%m.%d")
        if day == self._stamp_date:
            self._stamp_counter += 1
        else:
            self._stamp_date = day
            self._stamp_counter = 1
        return f"{day}.{self._stamp_counter:02d}"

    def export_mapping(self, now=None) -> bytes:
        self.draft.version = self._stamp_version(now)
        return serialize_mapping(self.draft)

    def replay(self, edit_log):
        for event in edit_log:
            args = {k: v for k, v in event.items() if k != "op"}
            if event["op"] == "bind":
                self.bind(args["schemaPath"], args["xpath"])
            elif event["op"] == "unbind":
                self.unbind(args["schemaPath"], args["xpath"])
            elif event["op"] == "set_conversion":
                self.set_conversion(args["schemaPath"], args["from"], args["to"])
            else:
                raise MappingError(f"unknown edit-log op {event['op']!r}")

    def persist(self, path):
        state = {"log": self.edit_log}
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(state, handle, ensure_ascii=False, indent=2)

    @classmethod
    def restore(cls, path, schema: SchemaNode) -> "MappingSession":
        with open(path, encoding="utf-8") as handle:
            state = json.load(handle)
        session = cls(schema)
        session.replay(state["log"])
        return session
