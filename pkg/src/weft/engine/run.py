"""Execute a mapping file over XML documents into a sink.

Per entity occurrence: instantiate, draw a floating id, fill attributes
through first-match XPath lists (with value conversion), recurse into
child entities carrying a reference to the containing row, and keep the
instance only if anything was filled. Fulfilled rows buffer in an entity
pool and flush to the sink in dependency order.
"""

import multiprocessing
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from weft.engine import xpath as xp
from weft.engine.graph import derive_dependency_graph
from weft.engine.ids import IdAllocator, shared_counters
from weft.engine.pool import EntityInstance, EntityPool
from weft.errors import MappingError
from weft.mapping import import_mapping, load_schema


@dataclass
class BoundPath:
    """One bound xpath plus its per-prefix relative remainders."""

    raw: str
    parsed: object
    remainders: dict = field(default_factory=dict)  # prefix str -> (steps, attr|None)


@dataclass
class AttributeSpec:
    name: str
    paths: list
    conversion: dict | None = None


@dataclass
class EntitySpec:
    name: str
    prefixes: list  # parsed element XPaths, binding order
    prefix_keys: list  # their string forms
    attributes: list = field(default_factory=list)
    children: list = field(default_factory=list)
    occurrence_paths: list = field(default_factory=list)  # BoundPath vs parent prefixes


@dataclass
class MappingProgram:
    schema: object
    graph: object
    roots: list  # top-level EntitySpec list


@dataclass
class RunReport:
    docs: int = 0
    failures: list = field(default_factory=list)  # (doc id, message)
    rows: dict = field(default_factory=dict)  # entity -> emitted row count

    def merge_rows(self, counts):
        for entity, count in counts.items():
            self.rows[entity] = self.rows.get(entity, 0) + count


def _strip_prefix(parsed, prefix):
    """Relative (steps, attr) of parsed under prefix, or None if not an extension."""
    if not xp.is_step_prefix(prefix, parsed):
        return None
    return (parsed.steps[len(prefix.steps):], parsed.attr)


def _bind_against(raw, prefixes, prefix_keys, *, allow_attr, what):
    parsed = xp.parse_xpath(raw)
    if not allow_attr and parsed.attr is not None:
        raise MappingError(f"{what}: entity xpath {raw!r} cannot address an attribute")
    bound = BoundPath(raw, parsed)
    for prefix, key in zip(prefixes, prefix_keys):
        remainder = _strip_prefix(parsed, prefix)
        if remainder is not None:
            bound.remainders[key] = remainder
    if not bound.remainders:
        raise MappingError(
            f"{what}: xpath {raw!r} does not extend any entity prefix "
            f"({', '.join(prefix_keys) or 'none'})"
        )
    return bound


def _compile_entity(name, mapping_node, schema_node, parent_spec, dotted):
    if not mapping_node.xpaths:
        raise MappingError(f"{dotted}: entity mapping needs a non-empty __xpath__ list")
    prefixes = []
    for raw in mapping_node.xpaths:
        parsed = xp.parse_xpath(raw)
        if parsed.attr is not None:
            raise MappingError(f"{dotted}: entity xpath {raw!r} cannot address an attribute")
        prefixes.append(parsed)
    spec = EntitySpec(name, prefixes, [str(p) for p in prefixes])

    if parent_spec is not None:
        spec.occurrence_paths = [
            _bind_against(raw, parent_spec.prefixes, parent_spec.prefix_keys,
                          allow_attr=False, what=dotted)
            for raw in mapping_node.xpaths
        ]

    for child_name, child_node in mapping_node.children.items():
        child_schema = schema_node.child(child_name)
        child_dotted = f"{dotted}.{child_name}"
        if child_schema is None:
            raise MappingError(f"{child_dotted}: not in schema")
        if child_schema.is_entity:
            if child_node.is_empty():
                continue
            spec.children.append(
                _compile_entity(child_name, child_node, child_schema, spec, child_dotted)
            )
        else:
            if not child_node.xpaths and not child_node.conversion:
                continue
            paths = [
                _bind_against(raw, spec.prefixes, spec.prefix_keys,
                              allow_attr=True, what=child_dotted)
                for raw in child_node.xpaths
            ]
            spec.attributes.append(AttributeSpec(child_name, paths, child_node.conversion))
    return spec


def compile_mapping(mapping, schema) -> MappingProgram:
    """Validate a mapping against a schema and prepare it for execution.

    All binding errors (names outside the schema, xpaths that do not
    extend their entity's prefixes, attribute paths on entities) surface
    here, before any document is touched.
    """
    graph = derive_dependency_graph(schema)
    roots = []
    for name, node in mapping.roots.items():
        if name != schema.db:
            raise MappingError(f"mapping root {name!r} does not match schema root {schema.db!r}")
        if node.is_empty():
            continue
        roots.append(_compile_entity(name, node, schema, None, name))
    if not roots:
        raise MappingError("mapping binds nothing")
    return MappingProgram(schema, graph, roots)


# -- document execution -------------------------------------------------------


def _dedup_nodes(found):
    seen = set()
    unique = []
    for node, prefix_key in found:
        if id(node) not in seen:
            seen.add(id(node))
            unique.append((node, prefix_key))
    return unique


def _first_match(context, prefix_key, attr_spec: AttributeSpec, cache):
    """First non-empty value of the attribute's xpaths, evaluated in order."""
    for bound in attr_spec.paths:
        remainder = bound.remainders.get(prefix_key)
        if remainder is None:
            continue
        steps, attr = remainder
        for node in xp.select_relative(context, steps, cache):
            if attr is None:
                value = xp.node_string(node)
            else:
                value = xp.attribute_string(node, attr)
            if value:
                return value
    return None


def _convert(value, conversion):
    if conversion and value in conversion:
        return conversion[value]
    return value


def _instantiate(spec, node, prefix_key, parent_ref, allocator, cache, out):
    """Fill one occurrence; append it and its subtree to out (parent first).

    Returns True when the subtree produced anything. A childless,
    attributeless instance is discarded and its id never reaches a sink;
    a fulfilled child keeps its parent alive because the child's row
    needs the parent row its reference points at.
    """
    instance = EntityInstance(spec.name, allocator.next_id(spec.name), {}, parent_ref)
    for attr_spec in spec.attributes:
        value = _first_match(node, prefix_key, attr_spec, cache)
        if value is not None:
            instance.attrs[attr_spec.name] = _convert(value, attr_spec.conversion)

    subtree = []
    self_ref = (spec.name, instance.floating_id)
    for child_spec in spec.children:
        for child_node, child_prefix in _child_occurrences(child_spec, node, prefix_key, cache):
            _instantiate(child_spec, child_node, child_prefix, self_ref, allocator, cache, subtree)

    if instance.attrs or subtree:
        out.append(instance)
        out.extend(subtree)
        return True
    return False


def _child_occurrences(child_spec, parent_node, parent_prefix_key, cache):
    found = []
    for bound in child_spec.occurrence_paths:
        remainder = bound.remainders.get(parent_prefix_key)
        if remainder is None:
            continue
        steps, _attr = remainder
        for node in xp.select_relative(parent_node, steps, cache):
            found.append((node, str(bound.parsed)))
    return _dedup_nodes(found)


def _root_occurrences(spec, root, cache):
    found = []
    for prefix, key in zip(spec.prefixes, spec.prefix_keys):
        for node in xp.select_absolute(root, prefix, cache):
            found.append((node, key))
    return _dedup_nodes(found)


def process_document(document, program: MappingProgram, allocator, pool, cache_enabled=True):
    """Run the mapping over one parsed or raw XML document; rows go to pool.

    Returns {entity: instances emitted}. The query cache lives and dies
    with the document, so caching can never change results.
    """
    root = ET.fromstring(document) if isinstance(document, (bytes, str)) else document
    cache = {} if cache_enabled else None
    emitted = []
    for spec in program.roots:
        for node, prefix_key in _root_occurrences(spec, root, cache):
            _instantiate(spec, node, prefix_key, None, allocator, cache, emitted)
    counts = {}
    for instance in emitted:
        pool.add(instance)
        counts[instance.entity] = counts.get(instance.entity, 0) + 1
    return counts


# -- batch runner ----------------------------------------------------------------

_WORKER = {}


def _init_worker(mapping_dict, schema_dict, counters, block_size, cache_enabled):
    schema = load_schema(schema_dict)
    mapping = import_mapping(mapping_dict, schema)
    _WORKER["program"] = compile_mapping(mapping, schema)
    _WORKER["allocator"] = IdAllocator(counters, block_size)
    _WORKER["cache"] = cache_enabled


def _process_chunk(chunk):
    program = _WORKER["program"]
    allocator = _WORKER["allocator"]
    docs = 0
    failures = []
    pool = EntityPool()
    for doc_id, data in chunk:
        try:
            process_document(data, program, allocator, pool, _WORKER["cache"])
        except (ET.ParseError, MappingError, ValueError) as exc:
            failures.append((doc_id, str(exc)))
        else:
            docs += 1
    instances = [row for entity in pool.queues for row in pool.queues[entity]]
    return docs, failures, instances


def _chunked(items, size):
    for start in range(0, len(items), size):
        yield items[start:start + size]


def run_batch(
    documents,
    mapping,
    schema,
    sink,
    workers=1,
    block_size=1000,
    flush_threshold=10000,
    cache=True,
) -> RunReport:
    """Process (doc_id, xml bytes) pairs through a mapping into a sink.

    Documents are parsed and mapped in parallel across workers; the sink
    is fed by this process only, in dependency order, so the final table
    contents are independent of the worker count (row order inside an
    entity aside). Individual document failures are recorded and the run
    continues.
    """
    documents = list(documents)
    program = compile_mapping(mapping, schema)
    counters = shared_counters(program.graph.order)
    report = RunReport()
    pool = EntityPool()

    def maybe_flush(force=False):
        if pool.total and (force or pool.total >= flush_threshold):
            pool.flush(program.graph, sink)

    if workers <= 1:
        allocator = IdAllocator(counters, block_size)
        for doc_id, data in documents:
            try:
                counts = process_document(data, program, allocator, pool, cache)
            except (ET.ParseError, MappingError, ValueError) as exc:
                report.failures.append((doc_id, str(exc)))
            else:
                report.docs += 1
                report.merge_rows(counts)
            maybe_flush()
    else:
        context = multiprocessing.get_context("fork")
        chunk_size = max(1, len(documents) // (workers * 4) or 1)
        with context.Pool(
            workers,
            initializer=_init_worker,
            initargs=(mapping.to_json_dict(), schema.to_json_dict(), counters,
                      block_size, cache),
        ) as worker_pool:
            for docs, failures, instances in worker_pool.imap(
                _process_chunk, _chunked(documents, chunk_size)
            ):
                report.docs += docs
                report.failures.extend(failures)
                counts = {}
                for instance in instances:
                    counts[instance.entity] = counts.get(instance.entity, 0) + 1
                report.merge_rows(counts)
                pool.extend(instances)
                maybe_flush()

    maybe_flush(force=True)
    sink.close()
    return report
