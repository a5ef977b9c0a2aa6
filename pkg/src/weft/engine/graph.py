"""Entity dependency graph derived from the schema.

Nested entities carry a reference to the row of the entity that contains
them, so the foreign-key-safe insertion order is containers first: the
root model, then its child entities, and so on down. Schemas that reuse
an entity name (which is the only way a tree can express a cycle or an
ambiguous container) are rejected with a configuration error.
"""

from dataclasses import dataclass, field

from weft.errors import ConfigError


@dataclass
class DependencyGraph:
    order: list  # entity names, referenced-before-referencing
    edges: list = field(default_factory=list)  # (referencing, referenced)
    containers: dict = field(default_factory=dict)  # entity -> container name or None
    entities: dict = field(default_factory=dict)  # entity -> SchemaNode


def derive_dependency_graph(schema) -> DependencyGraph:
    """Insertion order and reference edges for every entity in the schema."""
    graph = DependencyGraph(order=[])

    def visit(node, container, ancestors):
        name = node.db
        if name in ancestors:
            cycle = " -> ".join(list(ancestors) + [name])
            raise ConfigError(f"cyclic entity nesting: {cycle}")
        if name in graph.entities:
            raise ConfigError(
                f"entity {name!r} defined twice (under {graph.containers[name]!r} "
                f"and {container!r}); entity names must be unique"
            )
        graph.entities[name] = node
        graph.containers[name] = container
        graph.order.append(name)
        if container is not None:
            graph.edges.append((name, container))
        for child in node.child_entities():
            visit(child, name, ancestors + (name,))

    visit(schema, None, ())
    return graph
