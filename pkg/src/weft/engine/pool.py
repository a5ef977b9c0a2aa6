"""Buffered entity rows, flushed as per-entity batches in dependency order."""

from dataclasses import dataclass, field


@dataclass
class EntityInstance:
    entity: str
    floating_id: int
    attrs: dict = field(default_factory=dict)
    parent_ref: tuple | None = None  # (entity name, floating id) of the containing row

    @property
    def fulfilled(self):
        return bool(self.attrs)


class EntityPool:
    """FIFO queues per entity; one flush drains everything, containers first."""

    def __init__(self):
        self.queues = {}
        self.total = 0

    def add(self, instance: EntityInstance):
        self.queues.setdefault(instance.entity, []).append(instance)
        self.total += 1

    def extend(self, instances):
        for instance in instances:
            self.add(instance)

    def flush(self, graph, sink) -> dict:
        """Emit every queue as one batch following the dependency order."""
        emitted = {}
        for entity in graph.order:
            rows = self.queues.pop(entity, [])
            if rows:
                sink.write_batch(entity, rows)
                emitted[entity] = len(rows)
        if self.queues:
            stray = sorted(self.queues)
            raise RuntimeError(f"pool holds entities outside the dependency graph: {stray}")
        self.total = 0
        return emitted
