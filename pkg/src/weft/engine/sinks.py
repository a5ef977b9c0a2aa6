"""Database-independent sinks: SQL statement file and per-table TSV files.

Row order inside a batch and batch order across entities follow the
dependency graph, so replaying the SQL file top to bottom satisfies
foreign-key checks. All values are text-typed; the id and parent-ref
columns are integers.
"""

from pathlib import Path

from weft.errors import StoreError


def entity_columns(graph):
    """Column layout per entity: id, schema attributes, container ref last."""
    layout = {}
    for entity in graph.order:
        node = graph.entities[entity]
        columns = ["id"] + [attr.db for attr in node.attributes()]
        container = graph.containers[entity]
        if container is not None:
            columns.append(f"{container}_id")
        layout[entity] = columns
    return layout


def _row_values(instance, attrs, container):
    values = [instance.floating_id]
    values.extend(instance.attrs.get(name) for name in attrs)
    if container is not None:
        values.append(instance.parent_ref[1] if instance.parent_ref else None)
    return values


class SqlSink:
    """One file of CREATE TABLE + batched INSERT statements, deterministic text."""

    def __init__(self, path, graph):
        self.path = Path(path)
        self.graph = graph
        self.columns = entity_columns(graph)
        self.rows_written = {}
        try:
            self._handle = open(self.path, "w", encoding="utf-8")
            for entity in graph.order:
                self._handle.write(self._create_table(entity))
        except OSError as exc:
            raise StoreError(f"cannot open SQL sink {path}: {exc}") from exc

    def _create_table(self, entity):
        node = self.graph.entities[entity]
        parts = ['"id" INTEGER PRIMARY KEY']
        parts.extend(f'"{attr.db}" TEXT' for attr in node.attributes())
        container = self.graph.containers[entity]
        if container is not None:
            parts.append(f'"{container}_id" INTEGER REFERENCES "{container}"("id")')
        return f'CREATE TABLE "{entity}" ({", ".join(parts)});\n'

    @staticmethod
    def _literal(value):
        if value is None:
            return "NULL"
        if isinstance(value, int):
            return str(value)
        return "'" + str(value).replace("'", "''") + "'"

    def write_batch(self, entity, instances):
        if not instances:
            return
        columns = self.columns[entity]
        attrs = columns[1:-1] if self.graph.containers[entity] else columns[1:]
        container = self.graph.containers[entity]
        column_list = ", ".join(f'"{c}"' for c in columns)
        rows = ",\n  ".join(
            "(" + ", ".join(self._literal(v) for v in _row_values(i, attrs, container)) + ")"
            for i in instances
        )
        try:
            self._handle.write(f'INSERT INTO "{entity}" ({column_list}) VALUES\n  {rows};\n')
        except OSError as exc:
            raise StoreError(f"SQL sink write failed: {exc}") from exc
        self.rows_written[entity] = self.rows_written.get(entity, 0) + len(instances)

    def close(self):
        self._handle.close()


def _escape_tsv(value):
    if value is None:
        return ""
    return (
        str(value)
        .replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


class TsvSink:
    """One tab-delimited file per entity with a header row of column names."""

    def __init__(self, directory, graph):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.graph = graph
        self.columns = entity_columns(graph)
        self.rows_written = {}
        self._handles = {}

    def _handle_for(self, entity):
        handle = self._handles.get(entity)
        if handle is None:
            try:
                handle = open(self.directory / f"{entity}.tsv", "w", encoding="utf-8")
            except OSError as exc:
                raise StoreError(f"cannot open TSV sink for {entity}: {exc}") from exc
            handle.write("\t".join(self.columns[entity]) + "\n")
            self._handles[entity] = handle
        return handle

    def write_batch(self, entity, instances):
        if not instances:
            return
        handle = self._handle_for(entity)
        container = self.graph.containers[entity]
        attrs = self.columns[entity][1:-1] if container else self.columns[entity][1:]
        try:
            for instance in instances:
                values = _row_values(instance, attrs, container)
                handle.write("\t".join(_escape_tsv(v) for v in values) + "\n")
        except OSError as exc:
            raise StoreError(f"TSV sink write failed: {exc}") from exc
        self.rows_written[entity] = self.rows_written.get(entity, 0) + len(instances)

    def close(self):
        for handle in self._handles.values():
            handle.close()


def open_sink(kind, path, graph):
    if kind == "sql":
        return SqlSink(path, graph)
    if kind == "tsv":
        return TsvSink(path, graph)
    raise ValueError(f"unknown sink kind {kind!r}")
