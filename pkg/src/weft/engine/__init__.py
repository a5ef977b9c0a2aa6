"""Mapping execution engine: XPath dialect, dependency graph, id blocks,
entity pooling, sinks and the batch runner (import submodules directly)."""
