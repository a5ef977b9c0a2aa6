"""Command-line entry points for the full workflow:

fetch -> analyze (HTML to XML) -> parse (mapping to sink) -> validate.
"""

import json
import sys
from pathlib import Path

import click

from weft.archive import ArchiveStore, parse_date
from weft.dictionary import Dictionary, group_synsets, propose_keys, term_frequencies
from weft.engine.graph import derive_dependency_graph
from weft.engine.run import run_batch
from weft.engine.sinks import open_sink
from weft.errors import WeftError
from weft.fetcher import FetchJob, fetch_and_archive
from weft.mapping import import_mapping_file, load_schema_file
from weft.pipeline import PipelineDef, charset_from_content_type, run_pipeline
from weft.structure.extract import ExtractionConfig, extract_pairs
from weft.structure.paths import PathStrategy, build_paths
from weft.structure.xmlout import to_xml
from weft.validation import (
    collect_xpaths,
    conversion_report_html,
    coverage,
    occupation_ratios,
    render_conversion_report,
    sample_unmapped,
    stats_from_json,
    stats_to_json,
)


def _selection(store, text):
    """Archive selection 'source[:from[:to]]' with ISO-8601 bounds."""
    parts = text.split(":", 2)
    source = parts[0]
    date_from = parse_date(parts[1]) if len(parts) > 1 and parts[1] else None
    date_to = parse_date(parts[2]) if len(parts) > 2 and parts[2] else None
    return store.list(source=source, date_from=date_from, date_to=date_to)


def _extraction_config(strategy, key_threshold, link_threshold, link_similarity):
    return ExtractionConfig(
        strategy=PathStrategy.parse(strategy),
        key_threshold=key_threshold,
        link_threshold=link_threshold,
        link_similarity=link_similarity,
    )


@click.group()
def main():
    """Web knowledge-extraction toolkit."""


@main.command()
@click.option("--job", "job_path", required=True, type=click.Path(exists=True),
              help="Fetch job config (JSON).")
@click.option("--store", "store_dir", required=True, type=click.Path(), help="Archive root.")
def fetch(job_path, store_dir):
    """Fetch a job's URLs and archive the responses."""
    job = FetchJob.load(job_path)
    report = fetch_and_archive(job, ArchiveStore(store_dir))
    click.echo(json.dumps(
        {"fetched": report.fetched, "failed": report.failed, "skipped": report.skipped}
    ))


@main.command()
@click.option("--dict", "dict_path", required=True, type=click.Path(exists=True))
@click.option("--strategy", default="tagonly", show_default=True,
              type=click.Choice(["tagonly", "unique", "attr"]))
@click.option("--in", "selection", default=None, help="Archive selection source[:from[:to]].")
@click.option("--store", "store_dir", default=None, type=click.Path())
@click.option("--in-dir", "in_dir", default=None, type=click.Path(exists=True),
              help="Directory of HTML files instead of an archive selection.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--key-threshold", default=0.8, show_default=True)
@click.option("--link-threshold", default=0.6, show_default=True)
@click.option("--link-similarity", default="prefix", type=click.Choice(["prefix", "edit"]),
              show_default=True)
@click.option("--hierarchical", is_flag=True, default=False)
def analyze(dict_path, strategy, selection, store_dir, in_dir, out_dir,
            key_threshold, link_threshold, link_similarity, hierarchical):
    """Convert HTML inputs to key/value XML using a dictionary."""
    dictionary = Dictionary.load(dict_path)
    config = _extraction_config(strategy, key_threshold, link_threshold, link_similarity)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    inputs = []
    if selection:
        if not store_dir:
            raise click.UsageError("--in requires --store")
        store = ArchiveStore(store_dir)
        for record in _selection(store, selection):
            _rec, payload = store.get(record.id)
            charset = charset_from_content_type(record.content_type)
            inputs.append((record.id, payload, charset))
    elif in_dir:
        for path in sorted(Path(in_dir).glob("*.htm*")):
            inputs.append((path.stem, path.read_bytes(), None))
    else:
        raise click.UsageError("pass --in with --store, or --in-dir")

    written = 0
    for name, payload, charset in inputs:
        entries = build_paths(payload, config.strategy, declared_charset=charset)
        pairs = extract_pairs(entries, dictionary, config)
        (out / f"{name}.xml").write_bytes(
            to_xml(pairs, dictionary, hierarchical=hierarchical)
        )
        written += 1
    click.echo(json.dumps({"documents": written, "outDir": str(out)}))


@main.command()
@click.option("--mapping", "mapping_path", required=True, type=click.Path(exists=True))
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True))
@click.option("--pipeline", "pipeline_path", default=None, type=click.Path(exists=True))
@click.option("--store", "store_dir", default=None, type=click.Path())
@click.option("--source", default=None, help="Archive source to process via the pipeline.")
@click.option("--in-dir", "in_dir", default=None, type=click.Path(exists=True),
              help="Directory of normalized XML files.")
@click.option("--sink", "sink_kind", default="sql", type=click.Choice(["sql", "tsv"]),
              show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="SQL file or TSV directory.")
@click.option("--workers", default=1, show_default=True)
@click.option("--block-size", default=1000, show_default=True)
@click.option("--flush-threshold", default=10000, show_default=True)
@click.option("--no-cache", is_flag=True, default=False)
def parse(mapping_path, schema_path, pipeline_path, store_dir, source, in_dir,
          sink_kind, out_path, workers, block_size, flush_threshold, no_cache):
    """Execute a mapping over XML documents into a SQL or TSV sink."""
    schema = load_schema_file(schema_path)
    mapping = import_mapping_file(mapping_path, schema)

    documents = []
    if in_dir:
        for path in sorted(Path(in_dir).glob("*.xml")):
            documents.append((path.stem, path.read_bytes()))
    elif source:
        if not (store_dir and pipeline_path):
            raise click.UsageError("--source requires --store and --pipeline")
        store = ArchiveStore(store_dir)
        definition = PipelineDef.load(pipeline_path)
        for record in store.list(source=source):
            try:
                documents.append((record.id, run_pipeline(source, record, store, definition)))
            except WeftError as exc:
                click.echo(f"pipeline: {record.id}: {exc}", err=True)
    else:
        raise click.UsageError("pass --in-dir, or --source with --store and --pipeline")

    graph = derive_dependency_graph(schema)
    sink = open_sink(sink_kind, out_path, graph)
    report = run_batch(
        documents, mapping, schema, sink,
        workers=workers, block_size=block_size,
        flush_threshold=flush_threshold, cache=not no_cache,
    )
    click.echo(json.dumps({
        "docs": report.docs,
        "failures": report.failures,
        "rows": report.rows,
    }))


@main.group()
def validate():
    """Coverage and conversion-quality reports."""


@validate.command("xpaths")
@click.option("--in-dir", "in_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path())
@click.option("--workers", default=1, show_default=True)
def validate_xpaths(in_dir, out_path, workers):
    """Collect the frequency-counted XPath set of an XML corpus."""
    corpus = [(p.name, p.read_bytes()) for p in sorted(Path(in_dir).glob("*.xml"))]
    stats = collect_xpaths(corpus, workers=workers)
    text = stats_to_json(stats)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
        click.echo(json.dumps({"paths": len(stats.counts), "files": stats.files,
                               "skipped": len(stats.skipped), "out": out_path}))
    else:
        click.echo(text)


@validate.command("coverage")
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True))
@click.option("--mapping", "mapping_path", required=True, type=click.Path(exists=True))
@click.option("--sample", "sample_k", default=10, show_default=True)
def validate_coverage(stats_path, mapping_path, sample_k):
    """Compare a corpus path set against a mapping file."""
    stats = stats_from_json(Path(stats_path).read_text("utf-8"))
    mapping = import_mapping_file(mapping_path)
    report = coverage(stats, mapping)
    out = report.to_json_dict()
    out["sampledUnmapped"] = sample_unmapped(report, stats, sample_k)
    click.echo(json.dumps(out, indent=2))


@validate.command("conversion")
@click.option("--dict", "dict_path", required=True, type=click.Path(exists=True))
@click.option("--in", "html_path", required=True, type=click.Path(exists=True))
@click.option("--expected", default="", help="Comma-separated key ids expected present.")
@click.option("--strategy", default="tagonly", type=click.Choice(["tagonly", "unique", "attr"]))
@click.option("--key-threshold", default=0.8, show_default=True)
@click.option("--link-threshold", default=0.6, show_default=True)
@click.option("--link-similarity", default="prefix", type=click.Choice(["prefix", "edit"]))
@click.option("--json", "as_json", is_flag=True, default=False)
def validate_conversion(dict_path, html_path, expected, strategy, key_threshold,
                        link_threshold, link_similarity, as_json):
    """HTML-to-XML conversion report for one document."""
    dictionary = Dictionary.load(dict_path)
    config = _extraction_config(strategy, key_threshold, link_threshold, link_similarity)
    expected_keys = [k for k in expected.split(",") if k] or list(dictionary.synsets)
    report = conversion_report_html(
        Path(html_path).read_bytes(), dictionary, config, expected_keys
    )
    if as_json:
        click.echo(json.dumps(report.to_json_dict(), indent=2))
    else:
        click.echo(render_conversion_report(report))


@validate.command("occupation")
@click.option("--counts", "counts_path", required=True, type=click.Path(exists=True),
              help="JSON file of {table: row count}.")
def validate_occupation(counts_path):
    """Table occupation ratios for loaded row counts."""
    counts = json.loads(Path(counts_path).read_text("utf-8"))
    report = occupation_ratios(counts)
    click.echo(json.dumps(report.to_json_dict(), indent=2))


@main.group("dict")
def dictionary_group():
    """Dictionary induction helpers."""


@dictionary_group.command("induce")
@click.option("--in-dir", "in_dir", required=True, type=click.Path(exists=True),
              help="Directory of sample HTML files.")
@click.option("--min-doc-ratio", default=0.5, show_default=True)
@click.option("--threshold", default=0.8, show_default=True)
@click.option("--strategy", default="tagonly", type=click.Choice(["tagonly", "unique", "attr"]))
@click.option("--language", default="und", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def dict_induce(in_dir, min_doc_ratio, threshold, strategy, language, out_path):
    """Propose and group key candidates from an HTML sample."""
    parsed_strategy = PathStrategy.parse(strategy)
    sample = [
        build_paths(path.read_bytes(), parsed_strategy)
        for path in sorted(Path(in_dir).glob("*.htm*"))
    ]
    stats = term_frequencies(sample)
    candidates = propose_keys(stats, min_doc_ratio)
    dictionary = group_synsets(candidates, threshold, stats=stats, language=language)
    dictionary.save(out_path)
    click.echo(json.dumps({
        "sample": stats.sample_size,
        "candidates": len(candidates),
        "synsets": len(dictionary),
        "out": out_path,
    }))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8640, show_default=True)
@click.option("--store", "store_dir", default=None, type=click.Path())
@click.option("--data-dir", default=None, type=click.Path())
@click.option("--ui", "ui_dir", default=None, type=click.Path(exists=True))
def serve(host, port, store_dir, data_dir, ui_dir):
    """Run the mapping service (and static UI when --ui points at a bundle)."""
    import uvicorn

    from weft.service import create_app

    archive = ArchiveStore(store_dir) if store_dir else None
    app = create_app(archive=archive, data_dir=data_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


def entrypoint():  # pragma: no cover - console script shim
    try:
        main()
    except WeftError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    entrypoint()
