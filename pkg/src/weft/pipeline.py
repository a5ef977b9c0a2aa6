"""Per-source pre/post-processing chains: archive payload in, UTF-8 XML out.

A pipeline is an ordered list of named steps from a closed registry
(custom steps can be registered at startup). Pre steps transform the
payload until it is well-formed UTF-8 XML; post steps clean up the
intermediate files the pre steps left behind. Charset trouble is the
norm in crawled data, so every step that decodes text resolves the
charset as: explicit step parameter, then the archive content type,
then an in-band declaration, then UTF-8.
"""

import csv
import gzip
import io
import json
import os
import re
import tarfile
import tempfile
import xml.etree.ElementTree as ET
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from weft.dictionary import Dictionary
from weft.errors import ConfigError, EncodingError, PipelineStepError
from weft.structure.extract import ExtractionConfig, extract_pairs
from weft.structure.htmldom import sniff_charset
from weft.structure.paths import PathStrategy, build_paths
from weft.structure.xmlout import sanitize_xml_name, to_xml

_CHARSET_IN_CONTENT_TYPE = re.compile(r"charset=['\"]?([\w.-]+)", re.IGNORECASE)
_XML_DECL_ENCODING = re.compile(rb"<\?xml[^>]*encoding=[\"']([\w.-]+)[\"']")

TEMP_DIR_ENV = "WEFT_TMPDIR"


def charset_from_content_type(content_type):
    match = _CHARSET_IN_CONTENT_TYPE.search(content_type or "")
    return match.group(1).lower() if match else None


def sniff_declared_charset(data: bytes):
    match = _XML_DECL_ENCODING.search(data[:256])
    if match:
        return match.group(1).decode("ascii").lower()
    return sniff_charset(data)


def ensure_utf8_xml(data: bytes) -> bytes:
    """Re-serialize XML bytes canonically with a UTF-8 declaration."""
    root = ET.fromstring(data)
    return ET.tostring(root, encoding="UTF-8", xml_declaration=True)


@dataclass
class PipelineContext:
    record: object = None
    store: object = None
    data: bytes = b""
    charset: str | None = None  # set once a step has decoded/re-encoded
    temp_files: list = field(default_factory=list)
    workdir: Path | None = None

    def resolve_charset(self, explicit=None):
        if explicit:
            return explicit
        if self.charset:
            return self.charset
        if self.record is not None:
            declared = charset_from_content_type(self.record.content_type)
            if declared:
                return declared
        return sniff_declared_charset(self.data) or "utf-8"

    def keep_intermediate(self, name, data: bytes):
        """Materialize an intermediate artifact so post steps can remove it."""
        if self.workdir is None:
            return
        path = self.workdir / name
        path.write_bytes(data)
        self.temp_files.append(path)


# -- step registry ------------------------------------------------------------

STEP_REGISTRY = {}


def register_step(name, fn=None):
    """Add a step to the registry (also usable as a decorator)."""

    def add(target):
        if name in STEP_REGISTRY:
            raise ConfigError(f"pipeline step {name!r} already registered")
        STEP_REGISTRY[name] = target
        return target

    return add(fn) if fn is not None else add


@register_step("getFile")
def step_get_file(ctx: PipelineContext):
    _record, payload = ctx.store.get(ctx.record.id)
    ctx.data = payload


@register_step("uncompress")
def step_uncompress(ctx: PipelineContext, format=None, member=None):
    kind = format or _sniff_archive(ctx.data)
    if kind == "gzip":
        ctx.data = gzip.decompress(ctx.data)
    elif kind == "zip":
        with zipfile.ZipFile(io.BytesIO(ctx.data)) as archive:
            ctx.data = archive.read(_pick_member(archive.namelist(), member))
    elif kind == "tar":
        with tarfile.open(fileobj=io.BytesIO(ctx.data)) as archive:
            names = [m.name for m in archive.getmembers() if m.isfile()]
            ctx.data = archive.extractfile(_pick_member(names, member)).read()
    else:
        raise ValueError(f"unsupported or undetected archive format {kind!r}")
    ctx.charset = None  # fresh payload, charset unknown again
    ctx.keep_intermediate("uncompressed", ctx.data)


def _sniff_archive(data: bytes):
    if data[:2] == b"\x1f\x8b":
        return "gzip"
    if data[:4] == b"PK\x03\x04":
        return "zip"
    if len(data) > 262 and data[257:262] == b"ustar":
        return "tar"
    return None


def _pick_member(names, member):
    if member is not None:
        if member not in names:
            raise ValueError(f"archive member {member!r} not found (have {names})")
        return member
    if len(names) != 1:
        raise ValueError(f"archive holds {len(names)} members, pass 'member' to pick one")
    return names[0]


@register_step("reencode")
def step_reencode(ctx: PipelineContext, charset=None):
    source = ctx.resolve_charset(charset)
    try:
        text = ctx.data.decode(source)
    except UnicodeDecodeError as exc:
        raise EncodingError(source, f"cannot re-encode from {source!r}: {exc}") from None
    except LookupError:
        raise EncodingError(source, f"unknown charset {source!r}") from None
    # keep any in-band XML declaration honest about the new encoding
    text = re.sub(
        r"(<\?xml[^>]*encoding=[\"'])([\w.-]+)([\"'])", r"\g<1>utf-8\g<3>", text, count=1
    )
    ctx.data = text.encode("utf-8")
    ctx.charset = "utf-8"
    ctx.keep_intermediate("reencoded", ctx.data)


@register_step("csvToXml")
def step_csv_to_xml(ctx: PipelineContext, headerRow=True, delimiter=","):
    text = ctx.data.decode(ctx.resolve_charset(), errors="strict")
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    rows = [row for row in reader if row]
    if not rows:
        raise ValueError("empty CSV input")
    if headerRow:
        header, rows = rows[0], rows[1:]
        names = [sanitize_xml_name(h) or f"col{i + 1}" for i, h in enumerate(header)]
    else:
        names = [f"col{i + 1}" for i in range(len(rows[0]))]
    root = ET.Element("rows")
    for row in rows:
        element = ET.SubElement(root, "row")
        for name, value in zip(names, row):
            ET.SubElement(element, name).text = value
    ctx.data = ET.tostring(root, encoding="UTF-8", xml_declaration=True)
    ctx.charset = "utf-8"


@register_step("htmlToXml")
def step_html_to_xml(
    ctx: PipelineContext,
    dictionary,
    strategy="tagonly",
    keyThreshold=0.8,
    linkThreshold=0.6,
    linkSimilarity="prefix",
    hierarchical=False,
    rootTag="document",
):
    if not isinstance(dictionary, Dictionary):
        dictionary = Dictionary.load(dictionary)
    config = ExtractionConfig(
        strategy=PathStrategy.parse(strategy),
        key_threshold=keyThreshold,
        link_threshold=linkThreshold,
        link_similarity=linkSimilarity,
    )
    entries = build_paths(ctx.data, config.strategy, declared_charset=ctx.resolve_charset())
    pairs = extract_pairs(entries, dictionary, config)
    ctx.data = to_xml(pairs, dictionary, hierarchical=hierarchical, root_tag=rootTag)
    ctx.charset = "utf-8"


@register_step("rewriteRepetitive")
def step_rewrite_repetitive(ctx: PipelineContext, pattern):
    prefix, _n, suffix = _split_pattern(pattern)
    matcher = re.compile(f"^{re.escape(prefix)}\\d+{re.escape(suffix)}$")
    root = ET.fromstring(ctx.data)
    for element in root.iter():
        if matcher.match(element.tag):
            element.tag = prefix
    if matcher.match(root.tag):
        root.tag = prefix
    ctx.data = ET.tostring(root, encoding="UTF-8", xml_declaration=True)
    ctx.charset = "utf-8"


def _split_pattern(pattern):
    if pattern.count("{n}") != 1:
        raise ValueError(f"pattern {pattern!r} needs exactly one '{{n}}' placeholder")
    prefix, suffix = pattern.split("{n}")
    if not prefix:
        raise ValueError("pattern must start with the repeated element name")
    return prefix, "{n}", suffix


@register_step("removeFile")
def step_remove_file(ctx: PipelineContext):
    for path in ctx.temp_files:
        try:
            os.unlink(path)
        except FileNotFoundError:
            pass
    ctx.temp_files.clear()


# -- definitions and execution ---------------------------------------------------


@dataclass
class Step:
    name: str
    params: dict = field(default_factory=dict)

    def run(self, ctx):
        STEP_REGISTRY[self.name](ctx, **self.params)


@dataclass
class PipelineDef:
    """Per-source pre and post step chains."""

    pre: dict = field(default_factory=dict)  # source -> [Step]
    post: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, data, base_dir=None) -> "PipelineDef":
        if isinstance(data, (bytes, str)):
            raw = json.loads(data)
        else:
            raw = data
        definition = cls()
        for phase, target in (("preprocess", definition.pre), ("postprocess", definition.post)):
            for source, steps in raw.get(phase, {}).items():
                target[source] = [_parse_step(s, base_dir) for s in steps]
        return definition

    @classmethod
    def load(cls, path) -> "PipelineDef":
        path = Path(path)
        return cls.from_json(path.read_text("utf-8"), base_dir=path.parent)

    def for_source(self, source):
        if source not in self.pre:
            raise ConfigError(f"no pipeline defined for source {source!r}")
        return self.pre[source], self.post.get(source, [])


def _parse_step(raw, base_dir):
    if isinstance(raw, str):
        name, params = raw, {}
    elif isinstance(raw, dict) and "step" in raw:
        name = raw["step"]
        params = {k: v for k, v in raw.items() if k != "step"}
    else:
        raise ConfigError(f"bad step entry {raw!r}")
    if name not in STEP_REGISTRY:
        raise ConfigError(f"unknown pipeline step {name!r}")
    if name == "htmlToXml" and isinstance(params.get("dictionary"), str) and base_dir is not None:
        candidate = Path(params["dictionary"])
        if not candidate.is_absolute():
            params["dictionary"] = str(base_dir / candidate)
    return Step(name, params)


def run_pipeline(source, record, store, definition: PipelineDef, workdir=None) -> bytes:
    """Run one record through its source pipeline; returns UTF-8 XML bytes."""
    pre, post = definition.for_source(source)
    base = workdir or os.environ.get(TEMP_DIR_ENV) or None
    scratch = Path(tempfile.mkdtemp(prefix="weft-", dir=base))
    ctx = PipelineContext(record=record, store=store, workdir=scratch)
    try:
        for step in pre:
            try:
                step.run(ctx)
            except PipelineStepError:
                raise
            except Exception as exc:
                raise PipelineStepError(step.name, str(exc)) from exc
        try:
            result = ensure_utf8_xml(ctx.data)
        except ET.ParseError as exc:
            raise PipelineStepError(
                pre[-1].name if pre else "<empty>", f"pipeline output is not XML: {exc}"
            ) from exc
        for step in post:
            try:
                step.run(ctx)
            except Exception as exc:
                raise PipelineStepError(step.name, str(exc)) from exc
        return result
    finally:
        for leftover in scratch.glob("*"):
            try:
                leftover.unlink()
            except OSError:
                pass
        try:
            scratch.rmdir()
        except OSError:
            pass
