"""HTTP facade for the expert's iteration loop.

Sessions wrap a schema plus sample documents and expose bind/convert
edits, mapping export, dry-run parsing and coverage reports; dictionary
curation is exposed per language. Writes are optimistically versioned:
every response carries the draft version, every mutation must send the
version it was based on and conflicts answer 409, so a second stale tab
cannot corrupt a draft.
"""

import json
import threading
import uuid
from pathlib import Path

from fastapi import Body, FastAPI, Query
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from weft.dictionary import Dictionary, Synset
from weft.engine.ids import IdAllocator, shared_counters
from weft.engine.pool import EntityPool
from weft.engine.run import compile_mapping, process_document
from weft.errors import ConflictError, NotFoundError, WeftError
from weft.mapping import MappingSession, load_schema
from weft.validation import collect_xpaths, coverage, sample_unmapped

_ERROR_STATUS = {NotFoundError: 404, ConflictError: 409}


class SessionBox:
    def __init__(self, session):
        self.session = session
        self.lock = threading.Lock()


def create_app(archive=None, data_dir=None, ui_dir=None) -> FastAPI:
    app = FastAPI(title="weft mapping service")
    sessions = {}
    dictionaries = {}
    dict_dir = None
    if data_dir is not None:
        dict_dir = Path(data_dir) / "dictionaries"
        dict_dir.mkdir(parents=True, exist_ok=True)
        for path in dict_dir.glob("*.json"):
            dictionaries[path.stem] = Dictionary.load(path)

    @app.exception_handler(WeftError)
    async def weft_error_handler(_request, exc):
        status = next(
            (code for cls, code in _ERROR_STATUS.items() if isinstance(exc, cls)), 422
        )
        return JSONResponse(
            status_code=status, content={"error": str(exc), "type": type(exc).__name__}
        )

    def get_box(session_id) -> SessionBox:
        box = sessions.get(session_id)
        if box is None:
            raise NotFoundError(f"no session {session_id}")
        return box

    def check_version(session, sent):
        if sent is None or int(sent) != session.version:
            raise ConflictError(
                f"draft moved on: expected version {session.version}, got {sent}"
            )

    def draft_state(session):
        return {
            "version": session.version,
            "draft": session.draft.to_json_dict(),
        }

    # -- sessions --------------------------------------------------------

    @app.post("/sessions")
    def create_session(body: dict = Body(...)):
        schema = load_schema(body["schema"])
        session_id = uuid.uuid4().hex[:12]
        sessions[session_id] = SessionBox(MappingSession(schema))
        return {"sessionId": session_id, "version": 0, "schemaRoot": schema.db}

    @app.post("/sessions/{session_id}/samples")
    def add_samples(session_id: str, body: dict = Body(...)):
        box = get_box(session_id)
        with box.lock:
            session = box.session
            documents = _sample_documents(body)
            for name, data in documents:
                session.add_sample(name, data)
            return {
                "version": session.version,
                "xpaths": session.enumerate_samples(),
                "samples": sorted(session.samples),
            }

    def _sample_documents(body):
        documents = []
        if "recordIds" in body:
            if archive is None:
                raise NotFoundError("no archive store configured")
            for record_id in body["recordIds"]:
                _record, payload = archive.get(record_id)
                documents.append((record_id, payload))
        if "xml" in body:
            raw = body["xml"]
            items = raw if isinstance(raw, list) else [raw]
            for index, item in enumerate(items):
                name = f"inline-{index}" if isinstance(raw, list) else "inline"
                documents.append((name, item.encode("utf-8")))
        return documents

    @app.post("/sessions/{session_id}/bind")
    def bind(session_id: str, body: dict = Body(...)):
        box = get_box(session_id)
        with box.lock:
            check_version(box.session, body.get("version"))
            box.session.bind(body["schemaPath"], body["xpath"])
            return draft_state(box.session)

    @app.delete("/sessions/{session_id}/bind")
    def unbind(session_id: str, body: dict = Body(...)):
        box = get_box(session_id)
        with box.lock:
            check_version(box.session, body.get("version"))
            box.session.unbind(body["schemaPath"], body["xpath"])
            return draft_state(box.session)

    @app.post("/sessions/{session_id}/conversion")
    def set_conversion(session_id: str, body: dict = Body(...)):
        box = get_box(session_id)
        with box.lock:
            check_version(box.session, body.get("version"))
            box.session.set_conversion(body["schemaPath"], body["from"], body["to"])
            return draft_state(box.session)

    @app.get("/sessions/{session_id}")
    def session_state(session_id: str):
        box = get_box(session_id)
        return {
            "version": box.session.version,
            "schema": box.session.schema.to_json_dict(),
            "samples": sorted(box.session.samples),
            "draft": box.session.draft.to_json_dict(),
        }

    @app.get("/sessions/{session_id}/mapping")
    def export_mapping(session_id: str):
        box = get_box(session_id)
        with box.lock:
            return Response(
                content=box.session.export_mapping(), media_type="application/json"
            )

    @app.post("/sessions/{session_id}/parse-preview")
    def parse_preview(session_id: str, body: dict = Body(...)):
        box = get_box(session_id)
        session = box.session
        if "recordId" in body:
            if archive is None:
                raise NotFoundError("no archive store configured")
            _record, data = archive.get(body["recordId"])
        elif "sample" in body:
            if body["sample"] not in session.samples:
                raise NotFoundError(f"no sample {body['sample']!r} in session")
            data = session.samples[body["sample"]]
        else:
            data = body["xml"].encode("utf-8")
        program = compile_mapping(session.draft, session.schema)
        allocator = IdAllocator(shared_counters(program.graph.order), block_size=100)
        pool = EntityPool()
        counts = process_document(data, program, allocator, pool)
        instances = [
            {
                "entity": row.entity,
                "floatingId": row.floating_id,
                "attrs": row.attrs,
                "parentRef": list(row.parent_ref) if row.parent_ref else None,
            }
            for entity in program.graph.order
            for row in pool.queues.get(entity, [])
        ]
        return {"version": session.version, "counts": counts, "instances": instances}

    # -- dictionaries ---------------------------------------------------------

    def get_dictionary(lang) -> Dictionary:
        dictionary = dictionaries.get(lang)
        if dictionary is None:
            raise NotFoundError(f"no dictionary for language {lang!r}")
        return dictionary

    def persist_dictionary(lang):
        if dict_dir is not None:
            dictionaries[lang].save(dict_dir / f"{lang}.json")

    def dictionary_state(lang):
        return json.loads(dictionaries[lang].to_json())

    @app.get("/dictionaries")
    def list_dictionaries():
        return {"languages": sorted(dictionaries)}

    @app.get("/dictionaries/{lang}")
    def read_dictionary(lang: str):
        get_dictionary(lang)
        return dictionary_state(lang)

    @app.post("/dictionaries/{lang}")
    def create_dictionary(lang: str, body: dict = Body(default={})):
        if body.get("synsets") is not None or body.get("language"):
            dictionaries[lang] = Dictionary.from_json(json.dumps(body))
        else:
            dictionaries[lang] = Dictionary(language=lang)
        persist_dictionary(lang)
        return dictionary_state(lang)

    @app.post("/dictionaries/{lang}/synsets")
    def add_synset(lang: str, body: dict = Body(...)):
        dictionary = get_dictionary(lang)
        synset_id = body.get("id") or dictionary._next_id()
        variants = list(body.get("variants", []))
        canonical = body.get("canonical") or (variants[0] if variants else None)
        if canonical and canonical not in variants:
            variants.insert(0, canonical)
        dictionary.add_synset(Synset(synset_id, canonical, variants, language=lang))
        persist_dictionary(lang)
        return dictionary_state(lang)

    @app.post("/dictionaries/{lang}/synsets/{synset_id}/variants")
    def add_variant(lang: str, synset_id: str, body: dict = Body(...)):
        dictionary = get_dictionary(lang)
        dictionary.add_variant(synset_id, body["variant"])
        persist_dictionary(lang)
        return dictionary_state(lang)

    @app.post("/dictionaries/{lang}/merge")
    def merge_synsets(lang: str, body: dict = Body(...)):
        dictionary = get_dictionary(lang)
        dictionary.merge_synsets(body["dst"], body["src"])
        persist_dictionary(lang)
        return dictionary_state(lang)

    @app.post("/dictionaries/{lang}/split")
    def split_synset(lang: str, body: dict = Body(...)):
        dictionary = get_dictionary(lang)
        new_id = dictionary.split_synset(
            body["source"], body["variants"], body.get("newId"), body.get("newCanonical")
        )
        persist_dictionary(lang)
        return {"newId": new_id, **dictionary_state(lang)}

    @app.post("/dictionaries/{lang}/parent")
    def set_parent(lang: str, body: dict = Body(...)):
        dictionary = get_dictionary(lang)
        dictionary.set_parent(body["id"], body.get("parent"))
        persist_dictionary(lang)
        return dictionary_state(lang)

    @app.delete("/dictionaries/{lang}/synsets/{synset_id}")
    def remove_synset(lang: str, synset_id: str):
        dictionary = get_dictionary(lang)
        dictionary.remove_synset(synset_id)
        persist_dictionary(lang)
        return dictionary_state(lang)

    # -- validation --------------------------------------------------------------

    @app.get("/validation/coverage")
    def coverage_report(
        session: str = Query(...),
        corpus: str | None = Query(default=None),
        k: int = Query(default=10),
    ):
        """Coverage of the draft over the session samples, or over an archive
        selection 'source[:from[:to]]' when ``corpus`` is given."""
        box = get_box(session)
        if corpus:
            if archive is None:
                raise NotFoundError("no archive store configured")
            documents = [
                (record.id, archive.get(record.id)[1])
                for record in _select_records(corpus)
            ]
        else:
            documents = [
                (name, box.session.samples[name]) for name in sorted(box.session.samples)
            ]
        stats = collect_xpaths(documents)
        report = coverage(stats, box.session.draft)
        return {
            "version": box.session.version,
            **report.to_json_dict(),
            "skipped": [name for name, _error in stats.skipped],
            "sampledUnmapped": sample_unmapped(report, stats, k),
        }

    def _select_records(selection):
        from weft.archive import parse_date

        parts = selection.split(":", 2)
        date_from = parse_date(parts[1]) if len(parts) > 1 and parts[1] else None
        date_to = parse_date(parts[2]) if len(parts) > 2 and parts[2] else None
        return archive.list(source=parts[0], date_from=date_from, date_to=date_to)

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
