"""HTTP API for the four-stage authoring workflow.

All session state lives as plain files under a storage root, one directory
per session, written before any successful response returns; restarting the
process reproduces every session from disk. Generation progress is exposed
as a server-sent event stream with replay from a client-supplied last event
id.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from typing import Callable, Literal

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import PlainTextResponse, Response, StreamingResponse
from pydantic import BaseModel, ConfigDict

from . import docspec as ds
from .evalkit.report import EvalReport, evaluate
from .gateway import Gateway, GatewayError, HttpChatProvider, MockProvider
from .pipeline import (
    EditInterpretationFailed,
    GeneratedDocument,
    Pipeline,
    PipelineError,
    StylePalette,
    StyleSelection,
    all_auto_selection,
    compile_styles,
)

STAGES = ("Topic", "Spec", "Style", "Doc")

GatewayFactory = Callable[[], Gateway]


class SessionMeta(BaseModel):
    model_config = ConfigDict(extra="forbid")
    id: str
    created_at: float
    topic: str | None = None
    stage: Literal["Topic", "Spec", "Style", "Doc"] = "Topic"
    document_stale: bool = False


class ProgressEvent(BaseModel):
    seq: int
    session_id: str
    stage: str
    unit_id: str | None = None
    step: Literal["text", "viz"] | None = None
    status: Literal["started", "finished", "failed", "complete"]
    detail: str = ""


class SessionStore:
    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, sid: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(sid, threading.Lock())

    def _dir(self, sid: str) -> str:
        return os.path.join(self.root, sid)

    def path(self, sid: str, name: str) -> str:
        return os.path.join(self._dir(sid), name)

    def _write(self, sid: str, name: str, payload: str) -> None:
        target = self.path(sid, name)
        tmp = target + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, target)

    def _read(self, sid: str, name: str) -> str | None:
        try:
            with open(self.path(sid, name), encoding="utf-8") as fh:
                return fh.read()
        except FileNotFoundError:
            return None

    # -- sessions ------------------------------------------------------------

    def create(self) -> SessionMeta:
        sid = uuid.uuid4().hex[:12]
        os.makedirs(self._dir(sid))
        meta = SessionMeta(id=sid, created_at=time.time())
        self.save_meta(meta)
        return meta

    def list(self) -> list[SessionMeta]:
        out = []
        for sid in sorted(os.listdir(self.root)):
            meta = self.meta(sid)
            if meta:
                out.append(meta)
        return sorted(out, key=lambda m: m.created_at)

    def meta(self, sid: str) -> SessionMeta | None:
        raw = self._read(sid, "session.json")
        return SessionMeta.model_validate_json(raw) if raw else None

    def save_meta(self, meta: SessionMeta) -> None:
        self._write(meta.id, "session.json", meta.model_dump_json(indent=2) + "\n")

    # -- artifacts -----------------------------------------------------------

    def spec(self, sid: str) -> ds.DocSpec | None:
        raw = self._read(sid, "spec.json")
        return ds.parse(raw) if raw else None

    def save_spec(self, sid: str, spec: ds.DocSpec) -> None:
        self._write(sid, "spec.json", ds.serialize(spec))

    def palette(self, sid: str) -> StylePalette | None:
        raw = self._read(sid, "palette.json")
        return StylePalette.model_validate_json(raw) if raw else None

    def save_palette(self, sid: str, palette: StylePalette, spec_text: str) -> None:
        self._write(sid, "palette.json", palette.model_dump_json(indent=2) + "\n")
        self._write(sid, "palette.spec.json", spec_text)

    def palette_spec_text(self, sid: str) -> str | None:
        return self._read(sid, "palette.spec.json")

    def selection(self, sid: str) -> StyleSelection | None:
        raw = self._read(sid, "selection.json")
        return StyleSelection.model_validate_json(raw) if raw else None

    def save_selection(self, sid: str, selection: StyleSelection) -> None:
        self._write(sid, "selection.json", selection.model_dump_json(indent=2) + "\n")

    def document(self, sid: str) -> GeneratedDocument | None:
        raw = self._read(sid, "document.json")
        return GeneratedDocument.model_validate_json(raw) if raw else None

    def save_document(self, sid: str, doc: GeneratedDocument) -> None:
        self._write(sid, "document.json", doc.model_dump_json(indent=2) + "\n")
        self._write(sid, "document.html", doc.html)

    def eval_report(self, sid: str) -> EvalReport | None:
        raw = self._read(sid, "eval.json")
        return EvalReport.model_validate_json(raw) if raw else None

    def save_eval(self, sid: str, report: EvalReport) -> None:
        self._write(sid, "eval.json", report.model_dump_json(indent=2) + "\n")

    def append_chat(self, sid: str, record: dict) -> None:
        with open(self.path(sid, "chat.jsonl"), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def chat_log(self, sid: str) -> list[dict]:
        raw = self._read(sid, "chat.jsonl")
        if not raw:
            return []
        return [json.loads(line) for line in raw.splitlines() if line.strip()]

    # -- progress events -----------------------------------------------------

    def append_event(self, event: ProgressEvent) -> None:
        with open(self.path(event.session_id, "events.jsonl"), "a",
                  encoding="utf-8") as fh:
            fh.write(event.model_dump_json() + "\n")
            fh.flush()

    def events(self, sid: str, after_seq: int = 0) -> list[ProgressEvent]:
        raw = self._read(sid, "events.jsonl")
        if not raw:
            return []
        out = []
        for line in raw.splitlines():
            if line.strip():
                ev = ProgressEvent.model_validate_json(line)
                if ev.seq > after_seq:
                    out.append(ev)
        return out

    def next_event_seq(self, sid: str) -> int:
        events = self.events(sid)
        return events[-1].seq + 1 if events else 1


class TopicBody(BaseModel):
    topic: str


class PatchBody(BaseModel):
    ops: list[dict]


class ChatBody(BaseModel):
    message: str
    target: Literal["spec", "doc"]


def _stage_index(stage: str) -> int:
    return STAGES.index(stage)


def _advance(meta: SessionMeta, stage: str) -> None:
    if _stage_index(stage) > _stage_index(meta.stage):
        meta.stage = stage


def default_gateway_factory() -> Gateway:
    mock_script = os.environ.get("DOCWEAVE_MOCK_SCRIPT")
    if mock_script:
        return Gateway(MockProvider.from_file(mock_script), backoff_base=0.0)
    return Gateway(HttpChatProvider())


def create_app(storage_root: str,
               gateway_factory: GatewayFactory | None = None,
               settle_ms: int = 200) -> FastAPI:
    store = SessionStore(storage_root)
    factory = gateway_factory or default_gateway_factory
    app = FastAPI(title="docweave")
    app.state.store = store

    def require_session(sid: str) -> SessionMeta:
        meta = store.meta(sid)
        if meta is None:
            raise HTTPException(404, f"unknown session {sid}")
        return meta

    def session_view(meta: SessionMeta) -> dict:
        return {
            "id": meta.id,
            "created_at": meta.created_at,
            "topic": meta.topic,
            "stage": meta.stage,
            "document_stale": meta.document_stale,
            "has_spec": store.spec(meta.id) is not None,
            "has_palette": store.palette(meta.id) is not None,
            "has_selection": store.selection(meta.id) is not None,
            "has_document": store.document(meta.id) is not None,
            "has_eval": store.eval_report(meta.id) is not None,
            "chat_log": store.chat_log(meta.id),
        }

    def pipeline(meta: SessionMeta) -> Pipeline:
        return Pipeline(factory())

    def gateway_error(stage: str, exc: Exception) -> HTTPException:
        return HTTPException(502, f"stage {stage}: {exc}")

    # -- session lifecycle ---------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session():
        return session_view(store.create())

    @app.get("/sessions")
    def list_sessions():
        return [session_view(m) for m in store.list()]

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return session_view(require_session(sid))

    # -- topic and spec ------------------------------------------------------

    @app.post("/sessions/{sid}/topic")
    def set_topic(sid: str, body: TopicBody):
        meta = require_session(sid)
        with store.lock(sid):
            try:
                spec = pipeline(meta).plan(body.topic)
            except PipelineError as exc:
                raise gateway_error(exc.stage, exc)
            except GatewayError as exc:
                raise gateway_error("plan", exc)
            store.save_spec(sid, spec)
            meta.topic = body.topic
            meta.document_stale = store.document(sid) is not None
            _advance(meta, "Spec")
            store.save_meta(meta)
        return {"spec": json.loads(ds.serialize(spec)), "stage": meta.stage}

    @app.get("/sessions/{sid}/spec")
    def get_spec(sid: str):
        require_session(sid)
        spec = store.spec(sid)
        if spec is None:
            raise HTTPException(409, "no spec yet; set a topic first")
        return {"spec": json.loads(ds.serialize(spec)),
                "validation": ds.validate(spec).model_dump()}

    @app.patch("/sessions/{sid}/spec")
    def patch_spec(sid: str, body: PatchBody):
        meta = require_session(sid)
        with store.lock(sid):
            spec = store.spec(sid)
            if spec is None:
                raise HTTPException(409, "no spec to edit")
            try:
                ops = [ds.parse_edit_op(item) for item in body.ops]
                for op in ops:
                    spec = ds.apply_edit(spec, op)
            except ds.SpecError as exc:
                raise HTTPException(422, str(exc))
            store.save_spec(sid, spec)
            if store.document(sid) is not None:
                meta.document_stale = True
            store.save_meta(meta)
        return {"spec": json.loads(ds.serialize(spec)),
                "document_stale": meta.document_stale}

    # -- style ---------------------------------------------------------------

    @app.post("/sessions/{sid}/palette")
    def generate_palette(sid: str):
        meta = require_session(sid)
        with store.lock(sid):
            spec = store.spec(sid)
            if spec is None:
                raise HTTPException(409, "generate a spec before styling")
            try:
                palette = pipeline(meta).propose_styles(spec)
            except PipelineError as exc:
                raise gateway_error(exc.stage, exc)
            store.save_palette(sid, palette, ds.serialize(spec))
            _advance(meta, "Style")
            store.save_meta(meta)
        return palette.model_dump()

    @app.get("/sessions/{sid}/palette")
    def get_palette(sid: str):
        require_session(sid)
        palette = store.palette(sid)
        if palette is None:
            raise HTTPException(409, "no palette generated yet")
        stale = store.palette_spec_text(sid) != ds.serialize(store.spec(sid))
        return {"palette": palette.model_dump(), "stale": stale}

    @app.put("/sessions/{sid}/selection")
    def put_selection(sid: str, selection: StyleSelection):
        meta = require_session(sid)
        with store.lock(sid):
            palette = store.palette(sid)
            if palette is None:
                raise HTTPException(409, "no palette to select from")
            try:
                compile_styles(palette, selection)
            except PipelineError as exc:
                raise HTTPException(422, str(exc))
            store.save_selection(sid, selection)
            _advance(meta, "Style")
            store.save_meta(meta)
        return {"ok": True}

    # -- document ------------------------------------------------------------

    def _emit(sid: str, seq: int, **kwargs) -> int:
        store.append_event(ProgressEvent(seq=seq, session_id=sid, **kwargs))
        return seq + 1

    @app.post("/sessions/{sid}/document")
    def generate_document(sid: str):
        meta = require_session(sid)
        with store.lock(sid):
            spec = store.spec(sid)
            if spec is None:
                raise HTTPException(409, "generate a spec before the document")
            pipe = pipeline(meta)
            palette = store.palette(sid)
            if palette is None or store.palette_spec_text(sid) != ds.serialize(spec):
                # spec changed since (or no palette yet): refresh it
                try:
                    palette = pipe.propose_styles(spec)
                except PipelineError as exc:
                    raise gateway_error(exc.stage, exc)
                store.save_palette(sid, palette, ds.serialize(spec))
            selection = store.selection(sid) or all_auto_selection(palette)
            try:
                instructions = compile_styles(palette, selection)
            except PipelineError:
                # stored selection no longer covers the palette: fall back to auto
                selection = all_auto_selection(palette)
                instructions = compile_styles(palette, selection)

            seq = store.next_event_seq(sid)

            def progress(unit_id, step, status):
                nonlocal seq
                seq = _emit(sid, seq, stage="Doc", unit_id=unit_id, step=step,
                            status=status)

            try:
                doc = pipe.generate_document(spec, instructions,
                                             progress=progress)
            except PipelineError as exc:
                seq = _emit(sid, seq, stage="Doc", status="failed", detail=str(exc))
                raise gateway_error(exc.stage, exc)
            seq = _emit(sid, seq, stage="Doc", status="complete")
            store.save_document(sid, doc)
            meta.document_stale = False
            _advance(meta, "Doc")
            store.save_meta(meta)
        return {"total_chars": doc.total_chars, "total_seconds": doc.total_seconds,
                "sections": [s.unit_id for s in doc.sections], "stage": meta.stage}

    @app.get("/sessions/{sid}/document")
    def get_document(sid: str):
        meta = require_session(sid)
        doc = store.document(sid)
        if doc is None:
            raise HTTPException(409, "no document generated yet")
        return {"html": doc.html, "total_chars": doc.total_chars,
                "total_seconds": doc.total_seconds,
                "sections": [s.unit_id for s in doc.sections],
                "stale": meta.document_stale}

    @app.get("/sessions/{sid}/document/download")
    def download_document(sid: str):
        require_session(sid)
        doc = store.document(sid)
        if doc is None:
            raise HTTPException(409, "no document generated yet")
        return Response(content=doc.html, media_type="text/html",
                        headers={"Content-Disposition":
                                 'attachment; filename="document.html"'})

    @app.get("/sessions/{sid}/events")
    def event_stream(sid: str, request: Request, after: int = 0):
        require_session(sid)
        last_id = request.headers.get("Last-Event-ID")
        start_after = int(last_id) if last_id else after

        def stream():
            seen = start_after
            idle = 0.0
            while True:
                events = store.events(sid, after_seq=seen)
                for ev in events:
                    seen = ev.seq
                    idle = 0.0
                    yield f"id: {ev.seq}\nevent: progress\ndata: {ev.model_dump_json()}\n\n"
                    if ev.status == "complete":
                        return
                if events and events[-1].status in ("complete", "failed"):
                    return
                if idle >= 2.0:
                    return
                time.sleep(0.05)
                idle += 0.05

        return StreamingResponse(stream(), media_type="text/event-stream")

    # -- chat editing --------------------------------------------------------

    @app.post("/sessions/{sid}/chat")
    def chat(sid: str, body: ChatBody):
        meta = require_session(sid)
        with store.lock(sid):
            pipe = pipeline(meta)
            if body.target == "spec":
                spec = store.spec(sid)
                if spec is None:
                    raise HTTPException(409, "no spec to edit")
                try:
                    ops = pipe.chat_edit(body.message, "spec", spec=spec)
                    updated = ds.apply_edits(spec, ops)
                except EditInterpretationFailed as exc:
                    raise HTTPException(502, str(exc))
                except PipelineError as exc:
                    raise HTTPException(422, str(exc))
                except ds.SpecError as exc:
                    raise HTTPException(422, str(exc))
                store.save_spec(sid, updated)
                if store.document(sid) is not None:
                    meta.document_stale = True
                artifact = {"spec": json.loads(ds.serialize(updated))}
            else:
                doc = store.document(sid)
                if doc is None:
                    raise HTTPException(409, "no document to edit")
                try:
                    ops = pipe.chat_edit(body.message, "doc", document=doc)
                    updated_doc = pipe.apply_doc_edits(doc, ops)
                except EditInterpretationFailed as exc:
                    raise HTTPException(502, str(exc))
                except PipelineError as exc:
                    raise HTTPException(422, str(exc))
                store.save_document(sid, updated_doc)
                artifact = {"document": {"html": updated_doc.html,
                                         "total_chars": updated_doc.total_chars}}
            record = {"time": time.time(), "message": body.message,
                      "target": body.target,
                      "ops": [op.model_dump() for op in ops]}
            store.append_chat(sid, record)
            store.save_meta(meta)
        return {"ops": record["ops"], **artifact,
                "document_stale": meta.document_stale}

    # -- evaluation ----------------------------------------------------------

    @app.post("/sessions/{sid}/eval")
    def run_eval(sid: str):
        meta = require_session(sid)
        with store.lock(sid):
            doc = store.document(sid)
            if doc is None:
                raise HTTPException(409, "no document to evaluate")
            try:
                report = evaluate(doc.html, max(doc.total_seconds, 1e-6),
                                  meta.topic or doc.spec_ref.topic,
                                  gateway=factory(), settle_ms=settle_ms)
            except Exception as exc:
                raise HTTPException(502, str(exc))
            store.save_eval(sid, report)
        return report.model_dump()

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz():
        return "ok"

    return app
