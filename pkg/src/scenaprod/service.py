"""Playback service: websocket sessions plus document storage over HTTP.

Each websocket connection owns at most one live playback session; nothing is
shared between connections, so two clients can play the same document without
seeing each other.  While playing, a pump maps wall time to the virtual
millisecond clock at 40 Hz and streams engine trace events as they appear.
Keys are stamped with the virtual clock at the moment the server receives
them; the engine stays the single authority on what happens when.

The wall clock is injectable so tests can drive virtual time by hand.

Wire protocol (JSON text frames):
  client: {"type":"load","document":{...}}   document in the .scg.json shape
          {"type":"start"}
          {"type":"key","key":"a"}
          {"type":"stop"}
          {"type":"save","name":"demo"}      name optional
  server: {"type":"loaded","report":[...]}
          {"type":"event","event":{...}}     one engine trace event
          {"type":"state","status":...,"clock_ms":...}
          {"type":"saved","document":"..."}  canonical text
          {"type":"error","code":...,"message":...,"report":[...]}
"""

from __future__ import annotations

import asyncio
import json
import re
import time
from pathlib import Path

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .docformat import (
    ParseError,
    parse_document,
    parse_document_data,
    serialize_document,
)
from .engine import RUNNING, EngineError, InputEvent, Session, event_to_data
from .model import Violation

PUMP_PERIOD_S = 0.025

DOC_SUFFIX = ".scg.json"
_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,63}$")


class MonotonicClock:
    def now_ms(self) -> int:
        return time.monotonic_ns() // 1_000_000


class FakeClock:
    """Hand-driven clock for tests."""

    def __init__(self, ms: int = 0) -> None:
        self.ms = ms

    def now_ms(self) -> int:
        return self.ms

    def advance(self, delta_ms: int) -> None:
        self.ms += delta_ms


def _violation_data(v: Violation) -> dict:
    return {"code": v.code, "path": v.path, "message": v.message}


def sanitize_name(name: str) -> str | None:
    """Returns the name if it is storage-safe, else None."""
    if _NAME_RE.match(name) and ".." not in name:
        return name
    return None


def _doc_path(docs_dir: Path, name: str) -> Path:
    return docs_dir / f"{name}{DOC_SUFFIX}"


def create_app(
    docs_dir: str | Path, clock=None, ui_dir: str | Path | None = None
) -> FastAPI:
    app = FastAPI(title="scenaprod")
    app.state.docs_dir = Path(docs_dir)
    app.state.clock = clock if clock is not None else MonotonicClock()

    @app.get("/documents")
    async def list_documents():
        root: Path = app.state.docs_dir
        names = sorted(
            p.name[: -len(DOC_SUFFIX)]
            for p in root.glob(f"*{DOC_SUFFIX}")
            if p.is_file()
        )
        return {"documents": names}

    @app.get("/documents/{name}")
    async def get_document(name: str):
        safe = sanitize_name(name)
        if safe is None:
            return JSONResponse(
                {"code": "NOT_FOUND", "message": f"bad document name {name!r}"},
                status_code=404,
            )
        path = _doc_path(app.state.docs_dir, safe)
        if not path.is_file():
            return JSONResponse(
                {"code": "NOT_FOUND", "message": f"no document {safe!r}"},
                status_code=404,
            )
        return PlainTextResponse(
            path.read_text(encoding="utf-8"), media_type="application/json"
        )

    @app.put("/documents/{name}")
    async def put_document(name: str, request: Request):
        safe = sanitize_name(name)
        if safe is None:
            return JSONResponse(
                {"code": "BAD_NAME", "message": f"bad document name {name!r}"},
                status_code=400,
            )
        body = await request.body()
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError:
            return JSONResponse(
                {
                    "code": "VALIDATION_FAILED",
                    "message": "document is not UTF-8",
                    "report": [],
                },
                status_code=400,
            )
        try:
            doc = parse_document(text)
        except ParseError as exc:
            return JSONResponse(
                {
                    "code": "VALIDATION_FAILED",
                    "message": exc.message,
                    "report": [_violation_data(v) for v in exc.violations],
                },
                status_code=400,
            )
        app.state.docs_dir.mkdir(parents=True, exist_ok=True)
        _doc_path(app.state.docs_dir, safe).write_text(
            serialize_document(doc), encoding="utf-8"
        )
        return {"stored": safe}

    @app.websocket("/session")
    async def session_socket(ws: WebSocket):
        await ws.accept()
        await _run_session(ws, app.state.docs_dir, app.state.clock)

    # Mounted last so /documents and /session keep priority over static files.
    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=Path(ui_dir), html=True), name="ui")

    return app


async def _run_session(ws: WebSocket, docs_dir: Path, clock) -> None:
    phase = "idle"  # idle | loaded | playing
    doc = None
    sess: Session | None = None
    wall0 = 0
    sent = 0

    inbox: asyncio.Queue = asyncio.Queue()

    async def reader() -> None:
        try:
            while True:
                inbox.put_nowait(await ws.receive_text())
        except WebSocketDisconnect:
            inbox.put_nowait(None)

    reader_task = asyncio.create_task(reader())

    async def send(data: dict) -> None:
        await ws.send_text(json.dumps(data, separators=(",", ":"), ensure_ascii=False))

    async def send_error(code: str, message: str, report=None) -> None:
        await send(
            {"type": "error", "code": code, "message": message, "report": report or []}
        )

    async def flush_events() -> None:
        nonlocal sent
        assert sess is not None
        while sent < len(sess.trace):
            await send({"type": "event", "event": event_to_data(sess.trace[sent])})
            sent += 1

    async def send_state() -> None:
        if sess is not None:
            status, clock_ms = sess.status, sess.clock_ms
        elif doc is not None:
            status, clock_ms = "loaded", 0
        else:
            status, clock_ms = "idle", 0
        await send({"type": "state", "status": status, "clock_ms": clock_ms})

    def virtual_now() -> int:
        v = clock.now_ms() - wall0
        assert sess is not None
        return max(v, sess.clock_ms)

    async def pump() -> None:
        nonlocal phase
        assert sess is not None
        v = virtual_now()
        if sess.status == RUNNING and v > sess.clock_ms:
            sess.advance_to(v)
        await flush_events()
        await send_state()
        if sess.status != RUNNING:
            phase = "loaded"

    async def handle(raw: str) -> None:
        nonlocal phase, doc, sess, wall0, sent
        try:
            msg = json.loads(raw)
            if not isinstance(msg, dict):
                raise ValueError("not an object")
            mtype = msg.get("type")
        except ValueError:
            await send_error("BAD_MESSAGE", "message is not a JSON object")
            return

        if mtype == "load":
            if phase == "playing":
                await send_error("BAD_STATE", "cannot load while playing")
                return
            try:
                doc = parse_document_data(msg.get("document"))
            except ParseError as exc:
                await send_error(
                    "INVALID_SCENAGRAM",
                    exc.message,
                    [_violation_data(v) for v in exc.violations],
                )
                return
            sess = None
            phase = "loaded"
            await send({"type": "loaded", "report": []})
            await send_state()
        elif mtype == "start":
            if phase != "loaded" or doc is None:
                await send_error("BAD_STATE", f"cannot start while {phase}")
                return
            try:
                sess = Session.start(doc.scenagram)
            except EngineError as exc:
                await send_error("INVALID_SCENAGRAM", exc.message)
                return
            wall0 = clock.now_ms()
            sent = 0
            phase = "playing"
            await flush_events()
            await send_state()
            if sess.status != RUNNING:
                phase = "loaded"
        elif mtype == "key":
            if phase != "playing" or sess is None:
                await send_error("BAD_STATE", "no playback to send keys to")
                return
            key = msg.get("key")
            if not isinstance(key, str) or not key:
                await send_error("BAD_MESSAGE", "key must be a non-empty string")
                return
            sess.inject_key(InputEvent(virtual_now(), key))
            await flush_events()
            await send_state()
            if sess.status != RUNNING:
                phase = "loaded"
        elif mtype == "stop":
            if phase != "playing" or sess is None:
                await send_error("BAD_STATE", "no playback to stop")
                return
            sess.stop()
            await flush_events()
            await send_state()
            phase = "loaded"
        elif mtype == "save":
            if doc is None:
                await send_error("BAD_STATE", "nothing loaded to save")
                return
            canonical = serialize_document(doc)
            name = msg.get("name")
            if name is not None:
                safe = sanitize_name(name) if isinstance(name, str) else None
                if safe is None:
                    await send_error("BAD_MESSAGE", f"bad document name {name!r}")
                    return
                docs_dir.mkdir(parents=True, exist_ok=True)
                _doc_path(docs_dir, safe).write_text(canonical, encoding="utf-8")
            await send({"type": "saved", "document": canonical})
        else:
            await send_error("BAD_MESSAGE", f"unknown message type {mtype!r}")

    try:
        while True:
            timeout = PUMP_PERIOD_S if phase == "playing" else None
            try:
                raw = await asyncio.wait_for(inbox.get(), timeout)
            except asyncio.TimeoutError:
                await pump()
                continue
            if raw is None:
                break
            await handle(raw)
    except WebSocketDisconnect:
        pass
    finally:
        reader_task.cancel()
