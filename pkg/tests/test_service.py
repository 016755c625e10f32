"""Service protocol: document endpoints, session flow, isolation."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from scenaprod.docformat import Document, parse_document, serialize_document
from scenaprod.engine import InputEvent, event_to_data, run_script
from scenaprod.model import (
    AssetDecl,
    KeySpec,
    PlaySound,
    Scenagram,
    Sequence,
    ShowText,
    Split,
    WaitKey,
)
from scenaprod.service import FakeClock, create_app

MAX_MESSAGES = 500  # hang guard for drain loops


def make_client(tmp_path):
    clock = FakeClock()
    app = create_app(tmp_path / "docs", clock)
    return TestClient(app), clock


def doc_data(s: Scenagram) -> dict:
    return json.loads(serialize_document(Document(s)))


def split_scenagram() -> Scenagram:
    return Scenagram(
        root=Sequence(
            (ShowText("Bonjour", 1000),),
            Split(
                (
                    Sequence((WaitKey(KeySpec("a")), ShowText("A!", 1000))),
                    Sequence((PlaySound("snd"),)),
                )
            ),
        ),
        assets=(AssetDecl("snd", "sound", "x.wav", 3000),),
    )


def recv_until(ws, want, limit=MAX_MESSAGES):
    """Collects messages until want(msg) is true; returns all collected."""
    got = []
    for _ in range(limit):
        msg = ws.receive_json()
        got.append(msg)
        if want(msg):
            return got
    raise AssertionError(f"no matching message in {limit}; last: {got[-3:]}")


def events_of(messages) -> list[dict]:
    return [m["event"] for m in messages if m["type"] == "event"]


class TestDocumentEndpoints:
    def test_put_get_round_trip_is_byte_identical(self, tmp_path):
        client, _ = make_client(tmp_path)
        canonical = serialize_document(Document(split_scenagram()))
        resp = client.put("/documents/demo", content=canonical.encode())
        assert resp.status_code == 200
        got = client.get("/documents/demo")
        assert got.status_code == 200
        assert got.text.encode() == canonical.encode()

    def test_put_normalizes_to_canonical_form(self, tmp_path):
        client, _ = make_client(tmp_path)
        compact = json.dumps(doc_data(split_scenagram()))
        client.put("/documents/demo", content=compact.encode())
        got = client.get("/documents/demo").text
        assert got == serialize_document(parse_document(compact))

    def test_list_documents_sorted(self, tmp_path):
        client, _ = make_client(tmp_path)
        body = serialize_document(Document(Scenagram(root=Sequence())))
        for name in ("zeta", "alpha", "mid"):
            assert client.put(f"/documents/{name}", content=body).status_code == 200
        resp = client.get("/documents")
        assert resp.json() == {"documents": ["alpha", "mid", "zeta"]}

    def test_get_missing_is_not_found(self, tmp_path):
        client, _ = make_client(tmp_path)
        resp = client.get("/documents/ghost")
        assert resp.status_code == 404
        assert resp.json()["code"] == "NOT_FOUND"

    def test_put_invalid_returns_report(self, tmp_path):
        client, _ = make_client(tmp_path)
        bad = {
            "version": 1,
            "assets": [],
            "root": {"items": [], "terminal": {"split": [
                {"items": [], "terminal": "end"}
            ]}},
        }
        resp = client.put("/documents/demo", content=json.dumps(bad).encode())
        assert resp.status_code == 400
        body = resp.json()
        assert body["code"] == "VALIDATION_FAILED"
        assert [v["code"] for v in body["report"]] == ["SPLIT_ARITY"]
        assert client.get("/documents/demo").status_code == 404

    def test_put_garbage_rejected(self, tmp_path):
        client, _ = make_client(tmp_path)
        resp = client.put("/documents/demo", content=b"{nope")
        assert resp.status_code == 400
        assert resp.json()["code"] == "VALIDATION_FAILED"

    def test_nasty_names_rejected(self, tmp_path):
        client, _ = make_client(tmp_path)
        body = serialize_document(Document(Scenagram(root=Sequence())))
        for name in (".hidden", "-dash", "a b", "x" * 70):
            resp = client.put(f"/documents/{name}", content=body)
            assert resp.status_code == 400, name
        # an encoded slash never reaches storage either
        assert client.put("/documents/a%2Fb", content=body).status_code in (400, 404)

    def test_dotdot_name_is_rejected(self, tmp_path):
        client, _ = make_client(tmp_path)
        resp = client.get("/documents/..%2Fescape")
        assert resp.status_code in (400, 404)


class TestSessionProtocol:
    def test_full_flow_streams_exact_engine_trace(self, tmp_path):
        client, clock = make_client(tmp_path)
        s = split_scenagram()
        expected = run_script(s, [InputEvent(5000, "a")], 10_000)
        expected_wire = [event_to_data(ev) for ev in expected.events]
        with client.websocket_connect("/session") as ws:
            ws.send_json({"type": "load", "document": doc_data(s)})
            msgs = recv_until(ws, lambda m: m["type"] == "loaded")
            assert msgs[-1]["report"] == []

            ws.send_json({"type": "start"})
            got_events: list[dict] = []
            msgs = recv_until(ws, lambda m: m["type"] == "state")
            got_events += events_of(msgs)

            clock.advance(5000)
            msgs = recv_until(
                ws,
                lambda m: m["type"] == "state" and m["clock_ms"] >= 5000,
            )
            got_events += events_of(msgs)

            # drain until the consumption event proves the key landed, so
            # the next clock advance cannot stamp it late
            ws.send_json({"type": "key", "key": "a"})
            msgs = recv_until(
                ws,
                lambda m: m["type"] == "event"
                and m["event"]["kind"] == "key_consumed",
            )
            got_events += events_of(msgs)

            clock.advance(5000)
            msgs = recv_until(
                ws,
                lambda m: m["type"] == "state" and m["status"] == "completed",
            )
            got_events += events_of(msgs)

        assert got_events == expected_wire

    def test_start_on_empty_scenagram_completes_at_zero(self, tmp_path):
        client, _ = make_client(tmp_path)
        with client.websocket_connect("/session") as ws:
            ws.send_json(
                {"type": "load", "document": doc_data(Scenagram(root=Sequence()))}
            )
            recv_until(ws, lambda m: m["type"] == "loaded")
            ws.send_json({"type": "start"})
            msgs = recv_until(
                ws, lambda m: m["type"] == "state" and m["status"] == "completed"
            )
            kinds = [e["kind"] for e in events_of(msgs)]
            assert kinds == ["scenagram_completed"]
            assert msgs[-1]["clock_ms"] == 0

    def test_stop_midway_then_restart(self, tmp_path):
        client, clock = make_client(tmp_path)
        s = Scenagram(root=Sequence((ShowText("x", 2000),)))
        with client.websocket_connect("/session") as ws:
            ws.send_json({"type": "load", "document": doc_data(s)})
            recv_until(ws, lambda m: m["type"] == "loaded")
            ws.send_json({"type": "start"})
            recv_until(ws, lambda m: m["type"] == "state")
            clock.advance(500)
            recv_until(ws, lambda m: m["type"] == "state" and m["clock_ms"] >= 500)
            ws.send_json({"type": "stop"})
            msgs = recv_until(
                ws, lambda m: m["type"] == "state" and m["status"] == "stopped"
            )
            assert events_of(msgs)[-1]["kind"] == "scenagram_stopped"
            # the session went back to loaded: a second start works
            ws.send_json({"type": "start"})
            msgs = recv_until(ws, lambda m: m["type"] == "state")
            assert msgs[-1]["status"] == "running"
            assert msgs[-1]["clock_ms"] == 0

    def test_out_of_order_messages_get_bad_state(self, tmp_path):
        client, _ = make_client(tmp_path)
        with client.websocket_connect("/session") as ws:
            ws.send_json({"type": "start"})
            msg = ws.receive_json()
            assert msg["type"] == "error" and msg["code"] == "BAD_STATE"
            ws.send_json({"type": "key", "key": "a"})
            msg = ws.receive_json()
            assert msg["type"] == "error" and msg["code"] == "BAD_STATE"
            ws.send_json({"type": "stop"})
            msg = ws.receive_json()
            assert msg["type"] == "error" and msg["code"] == "BAD_STATE"

    def test_load_invalid_document_reports_and_stays_idle(self, tmp_path):
        client, _ = make_client(tmp_path)
        bad = {
            "version": 1,
            "assets": [],
            "root": {"items": [{"kind": "play_sound", "asset": "ghost"}],
                     "terminal": "end"},
        }
        with client.websocket_connect("/session") as ws:
            ws.send_json({"type": "load", "document": bad})
            msg = ws.receive_json()
            assert msg["type"] == "error"
            assert msg["code"] == "INVALID_SCENAGRAM"
            assert [v["code"] for v in msg["report"]] == ["UNKNOWN_ASSET"]
            ws.send_json({"type": "start"})
            msg = ws.receive_json()
            assert msg["code"] == "BAD_STATE"

    def test_unknown_message_type(self, tmp_path):
        client, _ = make_client(tmp_path)
        with client.websocket_connect("/session") as ws:
            ws.send_json({"type": "reticulate"})
            msg = ws.receive_json()
            assert msg["type"] == "error" and msg["code"] == "BAD_MESSAGE"

    def test_save_returns_canonical_and_persists(self, tmp_path):
        client, _ = make_client(tmp_path)
        s = split_scenagram()
        canonical = serialize_document(Document(s))
        with client.websocket_connect("/session") as ws:
            ws.send_json({"type": "load", "document": doc_data(s)})
            recv_until(ws, lambda m: m["type"] == "loaded")
            ws.send_json({"type": "save", "name": "kept"})
            msgs = recv_until(ws, lambda m: m["type"] == "saved")
            assert msgs[-1]["document"] == canonical
        assert client.get("/documents/kept").text == canonical

    def test_two_sessions_are_isolated(self, tmp_path):
        client, clock = make_client(tmp_path)
        s1 = Scenagram(root=Sequence((WaitKey(KeySpec("a")), ShowText("one", 100))))
        s2 = Scenagram(root=Sequence((WaitKey(KeySpec("a")), ShowText("two", 100))))
        with client.websocket_connect("/session") as ws1, client.websocket_connect(
            "/session"
        ) as ws2:
            ws1.send_json({"type": "load", "document": doc_data(s1)})
            recv_until(ws1, lambda m: m["type"] == "loaded")
            ws2.send_json({"type": "load", "document": doc_data(s2)})
            recv_until(ws2, lambda m: m["type"] == "loaded")
            ws1.send_json({"type": "start"})
            recv_until(ws1, lambda m: m["type"] == "state")
            ws2.send_json({"type": "start"})
            recv_until(ws2, lambda m: m["type"] == "state")

            # only session 1 gets the key; session 2 must stay waiting
            ws1.send_json({"type": "key", "key": "a"})
            msgs1 = recv_until(
                ws1,
                lambda m: m["type"] == "event"
                and m["event"]["kind"] == "key_consumed",
            )
            clock.advance(200)
            msgs1 += recv_until(
                ws1, lambda m: m["type"] == "state" and m["status"] == "completed"
            )
            texts1 = [
                e["detail"].get("text")
                for e in events_of(msgs1)
                if e.get("detail", {}).get("block") == "show_text"
            ]
            assert texts1 == ["one", "one"]  # started and finished

            ws2.send_json({"type": "stop"})
            msgs2 = recv_until(
                ws2, lambda m: m["type"] == "state" and m["status"] == "stopped"
            )
            kinds2 = [e["kind"] for e in events_of(msgs2)]
            assert "key_consumed" not in kinds2
            assert not any(
                e.get("detail", {}).get("text") == "one" for e in events_of(msgs2)
            )


class TestStaticUi:
    def test_ui_dir_served_at_root_without_shadowing_api(self, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<title>editor</title>", encoding="utf-8")
        (ui / "app.js").write_text("export {};", encoding="utf-8")
        client = TestClient(create_app(tmp_path / "docs", FakeClock(), ui_dir=ui))

        assert client.get("/").text == "<title>editor</title>"
        assert client.get("/app.js").text == "export {};"
        listing = client.get("/documents")
        assert listing.status_code == 200
        assert listing.json() == {"documents": []}

    def test_no_ui_dir_keeps_root_unrouted(self, tmp_path):
        client, _ = make_client(tmp_path)
        assert client.get("/").status_code == 404
