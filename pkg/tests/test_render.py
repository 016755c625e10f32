"""Renderer driving: callback mapping, console format, stream sanity."""

from __future__ import annotations

import io

import pytest

from scenaprod.engine import InputEvent, TraceEvent, run_script
from scenaprod.model import (
    AssetDecl,
    KeySpec,
    PlaySound,
    Scenagram,
    Sequence,
    ShowImage,
    ShowText,
    Split,
    WaitKey,
)
from scenaprod.render import ConsoleRenderer, Driver, ProtocolError, RecordRenderer, drive


def demo() -> Scenagram:
    return Scenagram(
        root=Sequence(
            (ShowText("Bonjour", 1000), ShowImage("img", 500), PlaySound("snd")),
            Split(
                (
                    Sequence((WaitKey(KeySpec("a")),)),
                    Sequence((WaitKey(KeySpec(None)),)),
                )
            ),
        ),
        assets=(
            AssetDecl("snd", "sound", "a.wav", 200),
            AssetDecl("img", "image", "a.png"),
        ),
    )


def test_record_renderer_logs_every_display_change():
    trace = run_script(demo(), [InputEvent(2000, "a")], 5000)
    rec = RecordRenderer()
    drive(trace.events, rec)
    assert rec.log == [
        (0, "show_text", (), "Bonjour"),
        (1000, "clear", (), None),
        (1000, "show_image", (), "img"),
        (1500, "clear", (), None),
        (1500, "sound_start", (), "snd"),
        (1700, "sound_end", (), "snd"),
        (1700, "wait_begin", (0,), "a"),
        (1700, "wait_begin", (1,), None),
        (2000, "terminal", (), "completed"),
    ]


def test_every_show_gets_a_clear():
    trace = run_script(demo(), [InputEvent(2000, "a")], 5000)
    rec = RecordRenderer()
    drive(trace.events, rec)
    shown = sum(1 for e in rec.log if e[1] in ("show_text", "show_image"))
    cleared = sum(1 for e in rec.log if e[1] == "clear")
    assert shown == cleared


def test_console_line_format():
    out = io.StringIO()
    trace = run_script(
        Scenagram(root=Sequence((ShowText("Bonjour", 1000),))), [], 1000
    )
    drive(trace.events, ConsoleRenderer(out))
    assert out.getvalue() == (
        '0 [] SHOW "Bonjour"\n'
        "1000 [] CLEAR\n"
        "1000 TERMINAL completed\n"
    )


def test_console_paths_and_waits():
    out = io.StringIO()
    trace = run_script(demo(), [InputEvent(2000, "a")], 5000)
    drive(trace.events, ConsoleRenderer(out))
    lines = out.getvalue().splitlines()
    assert "1700 [0] WAIT a" in lines
    assert "1700 [1] WAIT *" in lines
    assert "1500 [] SOUND snd" in lines
    assert "1700 [] SOUND_END snd" in lines
    assert lines[-1] == "2000 TERMINAL completed"


def test_stopped_run_renders_terminal_stopped():
    from scenaprod.engine import Session

    sess = Session.start(demo())
    sess.advance_to(1200)
    sess.stop()
    rec = RecordRenderer()
    drive(sess.trace, rec)
    assert rec.log[-1] == (1200, "terminal", (), "stopped")


class TestStreamSanity:
    def test_finish_without_start(self):
        bad = [
            TraceEvent(0, "block_finished", (), 0, {"block": "show_text", "text": "x"})
        ]
        with pytest.raises(ProtocolError):
            drive(bad, RecordRenderer())

    def test_time_regression(self):
        bad = [
            TraceEvent(10, "block_started", (), 0, {"block": "show_text", "text": "x"}),
            TraceEvent(5, "block_finished", (), 0, {"block": "show_text", "text": "x"}),
        ]
        with pytest.raises(ProtocolError):
            drive(bad, RecordRenderer())

    def test_event_after_terminal(self):
        bad = [
            TraceEvent(0, "scenagram_completed", ()),
            TraceEvent(1, "timeline_spawned", (0,)),
        ]
        with pytest.raises(ProtocolError):
            drive(bad, RecordRenderer())

    def test_double_start_same_slot(self):
        bad = [
            TraceEvent(0, "block_started", (), 0, {"block": "show_text", "text": "x"}),
            TraceEvent(1, "block_started", (), 0, {"block": "show_text", "text": "x"}),
        ]
        with pytest.raises(ProtocolError):
            drive(bad, RecordRenderer())

    def test_unknown_kind(self):
        with pytest.raises(ProtocolError):
            drive([TraceEvent(0, "block_exploded", ())], RecordRenderer())

    def test_incremental_feed_keeps_state(self):
        trace = run_script(demo(), [InputEvent(2000, "a")], 5000)
        rec_all = RecordRenderer()
        drive(trace.events, rec_all)
        rec_parts = RecordRenderer()
        driver = Driver(rec_parts)
        driver.feed(trace.events[:4])
        driver.feed(trace.events[4:])
        assert rec_parts.log == rec_all.log
