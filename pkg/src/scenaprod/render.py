"""Rendering: map a trace event stream onto display callbacks.

The engine knows nothing about output; a Renderer receives high-level
callbacks (show this text, clear that line, a sound started) and the Driver
translates trace events into those calls, checking stream sanity as it goes.
The console renderer prints one line per callback; the record renderer just
logs, for tests.
"""

from __future__ import annotations

import json
import sys
from typing import IO, Iterable

from .engine import (
    BLOCK_FINISHED,
    BLOCK_STARTED,
    KEY_CONSUMED,
    SCENAGRAM_COMPLETED,
    SCENAGRAM_STOPPED,
    TIMELINE_SPAWNED,
    TraceEvent,
)
from .model import TimelinePath


class ProtocolError(Exception):
    """The event stream violates trace ordering rules."""

    code = "PROTOCOL"


class Renderer:
    """Callback surface; subclasses override what they care about.

    The driver sets now_ms to the current event time before each callback.
    """

    now_ms: int = 0

    def on_show_text(self, path: TimelinePath, text: str) -> None:
        pass

    def on_show_image(self, path: TimelinePath, asset: str) -> None:
        pass

    def on_clear(self, path: TimelinePath) -> None:
        pass

    def on_sound_start(self, path: TimelinePath, asset: str) -> None:
        pass

    def on_sound_end(self, path: TimelinePath, asset: str) -> None:
        pass

    def on_wait_begin(self, path: TimelinePath, key: str | None) -> None:
        pass

    def on_terminal(self, status: str) -> None:
        pass


class Driver:
    """Feeds trace events to a renderer incrementally."""

    def __init__(self, renderer: Renderer) -> None:
        self.renderer = renderer
        self._open: set[tuple[TimelinePath, int]] = set()
        self._last_time = 0
        self._terminal = False

    def feed(self, events: Iterable[TraceEvent]) -> None:
        for ev in events:
            self._one(ev)

    def _one(self, ev: TraceEvent) -> None:
        if self._terminal:
            raise ProtocolError(f"event after terminal: {ev}")
        if ev.time_ms < self._last_time:
            raise ProtocolError(f"time went backwards at {ev}")
        self._last_time = ev.time_ms
        r = self.renderer
        r.now_ms = ev.time_ms
        if ev.kind == BLOCK_STARTED:
            slot = (ev.path, ev.block_index)
            if ev.block_index is None or slot in self._open:
                raise ProtocolError(f"bad block_started: {ev}")
            self._open.add(slot)
            block, detail = self._detail(ev)
            if block == "show_text":
                r.on_show_text(ev.path, detail["text"])
            elif block == "show_image":
                r.on_show_image(ev.path, detail["asset"])
            elif block == "play_sound":
                r.on_sound_start(ev.path, detail["asset"])
            elif block == "wait_key":
                r.on_wait_begin(ev.path, detail.get("key"))
            else:
                raise ProtocolError(f"unknown block kind in {ev}")
        elif ev.kind == BLOCK_FINISHED:
            slot = (ev.path, ev.block_index)
            if slot not in self._open:
                raise ProtocolError(f"block_finished without start: {ev}")
            self._open.discard(slot)
            block, detail = self._detail(ev)
            if block in ("show_text", "show_image"):
                r.on_clear(ev.path)
            elif block == "play_sound":
                r.on_sound_end(ev.path, detail["asset"])
            elif block != "wait_key":
                raise ProtocolError(f"unknown block kind in {ev}")
        elif ev.kind in (SCENAGRAM_COMPLETED, SCENAGRAM_STOPPED):
            self._terminal = True
            status = "completed" if ev.kind == SCENAGRAM_COMPLETED else "stopped"
            r.on_terminal(status)
        elif ev.kind not in (KEY_CONSUMED, TIMELINE_SPAWNED):
            raise ProtocolError(f"unknown event kind: {ev}")

    @staticmethod
    def _detail(ev: TraceEvent) -> tuple[str, dict]:
        if not ev.detail or "block" not in ev.detail:
            raise ProtocolError(f"block event without detail: {ev}")
        return ev.detail["block"], ev.detail


def drive(events: Iterable[TraceEvent], renderer: Renderer) -> None:
    Driver(renderer).feed(events)


def _fmt_path(path: TimelinePath) -> str:
    return "[" + ",".join(str(i) for i in path) + "]"


class ConsoleRenderer(Renderer):
    """One line per callback: time, path, verb, payload."""

    def __init__(self, out: IO[str] | None = None) -> None:
        self.out = out if out is not None else sys.stdout

    def _line(self, path: TimelinePath | None, verb: str, payload: str = "") -> None:
        where = "" if path is None else f" {_fmt_path(path)}"
        tail = f" {payload}" if payload else ""
        print(f"{self.now_ms}{where} {verb}{tail}", file=self.out, flush=True)

    def on_show_text(self, path: TimelinePath, text: str) -> None:
        self._line(path, "SHOW", json.dumps(text, ensure_ascii=False))

    def on_show_image(self, path: TimelinePath, asset: str) -> None:
        self._line(path, "IMAGE", asset)

    def on_clear(self, path: TimelinePath) -> None:
        self._line(path, "CLEAR")

    def on_sound_start(self, path: TimelinePath, asset: str) -> None:
        self._line(path, "SOUND", asset)

    def on_sound_end(self, path: TimelinePath, asset: str) -> None:
        self._line(path, "SOUND_END", asset)

    def on_wait_begin(self, path: TimelinePath, key: str | None) -> None:
        self._line(path, "WAIT", "*" if key is None else key)

    def on_terminal(self, status: str) -> None:
        self._line(None, "TERMINAL", status)


class RecordRenderer(Renderer):
    """Test double: logs (time_ms, verb, path, payload) tuples."""

    def __init__(self) -> None:
        self.log: list[tuple] = []

    def on_show_text(self, path: TimelinePath, text: str) -> None:
        self.log.append((self.now_ms, "show_text", path, text))

    def on_show_image(self, path: TimelinePath, asset: str) -> None:
        self.log.append((self.now_ms, "show_image", path, asset))

    def on_clear(self, path: TimelinePath) -> None:
        self.log.append((self.now_ms, "clear", path, None))

    def on_sound_start(self, path: TimelinePath, asset: str) -> None:
        self.log.append((self.now_ms, "sound_start", path, asset))

    def on_sound_end(self, path: TimelinePath, asset: str) -> None:
        self.log.append((self.now_ms, "sound_end", path, asset))

    def on_wait_begin(self, path: TimelinePath, key: str | None) -> None:
        self.log.append((self.now_ms, "wait_begin", path, key))

    def on_terminal(self, status: str) -> None:
        self.log.append((self.now_ms, "terminal", (), status))
