"""Discrete-event playback engine over a virtual millisecond clock.

Time is event-relative: nothing happens between completions, and a waiting
timeline may wait forever.  Each spawned branch is an autonomous line; there
is no synchronization between lines, only the shared clock.

Determinism contract, applied identically everywhere ties can occur:
timelines due at the same instant are processed in lexicographic path order,
each one atomically (its block_finished immediately followed by whatever it
does next).  A split emits every timeline_spawned before any child block is
started, children in branch order, depth-first.  Key injection first brings
the clock to the key's timestamp, then broadcasts to the snapshot of
timelines already waiting at that instant (inclusive boundary).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import (
    AssetDecl,
    Block,
    End,
    KeySpec,
    PlaySound,
    Scenagram,
    Sequence,
    ShowImage,
    ShowText,
    Split,
    TimelinePath,
    WaitKey,
    validate,
)

RUNNING = "running"
COMPLETED = "completed"
STOPPED = "stopped"

BLOCK_STARTED = "block_started"
BLOCK_FINISHED = "block_finished"
KEY_CONSUMED = "key_consumed"
TIMELINE_SPAWNED = "timeline_spawned"
SCENAGRAM_COMPLETED = "scenagram_completed"
SCENAGRAM_STOPPED = "scenagram_stopped"

# Phases of one timeline.
IDLE = "idle"
RUNNING_UNTIL = "running_until"
WAITING_SINCE = "waiting_since"
DONE = "done"


class EngineError(Exception):
    """Engine refusal; code is one of INVALID_SCENAGRAM, TIME_REGRESSION,
    STOPPED, ALREADY_TERMINAL."""

    def __init__(self, code: str, message: str) -> None:
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


@dataclass(frozen=True)
class TraceEvent:
    time_ms: int
    kind: str
    path: TimelinePath
    block_index: int | None = None
    detail: dict[str, str | None] | None = None


@dataclass(frozen=True)
class InputEvent:
    time_ms: int
    key: str


@dataclass
class Trace:
    events: list[TraceEvent]
    status: str


@dataclass
class TimelineState:
    path: TimelinePath
    seq: Sequence
    cursor: int = 0
    phase: str = IDLE
    due_ms: int | None = None
    wait_since_ms: int | None = None
    wait_spec: KeySpec | None = None


def block_detail(block: Block) -> dict[str, str | None]:
    """Payload describing a block, carried on its started/finished events."""
    if isinstance(block, ShowText):
        return {"block": "show_text", "text": block.text}
    if isinstance(block, ShowImage):
        return {"block": "show_image", "asset": block.asset_id}
    if isinstance(block, PlaySound):
        return {"block": "play_sound", "asset": block.asset_id}
    if isinstance(block, WaitKey):
        return {"block": "wait_key", "key": block.key.key}
    raise TypeError(f"not a block: {block!r}")


class Session:
    """One playback of one scenagram.  Single-owner, not thread-safe."""

    def __init__(self, scenagram: Scenagram) -> None:
        self.scenagram = scenagram
        self.clock_ms = 0
        self.status = RUNNING
        self.trace: list[TraceEvent] = []
        self.timelines: dict[TimelinePath, TimelineState] = {}
        self._assets: dict[str, AssetDecl] = {a.id: a for a in scenagram.assets}

    @classmethod
    def start(cls, scenagram: Scenagram) -> "Session":
        violations = validate(scenagram)
        if violations:
            first = violations[0]
            raise EngineError(
                "INVALID_SCENAGRAM",
                f"{len(violations)} violation(s), first: "
                f"{first.code} at {first.path}: {first.message}",
            )
        sess = cls(scenagram)
        root = TimelineState(path=(), seq=scenagram.root)
        sess.timelines[()] = root
        sess._activate(root, 0)
        sess._check_completion(0)
        return sess

    # -- internal mechanics -------------------------------------------------

    def _emit(
        self,
        time_ms: int,
        kind: str,
        path: TimelinePath,
        block_index: int | None = None,
        detail: dict[str, str | None] | None = None,
    ) -> None:
        self.trace.append(TraceEvent(time_ms, kind, path, block_index, detail))

    def _duration_of(self, block: Block) -> int:
        if isinstance(block, (ShowText, ShowImage)):
            return block.duration_ms
        assert isinstance(block, PlaySound)
        dur = self._assets[block.asset_id].declared_duration_ms
        assert dur is not None
        return dur

    def _activate(self, tl: TimelineState, t: int) -> None:
        """Start tl's next block, or resolve its terminal, at time t."""
        if tl.cursor < len(tl.seq.items):
            block = tl.seq.items[tl.cursor]
            self._emit(t, BLOCK_STARTED, tl.path, tl.cursor, block_detail(block))
            if isinstance(block, WaitKey):
                tl.phase = WAITING_SINCE
                tl.wait_since_ms = t
                tl.wait_spec = block.key
                tl.due_ms = None
            else:
                tl.phase = RUNNING_UNTIL
                tl.due_ms = t + self._duration_of(block)
                tl.wait_since_ms = None
            return
        term = tl.seq.terminal
        if isinstance(term, End):
            tl.phase = DONE
            tl.due_ms = None
            return
        assert isinstance(term, Split)
        children: list[TimelineState] = []
        for i, branch in enumerate(term.branches):
            child = TimelineState(path=tl.path + (i,), seq=branch)
            self.timelines[child.path] = child
            children.append(child)
            self._emit(t, TIMELINE_SPAWNED, child.path)
        tl.phase = DONE
        tl.due_ms = None
        for child in children:
            self._activate(child, t)

    def _finish_block(self, tl: TimelineState, t: int) -> None:
        block = tl.seq.items[tl.cursor]
        self._emit(t, BLOCK_FINISHED, tl.path, tl.cursor, block_detail(block))
        tl.cursor += 1
        tl.due_ms = None
        tl.wait_since_ms = None
        tl.wait_spec = None
        self._activate(tl, t)

    def _check_completion(self, t: int) -> bool:
        if self.status != RUNNING:
            return True
        if all(tl.phase == DONE for tl in self.timelines.values()):
            self._emit(t, SCENAGRAM_COMPLETED, ())
            self.status = COMPLETED
            return True
        return False

    def _require_running(self, op: str) -> None:
        if self.status == STOPPED:
            raise EngineError("STOPPED", f"{op} after stop")
        if self.status == COMPLETED:
            raise EngineError("ALREADY_TERMINAL", f"{op} after completion")

    # -- public operations --------------------------------------------------

    def advance_to(self, t_ms: int) -> None:
        """Process every internal completion due at or before t_ms."""
        self._require_running("advance_to")
        if t_ms < self.clock_ms:
            raise EngineError(
                "TIME_REGRESSION", f"advance_to {t_ms} before clock {self.clock_ms}"
            )
        while True:
            due = [
                tl
                for tl in self.timelines.values()
                if tl.phase == RUNNING_UNTIL and tl.due_ms is not None
                and tl.due_ms <= t_ms
            ]
            if not due:
                break
            d = min(tl.due_ms for tl in due)  # type: ignore[type-var]
            batch = sorted((tl for tl in due if tl.due_ms == d), key=lambda tl: tl.path)
            self.clock_ms = d
            for tl in batch:
                self._finish_block(tl, d)
            if self._check_completion(d):
                break
        if self.clock_ms < t_ms:
            self.clock_ms = t_ms

    def inject_key(self, ev: InputEvent) -> None:
        """Advance to the key's time, then broadcast it to matching waiters."""
        self._require_running("inject_key")
        if ev.time_ms < self.clock_ms:
            raise EngineError(
                "TIME_REGRESSION",
                f"key at {ev.time_ms} before clock {self.clock_ms}",
            )
        self.advance_to(ev.time_ms)
        if self.status != RUNNING:
            return
        waiters = sorted(
            (
                tl
                for tl in self.timelines.values()
                if tl.phase == WAITING_SINCE
                and tl.wait_since_ms is not None
                and tl.wait_since_ms <= ev.time_ms
                and tl.wait_spec.matches(ev.key)
            ),
            key=lambda tl: tl.path,
        )
        for tl in waiters:
            self._emit(ev.time_ms, KEY_CONSUMED, tl.path, tl.cursor, {"key": ev.key})
            self._finish_block(tl, ev.time_ms)
        self._check_completion(ev.time_ms)

    def stop(self) -> None:
        if self.status != RUNNING:
            raise EngineError("ALREADY_TERMINAL", f"stop while {self.status}")
        self._emit(self.clock_ms, SCENAGRAM_STOPPED, ())
        self.status = STOPPED


def start(scenagram: Scenagram) -> Session:
    return Session.start(scenagram)


def run_script(
    scenagram: Scenagram, inputs: list[InputEvent], horizon_ms: int
) -> Trace:
    """Run one scenagram against a scripted key sequence up to a horizon.

    Inputs must be sorted by time; ties keep list order.  Inputs stamped
    after the horizon are ignored.
    """
    for a, b in zip(inputs, inputs[1:]):
        if b.time_ms < a.time_ms:
            raise ValueError("input events must be sorted by time_ms")
    sess = Session.start(scenagram)
    for ev in inputs:
        if sess.status != RUNNING:
            break
        if ev.time_ms > horizon_ms:
            break
        sess.inject_key(ev)
    if sess.status == RUNNING:
        sess.advance_to(horizon_ms)
    return Trace(events=list(sess.trace), status=sess.status)


# -- canonical text forms ---------------------------------------------------

_DETAIL_KEY_ORDER = ("block", "text", "asset", "key")


def event_to_data(ev: TraceEvent) -> dict:
    """JSON-ready form with a fixed key order; optional fields omitted."""
    data: dict = {"t": ev.time_ms, "kind": ev.kind, "path": list(ev.path)}
    if ev.block_index is not None:
        data["block"] = ev.block_index
    if ev.detail is not None:
        data["detail"] = {
            k: ev.detail[k] for k in _DETAIL_KEY_ORDER if k in ev.detail
        }
    return data


def event_from_data(data: dict) -> TraceEvent:
    return TraceEvent(
        time_ms=data["t"],
        kind=data["kind"],
        path=tuple(data["path"]),
        block_index=data.get("block"),
        detail=data.get("detail"),
    )


def serialize_trace(events: list[TraceEvent]) -> str:
    """One compact JSON object per line, in trace order."""
    return "".join(
        json.dumps(event_to_data(ev), separators=(",", ":"), ensure_ascii=False) + "\n"
        for ev in events
    )


def parse_trace(text: str) -> list[TraceEvent]:
    return [event_from_data(json.loads(line)) for line in text.splitlines() if line]


def serialize_events(inputs: list[InputEvent]) -> str:
    """Canonical key script: a JSON array of {time_ms, key}."""
    data = [{"time_ms": ev.time_ms, "key": ev.key} for ev in inputs]
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def parse_events(text: str) -> list[InputEvent]:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("event script must be a JSON array")
    out = []
    for i, item in enumerate(data):
        if not isinstance(item, dict) or set(item) != {"time_ms", "key"}:
            raise ValueError(f"event script entry {i} must be {{time_ms, key}}")
        t, key = item["time_ms"], item["key"]
        if not isinstance(t, int) or isinstance(t, bool) or t < 0:
            raise ValueError(f"event script entry {i}: bad time_ms")
        if not isinstance(key, str) or not key:
            raise ValueError(f"event script entry {i}: bad key")
        out.append(InputEvent(t, key))
    return out
