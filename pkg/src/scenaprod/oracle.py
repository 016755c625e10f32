"""Reference executor: a naive millisecond tick scan, no event queue.

This walks the virtual clock one millisecond at a time and, at each tick,
asks every line of time whether something falls due.  It is deliberately
dumb and structurally unlike the session engine (flat line records, an
explicit expansion stack, a linear scan per action tick) so the two can
cross-check each other.  The only things shared with the engine are the
value types of the interchange: TraceEvent, InputEvent, Trace.

Ordering rules mirrored from the written contract (not from engine code):
lines acting at one instant go in lexicographic path order, each atomically;
a split announces every spawned line before any child starts, children in
branch order, depth-first; a key broadcast hits the snapshot of lines
already waiting at the key's timestamp, inclusive.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import (
    BLOCK_FINISHED,
    BLOCK_STARTED,
    COMPLETED,
    KEY_CONSUMED,
    RUNNING,
    SCENAGRAM_COMPLETED,
    TIMELINE_SPAWNED,
    InputEvent,
    Trace,
    TraceEvent,
    block_detail,
)
from .model import (
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

_RUN = 1
_WAIT = 2
_DONE = 3


@dataclass
class _Line:
    path: TimelinePath
    seq: Sequence
    cursor: int = 0
    mode: int = _DONE
    due: int = -1
    since: int = -1
    spec: KeySpec | None = None


def oracle_run(
    scenagram: Scenagram, inputs: list[InputEvent], horizon_ms: int
) -> Trace:
    """Tick-scan equivalent of run_script; same trace, same final status."""
    violations = validate(scenagram)
    if violations:
        raise ValueError(f"invalid scenagram: {violations[0]}")
    for a, b in zip(inputs, inputs[1:]):
        if b.time_ms < a.time_ms:
            raise ValueError("input events must be sorted by time_ms")
    if horizon_ms < 0:
        raise ValueError("horizon_ms must be nonnegative")

    durations = {
        a.id: a.declared_duration_ms for a in scenagram.assets if a.kind == "sound"
    }
    trace: list[TraceEvent] = []
    lines: list[_Line] = []

    def emit(
        t: int,
        kind: str,
        path: TimelinePath,
        block: int | None = None,
        detail: dict[str, str | None] | None = None,
    ) -> None:
        trace.append(TraceEvent(t, kind, path, block, detail))

    def open_lines(roots: list[_Line], t: int) -> None:
        # Depth-first: a child fully opens (including nested splits) before
        # its next sibling.  Spawn announcements still precede child starts.
        stack = list(reversed(roots))
        while stack:
            ln = stack.pop()
            if ln.cursor < len(ln.seq.items):
                block = ln.seq.items[ln.cursor]
                emit(t, BLOCK_STARTED, ln.path, ln.cursor, block_detail(block))
                if isinstance(block, WaitKey):
                    ln.mode = _WAIT
                    ln.since = t
                    ln.spec = block.key
                elif isinstance(block, PlaySound):
                    ln.mode = _RUN
                    ln.due = t + durations[block.asset_id]
                else:
                    assert isinstance(block, (ShowText, ShowImage))
                    ln.mode = _RUN
                    ln.due = t + block.duration_ms
                continue
            term = ln.seq.terminal
            if isinstance(term, End):
                ln.mode = _DONE
                continue
            assert isinstance(term, Split)
            kids = []
            for i, branch in enumerate(term.branches):
                kid = _Line(path=ln.path + (i,), seq=branch)
                lines.append(kid)
                emit(t, TIMELINE_SPAWNED, kid.path)
                kids.append(kid)
            ln.mode = _DONE
            stack.extend(reversed(kids))

    def step_line(ln: _Line, t: int) -> None:
        block = ln.seq.items[ln.cursor]
        emit(t, BLOCK_FINISHED, ln.path, ln.cursor, block_detail(block))
        ln.cursor += 1
        ln.spec = None
        open_lines([ln], t)

    def all_done() -> bool:
        return all(ln.mode == _DONE for ln in lines)

    def min_due() -> int | None:
        best: int | None = None
        for ln in lines:
            if ln.mode == _RUN and (best is None or ln.due < best):
                best = ln.due
        return best

    root = _Line(path=(), seq=scenagram.root)
    lines.append(root)
    open_lines([root], 0)
    if all_done():
        emit(0, SCENAGRAM_COMPLETED, ())
        return Trace(events=trace, status=COMPLETED)

    status = RUNNING
    times = [ev.time_ms for ev in inputs]
    n_inputs = len(inputs)
    i = 0
    next_due = min_due()
    t = 0
    while t <= horizon_ms:
        if next_due is not None and t == next_due:
            while True:
                batch = sorted(
                    (ln for ln in lines if ln.mode == _RUN and ln.due == t),
                    key=lambda ln: ln.path,
                )
                if not batch:
                    break
                for ln in batch:
                    step_line(ln, t)
            next_due = min_due()
            if all_done():
                emit(t, SCENAGRAM_COMPLETED, ())
                status = COMPLETED
                break
        while i < n_inputs and times[i] == t:
            ev = inputs[i]
            i += 1
            hit = sorted(
                (
                    ln
                    for ln in lines
                    if ln.mode == _WAIT
                    and ln.since <= t
                    and ln.spec is not None
                    and ln.spec.matches(ev.key)
                ),
                key=lambda ln: ln.path,
            )
            for ln in hit:
                emit(t, KEY_CONSUMED, ln.path, ln.cursor, {"key": ev.key})
                step_line(ln, t)
            if hit:
                next_due = min_due()
                if all_done():
                    emit(t, SCENAGRAM_COMPLETED, ())
                    status = COMPLETED
                    break
        if status != RUNNING:
            break
        if next_due is None and i >= n_inputs:
            # Every line is done or waiting and no key will ever come:
            # nothing can happen for the rest of the horizon.
            break
        t += 1

    return Trace(events=trace, status=status)
