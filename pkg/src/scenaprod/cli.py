"""Command line front end.

Commands:
  validate PATH          check a document; exit 0 clean, 1 with findings
  run PATH               scripted run, canonical trace to stdout or --trace
  play PATH              live run in the terminal, keys from stdin
  serve                  start the playback service

Exit codes: 0 success, 1 validation findings, 2 I/O or parse errors.
"""

from __future__ import annotations

import argparse
import os
import select
import sys
import time

from .docformat import Document, ParseError, parse_document
from .engine import (
    RUNNING,
    InputEvent,
    Session,
    parse_events,
    run_script,
    serialize_trace,
)
from .render import ConsoleRenderer, Driver
from .service import MonotonicClock, create_app

DEFAULT_PORT = 8400
DEFAULT_HORIZON_MS = 60_000


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _load_document(path: str) -> Document | int:
    """Parsed document, or an exit code; SEMANTIC failures print the report."""
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        return _fail(f"cannot read {path}: {exc}")
    try:
        return parse_document(text)
    except ParseError as exc:
        if exc.code == "SEMANTIC":
            for v in exc.violations:
                print(f"{v.code} {v.path}: {v.message}")
            return 1
        return _fail(f"{path}: {exc.code}: {exc.message}")


def cmd_validate(args: argparse.Namespace) -> int:
    loaded = _load_document(args.path)
    if isinstance(loaded, int):
        return loaded
    print("OK")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    loaded = _load_document(args.path)
    if isinstance(loaded, int):
        return loaded
    inputs: list[InputEvent] = []
    if args.events:
        try:
            inputs = parse_events(open(args.events, encoding="utf-8").read())
        except OSError as exc:
            return _fail(f"cannot read {args.events}: {exc}")
        except ValueError as exc:
            return _fail(f"{args.events}: {exc}")
    trace = run_script(loaded.scenagram, inputs, args.horizon)
    text = serialize_trace(trace.events)
    if args.trace:
        try:
            with open(args.trace, "w", encoding="utf-8") as out:
                out.write(text)
        except OSError as exc:
            return _fail(f"cannot write {args.trace}: {exc}")
    else:
        sys.stdout.write(text)
    return 0


def _map_key(raw: str) -> str:
    if raw in ("\r", "\n"):
        return "Enter"
    if raw == " ":
        return "Space"
    if raw == "\x1b":
        return "Escape"
    return raw


class _KeySource:
    """Polls stdin for keys: raw single chars on a tty, lines when piped."""

    def __init__(self) -> None:
        self.tty = sys.stdin.isatty()
        self.eof = False
        self._restore = None
        if self.tty:
            import termios
            import tty as tty_mod

            fd = sys.stdin.fileno()
            self._restore = (fd, termios.tcgetattr(fd))
            tty_mod.setcbreak(fd)

    def close(self) -> None:
        if self._restore is not None:
            import termios

            fd, attrs = self._restore
            termios.tcsetattr(fd, termios.TCSADRAIN, attrs)

    def poll(self, timeout_s: float) -> str | None:
        if self.eof:
            time.sleep(timeout_s)
            return None
        ready, _, _ = select.select([sys.stdin], [], [], timeout_s)
        if not ready:
            return None
        if self.tty:
            raw = os.read(sys.stdin.fileno(), 1).decode(errors="replace")
            return _map_key(raw) if raw else None
        line = sys.stdin.readline()
        if line == "":
            self.eof = True
            return None
        return "Enter" if line.strip() == "" else line.strip()


def cmd_play(args: argparse.Namespace) -> int:
    loaded = _load_document(args.path)
    if isinstance(loaded, int):
        return loaded
    sess = Session.start(loaded.scenagram)
    driver = Driver(ConsoleRenderer())
    fed = 0

    def sync() -> None:
        nonlocal fed
        driver.feed(sess.trace[fed:])
        fed = len(sess.trace)

    sync()
    clock = MonotonicClock()
    wall0 = clock.now_ms()
    keys = _KeySource()
    interrupted = False
    try:
        while sess.status == RUNNING:
            v = clock.now_ms() - wall0
            if args.max_ms is not None and v >= args.max_ms:
                interrupted = True
                break
            if v > sess.clock_ms:
                sess.advance_to(v)
                sync()
            key = keys.poll(0.02)
            if key is not None and sess.status == RUNNING:
                sess.inject_key(InputEvent(max(clock.now_ms() - wall0, sess.clock_ms), key))
                sync()
    except KeyboardInterrupt:
        interrupted = True
    finally:
        keys.close()
    if interrupted and sess.status == RUNNING:
        sess.stop()
        sync()
        sys.stdout.write(serialize_trace(sess.trace))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    if args.ui is not None and not os.path.isdir(args.ui):
        return _fail(f"--ui directory not found: {args.ui}")
    app = create_app(args.docs, MonotonicClock(), ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="scenaprod")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a document")
    p_validate.add_argument("path")
    p_validate.set_defaults(func=cmd_validate)

    p_run = sub.add_parser("run", help="scripted run, canonical trace out")
    p_run.add_argument("path")
    p_run.add_argument("--events", help="JSON key script: [{time_ms, key}, ...]")
    p_run.add_argument("--horizon", type=int, default=DEFAULT_HORIZON_MS)
    p_run.add_argument("--trace", help="write the trace here instead of stdout")
    p_run.set_defaults(func=cmd_run)

    p_play = sub.add_parser("play", help="live run in the terminal")
    p_play.add_argument("path")
    p_play.add_argument(
        "--max-ms",
        type=int,
        default=None,
        help="stop automatically at this virtual time",
    )
    p_play.set_defaults(func=cmd_play)

    p_serve = sub.add_parser("serve", help="start the playback service")
    p_serve.add_argument(
        "--port",
        type=int,
        default=int(os.environ.get("SCENAPROD_PORT", DEFAULT_PORT)),
    )
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--docs", default="documents")
    p_serve.add_argument(
        "--ui",
        default=None,
        help="serve this directory of static editor files at /",
    )
    p_serve.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
