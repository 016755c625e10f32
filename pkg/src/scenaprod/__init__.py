"""Scenagram authoring and playback toolkit."""

from .docformat import Document, LayoutHints, ParseError, parse_document, serialize_document
from .engine import (
    EngineError,
    InputEvent,
    Session,
    Trace,
    TraceEvent,
    run_script,
    serialize_trace,
    start,
)
from .layout import LayoutGrid, compute_layout
from .model import (
    AssetDecl,
    End,
    KeySpec,
    PlaySound,
    Scenagram,
    Sequence,
    ShowImage,
    ShowText,
    Split,
    Violation,
    WaitKey,
    generate_random,
    leaf_paths,
    resolve_path,
    validate,
)
from .oracle import oracle_run

__all__ = [
    "AssetDecl",
    "Document",
    "End",
    "EngineError",
    "InputEvent",
    "KeySpec",
    "LayoutGrid",
    "LayoutHints",
    "ParseError",
    "PlaySound",
    "Scenagram",
    "Sequence",
    "Session",
    "ShowImage",
    "ShowText",
    "Split",
    "Trace",
    "TraceEvent",
    "Violation",
    "WaitKey",
    "compute_layout",
    "generate_random",
    "leaf_paths",
    "oracle_run",
    "parse_document",
    "resolve_path",
    "run_script",
    "serialize_document",
    "serialize_trace",
    "start",
    "validate",
]
