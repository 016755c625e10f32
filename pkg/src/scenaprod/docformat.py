"""Document text format (.scg.json): strict parse, canonical serialize.

The on-disk form is UTF-8 JSON with a fixed shape.  Parsing is strict:
unknown fields or kinds are schema errors, not warnings.  Serialization is
canonical, with one fixed key order and indentation, so that equal documents
produce byte-identical text and fixtures diff cleanly.

Error codes: SYNTAX (not JSON), SCHEMA (wrong shape), SEMANTIC (parsed but
fails model validation; the report rides on the error).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import (
    IMAGE,
    SOUND,
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
    Terminal,
    Violation,
    WaitKey,
    validate,
)


class ParseError(Exception):
    def __init__(
        self, code: str, message: str, violations: list[Violation] | None = None
    ) -> None:
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.violations = violations or []


@dataclass(frozen=True)
class LayoutHints:
    columns_per_row: int


@dataclass(frozen=True)
class Document:
    scenagram: Scenagram
    layout_hints: LayoutHints | None = None


def _schema(pos: str, message: str) -> ParseError:
    return ParseError("SCHEMA", f"{pos}: {message}")


def _need_dict(value, pos: str, allowed: set[str], required: set[str]) -> dict:
    if not isinstance(value, dict):
        raise _schema(pos, "expected an object")
    unknown = set(value) - allowed
    if unknown:
        raise _schema(pos, f"unknown field(s): {', '.join(sorted(unknown))}")
    missing = required - set(value)
    if missing:
        raise _schema(pos, f"missing field(s): {', '.join(sorted(missing))}")
    return value


def _need_str(value, pos: str) -> str:
    if not isinstance(value, str):
        raise _schema(pos, "expected a string")
    return value


def _need_int(value, pos: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise _schema(pos, "expected an integer")
    return value


def _parse_block(data, pos: str) -> Block:
    if not isinstance(data, dict):
        raise _schema(pos, "expected an object")
    kind = data.get("kind")
    if kind == "show_text":
        _need_dict(data, pos, {"kind", "text", "duration_ms"}, {"text", "duration_ms"})
        return ShowText(
            _need_str(data["text"], f"{pos}.text"),
            _need_int(data["duration_ms"], f"{pos}.duration_ms"),
        )
    if kind == "show_image":
        _need_dict(
            data, pos, {"kind", "asset", "duration_ms"}, {"asset", "duration_ms"}
        )
        return ShowImage(
            _need_str(data["asset"], f"{pos}.asset"),
            _need_int(data["duration_ms"], f"{pos}.duration_ms"),
        )
    if kind == "play_sound":
        _need_dict(data, pos, {"kind", "asset"}, {"asset"})
        return PlaySound(_need_str(data["asset"], f"{pos}.asset"))
    if kind == "wait_key":
        _need_dict(data, pos, {"kind", "key"}, {"key"})
        key = data["key"]
        if key is None:
            return WaitKey(KeySpec(None))
        return WaitKey(KeySpec(_need_str(key, f"{pos}.key")))
    raise _schema(pos, f"unknown block kind {kind!r}")


def _parse_sequence(data, pos: str) -> Sequence:
    _need_dict(data, pos, {"items", "terminal"}, {"items", "terminal"})
    items = data["items"]
    if not isinstance(items, list):
        raise _schema(f"{pos}.items", "expected an array")
    blocks = tuple(
        _parse_block(item, f"{pos}.items[{i}]") for i, item in enumerate(items)
    )
    term = data["terminal"]
    terminal: Terminal
    if term == "end":
        terminal = End()
    elif isinstance(term, dict):
        _need_dict(term, f"{pos}.terminal", {"split"}, {"split"})
        branches = term["split"]
        if not isinstance(branches, list):
            raise _schema(f"{pos}.terminal.split", "expected an array")
        terminal = Split(
            tuple(
                _parse_sequence(b, f"{pos}.terminal.split[{i}]")
                for i, b in enumerate(branches)
            )
        )
    else:
        raise _schema(f"{pos}.terminal", 'expected "end" or {"split": [...]}')
    return Sequence(blocks, terminal)


def _parse_asset(data, pos: str) -> AssetDecl:
    _need_dict(
        data, pos, {"id", "kind", "uri", "duration_ms"}, {"id", "kind", "uri"}
    )
    duration = None
    if "duration_ms" in data:
        duration = _need_int(data["duration_ms"], f"{pos}.duration_ms")
    return AssetDecl(
        _need_str(data["id"], f"{pos}.id"),
        _need_str(data["kind"], f"{pos}.kind"),
        _need_str(data["uri"], f"{pos}.uri"),
        duration,
    )


def parse_document_data(data) -> Document:
    """Build a Document from decoded JSON; SCHEMA/SEMANTIC on bad input."""
    _need_dict(
        data,
        "document",
        {"version", "title", "assets", "root", "layout_hints"},
        {"version", "assets", "root"},
    )
    version = _need_int(data["version"], "version")
    title = _need_str(data.get("title", ""), "title")
    assets_data = data["assets"]
    if not isinstance(assets_data, list):
        raise _schema("assets", "expected an array")
    assets = tuple(
        _parse_asset(item, f"assets[{i}]") for i, item in enumerate(assets_data)
    )
    root = _parse_sequence(data["root"], "root")
    hints = None
    if "layout_hints" in data:
        hint_data = _need_dict(
            data["layout_hints"],
            "layout_hints",
            {"columns_per_row"},
            {"columns_per_row"},
        )
        cols = _need_int(hint_data["columns_per_row"], "layout_hints.columns_per_row")
        if cols < 1:
            raise _schema("layout_hints.columns_per_row", "must be at least 1")
        hints = LayoutHints(cols)

    scenagram = Scenagram(root=root, assets=assets, title=title, version=version)
    violations = validate(scenagram)
    if violations:
        raise ParseError(
            "SEMANTIC",
            f"{len(violations)} validation violation(s)",
            violations,
        )
    return Document(scenagram, hints)


def parse_document(text: str) -> Document:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("SYNTAX", f"not valid JSON: {exc}") from exc
    return parse_document_data(data)


def _block_data(block: Block) -> dict:
    if isinstance(block, ShowText):
        return {"kind": "show_text", "text": block.text, "duration_ms": block.duration_ms}
    if isinstance(block, ShowImage):
        return {
            "kind": "show_image",
            "asset": block.asset_id,
            "duration_ms": block.duration_ms,
        }
    if isinstance(block, PlaySound):
        return {"kind": "play_sound", "asset": block.asset_id}
    assert isinstance(block, WaitKey)
    return {"kind": "wait_key", "key": block.key.key}


def _sequence_data(seq: Sequence) -> dict:
    terminal: object
    if isinstance(seq.terminal, End):
        terminal = "end"
    else:
        terminal = {"split": [_sequence_data(b) for b in seq.terminal.branches]}
    return {"items": [_block_data(b) for b in seq.items], "terminal": terminal}


def _asset_data(asset: AssetDecl) -> dict:
    data = {"id": asset.id, "kind": asset.kind, "uri": asset.uri}
    if asset.declared_duration_ms is not None:
        data["duration_ms"] = asset.declared_duration_ms
    return data


def document_to_data(doc: Document) -> dict:
    s = doc.scenagram
    data = {
        "version": s.version,
        "title": s.title,
        "assets": [_asset_data(a) for a in s.assets],
        "root": _sequence_data(s.root),
    }
    if doc.layout_hints is not None:
        data["layout_hints"] = {"columns_per_row": doc.layout_hints.columns_per_row}
    return data


def serialize_document(doc: Document) -> str:
    """Canonical text: fixed key order, 2-space indent, trailing newline."""
    return json.dumps(document_to_data(doc), indent=2, ensure_ascii=False) + "\n"
